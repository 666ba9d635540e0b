#include "colearn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace colearn::ad {

namespace {

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape())
        throw DimensionError(std::string(op) + ": operand shapes differ");
}

}  // namespace

Tensor Tensor::leaf(std::vector<std::size_t> shape, std::vector<double> data,
                    bool requires_grad) {
    if (shape_numel(shape) != data.size())
        throw DimensionError("leaf: shape does not match data length");
    auto n = std::make_shared<Node>();
    n->shape = std::move(shape);
    n->data = std::move(data);
    n->requires_grad = requires_grad;
    if (requires_grad) n->grad.assign(n->data.size(), 0.0);
    return Tensor(std::move(n));
}

Tensor Tensor::zeros(std::vector<std::size_t> shape, bool requires_grad) {
    std::vector<double> data(shape_numel(shape), 0.0);
    return leaf(std::move(shape), std::move(data), requires_grad);
}

Tensor Tensor::scalar(double v) { return leaf({1}, {v}, false); }

std::size_t Tensor::rows() const {
    if (node_->shape.size() != 2) throw DimensionError("rows: tensor is not 2-D");
    return node_->shape[0];
}

std::size_t Tensor::cols() const {
    if (node_->shape.size() != 2) throw DimensionError("cols: tensor is not 2-D");
    return node_->shape[1];
}

double Tensor::item() const {
    if (node_->size() != 1) throw DimensionError("item: tensor is not scalar");
    return node_->data[0];
}

bool Tensor::all_finite() const {
    for (double v : node_->data)
        if (!std::isfinite(v)) return false;
    return true;
}

void Tensor::zero_grad() {
    if (node_->requires_grad) std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

Tensor Tape::make(std::vector<std::size_t> shape, bool requires_grad) {
    auto n = std::make_shared<Node>();
    n->shape = std::move(shape);
    n->data.assign(shape_numel(n->shape), 0.0);
    n->requires_grad = requires_grad && grad_enabled;
    if (n->requires_grad) {
        n->grad.assign(n->data.size(), 0.0);
        outputs_.push_back(n);
    }
    return Tensor(std::move(n));
}

void gemm_nn(double* c, const double* a, const double* b, std::size_t m, std::size_t k,
             std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            const double* brow = b + p * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

// c[m x n] += a[m x k] * b[n x k]^T
void gemm_nt(double* c, const double* a, const double* b, std::size_t m, std::size_t k,
             std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* brow = b + j * k;
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
            crow[j] += acc;
        }
    }
}

// c[m x n] += a[k x m]^T * b[k x n]
void gemm_tn(double* c, const double* a, const double* b, std::size_t m, std::size_t k,
             std::size_t n) {
    for (std::size_t p = 0; p < k; ++p) {
        const double* arow = a + p * m;
        const double* brow = b + p * n;
        for (std::size_t i = 0; i < m; ++i) {
            const double av = arow[i];
            double* crow = c + i * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

Tensor Tape::matmul(const Tensor& a, const Tensor& b) {
    if (a.shape().size() != 2 || b.shape().size() != 2)
        throw DimensionError("matmul: operands must be 2-D");
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    if (b.rows() != k) throw DimensionError("matmul: inner dimensions disagree");
    Tensor out = make({m, n}, a.requires_grad() || b.requires_grad());
    gemm_nn(out.data().data(), a.data().data(), b.data().data(), m, k, n);
    if (out.requires_grad()) {
        auto an = a.node_, bn = b.node_, on = out.node_;
        record([an, bn, on, m, k, n] {
            if (an->requires_grad)
                gemm_nt(an->grad.data(), on->grad.data(), bn->data.data(), m, n, k);
            if (bn->requires_grad)
                gemm_tn(bn->grad.data(), an->data.data(), on->grad.data(), k, m, n);
        });
    }
    return out;
}

Tensor Tape::transpose(const Tensor& a) {
    const std::size_t m = a.rows(), n = a.cols();
    Tensor out = make({n, m}, a.requires_grad());
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out.data()[j * m + i] = a.data()[i * n + j];
    if (out.requires_grad()) {
        auto an = a.node_, on = out.node_;
        record([an, on, m, n] {
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    an->grad[i * n + j] += on->grad[j * m + i];
        });
    }
    return out;
}

Tensor Tape::add(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "add");
    Tensor out = make(a.shape(), a.requires_grad() || b.requires_grad());
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = a.data()[i] + b.data()[i];
    if (out.requires_grad()) {
        auto an = a.node_, bn = b.node_, on = out.node_;
        record([an, bn, on] {
            if (an->requires_grad)
                for (std::size_t i = 0; i < on->size(); ++i) an->grad[i] += on->grad[i];
            if (bn->requires_grad)
                for (std::size_t i = 0; i < on->size(); ++i) bn->grad[i] += on->grad[i];
        });
    }
    return out;
}

Tensor Tape::sub(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "sub");
    Tensor out = make(a.shape(), a.requires_grad() || b.requires_grad());
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = a.data()[i] - b.data()[i];
    if (out.requires_grad()) {
        auto an = a.node_, bn = b.node_, on = out.node_;
        record([an, bn, on] {
            if (an->requires_grad)
                for (std::size_t i = 0; i < on->size(); ++i) an->grad[i] += on->grad[i];
            if (bn->requires_grad)
                for (std::size_t i = 0; i < on->size(); ++i) bn->grad[i] -= on->grad[i];
        });
    }
    return out;
}

Tensor Tape::mul(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "mul");
    Tensor out = make(a.shape(), a.requires_grad() || b.requires_grad());
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = a.data()[i] * b.data()[i];
    if (out.requires_grad()) {
        auto an = a.node_, bn = b.node_, on = out.node_;
        record([an, bn, on] {
            if (an->requires_grad)
                for (std::size_t i = 0; i < on->size(); ++i)
                    an->grad[i] += on->grad[i] * bn->data[i];
            if (bn->requires_grad)
                for (std::size_t i = 0; i < on->size(); ++i)
                    bn->grad[i] += on->grad[i] * an->data[i];
        });
    }
    return out;
}

Tensor Tape::scale(const Tensor& a, double c) {
    Tensor out = make(a.shape(), a.requires_grad());
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = a.data()[i] * c;
    if (out.requires_grad()) {
        auto an = a.node_, on = out.node_;
        record([an, on, c] {
            for (std::size_t i = 0; i < on->size(); ++i) an->grad[i] += on->grad[i] * c;
        });
    }
    return out;
}

Tensor Tape::add_scalar(const Tensor& a, double c) {
    Tensor out = make(a.shape(), a.requires_grad());
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = a.data()[i] + c;
    if (out.requires_grad()) {
        auto an = a.node_, on = out.node_;
        record([an, on] {
            for (std::size_t i = 0; i < on->size(); ++i) an->grad[i] += on->grad[i];
        });
    }
    return out;
}

Tensor Tape::exp(const Tensor& a) {
    Tensor out = make(a.shape(), a.requires_grad());
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = std::exp(a.data()[i]);
    if (out.requires_grad()) {
        auto an = a.node_, on = out.node_;
        record([an, on] {
            for (std::size_t i = 0; i < on->size(); ++i)
                an->grad[i] += on->grad[i] * on->data[i];
        });
    }
    return out;
}

Tensor Tape::log(const Tensor& a) {
    Tensor out = make(a.shape(), a.requires_grad());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (a.data()[i] <= 0.0) throw DomainError("log: non-positive input");
        out.data()[i] = std::log(a.data()[i]);
    }
    if (out.requires_grad()) {
        auto an = a.node_, on = out.node_;
        record([an, on] {
            for (std::size_t i = 0; i < on->size(); ++i)
                an->grad[i] += on->grad[i] / an->data[i];
        });
    }
    return out;
}

Tensor Tape::log_clamped(const Tensor& a, double eps) {
    Tensor out = make(a.shape(), a.requires_grad());
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = std::log(std::max(a.data()[i], eps));
    if (out.requires_grad()) {
        auto an = a.node_, on = out.node_;
        record([an, on, eps] {
            for (std::size_t i = 0; i < on->size(); ++i)
                if (an->data[i] > eps) an->grad[i] += on->grad[i] / an->data[i];
        });
    }
    return out;
}

Tensor Tape::relu(const Tensor& a) {
    Tensor out = make(a.shape(), a.requires_grad());
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] = a.data()[i] > 0.0 ? a.data()[i] : 0.0;
    if (out.requires_grad()) {
        auto an = a.node_, on = out.node_;
        record([an, on] {
            // Subgradient at exactly 0 is 0.
            for (std::size_t i = 0; i < on->size(); ++i)
                if (an->data[i] > 0.0) an->grad[i] += on->grad[i];
        });
    }
    return out;
}

Tensor Tape::sum(const Tensor& a) {
    Tensor out = make({1}, a.requires_grad());
    double acc = 0.0;
    for (double v : a.data()) acc += v;
    out.data()[0] = acc;
    if (out.requires_grad()) {
        auto an = a.node_, on = out.node_;
        record([an, on] {
            for (std::size_t i = 0; i < an->size(); ++i) an->grad[i] += on->grad[0];
        });
    }
    return out;
}

Tensor Tape::mean(const Tensor& a) {
    if (a.size() == 0) throw DimensionError("mean: empty tensor");
    return scale(sum(a), 1.0 / static_cast<double>(a.size()));
}

Tensor Tape::sum_axis(const Tensor& a, std::size_t axis) {
    if (a.shape().size() != 2) throw DimensionError("sum_axis: tensor is not 2-D");
    if (axis > 1) throw DimensionError("sum_axis: invalid axis");
    const std::size_t m = a.rows(), n = a.cols();
    if (axis == 0) {
        Tensor out = make({n}, a.requires_grad());
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) out.data()[j] += a.data()[i * n + j];
        if (out.requires_grad()) {
            auto an = a.node_, on = out.node_;
            record([an, on, m, n] {
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < n; ++j) an->grad[i * n + j] += on->grad[j];
            });
        }
        return out;
    }
    Tensor out = make({m}, a.requires_grad());
    for (std::size_t i = 0; i < m; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += a.data()[i * n + j];
        out.data()[i] = acc;
    }
    if (out.requires_grad()) {
        auto an = a.node_, on = out.node_;
        record([an, on, m, n] {
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) an->grad[i * n + j] += on->grad[i];
        });
    }
    return out;
}

Tensor Tape::mean_axis(const Tensor& a, std::size_t axis) {
    const double count = static_cast<double>(axis == 0 ? a.rows() : a.cols());
    return scale(sum_axis(a, axis), 1.0 / count);
}

Tensor Tape::add_rowvec(const Tensor& mat, const Tensor& row) {
    const std::size_t m = mat.rows(), n = mat.cols();
    if (row.shape().size() != 1 || row.size() != n)
        throw DimensionError("add_rowvec: row length does not match columns");
    Tensor out = make({m, n}, mat.requires_grad() || row.requires_grad());
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out.data()[i * n + j] = mat.data()[i * n + j] + row.data()[j];
    if (out.requires_grad()) {
        auto mn = mat.node_, rn = row.node_, on = out.node_;
        record([mn, rn, on, m, n] {
            if (mn->requires_grad)
                for (std::size_t i = 0; i < m * n; ++i) mn->grad[i] += on->grad[i];
            if (rn->requires_grad)
                for (std::size_t i = 0; i < m; ++i)
                    for (std::size_t j = 0; j < n; ++j) rn->grad[j] += on->grad[i * n + j];
        });
    }
    return out;
}

Tensor Tape::l2_normalize_rows(const Tensor& a) {
    const std::size_t m = a.rows(), n = a.cols();
    Tensor out = make({m, n}, a.requires_grad());
    std::vector<double> norms(m);
    for (std::size_t i = 0; i < m; ++i) {
        double sq = 0.0;
        for (std::size_t j = 0; j < n; ++j) sq += a.data()[i * n + j] * a.data()[i * n + j];
        const double norm = std::sqrt(sq);
        if (norm <= 1e-12)
            throw DomainError("l2_normalize: row " + std::to_string(i) + " has near-zero norm");
        norms[i] = norm;
        for (std::size_t j = 0; j < n; ++j) out.data()[i * n + j] = a.data()[i * n + j] / norm;
    }
    if (out.requires_grad()) {
        auto an = a.node_, on = out.node_;
        record([an, on, norms, m, n] {
            for (std::size_t i = 0; i < m; ++i) {
                double dot = 0.0;
                for (std::size_t j = 0; j < n; ++j)
                    dot += on->grad[i * n + j] * on->data[i * n + j];
                for (std::size_t j = 0; j < n; ++j)
                    an->grad[i * n + j] +=
                        (on->grad[i * n + j] - dot * on->data[i * n + j]) / norms[i];
            }
        });
    }
    return out;
}

Tensor Tape::log_softmax_rows(const Tensor& a) {
    const std::size_t m = a.rows(), n = a.cols();
    Tensor out = make({m, n}, a.requires_grad());
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = a.data().data() + i * n;
        double mx = row[0];
        for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, row[j]);
        double lse = 0.0;
        for (std::size_t j = 0; j < n; ++j) lse += std::exp(row[j] - mx);
        lse = mx + std::log(lse);
        for (std::size_t j = 0; j < n; ++j) out.data()[i * n + j] = row[j] - lse;
    }
    if (out.requires_grad()) {
        auto an = a.node_, on = out.node_;
        record([an, on, m, n] {
            for (std::size_t i = 0; i < m; ++i) {
                double gsum = 0.0;
                for (std::size_t j = 0; j < n; ++j) gsum += on->grad[i * n + j];
                for (std::size_t j = 0; j < n; ++j)
                    an->grad[i * n + j] +=
                        on->grad[i * n + j] - std::exp(on->data[i * n + j]) * gsum;
            }
        });
    }
    return out;
}

Tensor Tape::concat_rows(const Tensor& a, const Tensor& b) {
    const std::size_t n = a.cols();
    if (b.cols() != n) throw DimensionError("concat_rows: column counts differ");
    const std::size_t ma = a.rows(), mb = b.rows();
    Tensor out = make({ma + mb, n}, a.requires_grad() || b.requires_grad());
    std::copy(a.data().begin(), a.data().end(), out.data().begin());
    std::copy(b.data().begin(), b.data().end(), out.data().begin() + ma * n);
    if (out.requires_grad()) {
        auto an = a.node_, bn = b.node_, on = out.node_;
        record([an, bn, on, ma, mb, n] {
            if (an->requires_grad)
                for (std::size_t i = 0; i < ma * n; ++i) an->grad[i] += on->grad[i];
            if (bn->requires_grad)
                for (std::size_t i = 0; i < mb * n; ++i) bn->grad[i] += on->grad[ma * n + i];
        });
    }
    return out;
}

Tensor Tape::pairwise_sqdist(const Tensor& a) {
    const std::size_t m = a.rows(), n = a.cols();
    Tensor out = make({m, m}, a.requires_grad());
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            double sq = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const double d = a.data()[i * n + k] - a.data()[j * n + k];
                sq += d * d;
            }
            out.data()[i * m + j] = sq;
            out.data()[j * m + i] = sq;
        }
    if (out.requires_grad()) {
        auto an = a.node_, on = out.node_;
        record([an, on, m, n] {
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j) {
                    if (i == j) continue;
                    const double g = on->grad[i * m + j] + on->grad[j * m + i];
                    if (g == 0.0) continue;
                    for (std::size_t k = 0; k < n; ++k) {
                        const double d = an->data[i * n + k] - an->data[j * n + k];
                        // d(d2_ij)/dx_i = 2(x_i - x_j); the two ordered visits
                        // of each unordered pair supply the factor 2.
                        an->grad[i * n + k] += g * d;
                        an->grad[j * n + k] -= g * d;
                    }
                }
        });
    }
    return out;
}

void Tape::backward(const Tensor& loss) {
    if (!loss.is_scalar()) throw DimensionError("backward: loss must be scalar");
    if (!loss.requires_grad())
        throw DimensionError("backward: loss does not require grad");
    // Intermediate grads are scratch per backward pass; only leaf grads
    // accumulate across repeated calls.
    for (auto& n : outputs_) std::fill(n->grad.begin(), n->grad.end(), 0.0);
    loss.node()->grad[0] = 1.0;
    for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) (*it)();
}

}  // namespace colearn::ad
