#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "colearn/errors.hpp"

namespace colearn::ad {

struct Node {
    std::vector<std::size_t> shape;
    std::vector<double> data;
    std::vector<double> grad;  // allocated iff requires_grad
    bool requires_grad = false;

    std::size_t size() const { return data.size(); }
};

// Value-semantics handle on a node of the computation graph.
class Tensor {
  public:
    Tensor() = default;

    static Tensor leaf(std::vector<std::size_t> shape, std::vector<double> data,
                       bool requires_grad = false);
    static Tensor zeros(std::vector<std::size_t> shape, bool requires_grad = false);
    static Tensor scalar(double v);

    bool valid() const { return node_ != nullptr; }
    const std::vector<std::size_t>& shape() const { return node_->shape; }
    std::vector<double>& data() { return node_->data; }
    const std::vector<double>& data() const { return node_->data; }
    std::vector<double>& grad() { return node_->grad; }
    const std::vector<double>& grad() const { return node_->grad; }
    bool requires_grad() const { return node_->requires_grad; }
    std::size_t size() const { return node_->size(); }

    std::size_t rows() const;
    std::size_t cols() const;
    bool is_scalar() const { return node_->size() == 1; }
    double item() const;

    bool all_finite() const;
    void zero_grad();

    Node* node() const { return node_.get(); }

  private:
    friend class Tape;
    explicit Tensor(std::shared_ptr<Node> n) : node_(std::move(n)) {}
    std::shared_ptr<Node> node_;
};

// Define-by-run tape. Rebuilt for every forward pass; backward replays the
// recorded rules in reverse. With grad disabled, ops compute values only.
class Tape {
  public:
    bool grad_enabled = true;

    Tensor matmul(const Tensor& a, const Tensor& b);
    Tensor transpose(const Tensor& a);

    Tensor add(const Tensor& a, const Tensor& b);
    Tensor sub(const Tensor& a, const Tensor& b);
    Tensor mul(const Tensor& a, const Tensor& b);
    Tensor scale(const Tensor& a, double c);
    Tensor add_scalar(const Tensor& a, double c);
    Tensor exp(const Tensor& a);
    Tensor log(const Tensor& a);
    // log(max(x, eps)); zero gradient on the clamped entries.
    Tensor log_clamped(const Tensor& a, double eps);
    Tensor relu(const Tensor& a);

    Tensor sum(const Tensor& a);
    Tensor mean(const Tensor& a);
    Tensor sum_axis(const Tensor& a, std::size_t axis);
    Tensor mean_axis(const Tensor& a, std::size_t axis);

    // mat[b x n] + row[n], broadcast over rows (bias add).
    Tensor add_rowvec(const Tensor& mat, const Tensor& row);

    Tensor l2_normalize_rows(const Tensor& a);
    Tensor log_softmax_rows(const Tensor& a);
    Tensor concat_rows(const Tensor& a, const Tensor& b);
    // out[i][j] = squared Euclidean distance of rows i and j.
    Tensor pairwise_sqdist(const Tensor& a);

    void backward(const Tensor& loss);
    void clear() {
        ops_.clear();
        outputs_.clear();
    }
    std::size_t num_recorded() const { return ops_.size(); }

  private:
    Tensor make(std::vector<std::size_t> shape, bool requires_grad);
    void record(std::function<void()> fn) { ops_.push_back(std::move(fn)); }

    std::vector<std::function<void()>> ops_;
    std::vector<std::shared_ptr<Node>> outputs_;
};

// Plain accumulating GEMM kernels used by matmul and its backward rules.
void gemm_nn(double* c, const double* a, const double* b, std::size_t m, std::size_t k,
             std::size_t n);
void gemm_nt(double* c, const double* a, const double* b, std::size_t m, std::size_t k,
             std::size_t n);
void gemm_tn(double* c, const double* a, const double* b, std::size_t m, std::size_t k,
             std::size_t n);

}  // namespace colearn::ad
