#include "colearn/losses.hpp"

#include <cmath>
#include <string>

namespace colearn::losses {

using ad::Tape;
using ad::Tensor;

namespace {

Tensor reduce_batch(Tape& tape, const Tensor& per_sample, Reduction reduction) {
    return reduction == Reduction::mean ? tape.mean(per_sample) : tape.sum(per_sample);
}

Tensor identity_mask(std::size_t n) {
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 1.0;
    return Tensor::leaf({n, n}, std::move(d));
}

Tensor offdiag_mask(std::size_t n) {
    std::vector<double> d(n * n, 1.0);
    for (std::size_t i = 0; i < n; ++i) d[i * n + i] = 0.0;
    return Tensor::leaf({n, n}, std::move(d));
}

// n x 2n selector with ones at (i, i + offset).
Tensor half_selector(std::size_t n, std::size_t offset) {
    std::vector<double> d(n * 2 * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) d[i * 2 * n + i + offset] = 1.0;
    return Tensor::leaf({n, 2 * n}, std::move(d));
}

}  // namespace

Tensor cross_entropy_probs(Tape& tape, const Tensor& onehot, const Tensor& probs,
                           Reduction reduction) {
    if (onehot.shape() != probs.shape())
        throw DimensionError("cross_entropy: label and prediction shapes differ");
    Tensor per_sample = tape.sum_axis(tape.mul(onehot, tape.log_clamped(probs, 1e-12)), 1);
    return tape.scale(reduce_batch(tape, per_sample, reduction), -1.0);
}

Tensor cross_entropy_logits(Tape& tape, const Tensor& onehot, const Tensor& logits,
                            Reduction reduction) {
    if (onehot.shape() != logits.shape())
        throw DimensionError("cross_entropy: label and logit shapes differ");
    Tensor per_sample = tape.sum_axis(tape.mul(onehot, tape.log_softmax_rows(logits)), 1);
    return tape.scale(reduce_batch(tape, per_sample, reduction), -1.0);
}

MixupDraw draw_mixup(std::size_t batch, double alpha, bool per_sample, Rng& rng) {
    if (batch < 2) throw ParameterError("mixup: batch size must be >= 2");
    if (alpha <= 0.0) throw ParameterError("mixup: alpha must be positive");
    MixupDraw draw;
    const std::size_t n_lambdas = per_sample ? batch : 1;
    for (std::size_t i = 0; i < n_lambdas; ++i)
        draw.lambdas.push_back(rng.beta(alpha, alpha));
    draw.permutation = rng.permutation(batch);
    return draw;
}

void apply_mixup(const MixupDraw& draw, std::size_t batch, std::size_t dim,
                 const std::vector<double>& x, std::vector<double>& x_mixed) {
    x_mixed.resize(batch * dim);
    for (std::size_t i = 0; i < batch; ++i) {
        const double lam = draw.lambda_for(i);
        const std::size_t j = draw.permutation[i];
        for (std::size_t k = 0; k < dim; ++k)
            x_mixed[i * dim + k] = lam * x[i * dim + k] + (1.0 - lam) * x[j * dim + k];
    }
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw DimensionError("cosine_similarity: length mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    na = std::sqrt(na);
    nb = std::sqrt(nb);
    if (na <= 1e-12 || nb <= 1e-12)
        throw DomainError("cosine_similarity: near-zero vector");
    return dot / (na * nb);
}

double similarity_metric(double d, double sigma) {
    if (d < 0.0) throw ParameterError("similarity_metric: distance must be nonnegative");
    if (sigma <= 0.0) throw ParameterError("similarity_metric: sigma must be positive");
    return std::exp(-d * d / (2.0 * sigma * sigma));
}

Tensor intrinsic_loss(Tape& tape, const Tensor& v2, const Tensor& v3, const LossConfig& cfg) {
    if (cfg.tau <= 0.0) throw ParameterError("intrinsic_loss: tau must be positive");
    const std::size_t n = v2.rows();
    if (v3.rows() != n || v3.cols() != v2.cols())
        throw DimensionError("intrinsic_loss: projection shapes differ");
    if (n < 2) throw ParameterError("intrinsic_loss: batch size must be >= 2");

    Tensor vn = tape.l2_normalize_rows(tape.concat_rows(v2, v3));  // 2n x d
    Tensor sims = tape.scale(tape.matmul(vn, tape.transpose(vn)), 1.0 / cfg.tau);
    Tensor expo = tape.exp(sims);  // 2n x 2n

    Tensor first = half_selector(n, 0);
    Tensor second = half_selector(n, n);
    // both views of sample i
    std::vector<double> both(n * 2 * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        both[i * 2 * n + i] = 1.0;
        both[i * 2 * n + n + i] = 1.0;
    }
    Tensor views = Tensor::leaf({n, 2 * n}, std::move(both));
    Tensor eye = identity_mask(n);

    // blocks[i][j] = sum over the four (view of i, view of j) exp terms
    Tensor blocks = tape.matmul(tape.matmul(views, expo), tape.transpose(views));
    Tensor denom = tape.sub(tape.sum_axis(blocks, 1),
                            tape.sum_axis(tape.mul(blocks, eye), 1));  // j != i
    if (cfg.include_positive_in_denominator) {
        Tensor cross = tape.matmul(tape.matmul(first, expo), tape.transpose(second));
        denom = tape.add(denom, tape.sum_axis(tape.mul(cross, eye), 1));
    }
    // log of the numerator is just the positive-pair similarity over tau
    Tensor cross_sims = tape.matmul(tape.matmul(first, sims), tape.transpose(second));
    Tensor pos = tape.sum_axis(tape.mul(cross_sims, eye), 1);
    Tensor ell = tape.sub(tape.log(denom), pos);
    // ell(v2, v3) == ell(v3, v2): numerator and denominator are symmetric.
    return tape.scale(reduce_batch(tape, ell, cfg.reduction), 2.0);
}

Tensor structural_loss(Tape& tape, const Tensor& v2, const Tensor& y_pred,
                       const LossConfig& cfg) {
    const std::size_t n = v2.rows();
    if (y_pred.rows() != n) throw DimensionError("structural_loss: row counts differ");
    if (n < 2) throw ParameterError("structural_loss: batch size must be >= 2");
    const double coeff = -1.0 / (2.0 * cfg.sigma * cfg.sigma);

    Tensor log_p = tape.scale(tape.pairwise_sqdist(tape.l2_normalize_rows(v2)), coeff);
    Tensor p = tape.exp(log_p);
    Tensor q = tape.exp(tape.scale(tape.pairwise_sqdist(y_pred), coeff));
    Tensor log_q = tape.log_clamped(q, 1e-12);

    Tensor term = tape.mul(tape.mul(p, tape.sub(log_p, log_q)), offdiag_mask(n));
    Tensor total = tape.sum(term);
    if (cfg.reduction == Reduction::mean)
        total = tape.scale(total, 1.0 / static_cast<double>(n * (n - 1)));
    return total;
}

TotalLoss method_loss(Tape& tape, Method method, const model::BatchViews& views,
                      const model::ModelParams& params, const LossConfig& cfg,
                      const MixupDraw* draw) {
    const std::size_t b = views.batch, d = views.input_dim, c = views.num_classes;
    Tensor onehot = Tensor::leaf({b, c}, views.labels_onehot);
    Tensor x1 = Tensor::leaf({b, d}, views.weak);

    const bool needs_mixup = method == Method::colearning || method == Method::ce_mixup;
    const bool needs_projections =
        method != Method::standard_ce && method != Method::ce_mixup;
    const bool needs_structural = method == Method::colearning ||
                                  method == Method::colearning_no_mixup ||
                                  method == Method::weighted_sup;

    // Shared weak-view representation, built at most once.
    Tensor u1;
    auto weak_repr = [&]() -> const Tensor& {
        if (!u1.valid()) u1 = model::encode(tape, x1, params);
        return u1;
    };

    Tensor l_sup;
    if (needs_mixup) {
        if (draw == nullptr) throw ParameterError("method_loss: mixup draw required");
        std::vector<double> x_mixed, y_mixed;
        apply_mixup(*draw, b, d, views.weak, x_mixed);
        apply_mixup(*draw, b, c, views.labels_onehot, y_mixed);
        Tensor xbar = Tensor::leaf({b, d}, std::move(x_mixed));
        Tensor ybar = Tensor::leaf({b, c}, std::move(y_mixed));
        l_sup = cross_entropy_logits(
            tape, ybar, model::classify_logits(tape, model::encode(tape, xbar, params), params),
            cfg.reduction);
    } else {
        l_sup = cross_entropy_logits(
            tape, onehot, model::classify_logits(tape, weak_repr(), params), cfg.reduction);
        if (method == Method::weighted_sup) l_sup = tape.scale(l_sup, cfg.sup_weight);
    }

    TotalLoss out;
    out.values.l_sup = l_sup.item();
    Tensor total = l_sup;

    if (needs_projections) {
        if (!views.has_strong())
            throw ParameterError("method_loss: strong views required for this method");
        Tensor x2 = Tensor::leaf({b, d}, views.strong1);
        Tensor x3 = Tensor::leaf({b, d}, views.strong2);
        Tensor v2 = model::project(tape, model::encode(tape, x2, params), params);
        Tensor v3 = model::project(tape, model::encode(tape, x3, params), params);
        Tensor l_int = intrinsic_loss(tape, v2, v3, cfg);
        out.values.l_int = l_int.item();
        total = tape.add(total, l_int);

        if (needs_structural) {
            Tensor y_tilde = model::classify(tape, weak_repr(), params);
            Tensor l_str = structural_loss(tape, v2, y_tilde, cfg);
            out.values.l_str = l_str.item();
            total = tape.add(total, l_str);
        }
    }

    out.total = total;
    out.values.total = total.item();
    return out;
}

Method parse_method(const std::string& name) {
    if (name == "colearning") return Method::colearning;
    if (name == "standard_ce") return Method::standard_ce;
    if (name == "ce_mixup") return Method::ce_mixup;
    if (name == "colearning_no_str") return Method::colearning_no_str;
    if (name == "colearning_no_mixup") return Method::colearning_no_mixup;
    if (name == "weighted_sup") return Method::weighted_sup;
    throw ParameterError("unknown method: " + name);
}

std::string method_name(Method m) {
    switch (m) {
        case Method::colearning: return "colearning";
        case Method::standard_ce: return "standard_ce";
        case Method::ce_mixup: return "ce_mixup";
        case Method::colearning_no_str: return "colearning_no_str";
        case Method::colearning_no_mixup: return "colearning_no_mixup";
        default: return "weighted_sup";
    }
}

}  // namespace colearn::losses
