#pragma once

#include <cstdint>
#include <vector>

#include "colearn/model.hpp"
#include "colearn/rng.hpp"
#include "colearn/tensor.hpp"

namespace colearn::losses {

enum class Reduction { mean, sum };

enum class Method {
    colearning,
    standard_ce,
    ce_mixup,
    colearning_no_str,
    colearning_no_mixup,
    weighted_sup,
};

struct LossConfig {
    double tau = 0.5;
    double alpha = 1.0;
    double sigma = 0.5;
    double sup_weight = 0.01;  // weighted_sup only
    Reduction reduction = Reduction::mean;
    // Default follows the printed InfoNCE denominator (positive pair excluded,
    // 4(N-1) cross-sample terms); true adds the positive pair back in.
    bool include_positive_in_denominator = false;
    bool per_sample_lambda = false;
};

struct MixupDraw {
    std::vector<double> lambdas;  // one value, or batch values with per_sample_lambda
    std::vector<std::size_t> permutation;

    double lambda_for(std::size_t i) const {
        return lambdas.size() == 1 ? lambdas[0] : lambdas[i];
    }
};

struct LossBreakdown {
    double l_sup = 0.0;
    double l_int = 0.0;
    double l_str = 0.0;
    double total = 0.0;
};

// -sum_i y_i . log(p_i) with the predicted probability clamped at 1e-12,
// reduced per the config (mean by default).
ad::Tensor cross_entropy_probs(ad::Tape& tape, const ad::Tensor& onehot,
                               const ad::Tensor& probs, Reduction reduction);

// Stable path: CE straight from logits via log-softmax.
ad::Tensor cross_entropy_logits(ad::Tape& tape, const ad::Tensor& onehot,
                                const ad::Tensor& logits, Reduction reduction);

// Draws one lambda ~ Beta(alpha, alpha) (or one per sample) and a uniform
// permutation, then interpolates rows of x and the one-hot labels.
MixupDraw draw_mixup(std::size_t batch, double alpha, bool per_sample, Rng& rng);
void apply_mixup(const MixupDraw& draw, std::size_t batch, std::size_t dim,
                 const std::vector<double>& x, std::vector<double>& x_mixed);

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

// Gaussian similarity kernel p(d) = exp(-d^2 / (2 sigma^2)).
double similarity_metric(double d, double sigma = 0.5);

// InfoNCE over the two strong-view projections; see LossConfig for the
// denominator convention.
ad::Tensor intrinsic_loss(ad::Tape& tape, const ad::Tensor& v2, const ad::Tensor& v3,
                          const LossConfig& cfg);

// KL-style match between the pairwise similarity structure of the normalized
// projections and that of the classifier probability rows.
ad::Tensor structural_loss(ad::Tape& tape, const ad::Tensor& v2, const ad::Tensor& y_pred,
                           const LossConfig& cfg);

struct TotalLoss {
    ad::Tensor total;  // differentiable
    LossBreakdown values;
};

// Composes the method's loss from a forward pass over the views. The mixup
// draw must be supplied by the caller for methods that mix (keeps the loss a
// pure function of its inputs).
TotalLoss method_loss(ad::Tape& tape, Method method, const model::BatchViews& views,
                      const model::ModelParams& params, const LossConfig& cfg,
                      const MixupDraw* draw);

Method parse_method(const std::string& name);
std::string method_name(Method m);

}  // namespace colearn::losses
