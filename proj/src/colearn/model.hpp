#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "colearn/tensor.hpp"

namespace colearn::model {

struct NetworkConfig {
    std::size_t input_dim = 0;  // H * W * C
    std::vector<std::size_t> encoder_widths{256, 128};
    std::size_t projection_dim = 64;
    std::size_t num_classes = 0;

    std::size_t representation_dim() const { return encoder_widths.back(); }
    void validate() const;
    // Closed-form parameter count over all configured layers.
    std::size_t parameter_count() const;
};

// Shared encoder (theta1), classifier head (theta2), projection head (theta3).
struct ModelParams {
    NetworkConfig config;
    std::vector<ad::Tensor> encoder_weights;
    std::vector<ad::Tensor> encoder_biases;
    ad::Tensor classifier_weight;
    ad::Tensor classifier_bias;
    ad::Tensor projection_weight1;
    ad::Tensor projection_bias1;
    ad::Tensor projection_weight2;
    ad::Tensor projection_bias2;

    struct Named {
        std::string name;
        ad::Tensor tensor;
    };
    std::vector<Named> all() const;
    void zero_grad();
    std::size_t parameter_count() const;
};

// Kaiming-uniform-style init: weights U(-1/sqrt(fan_in), 1/sqrt(fan_in)),
// biases zero. Deterministic given the seed.
ModelParams init_params(const NetworkConfig& cfg, std::uint64_t seed);

// Per-batch triple of transformed inputs plus one-hot noisy labels, stored as
// raw row-major matrices (batch x input_dim / batch x num_classes). Strong
// views may be empty for methods that never touch the projection head.
struct BatchViews {
    std::size_t batch = 0;
    std::size_t input_dim = 0;
    std::size_t num_classes = 0;
    std::vector<double> weak;     // x1
    std::vector<double> strong1;  // x2
    std::vector<double> strong2;  // x3
    std::vector<double> labels_onehot;

    bool has_strong() const { return !strong1.empty() && !strong2.empty(); }
};

// Encoder MLP; the representation is the post-relu output of the last layer.
ad::Tensor encode(ad::Tape& tape, const ad::Tensor& x, const ModelParams& params);

ad::Tensor classify_logits(ad::Tape& tape, const ad::Tensor& u, const ModelParams& params);
// Softmax probabilities (rows sum to 1).
ad::Tensor classify(ad::Tape& tape, const ad::Tensor& u, const ModelParams& params);

// linear -> relu -> linear; not normalized here.
ad::Tensor project(ad::Tape& tape, const ad::Tensor& u, const ModelParams& params);

struct ViewOutputs {
    ad::Tensor predictions;   // classify(encode(x1))
    ad::Tensor projection2;   // project(encode(x2))
    ad::Tensor projection3;   // project(encode(x3))
};

// predictions = classify(encode(x1)); projections from the two strong views
// through the one shared encoder.
ViewOutputs forward_views(ad::Tape& tape, const BatchViews& views, const ModelParams& params);

// Checkpoint file: magic "CLMP", version u16, config fields, then tensors in
// declaration order as little-endian 64-bit reals.
void save_checkpoint(const ModelParams& params, const std::string& path);
ModelParams load_checkpoint(const std::string& path);

}  // namespace colearn::model
