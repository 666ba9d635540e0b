#pragma once

#include <cstdint>
#include <vector>

#include "colearn/model.hpp"

namespace colearn::train {

struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Bias-corrected Adam; one slot pair per parameter tensor.
struct AdamState {
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
    std::uint64_t step = 0;

    static AdamState for_params(const model::ModelParams& params);
};

// In-place update from the accumulated gradients; throws TrainingError naming
// the parameter on a non-finite gradient.
void adam_step(model::ModelParams& params, AdamState& state, double lr_t,
               const AdamConfig& cfg);

// Constant lr until round(decay_start_fraction * epochs), then linear to zero
// at the hypothetical epoch `epochs`.
double lr_at(std::size_t epoch, std::size_t epochs, double lr, double decay_start_fraction);

}  // namespace colearn::train
