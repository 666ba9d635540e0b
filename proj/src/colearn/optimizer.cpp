#include "colearn/optimizer.hpp"

#include <cmath>

namespace colearn::train {

AdamState AdamState::for_params(const model::ModelParams& params) {
    AdamState state;
    for (const auto& named : params.all()) {
        state.m.emplace_back(named.tensor.size(), 0.0);
        state.v.emplace_back(named.tensor.size(), 0.0);
    }
    return state;
}

void adam_step(model::ModelParams& params, AdamState& state, double lr_t,
               const AdamConfig& cfg) {
    auto named = params.all();
    if (named.size() != state.m.size())
        throw ParameterError("adam_step: state does not match parameter list");
    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t t = 0; t < named.size(); ++t) {
        auto& tensor = named[t].tensor;
        const auto& grad = tensor.grad();
        auto& data = tensor.data();
        auto& m = state.m[t];
        auto& v = state.v[t];
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double g = grad[i];
            if (!std::isfinite(g))
                throw TrainingError("non-finite gradient in " + named[t].name);
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            data[i] -= lr_t * mhat / (std::sqrt(vhat) + cfg.eps);
        }
    }
}

double lr_at(std::size_t epoch, std::size_t epochs, double lr, double decay_start_fraction) {
    if (epoch >= epochs) throw ParameterError("lr_at: epoch out of range");
    const auto decay_start = static_cast<std::size_t>(
        std::lround(decay_start_fraction * static_cast<double>(epochs)));
    if (epoch <= decay_start || decay_start >= epochs) return lr;
    return lr * static_cast<double>(epochs - epoch) /
           static_cast<double>(epochs - decay_start);
}

}  // namespace colearn::train
