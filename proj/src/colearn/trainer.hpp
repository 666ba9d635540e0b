#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "colearn/augment.hpp"
#include "colearn/dataset.hpp"
#include "colearn/losses.hpp"
#include "colearn/metrics.hpp"
#include "colearn/model.hpp"
#include "colearn/optimizer.hpp"

namespace colearn::train {

struct TrainConfig {
    losses::Method method = losses::Method::colearning;
    std::size_t epochs = 30;
    std::size_t batch_size = 16;
    AdamConfig adam;
    double decay_start_fraction = 0.4;
    losses::LossConfig loss;
    augment::TransformParams transform;  // strong/weak flags set internally
    bool standardize = true;             // per-channel standardization of inputs
    std::uint64_t seed = 1;

    void validate() const;
};

// Mean per-batch loss components over one epoch.
struct EpochStats {
    double l_sup = 0.0;
    double l_int = 0.0;
    double l_str = 0.0;
    double l_total = 0.0;
    std::size_t batches = 0;
};

struct TrainerState {
    model::ModelParams params;
    AdamState adam;
};

// Fresh parameters and optimizer state for the given data and seed. The
// initialization stream depends only on the seed, not on the method, so
// different methods start from identical weights.
TrainerState init_state(const TrainConfig& cfg, const data::ImageDataset& train_ds);

// One pass over the shuffled training set. Every random draw (shuffle order,
// augmentations, mixup) is keyed by (seed, purpose, epoch, index), so the
// result is independent of execution order. Trailing batches smaller than 2
// are dropped. Throws TrainingError on a non-finite loss.
EpochStats train_epoch(TrainerState& state, const TrainConfig& cfg,
                       const data::ImageDataset& train_ds,
                       const augment::ChannelStats* stats, std::size_t epoch);

// Full run: channel statistics from the training split, epochs of
// train_epoch, per-epoch evaluation. on_epoch (optional) sees each row as it
// is produced.
std::vector<eval::MetricsRow> run_training(
    const TrainConfig& cfg, const data::ImageDataset& train_ds,
    const data::ImageDataset& test_ds, TrainerState* out_state = nullptr,
    const std::function<void(const eval::MetricsRow&)>& on_epoch = {});

}  // namespace colearn::train
