#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "colearn/augment.hpp"
#include "colearn/dataset.hpp"
#include "colearn/model.hpp"

namespace colearn::eval {

// One per-epoch record of losses, test accuracy, and memorization diagnostics.
// The subset rates are -1 when the corresponding subset is empty.
struct MetricsRow {
    std::size_t epoch = 0;
    double l_sup = 0.0;
    double l_int = 0.0;
    double l_str = 0.0;
    double l_total = 0.0;
    double test_accuracy = 0.0;
    double clean_subset_train_acc = -1.0;
    double noisy_subset_memorization = -1.0;
};

// Deterministic argmax predictions (no augmentation, normalization only);
// ties broken by lowest class index.
std::vector<std::uint8_t> predict_labels(const model::ModelParams& params,
                                         const data::ImageDataset& ds,
                                         const augment::ChannelStats* stats);

// Fraction of argmax predictions equal to the clean labels.
double test_accuracy(const model::ModelParams& params, const data::ImageDataset& test_ds,
                     const augment::ChannelStats* stats);

// (accuracy vs clean labels on uncorrupted samples,
//  fraction of corrupted samples predicted as their wrong given label)
std::pair<double, double> memorization_metrics(const model::ModelParams& params,
                                               const data::ImageDataset& train_ds,
                                               const augment::ChannelStats* stats);

// Per-seed mean over the final k epochs, then mean and sample (n-1) standard
// deviation across seeds.
std::pair<double, double> last_k_summary(const std::vector<std::vector<MetricsRow>>& traces,
                                         std::size_t k = 10);
std::pair<double, double> last_k_summary_values(const std::vector<std::vector<double>>& traces,
                                                std::size_t k);

}  // namespace colearn::eval
