#pragma once

#include <cstdint>
#include <utility>

#include "colearn/dataset.hpp"

namespace colearn::data {

struct SyntheticParams {
    std::size_t num_classes = 10;
    std::size_t n_train = 5000;
    std::size_t n_test = 1000;
    std::size_t side = 16;
    std::uint64_t seed = 1;
};

// Procedural stand-in for CIFAR: each class is a shape (disk/ring/bar/checker)
// in a class-specific hue, rendered at random position and scale over a random
// gray background, plus additive pixel noise (sigma 10/255). Classes are
// balanced within +-1 and everything is deterministic given the seed.
std::pair<ImageDataset, ImageDataset> generate_synthetic(const SyntheticParams& params);

}  // namespace colearn::data
