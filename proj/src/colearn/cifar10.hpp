#pragma once

#include <string>
#include <vector>

#include "colearn/dataset.hpp"

namespace colearn::data {

// CIFAR-10 binary batches: records of 1 label byte + 3072 pixel bytes in
// channel-planar order (1024 R, 1024 G, 1024 B), row-major within a channel.
// Output images are 32x32x3 channel-interleaved; noisy = clean, mask false.
ImageDataset load_cifar10_binary(const std::vector<std::string>& paths);

}  // namespace colearn::data
