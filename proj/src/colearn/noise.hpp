#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "colearn/dataset.hpp"

namespace colearn::data {

enum class NoiseKind { symmetric, asymmetric_pairmap, asymmetric_circular };

// Row-stochastic matrix Q with Q[i][j] = Pr[noisy = j | clean = i].
struct TransitionMatrix {
    std::size_t num_classes = 0;
    std::vector<double> entries;  // row-major C x C
    double noise_rate = 0.0;
    NoiseKind kind = NoiseKind::symmetric;

    double at(std::size_t i, std::size_t j) const { return entries[i * num_classes + j]; }
    // Every row sums to 1 within 1e-12, all entries in [0, 1].
    void validate() const;
};

// Uniform flips. Default convention puts p/(C-1) on every wrong class
// (diagonal 1-p); include_true_class spreads p over all C classes instead
// (diagonal 1-p+p/C).
TransitionMatrix build_symmetric(std::size_t num_classes, double p,
                                 bool include_true_class = false);

// Confusable-pair flips: each (source, target) gets Q[s][s]=1-p, Q[s][t]=p.
TransitionMatrix build_asymmetric_pairmap(
    std::size_t num_classes, double p,
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

// Each class flips to the next class circularly with probability p.
TransitionMatrix build_asymmetric_circular(std::size_t num_classes, double p);

// Standard CIFAR-10 confusion map: truck->automobile, bird->airplane,
// deer->horse, cat->dog (indices airplane=0 ... truck=9).
std::vector<std::pair<std::size_t, std::size_t>> cifar10_pair_map();

// Samples each noisy label from row Q[clean_label]; clean labels untouched.
// Deterministic given the seed and independent of sample order.
ImageDataset corrupt_labels(const ImageDataset& ds, const TransitionMatrix& q,
                            std::uint64_t seed);

}  // namespace colearn::data
