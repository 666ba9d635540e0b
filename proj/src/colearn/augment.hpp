#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "colearn/dataset.hpp"
#include "colearn/rng.hpp"

namespace colearn::augment {

using data::Image;

struct TransformParams {
    double crop_scale_min = 0.08;
    double crop_scale_max = 1.0;
    double flip_prob = 0.5;
    // brightness, contrast, saturation, hue
    std::array<double, 4> jitter_strengths{0.4, 0.4, 0.4, 0.1};
    double jitter_prob = 0.8;
    double grayscale_prob = 0.2;
    bool is_strong = false;
    // Reproducibility hook: apply the four jitter adjustments in fixed order
    // instead of a shuffled one.
    bool fixed_jitter_order = false;

    void validate() const;
};

// Per-channel standardization statistics, computed once from the clean
// training split on [0,1]-scaled pixels.
struct ChannelStats {
    std::vector<double> mean;
    std::vector<double> stddev;
};

ChannelStats compute_channel_stats(const data::ImageDataset& ds);

// Samples an area fraction in scale_range and an aspect ratio log-uniformly in
// [3/4, 4/3] (10 attempts, then center-crop fallback), crops, and bilinearly
// resizes back to the input size with half-pixel centers.
Image random_resized_crop(const Image& img, double scale_min, double scale_max, Rng& rng);

Image horizontal_flip(const Image& img, double p, Rng& rng);

// Deterministic building blocks of color_jitter; exposed for testing.
Image adjust_brightness(const Image& img, double factor);
Image adjust_contrast(const Image& img, double factor);
Image adjust_saturation(const Image& img, double factor);
Image adjust_hue(const Image& img, double offset);  // fraction of a full cycle

Image color_jitter(const Image& img, const std::array<double, 4>& strengths, double p,
                   Rng& rng, bool fixed_order = false);

Image random_grayscale(const Image& img, double p, Rng& rng);

// Full view pipeline. Strong: crop -> flip -> jitter -> grayscale; weak:
// crop -> flip. Output is flattened to doubles in [0,1] and, when stats are
// given, standardized per channel.
std::vector<double> apply_view(const Image& img, const TransformParams& params, Rng& rng,
                               const ChannelStats* stats);

// Normalization-only path used for evaluation.
std::vector<double> normalize_only(const Image& img, const ChannelStats* stats);

}  // namespace colearn::augment
