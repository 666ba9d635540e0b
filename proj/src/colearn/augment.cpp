#include "colearn/augment.hpp"

#include <algorithm>
#include <cmath>

#include "colearn/color.hpp"

namespace colearn::augment {

using color::clamp_u8;

void TransformParams::validate() const {
    if (!(crop_scale_min > 0.0 && crop_scale_min <= crop_scale_max && crop_scale_max <= 1.0))
        throw ParameterError("crop scale range must satisfy 0 < min <= max <= 1");
    for (double p : {flip_prob, jitter_prob, grayscale_prob})
        if (p < 0.0 || p > 1.0) throw ParameterError("probability outside [0,1]");
}

ChannelStats compute_channel_stats(const data::ImageDataset& ds) {
    const std::size_t c = ds.channels;
    ChannelStats stats;
    stats.mean.assign(c, 0.0);
    stats.stddev.assign(c, 1.0);
    if (ds.size() == 0) return stats;
    std::vector<double> sum(c, 0.0), sumsq(c, 0.0);
    const std::size_t per_channel = ds.pixels.size() / c;
    for (std::size_t i = 0; i < ds.pixels.size(); ++i) {
        const double v = ds.pixels[i] / 255.0;
        sum[i % c] += v;
        sumsq[i % c] += v * v;
    }
    for (std::size_t ch = 0; ch < c; ++ch) {
        const double n = static_cast<double>(per_channel);
        stats.mean[ch] = sum[ch] / n;
        const double var = std::max(sumsq[ch] / n - stats.mean[ch] * stats.mean[ch], 1e-12);
        stats.stddev[ch] = std::sqrt(var);
    }
    return stats;
}

namespace {

// Bilinear sample with half-pixel centers from a crop window of the source.
Image resize_crop(const Image& src, std::size_t top, std::size_t left, std::size_t ch_h,
                  std::size_t ch_w) {
    Image out;
    out.height = src.height;
    out.width = src.width;
    out.channels = src.channels;
    out.pixels.resize(src.pixels.size());
    const double sy = static_cast<double>(ch_h) / static_cast<double>(out.height);
    const double sx = static_cast<double>(ch_w) / static_cast<double>(out.width);
    for (std::size_t y = 0; y < out.height; ++y) {
        const double fy = (static_cast<double>(y) + 0.5) * sy - 0.5;
        const double cy = std::clamp(fy, 0.0, static_cast<double>(ch_h - 1));
        const auto y0 = static_cast<std::size_t>(cy);
        const std::size_t y1 = std::min(y0 + 1, ch_h - 1);
        const double wy = cy - static_cast<double>(y0);
        for (std::size_t x = 0; x < out.width; ++x) {
            const double fx = (static_cast<double>(x) + 0.5) * sx - 0.5;
            const double cx = std::clamp(fx, 0.0, static_cast<double>(ch_w - 1));
            const auto x0 = static_cast<std::size_t>(cx);
            const std::size_t x1 = std::min(x0 + 1, ch_w - 1);
            const double wx = cx - static_cast<double>(x0);
            for (std::size_t ch = 0; ch < out.channels; ++ch) {
                const double v00 = src.at(top + y0, left + x0, ch);
                const double v01 = src.at(top + y0, left + x1, ch);
                const double v10 = src.at(top + y1, left + x0, ch);
                const double v11 = src.at(top + y1, left + x1, ch);
                const double v = (1 - wy) * ((1 - wx) * v00 + wx * v01) +
                                 wy * ((1 - wx) * v10 + wx * v11);
                out.at(y, x, ch) = clamp_u8(v);
            }
        }
    }
    return out;
}

}  // namespace

Image random_resized_crop(const Image& img, double scale_min, double scale_max, Rng& rng) {
    if (img.height < 2 || img.width < 2)
        throw ParameterError("random_resized_crop: image side must be >= 2");
    const double area = static_cast<double>(img.height * img.width);
    const double log_lo = std::log(3.0 / 4.0), log_hi = std::log(4.0 / 3.0);
    for (int attempt = 0; attempt < 10; ++attempt) {
        const double target_area = area * rng.uniform(scale_min, scale_max);
        const double aspect = std::exp(rng.uniform(log_lo, log_hi));
        const auto w = static_cast<std::size_t>(std::lround(std::sqrt(target_area * aspect)));
        const auto h = static_cast<std::size_t>(std::lround(std::sqrt(target_area / aspect)));
        if (w >= 1 && h >= 1 && w <= img.width && h <= img.height) {
            const auto top = static_cast<std::size_t>(rng.uniform_int(img.height - h + 1));
            const auto left = static_cast<std::size_t>(rng.uniform_int(img.width - w + 1));
            return resize_crop(img, top, left, h, w);
        }
    }
    // Fallback: centered square of the short side.
    const std::size_t s = std::min(img.height, img.width);
    return resize_crop(img, (img.height - s) / 2, (img.width - s) / 2, s, s);
}

Image horizontal_flip(const Image& img, double p, Rng& rng) {
    if (!rng.bernoulli(p)) return img;
    Image out = img;
    for (std::size_t y = 0; y < img.height; ++y)
        for (std::size_t x = 0; x < img.width; ++x)
            for (std::size_t ch = 0; ch < img.channels; ++ch)
                out.at(y, x, ch) = img.at(y, img.width - 1 - x, ch);
    return out;
}

Image adjust_brightness(const Image& img, double factor) {
    Image out = img;
    for (auto& px : out.pixels) px = clamp_u8(px * factor);
    return out;
}

Image adjust_contrast(const Image& img, double factor) {
    // Blend with the image's mean luma (plain mean for non-RGB images).
    double mean = 0.0;
    if (img.channels == 3) {
        for (std::size_t i = 0; i + 2 < img.pixels.size(); i += 3)
            mean += color::luma(img.pixels[i], img.pixels[i + 1], img.pixels[i + 2]);
        mean /= static_cast<double>(img.pixels.size() / 3);
    } else {
        for (auto px : img.pixels) mean += px;
        mean /= static_cast<double>(img.pixels.size());
    }
    Image out = img;
    for (auto& px : out.pixels) px = clamp_u8(mean + (px - mean) * factor);
    return out;
}

Image adjust_saturation(const Image& img, double factor) {
    if (img.channels != 3) return img;
    Image out = img;
    for (std::size_t i = 0; i + 2 < img.pixels.size(); i += 3) {
        color::Hsv hsv = color::rgb_to_hsv(
            {img.pixels[i] / 255.0, img.pixels[i + 1] / 255.0, img.pixels[i + 2] / 255.0});
        hsv.s = std::clamp(hsv.s * factor, 0.0, 1.0);
        const color::Rgb rgb = color::hsv_to_rgb(hsv);
        out.pixels[i] = clamp_u8(rgb.r * 255.0);
        out.pixels[i + 1] = clamp_u8(rgb.g * 255.0);
        out.pixels[i + 2] = clamp_u8(rgb.b * 255.0);
    }
    return out;
}

Image adjust_hue(const Image& img, double offset) {
    if (img.channels != 3) return img;
    Image out = img;
    for (std::size_t i = 0; i + 2 < img.pixels.size(); i += 3) {
        color::Hsv hsv = color::rgb_to_hsv(
            {img.pixels[i] / 255.0, img.pixels[i + 1] / 255.0, img.pixels[i + 2] / 255.0});
        hsv.h += offset;
        const color::Rgb rgb = color::hsv_to_rgb(hsv);
        out.pixels[i] = clamp_u8(rgb.r * 255.0);
        out.pixels[i + 1] = clamp_u8(rgb.g * 255.0);
        out.pixels[i + 2] = clamp_u8(rgb.b * 255.0);
    }
    return out;
}

Image color_jitter(const Image& img, const std::array<double, 4>& strengths, double p,
                   Rng& rng, bool fixed_order) {
    if (!rng.bernoulli(p)) return img;
    std::vector<std::size_t> order;
    if (fixed_order)
        order = {0, 1, 2, 3};
    else
        order = rng.permutation(4);
    // Factors are drawn up front in adjustment order 0..3 so the shuffled
    // application order does not change which value each adjustment gets.
    const double fb = rng.uniform(1.0 - strengths[0], 1.0 + strengths[0]);
    const double fc = rng.uniform(1.0 - strengths[1], 1.0 + strengths[1]);
    const double fs = rng.uniform(1.0 - strengths[2], 1.0 + strengths[2]);
    const double fh = rng.uniform(-strengths[3], strengths[3]);
    Image out = img;
    for (std::size_t idx : order) {
        switch (idx) {
            case 0: out = adjust_brightness(out, fb); break;
            case 1: out = adjust_contrast(out, fc); break;
            case 2: out = adjust_saturation(out, fs); break;
            default: out = adjust_hue(out, fh); break;
        }
    }
    return out;
}

Image random_grayscale(const Image& img, double p, Rng& rng) {
    if (!rng.bernoulli(p)) return img;
    if (img.channels != 3) return img;
    Image out = img;
    for (std::size_t i = 0; i + 2 < img.pixels.size(); i += 3) {
        const std::uint8_t g = color::luma(img.pixels[i], img.pixels[i + 1], img.pixels[i + 2]);
        out.pixels[i] = out.pixels[i + 1] = out.pixels[i + 2] = g;
    }
    return out;
}

std::vector<double> apply_view(const Image& img, const TransformParams& params, Rng& rng,
                               const ChannelStats* stats) {
    params.validate();
    Image v = random_resized_crop(img, params.crop_scale_min, params.crop_scale_max, rng);
    v = horizontal_flip(v, params.flip_prob, rng);
    if (params.is_strong) {
        v = color_jitter(v, params.jitter_strengths, params.jitter_prob, rng,
                         params.fixed_jitter_order);
        v = random_grayscale(v, params.grayscale_prob, rng);
    }
    return normalize_only(v, stats);
}

std::vector<double> normalize_only(const Image& img, const ChannelStats* stats) {
    std::vector<double> out(img.pixels.size());
    const std::size_t c = img.channels;
    for (std::size_t i = 0; i < out.size(); ++i) {
        double v = img.pixels[i] / 255.0;
        if (stats) v = (v - stats->mean[i % c]) / stats->stddev[i % c];
        out[i] = v;
    }
    return out;
}

}  // namespace colearn::augment
