#include "colearn/synthetic.hpp"

#include <cmath>

#include "colearn/color.hpp"
#include "colearn/rng.hpp"

namespace colearn::data {

namespace {

Image render_sample(std::size_t klass, std::size_t num_classes, std::size_t side, Rng& rng) {
    Image img;
    img.height = side;
    img.width = side;
    img.channels = 3;
    img.pixels.assign(side * side * 3, 0);

    const double s = static_cast<double>(side);
    // Per-image random low-frequency background field: a 4x4 color grid,
    // bilinearly upscaled. Together with the additive pixel noise it gives
    // every image a signature that plain CE training can memorize noisy
    // labels through, while MixUp interpolation and color jitter disrupt it.
    constexpr std::size_t kBgGrid = 4;
    double bg_grid[kBgGrid][kBgGrid][3];
    for (auto& row : bg_grid)
        for (auto& cellv : row)
            for (double& c : cellv) c = static_cast<double>(rng.uniform_int(131));
    const auto bg_at = [&](std::size_t y, std::size_t x, std::size_t ch) {
        const double gx = (static_cast<double>(x) + 0.5) / s * (kBgGrid - 1);
        const double gy = (static_cast<double>(y) + 0.5) / s * (kBgGrid - 1);
        const auto x0 = static_cast<std::size_t>(gx);
        const auto y0 = static_cast<std::size_t>(gy);
        const std::size_t x1 = std::min(x0 + 1, kBgGrid - 1);
        const std::size_t y1 = std::min(y0 + 1, kBgGrid - 1);
        const double fx = gx - static_cast<double>(x0);
        const double fy = gy - static_cast<double>(y0);
        const double top = bg_grid[y0][x0][ch] * (1.0 - fx) + bg_grid[y0][x1][ch] * fx;
        const double bot = bg_grid[y1][x0][ch] * (1.0 - fx) + bg_grid[y1][x1][ch] * fx;
        return top * (1.0 - fy) + bot * fy;
    };
    const double hue =
        static_cast<double>(klass) / static_cast<double>(num_classes) + rng.uniform(-0.02, 0.02);
    const double sat = rng.uniform(0.8, 1.0);
    const double val = rng.uniform(0.8, 1.0);
    const color::Rgb fg = color::hsv_to_rgb({hue, sat, val});
    const double fr = fg.r * 255.0, fgreen = fg.g * 255.0, fb = fg.b * 255.0;

    const double cx = rng.uniform(0.3, 0.7) * s;
    const double cy = rng.uniform(0.3, 0.7) * s;
    const double radius = rng.uniform(0.28, 0.48) * s;
    const bool horizontal = rng.bernoulli(0.5);
    const double cell = std::max(2.0, radius / 2.0);
    const std::size_t shape = klass % 4;

    for (std::size_t y = 0; y < side; ++y)
        for (std::size_t x = 0; x < side; ++x) {
            const double dx = static_cast<double>(x) + 0.5 - cx;
            const double dy = static_cast<double>(y) + 0.5 - cy;
            const double dist = std::sqrt(dx * dx + dy * dy);
            bool inside = false;
            switch (shape) {
                case 0:  // filled disk
                    inside = dist <= radius;
                    break;
                case 1:  // ring
                    inside = dist <= radius && dist >= 0.55 * radius;
                    break;
                case 2: {  // bar
                    const double along = horizontal ? dx : dy;
                    const double across = horizontal ? dy : dx;
                    inside = std::fabs(along) <= radius && std::fabs(across) <= 0.3 * radius;
                    break;
                }
                default: {  // checker inside a square
                    if (std::fabs(dx) <= radius && std::fabs(dy) <= radius) {
                        const auto ix = static_cast<long>(std::floor((dx + radius) / cell));
                        const auto iy = static_cast<long>(std::floor((dy + radius) / cell));
                        inside = ((ix + iy) % 2) == 0;
                    }
                    break;
                }
            }
            for (std::size_t ch = 0; ch < 3; ++ch) {
                const double base = inside ? (ch == 0 ? fr : ch == 1 ? fgreen : fb) : bg_at(y, x, ch);
                img.at(y, x, ch) = color::clamp_u8(base + 10.0 * rng.normal());
            }
        }
    return img;
}

ImageDataset make_split(const SyntheticParams& p, const char* tag, std::size_t n) {
    ImageDataset ds;
    ds.num_classes = p.num_classes;
    const std::uint64_t base = hash_tag(p.seed, tag);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t klass = i % p.num_classes;
        Rng rng(hash_combine(base, i));
        ds.push_image(render_sample(klass, p.num_classes, p.side, rng),
                      static_cast<std::uint8_t>(klass));
    }
    ds.validate();
    return ds;
}

}  // namespace

std::pair<ImageDataset, ImageDataset> generate_synthetic(const SyntheticParams& p) {
    if (p.num_classes < 2 || p.num_classes > 16)
        throw ParameterError("synthetic: num_classes must be in [2, 16]");
    if (p.side < 8) throw ParameterError("synthetic: side must be >= 8");
    if (p.n_train == 0 || p.n_test == 0)
        throw ParameterError("synthetic: splits must be nonempty");
    return {make_split(p, "synthetic-train", p.n_train),
            make_split(p, "synthetic-test", p.n_test)};
}

}  // namespace colearn::data
