#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace colearn::color {

struct Rgb {
    double r, g, b;  // [0, 1]
};
struct Hsv {
    double h;  // [0, 1), fraction of a full cycle
    double s, v;  // [0, 1]
};

inline Hsv rgb_to_hsv(Rgb c) {
    const double mx = std::max({c.r, c.g, c.b});
    const double mn = std::min({c.r, c.g, c.b});
    const double d = mx - mn;
    Hsv out{0.0, 0.0, mx};
    if (d > 0.0) {
        if (mx == c.r)
            out.h = std::fmod((c.g - c.b) / d, 6.0);
        else if (mx == c.g)
            out.h = (c.b - c.r) / d + 2.0;
        else
            out.h = (c.r - c.g) / d + 4.0;
        out.h /= 6.0;
        if (out.h < 0.0) out.h += 1.0;
    }
    if (mx > 0.0) out.s = d / mx;
    return out;
}

inline Rgb hsv_to_rgb(Hsv c) {
    const double h = (c.h - std::floor(c.h)) * 6.0;
    const int i = static_cast<int>(h) % 6;
    const double f = h - std::floor(h);
    const double p = c.v * (1.0 - c.s);
    const double q = c.v * (1.0 - c.s * f);
    const double t = c.v * (1.0 - c.s * (1.0 - f));
    switch (i) {
        case 0: return {c.v, t, p};
        case 1: return {q, c.v, p};
        case 2: return {p, c.v, t};
        case 3: return {p, q, c.v};
        case 4: return {t, p, c.v};
        default: return {c.v, p, q};
    }
}

inline std::uint8_t clamp_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0) + 0.5);
}

// ITU-R BT.601 luma on 8-bit channels, rounded.
inline std::uint8_t luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    return clamp_u8(0.299 * r + 0.587 * g + 0.114 * b);
}

}  // namespace colearn::color
