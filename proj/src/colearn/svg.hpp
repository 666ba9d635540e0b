#pragma once

#include <string>
#include <vector>

#include "colearn/errors.hpp"

namespace colearn::plot {

// One named curve: a per-epoch mean and an optional per-epoch spread
// (rendered as a translucent band at mean +- spread).
struct Series {
    std::string name;
    std::vector<double> mean;
    std::vector<double> band;  // empty, or same length as mean
};

// Renders a self-contained SVG (axes, tick labels, legend, one polyline per
// series). Floats are written with 6 significant digits so the output is
// byte-deterministic. A degenerate value range is padded to at least +-0.05.
std::string render_svg_plot(const std::vector<Series>& series, const std::string& title);

void emit_svg_plot(const std::vector<Series>& series, const std::string& title,
                   const std::string& path);

}  // namespace colearn::plot
