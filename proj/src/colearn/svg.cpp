#include "colearn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace colearn::plot {

namespace {

constexpr double kWidth = 720.0, kHeight = 440.0;
constexpr double kLeft = 64.0, kRight = 560.0;  // plot area x range
constexpr double kTop = 44.0, kBottom = 396.0;  // plot area y range

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string render_svg_plot(const std::vector<Series>& series, const std::string& title) {
    if (series.empty()) throw ParameterError("svg: at least one series is required");
    std::size_t epochs = 0;
    for (const auto& s : series) {
        if (s.mean.empty()) throw ParameterError("svg: empty series \"" + s.name + "\"");
        if (!s.band.empty() && s.band.size() != s.mean.size())
            throw DimensionError("svg: band length differs from mean length");
        epochs = std::max(epochs, s.mean.size());
    }

    double lo = 1e300, hi = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.mean.size(); ++i) {
            const double b = s.band.empty() ? 0.0 : std::abs(s.band[i]);
            lo = std::min(lo, s.mean[i] - b);
            hi = std::max(hi, s.mean[i] + b);
        }
    if (hi - lo < 0.1) {
        const double mid = 0.5 * (lo + hi);
        lo = mid - 0.05;
        hi = mid + 0.05;
    } else {
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    const double xmax = epochs > 1 ? static_cast<double>(epochs - 1) : 1.0;

    auto px = [&](double e) { return kLeft + (kRight - kLeft) * (e / xmax); };
    auto py = [&](double v) { return kBottom - (kBottom - kTop) * ((v - lo) / (hi - lo)); };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kWidth)
        << "\" height=\"" << fmt(kHeight) << "\" viewBox=\"0 0 " << fmt(kWidth) << " "
        << fmt(kHeight) << "\">\n";
    out << "<rect width=\"" << fmt(kWidth) << "\" height=\"" << fmt(kHeight)
        << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << fmt((kLeft + kRight) / 2) << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">"
        << escape_xml(title) << "</text>\n";

    // axes
    out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kBottom) << "\" x2=\""
        << fmt(kRight) << "\" y2=\"" << fmt(kBottom) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(kLeft)
        << "\" y2=\"" << fmt(kBottom) << "\" stroke=\"black\"/>\n";

    const int nticks = 5;
    for (int t = 0; t <= nticks; ++t) {
        const double fe = xmax * t / nticks;
        const double x = px(fe);
        out << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(kBottom) << "\" x2=\"" << fmt(x)
            << "\" y2=\"" << fmt(kBottom + 5) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(kBottom + 20)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt(fe) << "</text>\n";
        const double v = lo + (hi - lo) * t / nticks;
        const double y = py(v);
        out << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(y) << "\" x2=\""
            << fmt(kLeft) << "\" y2=\"" << fmt(y) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(y + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(v)
            << "</text>\n";
    }
    out << "<text x=\"" << fmt((kLeft + kRight) / 2) << "\" y=\"" << fmt(kBottom + 38)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">epoch"
           "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& sr = series[s];
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        if (!sr.band.empty()) {
            out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.18\" stroke=\"none\" "
                   "points=\"";
            for (std::size_t i = 0; i < sr.mean.size(); ++i)
                out << fmt(px(static_cast<double>(i))) << ","
                    << fmt(py(sr.mean[i] + std::abs(sr.band[i]))) << " ";
            for (std::size_t i = sr.mean.size(); i-- > 0;)
                out << fmt(px(static_cast<double>(i))) << ","
                    << fmt(py(sr.mean[i] - std::abs(sr.band[i]))) << " ";
            out << "\"/>\n";
        }
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" "
               "points=\"";
        for (std::size_t i = 0; i < sr.mean.size(); ++i)
            out << fmt(px(static_cast<double>(i))) << "," << fmt(py(sr.mean[i])) << " ";
        out << "\"/>\n";
        // legend entry
        const double ly = kTop + 8.0 + 18.0 * static_cast<double>(s);
        out << "<line x1=\"" << fmt(kRight + 12) << "\" y1=\"" << fmt(ly) << "\" x2=\""
            << fmt(kRight + 36) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << fmt(kRight + 42) << "\" y=\"" << fmt(ly + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape_xml(sr.name)
            << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void emit_svg_plot(const std::vector<Series>& series, const std::string& title,
                   const std::string& path) {
    const std::string body = render_svg_plot(series, title);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write SVG: " + path);
    out << body;
    if (!out) throw IoError("failed writing SVG: " + path);
}

}  // namespace colearn::plot
