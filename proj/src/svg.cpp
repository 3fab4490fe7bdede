#include "rominv/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "rominv/errors.hpp"

namespace rominv {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

} // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::add_line(std::span<const double> x, std::span<const double> y,
                       const std::string& color, const std::string& name) {
    if (x.size() != y.size() || x.empty())
        throw ConfigError("svg: line series needs equal, non-empty x/y");
    lines_.push_back({{x.begin(), x.end()}, {y.begin(), y.end()}, color, name});
}

void SvgPlot::add_histogram(std::span<const double> values, std::size_t bins,
                            const std::string& color) {
    if (values.empty() || bins == 0) throw ConfigError("svg: histogram needs values and bins");
    const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    double lo = *mn_it, hi = *mx_it;
    if (lo == hi) hi = lo + 1.0;
    Bars b;
    b.color = color;
    b.edges.resize(bins + 1);
    b.counts.assign(bins, 0.0);
    for (std::size_t i = 0; i <= bins; ++i)
        b.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
    for (double v : values) {
        auto idx = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
        if (idx >= bins) idx = bins - 1;
        b.counts[idx] += 1.0;
    }
    bars_.push_back(std::move(b));
}

std::string SvgPlot::render() const {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : lines_) {
        for (double v : s.x) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
        for (double v : s.y) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
    }
    for (const auto& b : bars_) {
        xmin = std::min(xmin, b.edges.front());
        xmax = std::max(xmax, b.edges.back());
        ymin = std::min(ymin, 0.0);
        for (double c : b.counts) ymax = std::max(ymax, c);
    }
    if (!std::isfinite(xmin)) { xmin = 0.0; xmax = 1.0; ymin = 0.0; ymax = 1.0; }
    if (xmin == xmax) xmax = xmin + 1.0;
    if (ymin == ymax) ymax = ymin + 1.0;

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    auto px = [&](double x) { return kMarginLeft + (x - xmin) / (xmax - xmin) * plot_w; };
    auto py = [&](double y) { return kHeight - kMarginBottom - (y - ymin) / (ymax - ymin) * plot_h; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << title_ << "</text>\n";

    // axes
    out << "<line x1=\"" << fmt(kMarginLeft) << "\" y1=\"" << fmt(kHeight - kMarginBottom)
        << "\" x2=\"" << fmt(kWidth - kMarginRight) << "\" y2=\"" << fmt(kHeight - kMarginBottom)
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << fmt(kMarginLeft) << "\" y1=\"" << fmt(kMarginTop) << "\" x2=\""
        << fmt(kMarginLeft) << "\" y2=\"" << fmt(kHeight - kMarginBottom)
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label_ << "</text>\n";
    out << "<text x=\"16\" y=\"" << kHeight / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " << kHeight / 2
        << ")\">" << y_label_ << "</text>\n";
    // min/max tick labels
    out << "<text x=\"" << fmt(kMarginLeft) << "\" y=\"" << fmt(kHeight - kMarginBottom + 16)
        << "\" font-size=\"10\">" << fmt_tick(xmin) << "</text>\n";
    out << "<text x=\"" << fmt(kWidth - kMarginRight) << "\" y=\""
        << fmt(kHeight - kMarginBottom + 16) << "\" text-anchor=\"end\" font-size=\"10\">"
        << fmt_tick(xmax) << "</text>\n";
    out << "<text x=\"" << fmt(kMarginLeft - 6) << "\" y=\"" << fmt(kHeight - kMarginBottom)
        << "\" text-anchor=\"end\" font-size=\"10\">" << fmt_tick(ymin) << "</text>\n";
    out << "<text x=\"" << fmt(kMarginLeft - 6) << "\" y=\"" << fmt(kMarginTop + 4)
        << "\" text-anchor=\"end\" font-size=\"10\">" << fmt_tick(ymax) << "</text>\n";

    for (const auto& b : bars_) {
        for (std::size_t i = 0; i < b.counts.size(); ++i) {
            const double x0 = px(b.edges[i]);
            const double x1 = px(b.edges[i + 1]);
            const double y1 = py(b.counts[i]);
            out << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y1) << "\" width=\""
                << fmt(std::max(0.5, x1 - x0)) << "\" height=\""
                << fmt(kHeight - kMarginBottom - y1) << "\" fill=\"" << b.color
                << "\" fill-opacity=\"0.7\"/>\n";
        }
    }

    double legend_y = kMarginTop + 6.0;
    for (const auto& s : lines_) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (i) out << ' ';
            out << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i]));
        }
        out << "\"/>\n";
        if (!s.name.empty()) {
            out << "<text x=\"" << fmt(kWidth - kMarginRight - 4) << "\" y=\"" << fmt(legend_y)
                << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << s.color << "\">" << s.name
                << "</text>\n";
            legend_y += 14.0;
        }
    }

    out << "</svg>\n";
    return out.str();
}

void SvgPlot::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << render();
    if (!out) throw IoError("write failed: " + path.string());
}

} // namespace rominv
