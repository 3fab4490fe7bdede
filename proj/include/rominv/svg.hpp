#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace rominv {

// Minimal hand-emitted SVG line/histogram plots; no styling ambitions,
// deterministic bytes for identical inputs.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label);

    void add_line(std::span<const double> x, std::span<const double> y, const std::string& color,
                  const std::string& name = "");
    void add_histogram(std::span<const double> values, std::size_t bins, const std::string& color);

    std::string render() const;
    void save(const std::filesystem::path& path) const;

private:
    struct Series {
        std::vector<double> x, y;
        std::string color;
        std::string name;
    };
    struct Bars {
        std::vector<double> edges;  // bins + 1
        std::vector<double> counts; // bins
        std::string color;
    };

    std::string title_, x_label_, y_label_;
    std::vector<Series> lines_;
    std::vector<Bars> bars_;
};

} // namespace rominv
