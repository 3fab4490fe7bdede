#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rominv/errors.hpp"

namespace rominv {

// Uniformly sampled scalar series. Time of sample i is t0 + i*dt, always
// computed from the index, never accumulated.
struct TimeSeries {
    double t0 = 0.0;              // days
    double dt = 1.0;              // days
    std::vector<double> values;   // meters
    std::string label;

    std::size_t size() const { return values.size(); }
    double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }

    // Throws InvalidSeriesError unless dt > 0, values non-empty and finite.
    void validate() const;
};

enum class WindowRegime { Nonoverlapping, Sliding };

struct WindowSpec {
    std::size_t length = 0;
    std::size_t stride = 0;
    WindowRegime regime = WindowRegime::Nonoverlapping;

    static WindowSpec nonoverlapping(std::size_t length) {
        return {length, length, WindowRegime::Nonoverlapping};
    }
    static WindowSpec sliding(std::size_t length, std::size_t stride = 1) {
        return {length, stride, WindowRegime::Sliding};
    }

    // Sliding with stride != 1 is permitted but off the beaten path.
    bool nonstandard() const { return regime == WindowRegime::Sliding && stride != 1; }

    void validate() const;
};

struct WindowedDataset {
    WindowSpec spec;
    std::size_t source_len = 0;
    std::vector<std::vector<double>> windows;

    std::size_t count() const { return windows.size(); }
};

// Expected window count for a source of n samples: floor((n - w)/stride) + 1.
std::size_t window_count(std::size_t source_len, const WindowSpec& spec);

// Throws WindowTooLongError (length > series), NonDivisibleError
// (nonoverlapping regime, length does not divide series length).
WindowedDataset make_windows(const TimeSeries& series, const WindowSpec& spec);

// Inverse of make_windows for per-window model outputs: each source index
// becomes the arithmetic mean of every window value covering it. Under the
// nonoverlapping regime this is plain concatenation. Throws
// ShapeMismatchError when outputs are not congruent with the dataset or a
// source index is covered by no window (possible only for nonstandard
// strides).
std::vector<double> reassemble(const WindowedDataset& dataset,
                               const std::vector<std::vector<double>>& window_outputs);

// Invertible min-max map [src_min, src_max] -> [lo, hi]. A constant input
// is degenerate: apply() pins everything to lo and invert() returns the
// recorded constant.
struct MinMaxScale {
    double src_min = 0.0;
    double src_max = 1.0;
    double lo = 0.0;
    double hi = 1.0;
    bool degenerate = false;

    double apply(double x) const {
        if (degenerate) return lo;
        return lo + (x - src_min) * (hi - lo) / (src_max - src_min);
    }
    double invert(double y) const {
        if (degenerate) return src_min;
        return src_min + (y - lo) * (src_max - src_min) / (hi - lo);
    }

    static MinMaxScale fit(std::span<const double> values, double lo, double hi);
};

// Fits the scale on `values` and returns the scaled copy with its constants.
std::pair<std::vector<double>, MinMaxScale> normalize(std::span<const double> values, double lo,
                                                      double hi);

struct NoiseModel {
    double sigma = 0.0;   // meters
    std::uint64_t seed = 0;

    void validate() const;
};

// Adds i.i.d. N(0, sigma^2) noise from the seeded generator. Identical
// (series, noise) inputs produce bit-identical output.
TimeSeries add_noise(const TimeSeries& series, const NoiseModel& noise);

} // namespace rominv
