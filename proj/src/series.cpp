#include "rominv/series.hpp"

#include <cmath>

#include "rominv/rng.hpp"

namespace rominv {

void TimeSeries::validate() const {
    if (!(dt > 0.0)) throw InvalidSeriesError("time series: dt must be positive");
    if (values.empty()) throw InvalidSeriesError("time series: no values");
    for (double v : values)
        if (!std::isfinite(v)) throw InvalidSeriesError("time series: non-finite value");
}

void WindowSpec::validate() const {
    if (length == 0) throw ShapeMismatchError("window spec: length must be positive");
    if (stride == 0) throw ShapeMismatchError("window spec: stride must be positive");
    if (regime == WindowRegime::Nonoverlapping && stride != length)
        throw ShapeMismatchError("window spec: nonoverlapping regime requires stride == length");
}

std::size_t window_count(std::size_t source_len, const WindowSpec& spec) {
    if (spec.length > source_len) return 0;
    return (source_len - spec.length) / spec.stride + 1;
}

WindowedDataset make_windows(const TimeSeries& series, const WindowSpec& spec) {
    series.validate();
    spec.validate();
    const std::size_t n = series.size();
    if (spec.length > n)
        throw WindowTooLongError("make_windows: window length " + std::to_string(spec.length) +
                                 " exceeds series length " + std::to_string(n));
    if (spec.regime == WindowRegime::Nonoverlapping && n % spec.length != 0)
        throw NonDivisibleError("make_windows: series length " + std::to_string(n) +
                                " not divisible by window length " + std::to_string(spec.length));

    WindowedDataset out;
    out.spec = spec;
    out.source_len = n;
    const std::size_t count = window_count(n, spec);
    out.windows.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t start = i * spec.stride;
        out.windows.emplace_back(series.values.begin() + static_cast<std::ptrdiff_t>(start),
                                 series.values.begin() +
                                     static_cast<std::ptrdiff_t>(start + spec.length));
    }
    return out;
}

std::vector<double> reassemble(const WindowedDataset& dataset,
                               const std::vector<std::vector<double>>& window_outputs) {
    if (window_outputs.size() != dataset.windows.size())
        throw ShapeMismatchError("reassemble: expected " + std::to_string(dataset.windows.size()) +
                                 " window outputs, got " + std::to_string(window_outputs.size()));
    for (const auto& w : window_outputs)
        if (w.size() != dataset.spec.length)
            throw ShapeMismatchError("reassemble: window output length " +
                                     std::to_string(w.size()) + " != spec length " +
                                     std::to_string(dataset.spec.length));

    // Mean accumulated relative to the first covering value: identical
    // covers cancel exactly, so the round trip with the original windows
    // reproduces the source bit-for-bit.
    std::vector<double> ref(dataset.source_len, 0.0);
    std::vector<double> delta_sum(dataset.source_len, 0.0);
    std::vector<std::size_t> cover(dataset.source_len, 0);
    for (std::size_t i = 0; i < window_outputs.size(); ++i) {
        const std::size_t start = i * dataset.spec.stride;
        for (std::size_t j = 0; j < dataset.spec.length; ++j) {
            const std::size_t idx = start + j;
            const double v = window_outputs[i][j];
            if (cover[idx] == 0) ref[idx] = v;
            else delta_sum[idx] += v - ref[idx];
            cover[idx] += 1;
        }
    }
    std::vector<double> out(dataset.source_len);
    for (std::size_t i = 0; i < dataset.source_len; ++i) {
        if (cover[i] == 0)
            throw ShapeMismatchError("reassemble: source index " + std::to_string(i) +
                                     " covered by no window");
        out[i] = ref[i] + delta_sum[i] / static_cast<double>(cover[i]);
    }
    return out;
}

MinMaxScale MinMaxScale::fit(std::span<const double> values, double lo, double hi) {
    if (values.empty()) throw InvalidSeriesError("min-max fit: empty input");
    if (!(hi > lo)) throw InvalidSeriesError("min-max fit: hi must exceed lo");
    double mn = values[0], mx = values[0];
    for (double v : values) {
        if (!std::isfinite(v)) throw InvalidSeriesError("min-max fit: non-finite value");
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    MinMaxScale s;
    s.src_min = mn;
    s.src_max = mx;
    s.lo = lo;
    s.hi = hi;
    s.degenerate = (mn == mx);
    return s;
}

std::pair<std::vector<double>, MinMaxScale> normalize(std::span<const double> values, double lo,
                                                      double hi) {
    MinMaxScale scale = MinMaxScale::fit(values, lo, hi);
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(scale.apply(v));
    return {std::move(out), scale};
}

void NoiseModel::validate() const {
    if (!(sigma >= 0.0)) throw InvalidSeriesError("noise model: sigma must be >= 0");
}

TimeSeries add_noise(const TimeSeries& series, const NoiseModel& noise) {
    series.validate();
    noise.validate();
    TimeSeries out = series;
    Rng rng(noise.seed);
    for (double& v : out.values) v += noise.sigma * rng.normal();
    return out;
}

} // namespace rominv
