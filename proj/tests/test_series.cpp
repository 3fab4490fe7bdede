#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rominv/rng.hpp"
#include "rominv/series.hpp"

using namespace rominv;

namespace {

TimeSeries ramp(std::size_t n, double t0 = 0.0, double dt = 1.0) {
    TimeSeries s;
    s.t0 = t0;
    s.dt = dt;
    s.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.values[i] = static_cast<double>(i) * 0.25 - 3.0;
    s.label = "ramp";
    return s;
}

} // namespace

TEST_CASE("time stamps come from the index, not accumulation") {
    const TimeSeries s = ramp(5, 2.5, 0.1);
    CHECK(s.time(0) == 2.5);
    CHECK(s.time(4) == 2.5 + 4 * 0.1);
}

TEST_CASE("series validation rejects bad dt, empty and non-finite values") {
    TimeSeries s = ramp(3);
    CHECK_NOTHROW(s.validate());
    s.dt = 0.0;
    CHECK_THROWS_AS(s.validate(), InvalidSeriesError);
    s.dt = 1.0;
    s.values.clear();
    CHECK_THROWS_AS(s.validate(), InvalidSeriesError);
    s = ramp(3);
    s.values[1] = std::nan("");
    CHECK_THROWS_AS(s.validate(), InvalidSeriesError);
}

TEST_CASE("window spec invariants") {
    CHECK(WindowSpec::nonoverlapping(23).stride == 23);
    CHECK_FALSE(WindowSpec::nonoverlapping(23).nonstandard());
    CHECK_FALSE(WindowSpec::sliding(10).nonstandard());
    CHECK(WindowSpec::sliding(10, 4).nonstandard());
    WindowSpec bad{10, 5, WindowRegime::Nonoverlapping};
    CHECK_THROWS_AS(bad.validate(), ShapeMismatchError);
}

TEST_CASE("115-point series: 5 nonoverlapping windows of 23") {
    const WindowedDataset w = make_windows(ramp(115), WindowSpec::nonoverlapping(23));
    CHECK(w.count() == 5);
    CHECK(w.source_len == 115);
    for (const auto& win : w.windows) CHECK(win.size() == 23);
    // window i starts at source index i*stride
    CHECK(w.windows[2][0] == ramp(115).values[46]);
}

TEST_CASE("115-point series: 106 sliding windows of 10, stride 1") {
    const WindowedDataset w = make_windows(ramp(115), WindowSpec::sliding(10));
    CHECK(w.count() == 106);
    CHECK(w.windows[105][9] == ramp(115).values[114]);
}

TEST_CASE("nonoverlapping regime rejects non-divisible lengths") {
    CHECK_THROWS_AS(make_windows(ramp(7), WindowSpec::nonoverlapping(3)), NonDivisibleError);
}

TEST_CASE("window longer than the series is rejected") {
    CHECK_THROWS_AS(make_windows(ramp(7), WindowSpec::sliding(8)), WindowTooLongError);
    CHECK_THROWS_AS(make_windows(ramp(7), WindowSpec::nonoverlapping(14)), WindowTooLongError);
}

TEST_CASE("window count formula over an (n, w, stride) grid") {
    for (std::size_t n : {5, 8, 13, 21, 40}) {
        const TimeSeries s = ramp(n);
        for (std::size_t w = 1; w <= n; ++w) {
            for (std::size_t stride : {std::size_t{1}, std::size_t{2}, std::size_t{3}, w}) {
                const WindowSpec spec{w, stride, WindowRegime::Sliding};
                const WindowedDataset d = make_windows(s, spec);
                CHECK(d.count() == (n - w) / stride + 1);
                CHECK(d.count() == window_count(n, spec));
                for (std::size_t i = 0; i < d.count(); ++i)
                    CHECK(d.windows[i][0] == s.values[i * stride]);
            }
        }
    }
}

TEST_CASE("reassemble: nonoverlapping reduces to concatenation") {
    WindowedDataset d;
    d.spec = WindowSpec::nonoverlapping(2);
    d.source_len = 4;
    d.windows = {{0, 0}, {0, 0}};
    const auto out = reassemble(d, {{1, 2}, {3, 4}});
    CHECK(out == std::vector<double>{1, 2, 3, 4});
}

TEST_CASE("reassemble: sliding overlap is the arithmetic mean of covers") {
    WindowedDataset d;
    d.spec = WindowSpec::sliding(2);
    d.source_len = 3;
    d.windows = {{0, 0}, {0, 0}};
    const auto out = reassemble(d, {{1, 2}, {3, 4}});
    REQUIRE(out.size() == 3);
    CHECK(out[0] == 1.0);
    CHECK(out[1] == doctest::Approx(2.5)); // covered by 2 and 3
    CHECK(out[2] == 4.0);
}

TEST_CASE("reassemble: constant windows give the constant series") {
    const TimeSeries s = ramp(12);
    const WindowedDataset d = make_windows(s, WindowSpec::sliding(4));
    std::vector<std::vector<double>> outs(d.count(), std::vector<double>(4, 7.25));
    for (double v : reassemble(d, outs)) CHECK(v == 7.25);
}

TEST_CASE("reassemble rejects non-congruent outputs") {
    const WindowedDataset d = make_windows(ramp(6), WindowSpec::nonoverlapping(3));
    CHECK_THROWS_AS(reassemble(d, {{1, 2, 3}}), ShapeMismatchError);
    CHECK_THROWS_AS(reassemble(d, {{1, 2}, {3, 4}}), ShapeMismatchError);
}

TEST_CASE("window/reassemble round trip is exact in both regimes") {
    Rng rng(99);
    for (std::size_t n : {12, 36, 115}) {
        TimeSeries s = ramp(n);
        for (double& v : s.values) v = rng.uniform(-5.0, 5.0);

        for (std::size_t w : {1, 2, 3, 4, 6}) {
            if (n % w == 0) {
                const WindowedDataset d = make_windows(s, WindowSpec::nonoverlapping(w));
                CHECK(reassemble(d, d.windows) == s.values);
            }
            const WindowedDataset d = make_windows(s, WindowSpec::sliding(w));
            CHECK(reassemble(d, d.windows) == s.values);
        }
    }
}

TEST_CASE("normalize: affine endpoints, round trip, degenerate policy") {
    const std::vector<double> v{0.0, 5.0, 10.0};
    const auto [scaled, scale] = normalize(v, 0.0, 1.0);
    CHECK(scaled == std::vector<double>{0.0, 0.5, 1.0});

    Rng rng(13);
    for (int i = 0; i < 100; ++i) {
        const double x = rng.uniform(-20.0, 20.0);
        const double rel = std::abs(scale.invert(scale.apply(x)) - x) / std::max(1.0, std::abs(x));
        CHECK(rel < 1e-12);
    }

    const std::vector<double> flat{4.0, 4.0, 4.0};
    const auto [fs, fscale] = normalize(flat, -1.0, 1.0);
    CHECK(fscale.degenerate);
    CHECK(fs == std::vector<double>{-1.0, -1.0, -1.0});
    CHECK(fscale.invert(-1.0) == 4.0);
}

TEST_CASE("normalize rejects empty input and inverted target range") {
    CHECK_THROWS_AS(normalize(std::vector<double>{}, 0.0, 1.0), InvalidSeriesError);
    CHECK_THROWS_AS(normalize(std::vector<double>{1.0, 2.0}, 1.0, 0.0), InvalidSeriesError);
}

TEST_CASE("add_noise: sigma 0 is the identity") {
    const TimeSeries s = ramp(20);
    const TimeSeries out = add_noise(s, NoiseModel{0.0, 5});
    CHECK(out.values == s.values);
}

TEST_CASE("add_noise: identical seeds give bit-identical output") {
    const TimeSeries s = ramp(50);
    const TimeSeries a = add_noise(s, NoiseModel{0.3, 17});
    const TimeSeries b = add_noise(s, NoiseModel{0.3, 17});
    CHECK(a.values == b.values);
    const TimeSeries c = add_noise(s, NoiseModel{0.3, 18});
    CHECK(a.values != c.values);
}

TEST_CASE("add_noise: sample moments at n = 1e5") {
    TimeSeries flat;
    flat.t0 = 0.0;
    flat.dt = 1.0;
    flat.values.assign(100000, 0.0);
    flat.label = "flat";
    const double sigma = 0.01;
    const TimeSeries noisy = add_noise(flat, NoiseModel{sigma, 23});

    double mean = 0.0;
    for (double v : noisy.values) mean += v;
    mean /= static_cast<double>(noisy.size());
    double var = 0.0;
    for (double v : noisy.values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(noisy.size() - 1);

    // mean within 3 sigma / sqrt(n), std within 2% of sigma
    CHECK(std::abs(mean) < 3.0 * sigma / std::sqrt(1e5));
    CHECK(std::abs(std::sqrt(var) - sigma) < 0.02 * sigma);
}
