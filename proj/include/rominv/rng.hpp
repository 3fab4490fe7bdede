#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "rominv/errors.hpp"

namespace rominv {

// Deterministic random source used everywhere randomness is needed.
//
// The generator is std::mt19937_64; all variate transforms are spelled out
// here rather than delegated to std::*_distribution, whose output sequences
// are implementation-defined. With a fixed seed the draw sequence is
// identical across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1); never returns 0, safe under log().
    double uniform_pos() { return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * M_PI * u2;
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

    // Gamma(shape, scale), Marsaglia-Tsang squeeze for shape >= 1,
    // boost transform Gamma(a)=Gamma(a+1)*U^(1/a) for shape < 1.
    double gamma(double shape, double scale) {
        if (!(shape > 0.0) || !(scale > 0.0))
            throw BadParametersError("gamma: shape and scale must be positive");
        if (shape < 1.0) {
            const double u = uniform_pos();
            return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_pos();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
        }
    }

    // InvGamma(shape, scale): reciprocal of a Gamma(shape, rate=scale) draw.
    // Mean is scale/(shape-1) for shape > 1.
    double inverse_gamma(double shape, double scale) {
        if (!(shape > 0.0) || !(scale > 0.0))
            throw BadParametersError("inverse_gamma: shape and scale must be positive");
        return 1.0 / gamma(shape, 1.0 / scale);
    }

private:
    std::mt19937_64 gen_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

// Stateless seed mixer for deriving independent per-task streams from one
// base seed (splitmix64 finalizer steps).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t s = mix(base);
    s = mix(s ^ mix(a + 1));
    s = mix(s ^ mix(b + 2));
    s = mix(s ^ mix(c + 3));
    return s;
}

} // namespace rominv
