#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rominv/rng.hpp"
#include "rominv/series.hpp"

namespace rominv {

// Optional Gaussian prior on the rate. Off by default: the prior is then
// uniform on the configured bounds, which the hard-limit rejection already
// realizes.
struct GaussianPrior {
    double mean;
    double stddev;
};

struct McmcConfig {
    double q0 = 1.0;                     // initial guess, MSCF/day
    double q_lo = 1.0;                   // lower bound
    double q_hi = 500.0;                 // upper bound
    int n = 10000;                       // iterations
    int adapt_interval = 100;            // m0
    double burn_in_fraction = 0.5;
    double ig_shape = 0.01;              // a0
    double ig_scale = 0.01;              // b0
    std::uint64_t seed = 0;
    std::optional<double> sigma2_override; // pin the noise variance (sanity runs)
    std::optional<GaussianPrior> prior;

    void validate() const; // throws ConfigError
};

struct Chain {
    std::vector<double> samples;   // accepted state per iteration
    std::vector<double> sigma2s;   // noise variance in effect per iteration
    std::vector<bool> accepted;    // proposal accepted this iteration
    std::vector<double> cov_trace; // proposal variance after each adaptation

    std::size_t size() const { return samples.size(); }
};

struct Posterior {
    double mean;
    double stddev;
    double median;
    double q05;
    double q95;
    double acceptance_rate; // over post-burn-in iterations
    std::size_t n_total;
    std::size_t n_post;
};

// Gaussian log-likelihood of the residuals at a given noise variance:
// -(n/2) ln(2 pi sigma2) - SSE/(2 sigma2).
double log_likelihood(std::span<const double> data, std::span<const double> predicted,
                      double sigma2);

double sum_squared_error(std::span<const double> data, std::span<const double> predicted);

// One draw from InvGamma(shape, scale); strictly positive.
double sample_inverse_gamma(double shape, double scale, Rng& rng);

// Random-walk proposal q* = q + sqrt(cov) * z, z ~ N(0,1).
double propose(double q_current, double cov, Rng& rng);

// Scaled sample variance of the last adaptation window:
// (2.38^2/d) * (var(history) + eps_reg), d = 1, eps_reg = 1e-10*(q_hi-q_lo)^2.
// Strictly positive; throws ShortHistoryError for fewer than 2 samples.
double update_covariance(std::span<const double> history, double q_lo, double q_hi);

// Metropolis decision: a non-negative log-ratio accepts unconditionally
// without consuming randomness; otherwise accept with probability exp(dlog).
bool metropolis_accept(double dlog, Rng& rng);

// The surrogate bound to the observation time grid; must be deterministic.
using Surrogate = std::function<std::vector<double>(double q)>;

// Adaptive Metropolis loop: propose, reject out-of-bounds immediately, draw
// the noise variance from its inverse-gamma conditional at the proposal,
// accept on the likelihood ratio at that shared variance, and re-estimate
// the proposal variance every adapt_interval iterations from the trailing
// samples. Deterministic given the seed.
Chain run_chain(const McmcConfig& cfg, const Surrogate& surrogate, const TimeSeries& data);

// Statistics over samples with index >= ceil(fraction * n).
Posterior summarize(const Chain& chain, double burn_in_fraction);

// Chain CSV: header "iter,q,sigma2,accepted", iter starting at 1.
void write_chain_csv(const std::filesystem::path& path, const Chain& chain);
Chain read_chain_csv(const std::filesystem::path& path);

void write_posterior_json(const std::filesystem::path& path, const Posterior& posterior);

} // namespace rominv
