#include "rominv/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "rominv/csv.hpp"

namespace rominv {

void McmcConfig::validate() const {
    if (!(q_lo < q_hi)) throw ConfigError("mcmc config: need q_lo < q_hi");
    if (!(q0 >= q_lo && q0 <= q_hi))
        throw ConfigError("mcmc config: initial guess outside bounds");
    if (adapt_interval < 2) throw ConfigError("mcmc config: adaptation interval must be >= 2");
    if (n < adapt_interval)
        throw ConfigError("mcmc config: iteration count must be >= adaptation interval");
    if (!(burn_in_fraction > 0.0 && burn_in_fraction < 1.0))
        throw ConfigError("mcmc config: burn-in fraction must lie in (0, 1)");
    if (!(ig_shape > 0.0) || !(ig_scale > 0.0))
        throw ConfigError("mcmc config: inverse-gamma hyperparameters must be positive");
    if (sigma2_override && !(*sigma2_override > 0.0))
        throw ConfigError("mcmc config: sigma2 override must be positive");
    if (prior && !(prior->stddev > 0.0))
        throw ConfigError("mcmc config: prior stddev must be positive");
}

double sum_squared_error(std::span<const double> data, std::span<const double> predicted) {
    if (data.size() != predicted.size())
        throw LengthMismatchError("sse: data length " + std::to_string(data.size()) +
                                  " != prediction length " + std::to_string(predicted.size()));
    if (data.empty()) throw LengthMismatchError("sse: empty data");
    double sse = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double r = data[i] - predicted[i];
        sse += r * r;
    }
    return sse;
}

double log_likelihood(std::span<const double> data, std::span<const double> predicted,
                      double sigma2) {
    if (!(sigma2 > 0.0))
        throw NonPositiveVarianceError("log_likelihood: sigma2 must be positive");
    const double sse = sum_squared_error(data, predicted);
    const double n = static_cast<double>(data.size());
    return -0.5 * n * std::log(2.0 * M_PI * sigma2) - sse / (2.0 * sigma2);
}

double sample_inverse_gamma(double shape, double scale, Rng& rng) {
    return rng.inverse_gamma(shape, scale);
}

double propose(double q_current, double cov, Rng& rng) {
    if (!(cov >= 0.0)) throw BadParametersError("propose: covariance must be >= 0");
    if (cov == 0.0) return q_current;
    return q_current + std::sqrt(cov) * rng.normal();
}

double update_covariance(std::span<const double> history, double q_lo, double q_hi) {
    if (history.size() < 2)
        throw ShortHistoryError("update_covariance: need at least 2 samples, got " +
                                std::to_string(history.size()));
    double mean = 0.0;
    for (double q : history) mean += q;
    mean /= static_cast<double>(history.size());
    double var = 0.0;
    for (double q : history) var += (q - mean) * (q - mean);
    var /= static_cast<double>(history.size() - 1);

    const double s_d = 2.38 * 2.38; // 2.38^2 / d with d = 1
    const double eps_reg = 1e-10 * (q_hi - q_lo) * (q_hi - q_lo);
    return s_d * (var + eps_reg);
}

bool metropolis_accept(double dlog, Rng& rng) {
    if (dlog >= 0.0) return true;
    return rng.uniform() < std::exp(dlog);
}

Chain run_chain(const McmcConfig& cfg, const Surrogate& surrogate, const TimeSeries& data) {
    cfg.validate();
    data.validate();

    Rng rng(cfg.seed);
    const std::size_t n_data = data.size();

    auto log_prior = [&](double q) {
        if (!cfg.prior) return 0.0;
        const double z = (q - cfg.prior->mean) / cfg.prior->stddev;
        return -0.5 * z * z;
    };
    auto conditional_sigma2 = [&](double sse) {
        if (cfg.sigma2_override) return *cfg.sigma2_override;
        return rng.inverse_gamma(cfg.ig_shape + 0.5 * static_cast<double>(n_data),
                                 cfg.ig_scale + 0.5 * sse);
    };

    double q_cur = cfg.q0;
    double sse_cur = sum_squared_error(data.values, surrogate(q_cur));
    // Gibbs-style initialization of the noise variance at the initial state;
    // out-of-bounds iterations carry the latest value forward.
    double sigma2 = conditional_sigma2(sse_cur);

    const double v0 = 0.1 * std::max(cfg.q0, 1.0);
    double cov = v0 * v0;

    Chain chain;
    chain.samples.reserve(cfg.n);
    chain.sigma2s.reserve(cfg.n);
    chain.accepted.reserve(cfg.n);

    for (int m = 1; m <= cfg.n; ++m) {
        const double q_star = propose(q_cur, cov, rng);
        bool accept = false;
        if (q_star >= cfg.q_lo && q_star <= cfg.q_hi) {
            const double sse_star = sum_squared_error(data.values, surrogate(q_star));
            sigma2 = conditional_sigma2(sse_star);
            // Same freshly drawn variance on both sides of the ratio; the
            // log-likelihood difference reduces to the SSE difference.
            const double dlog =
                (sse_cur - sse_star) / (2.0 * sigma2) + log_prior(q_star) - log_prior(q_cur);
            accept = metropolis_accept(dlog, rng);
            if (accept) {
                q_cur = q_star;
                sse_cur = sse_star;
            }
        }
        chain.samples.push_back(q_cur);
        chain.sigma2s.push_back(sigma2);
        chain.accepted.push_back(accept);

        if (m % cfg.adapt_interval == 0) {
            const std::size_t count = static_cast<std::size_t>(cfg.adapt_interval);
            const std::span<const double> history(chain.samples.data() +
                                                      (chain.samples.size() - count),
                                                  count);
            cov = update_covariance(history, cfg.q_lo, cfg.q_hi);
            chain.cov_trace.push_back(cov);
        }
    }
    return chain;
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

} // namespace

Posterior summarize(const Chain& chain, double burn_in_fraction) {
    if (chain.size() == 0) throw EmptyPostBurnInError("summarize: empty chain");
    if (!(burn_in_fraction > 0.0 && burn_in_fraction < 1.0))
        throw ConfigError("summarize: burn-in fraction must lie in (0, 1)");
    const std::size_t start = static_cast<std::size_t>(
        std::ceil(burn_in_fraction * static_cast<double>(chain.size())));
    if (start >= chain.size())
        throw EmptyPostBurnInError("summarize: burn-in leaves no samples");

    const std::size_t n_post = chain.size() - start;
    std::vector<double> post(chain.samples.begin() + static_cast<std::ptrdiff_t>(start),
                             chain.samples.end());

    Posterior p{};
    p.n_total = chain.size();
    p.n_post = n_post;
    double mean = 0.0;
    for (double q : post) mean += q;
    mean /= static_cast<double>(n_post);
    p.mean = mean;
    double var = 0.0;
    for (double q : post) var += (q - mean) * (q - mean);
    p.stddev = n_post > 1 ? std::sqrt(var / static_cast<double>(n_post - 1)) : 0.0;

    std::sort(post.begin(), post.end());
    p.median = quantile_sorted(post, 0.5);
    p.q05 = quantile_sorted(post, 0.05);
    p.q95 = quantile_sorted(post, 0.95);

    std::size_t accepted = 0;
    for (std::size_t i = start; i < chain.size(); ++i) accepted += chain.accepted[i] ? 1 : 0;
    p.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(n_post);
    return p;
}

void write_chain_csv(const std::filesystem::path& path, const Chain& chain) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << "iter,q,sigma2,accepted\n";
    for (std::size_t i = 0; i < chain.size(); ++i)
        out << (i + 1) << ',' << format_double(chain.samples[i]) << ','
            << format_double(chain.sigma2s[i]) << ',' << (chain.accepted[i] ? 1 : 0) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

Chain read_chain_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw CsvParseError(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "iter,q,sigma2,accepted")
        throw CsvParseError(path.string() + ": unexpected chain header '" + line + "'");

    Chain chain;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 4)
            throw CsvParseError(path.string() + ": expected 4 fields, got " +
                                std::to_string(fields.size()));
        chain.samples.push_back(parse_double(fields[1]));
        chain.sigma2s.push_back(parse_double(fields[2]));
        chain.accepted.push_back(fields[3] == "1");
    }
    if (chain.samples.empty()) throw CsvParseError(path.string() + ": no data rows");
    return chain;
}

void write_posterior_json(const std::filesystem::path& path, const Posterior& posterior) {
    nlohmann::json j;
    j["mean"] = posterior.mean;
    j["stddev"] = posterior.stddev;
    j["median"] = posterior.median;
    j["q05"] = posterior.q05;
    j["q95"] = posterior.q95;
    j["acceptance_rate"] = posterior.acceptance_rate;
    j["n_total"] = posterior.n_total;
    j["n_post"] = posterior.n_post;
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

} // namespace rominv
