#include "rominv/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "rominv/csv.hpp"
#include "rominv/svg.hpp"
#include "rominv/vtk.hpp"

namespace rominv {

namespace {

using nlohmann::json;

constexpr Approach kApproaches[] = {Approach::Nonoverlapping, Approach::Sliding};

std::uint64_t rate_bits(double rate) { return std::bit_cast<std::uint64_t>(rate); }

json forward_to_json(const ForwardParams& p) {
    return {{"q_ref", p.q_ref},     {"amp_lin", p.amp_lin}, {"amp_quad", p.amp_quad},
            {"amp_osc", p.amp_osc}, {"tau", p.tau},         {"period", p.period},
            {"horizon", p.horizon}, {"dt", p.dt}};
}

ForwardParams forward_from_json(const json& j) {
    ForwardParams p;
    p.q_ref = j.value("q_ref", p.q_ref);
    p.amp_lin = j.value("amp_lin", p.amp_lin);
    p.amp_quad = j.value("amp_quad", p.amp_quad);
    p.amp_osc = j.value("amp_osc", p.amp_osc);
    p.tau = j.value("tau", p.tau);
    p.period = j.value("period", p.period);
    p.horizon = j.value("horizon", p.horizon);
    p.dt = j.value("dt", p.dt);
    return p;
}

json config_to_json(const PipelineConfig& cfg) {
    json j;
    j["out_dir"] = cfg.out_dir.string();
    j["rates"] = cfg.rates;
    j["forward"] = forward_to_json(cfg.forward);
    j["noise"] = {{"sigma_rel", cfg.noise_sigma_rel},
                  {"sigma_abs", cfg.noise_sigma_abs},
                  {"seed", cfg.noise_seed}};
    j["train"] = {{"epochs", cfg.train.epochs},
                  {"learning_rate", cfg.train.learning_rate},
                  {"beta1", cfg.train.beta1},
                  {"beta2", cfg.train.beta2},
                  {"epsilon", cfg.train.epsilon},
                  {"seed", cfg.train.seed},
                  {"teacher_forcing", cfg.train.teacher_forcing},
                  {"hidden", cfg.train.hidden},
                  {"batch_mode",
                   cfg.train.batch_mode == BatchMode::PerWindow ? "per_window" : "full_batch"},
                  {"shuffle", cfg.train.shuffle},
                  {"init_scale", cfg.train.init_scale},
                  {"forget_bias", cfg.train.forget_bias},
                  {"lr_decay", cfg.train.lr_decay},
                  {"clip_norm", cfg.train.clip_norm},
                  {"autoregressive_tail", cfg.train.autoregressive_tail},
                  {"balanced_loss", cfg.train.balanced_loss},
                  {"nonoverlapping_window", cfg.nonoverlapping_window},
                  {"sliding_window", cfg.sliding_window},
                  {"sliding_stride", cfg.sliding_stride}};
    j["mcmc"] = {{"q0", cfg.mcmc.q0},
                 {"q_lo", cfg.mcmc.q_lo},
                 {"q_hi", cfg.mcmc.q_hi},
                 {"adapt_interval", cfg.mcmc.adapt_interval},
                 {"burn_in_fraction", cfg.mcmc.burn_in_fraction},
                 {"ig_shape", cfg.mcmc.ig_shape},
                 {"ig_scale", cfg.mcmc.ig_scale},
                 {"seed", cfg.mcmc.seed}};
    j["sweep"] = cfg.sweep;
    j["exact_surrogate"] = cfg.exact_surrogate;
    return j;
}

PipelineConfig config_from_json(const json& j) {
    PipelineConfig cfg;
    cfg.out_dir = j.value("out_dir", cfg.out_dir.string());
    cfg.rates = j.value("rates", cfg.rates);
    if (j.contains("forward")) cfg.forward = forward_from_json(j.at("forward"));
    if (j.contains("noise")) {
        const auto& n = j.at("noise");
        cfg.noise_sigma_rel = n.value("sigma_rel", cfg.noise_sigma_rel);
        cfg.noise_sigma_abs = n.value("sigma_abs", cfg.noise_sigma_abs);
        cfg.noise_seed = n.value("seed", cfg.noise_seed);
    }
    if (j.contains("train")) {
        const auto& t = j.at("train");
        cfg.train.epochs = t.value("epochs", cfg.train.epochs);
        cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
        cfg.train.beta1 = t.value("beta1", cfg.train.beta1);
        cfg.train.beta2 = t.value("beta2", cfg.train.beta2);
        cfg.train.epsilon = t.value("epsilon", cfg.train.epsilon);
        cfg.train.seed = t.value("seed", cfg.train.seed);
        cfg.train.teacher_forcing = t.value("teacher_forcing", cfg.train.teacher_forcing);
        cfg.train.hidden = t.value("hidden", cfg.train.hidden);
        const std::string mode = t.value("batch_mode", std::string("per_window"));
        if (mode == "per_window") cfg.train.batch_mode = BatchMode::PerWindow;
        else if (mode == "full_batch") cfg.train.batch_mode = BatchMode::FullBatch;
        else throw ConfigError("config: unknown batch_mode '" + mode + "'");
        cfg.train.shuffle = t.value("shuffle", cfg.train.shuffle);
        cfg.train.init_scale = t.value("init_scale", cfg.train.init_scale);
        cfg.train.forget_bias = t.value("forget_bias", cfg.train.forget_bias);
        cfg.train.lr_decay = t.value("lr_decay", cfg.train.lr_decay);
        cfg.train.clip_norm = t.value("clip_norm", cfg.train.clip_norm);
        cfg.train.autoregressive_tail =
            t.value("autoregressive_tail", cfg.train.autoregressive_tail);
        cfg.train.balanced_loss = t.value("balanced_loss", cfg.train.balanced_loss);
        cfg.nonoverlapping_window = t.value("nonoverlapping_window", cfg.nonoverlapping_window);
        cfg.sliding_window = t.value("sliding_window", cfg.sliding_window);
        cfg.sliding_stride = t.value("sliding_stride", cfg.sliding_stride);
    }
    if (j.contains("mcmc")) {
        const auto& m = j.at("mcmc");
        cfg.mcmc.q0 = m.value("q0", cfg.mcmc.q0);
        cfg.mcmc.q_lo = m.value("q_lo", cfg.mcmc.q_lo);
        cfg.mcmc.q_hi = m.value("q_hi", cfg.mcmc.q_hi);
        cfg.mcmc.adapt_interval = m.value("adapt_interval", cfg.mcmc.adapt_interval);
        cfg.mcmc.burn_in_fraction = m.value("burn_in_fraction", cfg.mcmc.burn_in_fraction);
        cfg.mcmc.ig_shape = m.value("ig_shape", cfg.mcmc.ig_shape);
        cfg.mcmc.ig_scale = m.value("ig_scale", cfg.mcmc.ig_scale);
        cfg.mcmc.seed = m.value("seed", cfg.mcmc.seed);
    }
    cfg.sweep = j.value("sweep", cfg.sweep);
    cfg.exact_surrogate = j.value("exact_surrogate", cfg.exact_surrogate);
    return cfg;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

} // namespace

std::string approach_name(Approach a) {
    return a == Approach::Nonoverlapping ? "nonoverlapping" : "sliding";
}

Approach approach_from_name(const std::string& name) {
    if (name == "nonoverlapping") return Approach::Nonoverlapping;
    if (name == "sliding") return Approach::Sliding;
    throw ConfigError("unknown approach '" + name + "' (expected nonoverlapping|sliding)");
}

std::string rate_label(double rate) {
    if (rate == std::round(rate) && std::abs(rate) < 1e15)
        return std::to_string(static_cast<long long>(rate));
    return format_double(rate);
}

void PipelineConfig::validate() const {
    if (rates.empty()) throw ConfigError("config: rate grid must be non-empty");
    if (sweep.empty()) throw ConfigError("config: sample-count sweep must be non-empty");
    for (int n : sweep)
        if (n < mcmc.adapt_interval)
            throw ConfigError("config: sweep entry " + std::to_string(n) +
                              " below adaptation interval");
    if (!(noise_sigma_rel >= 0.0) || !(noise_sigma_abs >= 0.0))
        throw ConfigError("config: noise sigma must be >= 0");
    forward.validate();
    train.validate();
    if (nonoverlapping_window == 0 || sliding_window == 0 || sliding_stride == 0)
        throw ConfigError("config: window sizes and stride must be positive");
    McmcConfig probe = mcmc;
    probe.n = sweep.front();
    probe.validate();
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config: invalid JSON in " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

void PipelineConfig::save(const std::filesystem::path& path) const {
    write_text(path, config_to_json(*this).dump(2) + "\n");
}

std::filesystem::path PipelineConfig::data_csv(double rate) const {
    return out_dir / "data" / ("rate_" + rate_label(rate) + ".csv");
}
std::filesystem::path PipelineConfig::noisy_csv(double rate) const {
    return out_dir / "data" / "noisy" / ("rate_" + rate_label(rate) + ".csv");
}
std::filesystem::path PipelineConfig::model_json(Approach approach) const {
    return out_dir / "models" / (approach_name(approach) + ".json");
}
std::filesystem::path PipelineConfig::loss_csv(Approach approach) const {
    return out_dir / "models" / (approach_name(approach) + "_loss.csv");
}
std::filesystem::path PipelineConfig::chain_csv(double rate, Approach approach, int n) const {
    return out_dir / "chains" /
           (approach_name(approach) + "_q" + rate_label(rate) + "_n" + std::to_string(n) + ".csv");
}
std::filesystem::path PipelineConfig::posterior_json(double rate, Approach approach, int n) const {
    return out_dir / "chains" /
           (approach_name(approach) + "_q" + rate_label(rate) + "_n" + std::to_string(n) +
            "_posterior.json");
}
std::filesystem::path PipelineConfig::manifest_json() const { return out_dir / "manifest.json"; }
std::filesystem::path PipelineConfig::report_dir() const { return out_dir / "report"; }

TrainConfig PipelineConfig::train_config(Approach approach) const {
    TrainConfig t = train;
    if (approach == Approach::Nonoverlapping) {
        t.window = WindowSpec::nonoverlapping(nonoverlapping_window);
        t.seed = derive_seed(train.seed, 0);
    } else {
        t.window = WindowSpec::sliding(sliding_window, sliding_stride);
        t.seed = derive_seed(train.seed, 1);
    }
    return t;
}

double PipelineConfig::noise_sigma_for(const TimeSeries& clean) const {
    if (noise_sigma_abs > 0.0) return noise_sigma_abs;
    const auto [mn, mx] = std::minmax_element(clean.values.begin(), clean.values.end());
    return noise_sigma_rel * (*mx - *mn);
}

std::uint64_t PipelineConfig::noise_seed_for(double rate) const {
    return derive_seed(noise_seed, rate_bits(rate));
}

std::uint64_t PipelineConfig::chain_seed_for(double rate, Approach approach, int n,
                                             bool exact) const {
    const std::uint64_t kind = exact ? 2 : (approach == Approach::Nonoverlapping ? 0 : 1);
    return derive_seed(mcmc.seed, rate_bits(rate), kind, static_cast<std::uint64_t>(n));
}

void cmd_generate(const PipelineConfig& cfg) {
    cfg.validate();
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir / "data" / "noisy");

    const auto dataset = generate_dataset(cfg.rates, cfg.forward);

    json sigmas, seeds;
    for (const auto& [rate, series] : dataset) {
        write_series_csv(cfg.data_csv(rate), series);
        NoiseModel noise;
        noise.sigma = cfg.noise_sigma_for(series);
        noise.seed = cfg.noise_seed_for(rate);
        write_series_csv(cfg.noisy_csv(rate), add_noise(series, noise));
        sigmas[rate_label(rate)] = noise.sigma;
        seeds[rate_label(rate)] = noise.seed;
    }

    json manifest;
    manifest["format"] = "rominv-manifest";
    manifest["version"] = 1;
    manifest["config"] = config_to_json(cfg);
    manifest["noise_sigmas"] = sigmas;
    manifest["noise_seeds"] = seeds;
    write_text(cfg.manifest_json(), manifest.dump(2) + "\n");
}

TimeSeries cmd_extract(const std::filesystem::path& dir, const std::string& vector_name, double dt,
                       double t0, const std::filesystem::path& out_csv) {
    if (!(dt > 0.0)) throw ConfigError("extract: dt must be positive");
    SnapshotSet snapshots;
    snapshots.vector_name = vector_name;
    const auto files = list_vtk_files(dir);
    if (files.empty()) throw ConfigError("extract: no .vtk files under " + dir.string());
    for (std::size_t i = 0; i < files.size(); ++i)
        snapshots.entries.emplace_back(t0 + static_cast<double>(i) * dt, files[i]);
    TimeSeries series = build_series(snapshots);
    if (!out_csv.empty()) {
        if (out_csv.has_parent_path()) std::filesystem::create_directories(out_csv.parent_path());
        write_series_csv(out_csv, series);
    }
    return series;
}

TrainResult cmd_train(const PipelineConfig& cfg, Approach approach) {
    cfg.validate();
    std::map<double, TimeSeries> dataset;
    for (double rate : cfg.rates) dataset.emplace(rate, read_series_csv(cfg.data_csv(rate)));

    TrainResult result = train(dataset, cfg.train_config(approach));

    std::filesystem::create_directories(cfg.out_dir / "models");
    result.model.save(cfg.model_json(approach));

    std::ofstream loss(cfg.loss_csv(approach));
    if (!loss) throw IoError("cannot open for writing: " + cfg.loss_csv(approach).string());
    loss << "epoch,loss\n";
    for (std::size_t e = 0; e < result.loss_log.size(); ++e)
        loss << e << ',' << format_double(result.loss_log[e]) << '\n';
    return result;
}

namespace {

Posterior invert_impl(const PipelineConfig& cfg, const TimeSeries& data, const Surrogate& surrogate,
                      int n, std::uint64_t seed, const std::filesystem::path& chain_path,
                      const std::filesystem::path& posterior_path) {
    McmcConfig mc = cfg.mcmc;
    mc.n = n;
    mc.seed = seed;
    const Chain chain = run_chain(mc, surrogate, data);
    const Posterior posterior = summarize(chain, mc.burn_in_fraction);

    std::filesystem::create_directories(chain_path.parent_path());
    write_chain_csv(chain_path, chain);
    write_posterior_json(posterior_path, posterior);
    return posterior;
}

Surrogate make_rom_surrogate(RomModel model, const TimeSeries& data) {
    const double t0 = data.t0, dt = data.dt;
    const std::size_t n = data.size();
    return [model = std::move(model), t0, dt, n](double q) {
        return rom_evaluate(model, q, t0, dt, n);
    };
}

Surrogate make_exact_surrogate(const ForwardParams& params, const TimeSeries& data) {
    const double t0 = data.t0, dt = data.dt;
    const std::size_t n = data.size();
    return [params, t0, dt, n](double q) {
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = synth_displacement(t0 + static_cast<double>(i) * dt, q, params);
        return out;
    };
}

} // namespace

Posterior cmd_invert(const PipelineConfig& cfg, double rate, Approach approach, int n) {
    cfg.validate();
    if (n < cfg.mcmc.adapt_interval)
        throw ConfigError("invert: n below adaptation interval");
    const TimeSeries data = read_series_csv(cfg.noisy_csv(rate));

    Surrogate surrogate;
    if (cfg.exact_surrogate) {
        surrogate = make_exact_surrogate(cfg.forward, data);
    } else {
        surrogate = make_rom_surrogate(RomModel::load(cfg.model_json(approach)), data);
    }
    return invert_impl(cfg, data, surrogate, n,
                       cfg.chain_seed_for(rate, approach, n, cfg.exact_surrogate),
                       cfg.chain_csv(rate, approach, n), cfg.posterior_json(rate, approach, n));
}

Posterior cmd_invert_files(const PipelineConfig& cfg, const std::filesystem::path& data_csv,
                           const std::filesystem::path& model_json, int n, std::uint64_t seed,
                           const std::string& label) {
    const TimeSeries data = read_series_csv(data_csv);
    Surrogate surrogate = cfg.exact_surrogate
                              ? make_exact_surrogate(cfg.forward, data)
                              : make_rom_surrogate(RomModel::load(model_json), data);
    const auto chain_path = cfg.out_dir / "chains" / (label + ".csv");
    const auto posterior_path = cfg.out_dir / "chains" / (label + "_posterior.json");
    return invert_impl(cfg, data, surrogate, n, seed, chain_path, posterior_path);
}

ComparisonReport cmd_compare(const PipelineConfig& cfg) {
    cfg.validate();
    namespace fs = std::filesystem;
    fs::create_directories(cfg.report_dir());

    ComparisonReport report;
    const int n_max = *std::max_element(cfg.sweep.begin(), cfg.sweep.end());

    // reconstruction quality per approach/rate, plus overlay plots
    for (Approach approach : kApproaches) {
        const RomModel model = RomModel::load(cfg.model_json(approach));
        ApproachSummary summary{};
        for (double rate : cfg.rates) {
            const TimeSeries clean = read_series_csv(cfg.data_csv(rate));
            const Reconstruction recon =
                reconstruct(model, rate, clean.t0, clean.dt, clean.size());
            double mse = 0.0;
            for (std::size_t i = 0; i < clean.size(); ++i) {
                const double r = recon.series.values[i] - clean.values[i];
                mse += r * r;
            }
            mse /= static_cast<double>(clean.size());
            summary.recon_mse[rate] = mse;
            summary.boundary_jump[rate] =
                boundary_jump(recon.series.values, model.window.length);

            std::vector<double> times(clean.size());
            for (std::size_t i = 0; i < clean.size(); ++i) times[i] = clean.time(i);
            SvgPlot plot("reconstruction " + approach_name(approach) + " q=" + rate_label(rate),
                         "t [days]", "u [m]");
            plot.add_line(times, clean.values, "#1f77b4", "ground truth");
            plot.add_line(times, recon.series.values, "#d62728", "rom");
            plot.save(cfg.report_dir() /
                      ("recon_" + approach_name(approach) + "_q" + rate_label(rate) + ".svg"));
        }
        report.per_approach[approach_name(approach)] = std::move(summary);
    }

    // inversion cells
    for (Approach approach : kApproaches) {
        double rel_sum_at_max = 0.0;
        for (double rate : cfg.rates) {
            for (int n : cfg.sweep) {
                const fs::path chain_path = cfg.chain_csv(rate, approach, n);
                if (!fs::exists(chain_path))
                    throw MissingCellError("compare: missing chain " + chain_path.string());
                const Chain chain = read_chain_csv(chain_path);
                const Posterior posterior = summarize(chain, cfg.mcmc.burn_in_fraction);

                ReportCell cell{};
                cell.rate = rate;
                cell.approach = approach;
                cell.n = n;
                cell.posterior_mean = posterior.mean;
                cell.posterior_std = posterior.stddev;
                cell.rel_error = std::abs(posterior.mean - rate) / rate;
                cell.acceptance_rate = posterior.acceptance_rate;
                report.cells.push_back(cell);
                if (n == n_max) rel_sum_at_max += cell.rel_error;

                std::vector<double> iters(chain.size());
                for (std::size_t i = 0; i < chain.size(); ++i)
                    iters[i] = static_cast<double>(i + 1);
                const std::string cell_name =
                    approach_name(approach) + "_q" + rate_label(rate) + "_n" + std::to_string(n);
                SvgPlot trace("trace " + cell_name, "iteration", "q [MSCF/day]");
                trace.add_line(iters, chain.samples, "#2ca02c", "chain");
                trace.save(cfg.report_dir() / ("trace_" + cell_name + ".svg"));

                const std::size_t start = static_cast<std::size_t>(std::ceil(
                    cfg.mcmc.burn_in_fraction * static_cast<double>(chain.size())));
                const std::vector<double> post(chain.samples.begin() + start,
                                               chain.samples.end());
                SvgPlot hist("posterior " + cell_name, "q [MSCF/day]", "count");
                hist.add_histogram(post, 40, "#9467bd");
                hist.save(cfg.report_dir() / ("hist_" + cell_name + ".svg"));
            }
        }
        const double mean_rel = rel_sum_at_max / static_cast<double>(cfg.rates.size());
        report.per_approach[approach_name(approach)].mean_rel_error = mean_rel;
        if (approach == Approach::Sliding) report.sliding_mean_rel_error = mean_rel;
        else report.nonoverlapping_mean_rel_error = mean_rel;
    }
    report.sliding_better = report.sliding_mean_rel_error <= report.nonoverlapping_mean_rel_error;

    // report.csv
    {
        std::ofstream out(cfg.report_dir() / "report.csv");
        if (!out) throw IoError("cannot open report.csv for writing");
        out << "rate,approach,n,posterior_mean,posterior_std,rel_error,acceptance_rate\n";
        for (const auto& c : report.cells)
            out << rate_label(c.rate) << ',' << approach_name(c.approach) << ',' << c.n << ','
                << format_double(c.posterior_mean) << ',' << format_double(c.posterior_std) << ','
                << format_double(c.rel_error) << ',' << format_double(c.acceptance_rate) << '\n';
    }

    // report.json
    json j;
    j["format"] = "rominv-report";
    j["version"] = 1;
    j["n_max"] = n_max;
    json cells = json::array();
    for (const auto& c : report.cells)
        cells.push_back({{"rate", c.rate},
                         {"approach", approach_name(c.approach)},
                         {"n", c.n},
                         {"posterior_mean", c.posterior_mean},
                         {"posterior_std", c.posterior_std},
                         {"rel_error", c.rel_error},
                         {"acceptance_rate", c.acceptance_rate}});
    j["cells"] = cells;
    for (const auto& [name, summary] : report.per_approach) {
        json s;
        s["mean_rel_error"] = summary.mean_rel_error;
        for (const auto& [rate, mse] : summary.recon_mse) s["recon_mse"][rate_label(rate)] = mse;
        for (const auto& [rate, jump] : summary.boundary_jump)
            s["boundary_jump"][rate_label(rate)] = jump;
        j["approaches"][name] = s;
    }
    j["headline"] = {{"sliding_mean_rel_error", report.sliding_mean_rel_error},
                     {"nonoverlapping_mean_rel_error", report.nonoverlapping_mean_rel_error},
                     {"sliding_better", report.sliding_better}};
    write_text(cfg.report_dir() / "report.json", j.dump(2) + "\n");

    return report;
}

} // namespace rominv
