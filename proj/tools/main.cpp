#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rominv/csv.hpp"
#include "rominv/pipeline.hpp"

namespace {

using namespace rominv;

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
};

PipelineConfig resolve_config(const CommonOpts& opts) {
    PipelineConfig cfg;
    if (!opts.config_path.empty()) cfg = PipelineConfig::load(opts.config_path);
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    return cfg;
}

std::vector<double> parse_rates(const std::string& csv) {
    std::vector<double> rates;
    for (const std::string& tok : split_csv_line(csv)) {
        if (tok.empty()) throw ConfigError("rates: empty entry in '" + csv + "'");
        rates.push_back(parse_double(tok));
    }
    return rates;
}

int run(int argc, char** argv) {
    CLI::App app{"LSTM-autoencoder surrogate training and adaptive-Metropolis "
                 "injection-rate inversion"};
    app.require_subcommand(1);

    CommonOpts common;
    app.add_option("--config", common.config_path, "pipeline config JSON");
    app.add_option("--out-dir", common.out_dir, "output directory (overrides config)");

    // generate
    auto* generate = app.add_subcommand("generate", "emit synthetic per-rate series + manifest");
    std::string gen_rates;
    double gen_sigma_rel = -1.0, gen_sigma_abs = -1.0;
    std::uint64_t gen_noise_seed = 0;
    bool gen_have_noise_seed = false;
    generate->add_option("--rates", gen_rates, "comma-separated injection rates, MSCF/day");
    generate->add_option("--noise-sigma-rel", gen_sigma_rel,
                         "noise sigma as a fraction of each series' range");
    generate->add_option("--noise-sigma-abs", gen_sigma_abs, "absolute noise sigma, meters");
    generate->add_option("--noise-seed", gen_noise_seed, "noise RNG seed")
        ->each([&](const std::string&) { gen_have_noise_seed = true; });

    // extract
    auto* extract = app.add_subcommand("extract", "build a series CSV from VTK snapshots");
    std::string ex_dir, ex_vector, ex_out;
    double ex_dt = 1.0, ex_t0 = 0.0;
    extract->add_option("--dir", ex_dir, "directory of .vtk snapshots")->required();
    extract->add_option("--vector", ex_vector, "point-data vector array name")->required();
    extract->add_option("--dt", ex_dt, "time step between snapshots, days")->required();
    extract->add_option("--t0", ex_t0, "time of the first snapshot, days");
    extract->add_option("--out", ex_out, "output CSV path")->required();

    // train
    auto* train_cmd = app.add_subcommand("train", "train a windowing approach's surrogate");
    std::string tr_approach;
    int tr_epochs = -1;
    double tr_lr = -1.0;
    std::uint64_t tr_seed = 0;
    bool tr_have_seed = false;
    train_cmd->add_option("--approach", tr_approach, "nonoverlapping|sliding")->required();
    train_cmd->add_option("--epochs", tr_epochs, "training epochs");
    train_cmd->add_option("--lr", tr_lr, "Adam learning rate");
    train_cmd->add_option("--seed", tr_seed, "weight init seed")
        ->each([&](const std::string&) { tr_have_seed = true; });

    // invert
    auto* invert = app.add_subcommand("invert", "run one MCMC inversion cell");
    std::string in_data, in_model, in_bounds, in_approach, in_label;
    int in_n = 10000, in_adapt = -1;
    double in_q0 = std::nan(""), in_burn = -1.0, in_rate = std::nan("");
    std::uint64_t in_seed = 0;
    bool in_have_seed = false, in_exact = false;
    invert->add_option("--data", in_data, "noisy series CSV (explicit-file mode)");
    invert->add_option("--model", in_model, "trained model JSON (explicit-file mode)");
    invert->add_option("--rate", in_rate, "ground-truth rate (conventional-layout mode)");
    invert->add_option("--approach", in_approach, "nonoverlapping|sliding");
    invert->add_option("--n", in_n, "iteration count")->required();
    invert->add_option("--seed", in_seed, "chain seed")
        ->each([&](const std::string&) { in_have_seed = true; });
    invert->add_option("--q0", in_q0, "initial guess, MSCF/day");
    invert->add_option("--bounds", in_bounds, "q_lo,q_hi");
    invert->add_option("--adapt", in_adapt, "covariance adaptation interval");
    invert->add_option("--burn", in_burn, "burn-in fraction");
    invert->add_flag("--exact-surrogate", in_exact, "use the synthetic forward model as F(q)");
    invert->add_option("--label", in_label, "output file stem (explicit-file mode)");

    // compare
    auto* compare = app.add_subcommand("compare", "aggregate all cells into the report");

    app.parse(argc, argv);

    if (*generate) {
        PipelineConfig cfg = resolve_config(common);
        if (!gen_rates.empty()) cfg.rates = parse_rates(gen_rates);
        if (gen_sigma_rel >= 0.0) cfg.noise_sigma_rel = gen_sigma_rel;
        if (gen_sigma_abs >= 0.0) cfg.noise_sigma_abs = gen_sigma_abs;
        if (gen_have_noise_seed) cfg.noise_seed = gen_noise_seed;
        cmd_generate(cfg);
        std::cout << "wrote " << cfg.rates.size() << " series under "
                  << (cfg.out_dir / "data").string() << "\n";
    } else if (*extract) {
        const TimeSeries series = cmd_extract(ex_dir, ex_vector, ex_dt, ex_t0, ex_out);
        std::cout << "wrote " << series.size() << " samples to " << ex_out << "\n";
    } else if (*train_cmd) {
        PipelineConfig cfg = resolve_config(common);
        if (tr_epochs > 0) cfg.train.epochs = tr_epochs;
        if (tr_lr > 0.0) cfg.train.learning_rate = tr_lr;
        if (tr_have_seed) cfg.train.seed = tr_seed;
        const Approach approach = approach_from_name(tr_approach);
        const TrainResult result = cmd_train(cfg, approach);
        std::cout << "trained " << approach_name(approach) << ": loss "
                  << format_double(result.loss_log.front()) << " -> "
                  << format_double(result.loss_log.back()) << ", model "
                  << cfg.model_json(approach).string() << "\n";
    } else if (*invert) {
        PipelineConfig cfg = resolve_config(common);
        if (!std::isnan(in_q0)) cfg.mcmc.q0 = in_q0;
        if (!in_bounds.empty()) {
            const auto parts = split_csv_line(in_bounds);
            if (parts.size() != 2) throw ConfigError("--bounds expects q_lo,q_hi");
            cfg.mcmc.q_lo = parse_double(parts[0]);
            cfg.mcmc.q_hi = parse_double(parts[1]);
        }
        if (in_adapt > 0) cfg.mcmc.adapt_interval = in_adapt;
        if (in_burn > 0.0) cfg.mcmc.burn_in_fraction = in_burn;
        if (in_exact) cfg.exact_surrogate = true;

        Posterior posterior;
        if (!in_data.empty()) {
            if (in_model.empty() && !cfg.exact_surrogate)
                throw ConfigError("invert: --model required with --data (or --exact-surrogate)");
            std::string label = in_label;
            if (label.empty()) {
                label = std::filesystem::path(in_data).stem().string() + "_n" +
                        std::to_string(in_n);
            }
            const std::uint64_t seed = in_have_seed ? in_seed : cfg.mcmc.seed;
            posterior = cmd_invert_files(cfg, in_data, in_model, in_n, seed, label);
        } else {
            if (std::isnan(in_rate))
                throw ConfigError("invert: need --rate (conventional mode) or --data");
            if (in_have_seed) cfg.mcmc.seed = in_seed;
            const Approach approach =
                in_approach.empty() ? Approach::Sliding : approach_from_name(in_approach);
            posterior = cmd_invert(cfg, in_rate, approach, in_n);
        }
        std::cout << "posterior mean " << format_double(posterior.mean) << " std "
                  << format_double(posterior.stddev) << " acceptance "
                  << format_double(posterior.acceptance_rate) << "\n";
    } else if (*compare) {
        PipelineConfig cfg = resolve_config(common);
        const ComparisonReport report = cmd_compare(cfg);
        std::cout << "mean relative error at n_max: sliding "
                  << format_double(report.sliding_mean_rel_error) << ", nonoverlapping "
                  << format_double(report.nonoverlapping_mean_rel_error) << "\n";
        std::cout << "report under " << cfg.report_dir().string() << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CLI::ParseError& e) {
        return CLI::App{}.exit(e);
    } catch (const rominv::Error& e) {
        const char* category = "error";
        switch (e.code()) {
            case rominv::errc::config: category = "config error"; break;
            case rominv::errc::io: category = "io error"; break;
            case rominv::errc::parse: category = "parse error"; break;
            case rominv::errc::numeric: category = "numeric error"; break;
        }
        std::cerr << category << ": " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
