#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rominv/forward.hpp"
#include "rominv/lstm.hpp"
#include "rominv/mcmc.hpp"

namespace rominv {

enum class Approach { Nonoverlapping, Sliding };

std::string approach_name(Approach a);
Approach approach_from_name(const std::string& name);

// Everything the end-to-end run needs; JSON-loadable with per-field defaults.
struct PipelineConfig {
    std::filesystem::path out_dir = "out";
    std::vector<double> rates = {100.0, 200.0, 300.0, 400.0};
    ForwardParams forward;

    // Per-rate noise sigma is sigma_abs when positive, else
    // sigma_rel * (max - min) of that rate's clean series.
    double noise_sigma_rel = 0.01;
    double noise_sigma_abs = 0.0;
    std::uint64_t noise_seed = 42;

    TrainConfig train;                              // shared hyperparameters
    std::size_t nonoverlapping_window = 23;
    std::size_t sliding_window = 10;
    std::size_t sliding_stride = 1;

    McmcConfig mcmc;                                // per-cell template
    std::vector<int> sweep = {1000, 5000, 10000};   // sample counts
    bool exact_surrogate = false;

    void validate() const; // throws ConfigError

    static PipelineConfig load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    // Conventional file layout under out_dir.
    std::filesystem::path data_csv(double rate) const;
    std::filesystem::path noisy_csv(double rate) const;
    std::filesystem::path model_json(Approach approach) const;
    std::filesystem::path loss_csv(Approach approach) const;
    std::filesystem::path chain_csv(double rate, Approach approach, int n) const;
    std::filesystem::path posterior_json(double rate, Approach approach, int n) const;
    std::filesystem::path manifest_json() const;
    std::filesystem::path report_dir() const;

    TrainConfig train_config(Approach approach) const;
    double noise_sigma_for(const TimeSeries& clean) const;
    std::uint64_t noise_seed_for(double rate) const;
    std::uint64_t chain_seed_for(double rate, Approach approach, int n, bool exact) const;
};

// "100" for integral rates, full precision otherwise; used in file names.
std::string rate_label(double rate);

// Emits one clean CSV per rate, matching noisy CSVs under data/noisy/, and
// the provenance manifest.
void cmd_generate(const PipelineConfig& cfg);

// Parses a directory of legacy VTK snapshots (natural filename order, time
// stamps t0 + i*dt) into a surface-displacement series CSV.
TimeSeries cmd_extract(const std::filesystem::path& dir, const std::string& vector_name, double dt,
                       double t0, const std::filesystem::path& out_csv);

// Trains the given approach on the clean dataset; persists the model JSON
// and an epoch,loss CSV.
TrainResult cmd_train(const PipelineConfig& cfg, Approach approach);

// Runs one inversion cell against the conventional noisy CSV and model,
// writing chain CSV + posterior JSON. With cfg.exact_surrogate the synthetic
// forward model itself plays the surrogate.
Posterior cmd_invert(const PipelineConfig& cfg, double rate, Approach approach, int n);

// As above but with explicit file paths (CLI --data/--model form); label
// names the output files.
Posterior cmd_invert_files(const PipelineConfig& cfg, const std::filesystem::path& data_csv,
                           const std::filesystem::path& model_json, int n, std::uint64_t seed,
                           const std::string& label);

struct ReportCell {
    double rate;
    Approach approach;
    int n;
    double posterior_mean;
    double posterior_std;
    double rel_error; // |mean - rate| / rate
    double acceptance_rate;
};

struct ApproachSummary {
    std::map<double, double> recon_mse;      // per rate, meters^2
    std::map<double, double> boundary_jump;  // per rate, meters
    double mean_rel_error; // over rates at the largest sweep entry
};

struct ComparisonReport {
    std::vector<ReportCell> cells;
    std::map<std::string, ApproachSummary> per_approach; // key: approach name
    double sliding_mean_rel_error;
    double nonoverlapping_mean_rel_error;
    bool sliding_better;
};

// Aggregates every configured (rate, approach, n) cell into report JSON/CSV
// plus trace, histogram, and reconstruction-overlay SVGs. Missing chain
// files raise MissingCellError.
ComparisonReport cmd_compare(const PipelineConfig& cfg);

} // namespace rominv
