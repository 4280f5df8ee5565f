#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sibre/agents/a2c.hpp"
#include "sibre/agents/common.hpp"
#include "sibre/mdp.hpp"
#include "sibre/shaper.hpp"

namespace sibre::harness {

struct EnvironmentConfig {
    std::string id;        // frozenlake | doorkey5 | doorkey6 | doorkey8 | multiroom2 |
                           // cartpole | cartpole_cont | mountaincar
    int encode_size = 0;   // gridworlds: pad observation to this grid side
    bool slippery = true;  // frozenlake
};

struct ShaperConfig {
    bool enabled = false;
    double rho0 = 0.0;
    int update_period = 1;
    std::string mode = "episodic";  // or "continuing"
    double gamma = 0.99;
    BetaSchedule beta;
};

struct SweepConfig {
    std::string axis = "none";  // none | beta_values | learning_rates | transfer_stage
    std::vector<double> values;
};

struct ExperimentConfig {
    std::string name;
    EnvironmentConfig environment;
    std::string agent_id;  // q | dqn | a2c
    agents::AgentConfig agent;
    ShaperConfig shaper;
    std::vector<std::uint64_t> seeds;
    SweepConfig sweep;
    std::string output_dir = "out";
    bool paper_scale = false;

    // transfer runs
    std::string transfer_target_env;  // empty unless this is a transfer config
    long transfer_stage2_budget = 0;

    std::string serialize() const;
    static ExperimentConfig deserialize(const std::string& text);
    std::string hash() const;  // FNV-1a of the serialized form
    void validate() const;
};

/// Named presets mirroring the experiment table; throws on unknown names.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

std::unique_ptr<Env> make_env(const EnvironmentConfig& cfg);
std::optional<ThresholdState> make_shaper(const ShaperConfig& cfg);

struct AggregateRow {
    long index = 0;
    double mean_return = 0.0;
    double se_return = 0.0;
    double mean_rho = 0.0;
    double mean_beta = 0.0;
    int n = 0;
};

struct RunResult {
    std::vector<agents::SeedCurve> curves;
    std::vector<AggregateRow> aggregate;
    std::string config_hash;
    double wall_clock_seconds = 0.0;
};

/// Mean/standard-error aggregation across seeds. Frame-budget curves are
/// resampled onto `num_buckets` equal frame buckets (carrying the last
/// value forward through empty buckets); episode- and window-indexed
/// curves aggregate by index directly.
std::vector<AggregateRow> aggregate_curves(const std::vector<agents::SeedCurve>& curves,
                                           bool frame_budget, long budget,
                                           int num_buckets = 200);
std::string aggregate_to_csv(const std::vector<AggregateRow>& rows);

/// Runs every seed (worker pool bounded by SIBRE_WORKERS) and writes
/// <output_dir>/<name>_seed<k>.csv plus <name>_aggregate.csv.
RunResult run_experiment(const ExperimentConfig& config);

struct SweepSummaryRow {
    double value = 0.0;
    bool sibre = false;
    double mean_final_return = 0.0;
    double se_final_return = 0.0;
};

/// Sweeps one axis, both arms per value; writes per-value aggregates and a
/// summary CSV (value, arm, mean final-window return, standard error).
std::vector<SweepSummaryRow> run_sweep(const ExperimentConfig& config, const std::string& axis,
                                       const std::vector<double>& values);

struct TransferResult {
    RunResult stage1, stage2;
    std::vector<double> rho_end_stage1;    // per seed
    std::vector<double> rho_start_stage2;  // per seed (first update's starting rho)
};

/// Two-stage transfer: trains on the source env, carries network
/// parameters (and rho, when shaped) to the target env, continues the
/// frame axis across stages in the written CSVs.
TransferResult run_transfer(const ExperimentConfig& config);

/// Renders an aggregate CSV as an SVG learning curve: mean line, +-SE
/// band, and a dotted threshold trace when the rho column is nonzero.
void emit_plot(const std::string& aggregate_csv_path, const std::string& svg_path);

int worker_count();

}  // namespace sibre::harness
