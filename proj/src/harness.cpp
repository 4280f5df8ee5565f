#include "sibre/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "sibre/agents/dqn.hpp"
#include "sibre/agents/qlearning.hpp"
#include "sibre/envs/cartpole.hpp"
#include "sibre/envs/frozen_lake.hpp"
#include "sibre/envs/gridworld.hpp"
#include "sibre/envs/mountain_car.hpp"

namespace sibre::harness {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

json schedule_to_json(const BetaSchedule& s) {
    json j;
    if (s.kind == BetaSchedule::Kind::Constant) {
        j["kind"] = "constant";
        j["value"] = s.value;
    } else {
        j["kind"] = "staircase";
        j["start"] = s.start;
        j["end"] = s.end;
        j["stages"] = s.num_stages;
    }
    return j;
}

BetaSchedule schedule_from_json(const json& j) {
    if (j.at("kind") == "constant") return BetaSchedule::constant(j.at("value"));
    return BetaSchedule::linear_staircase(j.at("start"), j.at("end"), j.at("stages"));
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["name"] = c.name;
    j["environment"] = {{"id", c.environment.id},
                        {"encode_size", c.environment.encode_size},
                        {"slippery", c.environment.slippery}};
    j["agent_id"] = c.agent_id;
    const agents::AgentConfig& a = c.agent;
    j["agent"] = {{"alpha", a.alpha},
                  {"gamma", a.gamma},
                  {"epsilon_start", a.epsilon_start},
                  {"epsilon_decay", a.epsilon_decay},
                  {"epsilon_decay_every", a.epsilon_decay_every},
                  {"epsilon_floor", a.epsilon_floor},
                  {"epsilon_decay_per_step", a.epsilon_decay_per_step},
                  {"entropy_coefficient", a.entropy_coefficient},
                  {"rollout_length", a.rollout_length},
                  {"grad_clip_norm", a.grad_clip_norm},
                  {"hidden_dims", a.hidden_dims},
                  {"batch_size", a.batch_size},
                  {"target_update_period", a.target_update_period},
                  {"replay_capacity", a.replay_capacity},
                  {"replay_warmup", a.replay_warmup},
                  {"budget", a.budget},
                  {"budget_in_frames", a.budget_in_frames},
                  {"continuing", a.continuing},
                  {"window_length", a.window_length}};
    j["shaper"] = {{"enabled", c.shaper.enabled},
                   {"rho0", c.shaper.rho0},
                   {"update_period", c.shaper.update_period},
                   {"mode", c.shaper.mode},
                   {"gamma", c.shaper.gamma},
                   {"beta", schedule_to_json(c.shaper.beta)}};
    j["seeds"] = c.seeds;
    j["sweep"] = {{"axis", c.sweep.axis}, {"values", c.sweep.values}};
    j["output_dir"] = c.output_dir;
    j["paper_scale"] = c.paper_scale;
    j["transfer_target_env"] = c.transfer_target_env;
    j["transfer_stage2_budget"] = c.transfer_stage2_budget;
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    c.name = j.at("name");
    const json& e = j.at("environment");
    c.environment = {e.at("id"), e.at("encode_size"), e.at("slippery")};
    c.agent_id = j.at("agent_id");
    const json& a = j.at("agent");
    c.agent.alpha = a.at("alpha");
    c.agent.gamma = a.at("gamma");
    c.agent.epsilon_start = a.at("epsilon_start");
    c.agent.epsilon_decay = a.at("epsilon_decay");
    c.agent.epsilon_decay_every = a.at("epsilon_decay_every");
    c.agent.epsilon_floor = a.at("epsilon_floor");
    c.agent.epsilon_decay_per_step = a.at("epsilon_decay_per_step");
    c.agent.entropy_coefficient = a.at("entropy_coefficient");
    c.agent.rollout_length = a.at("rollout_length");
    c.agent.grad_clip_norm = a.at("grad_clip_norm");
    c.agent.hidden_dims = a.at("hidden_dims").get<std::vector<int>>();
    c.agent.batch_size = a.at("batch_size");
    c.agent.target_update_period = a.at("target_update_period");
    c.agent.replay_capacity = a.at("replay_capacity");
    c.agent.replay_warmup = a.at("replay_warmup");
    c.agent.budget = a.at("budget");
    c.agent.budget_in_frames = a.at("budget_in_frames");
    c.agent.continuing = a.at("continuing");
    c.agent.window_length = a.at("window_length");
    const json& s = j.at("shaper");
    c.shaper.enabled = s.at("enabled");
    c.shaper.rho0 = s.at("rho0");
    c.shaper.update_period = s.at("update_period");
    c.shaper.mode = s.at("mode");
    c.shaper.gamma = s.at("gamma");
    c.shaper.beta = schedule_from_json(s.at("beta"));
    c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    c.sweep.axis = j.at("sweep").at("axis");
    c.sweep.values = j.at("sweep").at("values").get<std::vector<double>>();
    c.output_dir = j.at("output_dir");
    c.paper_scale = j.at("paper_scale");
    c.transfer_target_env = j.at("transfer_target_env");
    c.transfer_stage2_budget = j.at("transfer_stage2_budget");
    return c;
}

std::vector<std::uint64_t> default_seeds(int n) {
    std::vector<std::uint64_t> seeds(n);
    for (int i = 0; i < n; ++i) seeds[i] = static_cast<std::uint64_t>(i + 1);
    return seeds;
}

}  // namespace

std::string ExperimentConfig::serialize() const { return config_to_json(*this).dump(2) + "\n"; }

ExperimentConfig ExperimentConfig::deserialize(const std::string& text) {
    return config_from_json(json::parse(text));
}

std::string ExperimentConfig::hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : serialize()) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

void ExperimentConfig::validate() const {
    if (seeds.empty()) throw std::invalid_argument("config needs at least one seed");
    std::vector<std::uint64_t> sorted = seeds;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("seeds must be distinct");
    if (agent.budget <= 0) throw std::invalid_argument("budget must be positive");
    if (agent_id != "q" && agent_id != "dqn" && agent_id != "a2c")
        throw std::invalid_argument("unknown agent id: " + agent_id);
    make_env(environment);  // throws on unknown environment
}

std::unique_ptr<Env> make_env(const EnvironmentConfig& cfg) {
    using namespace sibre::envs;
    if (cfg.id == "frozenlake") return std::make_unique<FrozenLake>(cfg.slippery, 100);
    if (cfg.id == "doorkey5")
        return std::make_unique<GridWorld>(GridWorld::Task::DoorKey, 5, cfg.encode_size);
    if (cfg.id == "doorkey6")
        return std::make_unique<GridWorld>(GridWorld::Task::DoorKey, 6, cfg.encode_size);
    if (cfg.id == "doorkey8")
        return std::make_unique<GridWorld>(GridWorld::Task::DoorKey, 8, cfg.encode_size);
    if (cfg.id == "multiroom2")
        return std::make_unique<GridWorld>(GridWorld::Task::MultiRoom, 6, cfg.encode_size);
    if (cfg.id == "cartpole") return std::make_unique<CartPole>(CartPole::Mode::Episodic);
    if (cfg.id == "cartpole_cont") return std::make_unique<CartPole>(CartPole::Mode::Continuing);
    if (cfg.id == "mountaincar") return std::make_unique<MountainCar>();
    throw std::invalid_argument("unknown environment id: " + cfg.id);
}

std::optional<ThresholdState> make_shaper(const ShaperConfig& cfg) {
    if (!cfg.enabled) return std::nullopt;
    ShapingMode mode = cfg.mode == "continuing" ? ShapingMode::Continuing : ShapingMode::Episodic;
    return ThresholdState(cfg.rho0, cfg.update_period, cfg.beta, mode, cfg.gamma);
}

std::vector<std::string> preset_names() {
    return {"frozenlake", "doorkey5",    "doorkey6",    "doorkey8",        "multiroom2",
            "cartpole",   "cartpole_cont", "mountaincar", "transfer_doorkey"};
}

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig c;
    c.name = name;
    c.shaper.enabled = true;
    c.shaper.beta = BetaSchedule::linear_staircase(0.001, 0.1, 10);
    c.seeds = default_seeds(10);

    if (name == "frozenlake") {
        c.environment.id = "frozenlake";
        c.agent_id = "q";
        c.agent.alpha = 0.1;
        c.agent.gamma = 0.99;
        c.agent.budget = 10000;  // episodes, the experiment-table value
        c.shaper.update_period = 10;  // smooth the threshold over recent episodes
        return c;
    }
    if (name == "doorkey5" || name == "doorkey6" || name == "doorkey8" ||
        name == "multiroom2") {
        c.environment.id = name;
        c.agent_id = "a2c";
        c.agent.alpha = 7e-4;
        c.agent.gamma = 0.99;
        c.agent.entropy_coefficient = 0.01;
        c.agent.budget = 200000;  // desk scale; paper scale swaps this
        c.agent.budget_in_frames = true;
        return c;
    }
    if (name == "cartpole" || name == "cartpole_cont") {
        c.environment.id = name;
        c.agent_id = "dqn";
        c.agent.alpha = 0.001;
        c.agent.gamma = 0.99;
        c.agent.hidden_dims = {32, 32};
        c.agent.epsilon_floor = 0.0;
        c.agent.budget = 100000;
        c.agent.budget_in_frames = true;
        if (name == "cartpole_cont") {
            c.agent.continuing = true;
            c.agent.window_length = 500;
            c.shaper.mode = "continuing";
            c.shaper.update_period = 500;  // steps per window
        }
        return c;
    }
    if (name == "mountaincar") {
        c.environment.id = "mountaincar";
        c.agent_id = "a2c";
        c.agent.alpha = 0.001;
        c.agent.gamma = 0.95;
        c.agent.entropy_coefficient = 0.1;
        c.agent.budget = 50;  // episodes
        c.shaper.beta = BetaSchedule::constant(0.1);
        return c;
    }
    if (name == "transfer_doorkey") {
        c.environment.id = "doorkey5";
        c.environment.encode_size = 8;
        c.agent_id = "a2c";
        c.agent.alpha = 7e-4;
        c.agent.gamma = 0.99;
        c.agent.entropy_coefficient = 0.01;
        c.agent.budget = 100000;
        c.agent.budget_in_frames = true;
        c.transfer_target_env = "doorkey8";
        c.transfer_stage2_budget = 200000;
        return c;
    }
    throw std::invalid_argument("unknown preset: " + name);
}

namespace {

// experiment-table budgets, selectable via --paper-scale
const std::map<std::string, long> kPaperBudgets = {
    {"frozenlake", 10000},   {"doorkey5", 800000},  {"doorkey6", 1800000},
    {"doorkey8", 2400000},   {"multiroom2", 1800000}, {"cartpole", 1000000},
    {"cartpole_cont", 1000000}, {"mountaincar", 50},
};

void apply_paper_scale(ExperimentConfig& c) {
    auto it = kPaperBudgets.find(c.name);
    if (it != kPaperBudgets.end()) c.agent.budget = it->second;
    if (c.name == "transfer_doorkey") {
        c.agent.budget = 800000;
        c.transfer_stage2_budget = 2400000;
    }
}

}  // namespace

int worker_count() {
    if (const char* env = std::getenv("SIBRE_WORKERS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

agents::SeedCurve run_one_seed(const ExperimentConfig& config, std::uint64_t seed,
                               agents::A2cResult* a2c_out = nullptr,
                               const agents::A2cCheckpoint* warm = nullptr) {
    std::unique_ptr<Env> env = make_env(config.environment);
    std::optional<ThresholdState> shaper = make_shaper(config.shaper);
    if (config.agent_id == "q")
        return agents::train_tabular_q(*env, config.agent, shaper, seed).curve;
    if (config.agent_id == "dqn") return agents::train_dqn(*env, config.agent, shaper, seed).curve;
    agents::A2cResult res = agents::train_a2c(*env, config.agent, shaper, seed, warm);
    if (a2c_out) *a2c_out = res;
    return res.curve;
}

/// Bounded worker pool over the seed list.
template <typename Fn>
void for_each_seed(const std::vector<std::uint64_t>& seeds, Fn&& fn) {
    int workers = std::min<int>(worker_count(), static_cast<int>(seeds.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < seeds.size(); ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (std::size_t i = next.fetch_add(1); i < seeds.size(); i = next.fetch_add(1))
                fn(i);
        });
    for (std::thread& t : pool) t.join();
}

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

void write_run_files(const ExperimentConfig& config, const std::string& name,
                     const RunResult& result) {
    fs::path dir(config.output_dir);
    for (const agents::SeedCurve& c : result.curves)
        write_file(dir / (name + "_seed" + std::to_string(c.seed) + ".csv"),
                   agents::curves_to_csv({c}));
    write_file(dir / (name + "_aggregate.csv"), aggregate_to_csv(result.aggregate));
}

}  // namespace

std::vector<AggregateRow> aggregate_curves(const std::vector<agents::SeedCurve>& curves,
                                           bool frame_budget, long budget, int num_buckets) {
    std::vector<AggregateRow> rows;
    if (curves.empty()) return rows;

    // per-seed series resampled to a common index
    std::vector<std::vector<double>> returns, rhos, betas;
    if (frame_budget) {
        for (const agents::SeedCurve& c : curves) {
            std::vector<double> r(num_buckets, 0.0), rh(num_buckets, 0.0), be(num_buckets, 0.0);
            std::vector<double> sum(num_buckets, 0.0), cnt(num_buckets, 0.0);
            std::vector<double> rho_last(num_buckets, 0.0), beta_last(num_buckets, 0.0);
            for (const agents::EpisodeRecord& rec : c.records) {
                long b = std::min<long>(num_buckets - 1,
                                        rec.steps * num_buckets / std::max<long>(budget, 1));
                sum[b] += rec.ret;
                cnt[b] += 1.0;
                rho_last[b] = rec.rho;
                beta_last[b] = rec.beta;
            }
            double carry = 0.0, carry_rho = 0.0, carry_beta = 0.0;
            bool seen = false;
            for (int b = 0; b < num_buckets; ++b) {
                if (cnt[b] > 0.0) {
                    carry = sum[b] / cnt[b];
                    carry_rho = rho_last[b];
                    carry_beta = beta_last[b];
                    seen = true;
                }
                r[b] = seen ? carry : 0.0;
                rh[b] = carry_rho;
                be[b] = carry_beta;
            }
            returns.push_back(std::move(r));
            rhos.push_back(std::move(rh));
            betas.push_back(std::move(be));
        }
    } else {
        std::size_t len = curves.front().records.size();
        for (const agents::SeedCurve& c : curves) len = std::min(len, c.records.size());
        for (const agents::SeedCurve& c : curves) {
            std::vector<double> r(len), rh(len), be(len);
            for (std::size_t i = 0; i < len; ++i) {
                r[i] = c.records[i].ret;
                rh[i] = c.records[i].rho;
                be[i] = c.records[i].beta;
            }
            returns.push_back(std::move(r));
            rhos.push_back(std::move(rh));
            betas.push_back(std::move(be));
        }
    }

    std::size_t len = returns.front().size();
    int n = static_cast<int>(returns.size());
    for (std::size_t i = 0; i < len; ++i) {
        AggregateRow row;
        row.index = static_cast<long>(i);
        row.n = n;
        double mean = 0.0;
        for (int s = 0; s < n; ++s) mean += returns[s][i];
        mean /= n;
        double ss = 0.0;
        for (int s = 0; s < n; ++s) ss += (returns[s][i] - mean) * (returns[s][i] - mean);
        row.mean_return = mean;
        row.se_return = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
        for (int s = 0; s < n; ++s) {
            row.mean_rho += rhos[s][i] / n;
            row.mean_beta += betas[s][i] / n;
        }
        rows.push_back(row);
    }
    return rows;
}

std::string aggregate_to_csv(const std::vector<AggregateRow>& rows) {
    std::ostringstream os;
    os.precision(12);
    os << "index,mean_return,se_return,mean_rho,mean_beta,n\n";
    for (const AggregateRow& r : rows)
        os << r.index << ',' << r.mean_return << ',' << r.se_return << ',' << r.mean_rho << ','
           << r.mean_beta << ',' << r.n << '\n';
    return os.str();
}

RunResult run_experiment(const ExperimentConfig& raw_config) {
    ExperimentConfig config = raw_config;
    if (config.paper_scale) apply_paper_scale(config);
    config.validate();

    auto t0 = std::chrono::steady_clock::now();
    RunResult result;
    result.config_hash = config.hash();
    result.curves.resize(config.seeds.size());

    for_each_seed(config.seeds, [&](std::size_t i) {
        result.curves[i] = run_one_seed(config, config.seeds[i]);
    });

    bool frame_budget = config.agent.budget_in_frames && !config.agent.continuing;
    result.aggregate = aggregate_curves(result.curves, frame_budget, config.agent.budget);
    result.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    write_run_files(config, config.name, result);
    write_file(fs::path(config.output_dir) / (config.name + "_config.json"),
               config.serialize());
    return result;
}

namespace {

double final_window_mean(const agents::SeedCurve& curve) {
    std::size_t n = curve.records.size();
    std::size_t w = std::max<std::size_t>(1, n / 10);
    double sum = 0.0;
    for (std::size_t i = n - w; i < n; ++i) sum += curve.records[i].ret;
    return sum / w;
}

SweepSummaryRow summarize(const RunResult& result, double value, bool sibre) {
    SweepSummaryRow row;
    row.value = value;
    row.sibre = sibre;
    std::vector<double> means;
    for (const agents::SeedCurve& c : result.curves) means.push_back(final_window_mean(c));
    double mean = 0.0;
    for (double m : means) mean += m;
    mean /= means.size();
    double ss = 0.0;
    for (double m : means) ss += (m - mean) * (m - mean);
    row.mean_final_return = mean;
    row.se_final_return =
        means.size() > 1 ? std::sqrt(ss / (means.size() - 1) / means.size()) : 0.0;
    return row;
}

}  // namespace

std::vector<SweepSummaryRow> run_sweep(const ExperimentConfig& config, const std::string& axis,
                                       const std::vector<double>& values) {
    if (axis != "beta_values" && axis != "learning_rates")
        throw std::invalid_argument("sweep axis must be beta_values or learning_rates");
    if (values.empty()) throw std::invalid_argument("sweep needs at least one value");

    std::vector<SweepSummaryRow> summary;
    for (double v : values) {
        for (bool sibre : {false, true}) {
            ExperimentConfig c = config;
            std::ostringstream tag;
            tag << config.name << '_' << (axis == "beta_values" ? "beta" : "alpha") << v
                << (sibre ? "_sibre" : "_baseline");
            c.name = tag.str();
            c.shaper.enabled = sibre;
            if (axis == "beta_values") {
                if (!sibre) continue;  // beta is undefined for the baseline arm
                c.shaper.beta = BetaSchedule::constant(v);
            } else {
                c.agent.alpha = v;
            }
            RunResult r = run_experiment(c);
            summary.push_back(summarize(r, v, sibre));
        }
        if (axis == "beta_values") {
            // one shared baseline arm per sweep
            if (v == values.front()) {
                ExperimentConfig c = config;
                c.name = config.name + "_baseline";
                c.shaper.enabled = false;
                RunResult r = run_experiment(c);
                for (double each : values) summary.push_back(summarize(r, each, false));
            }
        }
    }

    std::ostringstream os;
    os.precision(12);
    os << "value,arm,mean_final_return,se_final_return\n";
    // deterministic order: by value then arm
    std::vector<SweepSummaryRow> ordered = summary;
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
        if (a.value != b.value) return a.value < b.value;
        return a.sibre < b.sibre;
    });
    for (const SweepSummaryRow& r : ordered)
        os << r.value << ',' << (r.sibre ? "sibre" : "baseline") << ',' << r.mean_final_return
           << ',' << r.se_final_return << '\n';
    write_file(fs::path(config.output_dir) / (config.name + "_sweep_summary.csv"), os.str());
    return ordered;
}

TransferResult run_transfer(const ExperimentConfig& raw_config) {
    ExperimentConfig config = raw_config;
    if (config.paper_scale) apply_paper_scale(config);
    if (config.transfer_target_env.empty())
        throw std::invalid_argument("transfer config needs transfer_target_env");
    config.validate();

    TransferResult result;
    result.stage1.curves.resize(config.seeds.size());
    result.stage2.curves.resize(config.seeds.size());
    result.rho_end_stage1.resize(config.seeds.size(), 0.0);
    result.rho_start_stage2.resize(config.seeds.size(), 0.0);

    ExperimentConfig stage2 = config;
    stage2.environment.id = config.transfer_target_env;
    stage2.agent.budget = config.transfer_stage2_budget;

    for_each_seed(config.seeds, [&](std::size_t i) {
        std::uint64_t seed = config.seeds[i];
        agents::A2cResult stage1_res;
        result.stage1.curves[i] = run_one_seed(config, seed, &stage1_res);
        if (stage1_res.shaper) result.rho_end_stage1[i] = stage1_res.shaper->rho;

        if (stage2.agent.budget <= 0) return;
        std::unique_ptr<Env> target = make_env(stage2.environment);
        agents::A2cCheckpoint warm = agents::transfer_checkpoint(
            stage1_res.checkpoint(), *target, config.shaper.enabled);
        result.rho_start_stage2[i] = warm.rho.value_or(config.shaper.rho0);

        agents::A2cResult stage2_res;
        result.stage2.curves[i] = run_one_seed(stage2, seed + 1000003, &stage2_res, &warm);
        // continue the frame axis across stages
        for (agents::EpisodeRecord& rec : result.stage2.curves[i].records)
            rec.steps += stage1_res.frames;
    });

    bool frame_budget = config.agent.budget_in_frames;
    result.stage1.aggregate =
        aggregate_curves(result.stage1.curves, frame_budget, config.agent.budget);
    result.stage1.config_hash = config.hash();
    write_run_files(config, config.name + "_stage1", result.stage1);
    if (stage2.agent.budget > 0) {
        // stage-2 steps start after stage 1, hence the shifted bucket range
        std::vector<agents::SeedCurve> shifted = result.stage2.curves;
        for (agents::SeedCurve& c : shifted)
            for (agents::EpisodeRecord& rec : c.records) rec.steps -= config.agent.budget;
        result.stage2.aggregate =
            aggregate_curves(shifted, frame_budget, stage2.agent.budget);
        result.stage2.config_hash = stage2.hash();
        write_run_files(stage2, config.name + "_stage2", result.stage2);
    }
    return result;
}

void emit_plot(const std::string& aggregate_csv_path, const std::string& svg_path) {
    std::ifstream in(aggregate_csv_path);
    if (!in) throw std::runtime_error("missing aggregate CSV: " + aggregate_csv_path);
    std::string header;
    std::getline(in, header);
    if (header.rfind("index,mean_return,se_return,mean_rho,mean_beta", 0) != 0)
        throw std::runtime_error("aggregate CSV missing expected columns");

    std::vector<double> idx, mean, se, rho;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tok;
        std::vector<double> vals;
        while (std::getline(ls, tok, ',')) vals.push_back(std::stod(tok));
        if (vals.size() < 5) throw std::runtime_error("malformed aggregate row");
        idx.push_back(vals[0]);
        mean.push_back(vals[1]);
        se.push_back(vals[2]);
        rho.push_back(vals[3]);
    }
    if (idx.empty()) throw std::runtime_error("aggregate CSV has no rows");

    double lo = mean[0], hi = mean[0];
    bool any_rho = false;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        lo = std::min({lo, mean[i] - se[i], rho[i]});
        hi = std::max({hi, mean[i] + se[i], rho[i]});
        if (rho[i] != 0.0) any_rho = true;
    }
    if (hi == lo) hi = lo + 1.0;
    const double W = 800, H = 500, ml = 60, mr = 20, mt = 20, mb = 40;
    auto X = [&](double i) { return ml + (W - ml - mr) * i / std::max(1.0, idx.back()); };
    auto Y = [&](double v) { return H - mb - (H - mt - mb) * (v - lo) / (hi - lo); };

    std::ostringstream os;
    os.precision(8);
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    os << "<!-- derived from " << aggregate_csv_path
       << "; shading = mean +- standard error; dotted line = threshold rho -->\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    // SE band
    os << "<polygon fill='#9ecae1' fill-opacity='0.5' stroke='none' points='";
    for (std::size_t i = 0; i < idx.size(); ++i) os << X(idx[i]) << ',' << Y(mean[i] + se[i]) << ' ';
    for (std::size_t i = idx.size(); i-- > 0;) os << X(idx[i]) << ',' << Y(mean[i] - se[i]) << ' ';
    os << "'/>\n";
    // mean line
    os << "<polyline fill='none' stroke='#08519c' stroke-width='1.5' points='";
    for (std::size_t i = 0; i < idx.size(); ++i) os << X(idx[i]) << ',' << Y(mean[i]) << ' ';
    os << "'/>\n";
    if (any_rho) {
        os << "<polyline fill='none' stroke='black' stroke-width='1' stroke-dasharray='4 3' "
              "points='";
        for (std::size_t i = 0; i < idx.size(); ++i) os << X(idx[i]) << ',' << Y(rho[i]) << ' ';
        os << "'/>\n";
    }
    // axes
    os << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr << "' y2='" << H - mb
       << "' stroke='black'/>\n";
    os << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << H - mb
       << "' stroke='black'/>\n";
    os << "<text x='" << W / 2 << "' y='" << H - 8 << "' font-size='13'>index</text>\n";
    os << "<text x='12' y='" << H / 2 << "' font-size='13' transform='rotate(-90 12 " << H / 2
       << ")'>return</text>\n";
    os << "</svg>\n";
    write_file(svg_path, os.str());
}

}  // namespace sibre::harness
