#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sibre/harness.hpp"
#include "sibre/oracle.hpp"
#include "sibre/envs/frozen_lake.hpp"

namespace {

using sibre::harness::ExperimentConfig;

ExperimentConfig load_config(const std::string& config_path, const std::string& preset_name,
                             const std::vector<std::uint64_t>& seeds, const std::string& out,
                             bool paper_scale) {
    ExperimentConfig cfg;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::invalid_argument("cannot open config file: " + config_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        cfg = ExperimentConfig::deserialize(buf.str());
    } else if (!preset_name.empty()) {
        cfg = sibre::harness::preset(preset_name);
    } else {
        throw std::invalid_argument("provide --config or --preset");
    }
    if (!seeds.empty()) cfg.seeds = seeds;
    if (!out.empty()) cfg.output_dir = out;
    if (paper_scale) cfg.paper_scale = true;
    return cfg;
}

int fail(const std::string& what) {
    std::cout << "error: " << what << "\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SIBRE experiment runner"};
    app.require_subcommand(1);

    std::string config_path, preset_name, out_dir;
    std::vector<std::uint64_t> seeds;
    bool paper_scale = false;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config file (JSON)");
        sub->add_option("--preset", preset_name, "preset name");
        sub->add_option("--seeds", seeds, "seed list override");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_flag("--paper-scale", paper_scale, "use the published frame budgets");
    };

    CLI::App* run = app.add_subcommand("run", "run one experiment across seeds");
    add_common(run);

    CLI::App* sweep = app.add_subcommand("sweep", "sweep beta or learning rate, both arms");
    add_common(sweep);
    std::string axis = "learning_rates";
    std::vector<double> values;
    sweep->add_option("--axis", axis, "beta_values | learning_rates");
    sweep->add_option("--values", values, "axis values")->required();

    CLI::App* transfer = app.add_subcommand("transfer", "two-stage transfer run");
    add_common(transfer);

    CLI::App* verify = app.add_subcommand("verify-theorem",
                                          "threshold dynamics checks against the oracle");
    std::string verify_out = "out";
    int trials = 10000, updates = 50;
    double beta = 0.1;
    verify->add_option("--out", verify_out, "output directory");
    verify->add_option("--trials", trials, "Monte-Carlo trials");
    verify->add_option("--updates", updates, "threshold updates per trial");
    verify->add_option("--beta", beta, "threshold step size");

    CLI::App* plot = app.add_subcommand("plot", "render aggregate CSVs as SVG charts");
    std::vector<std::string> csvs;
    plot->add_option("csv", csvs, "aggregate CSV files")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            ExperimentConfig cfg = load_config(config_path, preset_name, seeds, out_dir,
                                               paper_scale);
            sibre::harness::RunResult result = sibre::harness::run_experiment(cfg);
            std::cout << "ran " << result.curves.size() << " seeds in "
                      << result.wall_clock_seconds << "s, config hash " << result.config_hash
                      << "\n";
        } else if (sweep->parsed()) {
            ExperimentConfig cfg = load_config(config_path, preset_name, seeds, out_dir,
                                               paper_scale);
            auto rows = sibre::harness::run_sweep(cfg, axis, values);
            for (const auto& r : rows)
                std::cout << (r.sibre ? "sibre" : "baseline") << " @ " << r.value << ": "
                          << r.mean_final_return << " +- " << r.se_final_return << "\n";
        } else if (transfer->parsed()) {
            ExperimentConfig cfg = load_config(config_path, preset_name, seeds, out_dir,
                                               paper_scale);
            auto result = sibre::harness::run_transfer(cfg);
            for (std::size_t i = 0; i < result.rho_end_stage1.size(); ++i)
                std::cout << "seed " << cfg.seeds[i] << ": rho end stage1 "
                          << result.rho_end_stage1[i] << ", start stage2 "
                          << result.rho_start_stage2[i] << "\n";
        } else if (verify->parsed()) {
            sibre::envs::FrozenLake lake(true, 100);
            auto model = *lake.tabular_model();
            auto solution = sibre::oracle::value_iteration(model, 0.99, 1e-10);
            // success probability of the optimal policy, for the Bernoulli sampler
            double p = sibre::oracle::evaluate_tabular_policy(lake, solution.optimal_policy,
                                                              200000, 12345);
            std::cout << "rho* (undiscounted, Monte-Carlo) = " << p << "\n";
            struct CaseSpec {
                const char* name;
                double rho0;
            } cases[] = {{"case1", 0.0}, {"case2", p + 0.5}, {"case3", p}};
            for (const auto& c : cases) {
                auto sampler = [p](sibre::Rng& rng) {
                    return rng.uniform() < p ? 1.0 : 0.0;
                };
                auto report = sibre::oracle::verify_threshold_dynamics(
                    sampler, c.rho0, p, beta, updates, trials, 777);
                std::filesystem::create_directories(verify_out);
                std::ofstream csv(verify_out + "/dynamics_" + c.name + ".csv");
                csv << report.to_csv();
                std::cout << c.name << ": " << (report.verdict.holds ? "holds" : "VIOLATED")
                          << " (" << report.verdict.detail << ")\n";
            }
        } else if (plot->parsed()) {
            for (const std::string& csv : csvs) {
                std::string svg = csv.substr(0, csv.find_last_of('.')) + ".svg";
                sibre::harness::emit_plot(csv, svg);
                std::cout << "wrote " << svg << "\n";
            }
        }
    } catch (const std::exception& e) {
        return fail(e.what());
    }
    return 0;
}
