#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sibre/harness.hpp"

using namespace sibre;
using namespace sibre::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

ExperimentConfig tiny_frozenlake(const std::string& out) {
    ExperimentConfig c = preset("frozenlake");
    c.agent.budget = 50;
    c.seeds = {1, 2, 3};
    c.output_dir = out;
    return c;
}

}  // namespace

TEST_CASE("presets expand and round-trip through serialization") {
    for (const std::string& name : preset_names()) {
        ExperimentConfig c = preset(name);
        std::string text = c.serialize();
        ExperimentConfig parsed = ExperimentConfig::deserialize(text);
        CHECK(parsed.serialize() == text);  // fixed point
        CHECK(parsed.hash() == c.hash());
        CHECK_NOTHROW(parsed.validate());
    }
    CHECK_THROWS_AS(preset("no_such_preset"), std::invalid_argument);
}

TEST_CASE("config validation rejects bad seed lists and ids") {
    ExperimentConfig c = preset("frozenlake");
    c.seeds = {};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.seeds = {1, 1};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.seeds = {1, 2};
    c.agent_id = "sarsa";
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.agent_id = "q";
    c.environment.id = "lunarlander";
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("make_shaper honors the enabled flag and mode") {
    ShaperConfig off;
    CHECK_FALSE(make_shaper(off).has_value());
    ShaperConfig on;
    on.enabled = true;
    on.rho0 = 0.5;
    on.update_period = 3;
    on.mode = "continuing";
    on.beta = BetaSchedule::constant(0.2);
    auto state = make_shaper(on);
    REQUIRE(state.has_value());
    CHECK(state->rho == 0.5);
    CHECK(state->update_period == 3);
    CHECK(state->mode == ShapingMode::Continuing);
}

TEST_CASE("run_experiment writes per-seed files and a recomputable aggregate") {
    fs::path out = "harness_test_run";
    fs::remove_all(out);
    ExperimentConfig c = tiny_frozenlake(out.string());
    RunResult result = run_experiment(c);

    CHECK(result.curves.size() == 3);
    CHECK(result.config_hash == c.hash());
    for (std::uint64_t s : {1, 2, 3})
        CHECK(fs::exists(out / ("frozenlake_seed" + std::to_string(s) + ".csv")));
    CHECK(fs::exists(out / "frozenlake_aggregate.csv"));
    CHECK(fs::exists(out / "frozenlake_config.json"));

    // aggregate mean re-derivable from the curves
    REQUIRE(result.aggregate.size() == 50);
    for (std::size_t i = 0; i < result.aggregate.size(); ++i) {
        double mean = 0.0;
        for (const auto& curve : result.curves) mean += curve.records[i].ret;
        mean /= result.curves.size();
        CHECK(std::abs(result.aggregate[i].mean_return - mean) <= 1e-12);
    }
    fs::remove_all(out);
}

TEST_CASE("identical configs give byte-identical outputs") {
    fs::path out_a = "harness_test_det_a", out_b = "harness_test_det_b";
    fs::remove_all(out_a);
    fs::remove_all(out_b);
    ExperimentConfig a = tiny_frozenlake(out_a.string());
    ExperimentConfig b = tiny_frozenlake(out_b.string());
    run_experiment(a);
    run_experiment(b);
    for (const char* name :
         {"frozenlake_seed1.csv", "frozenlake_seed2.csv", "frozenlake_aggregate.csv"})
        CHECK(slurp(out_a / name) == slurp(out_b / name));
    fs::remove_all(out_a);
    fs::remove_all(out_b);
}

TEST_CASE("sweep argument validation and single-value summary") {
    ExperimentConfig c = tiny_frozenlake("harness_test_sweep");
    CHECK_THROWS_AS(run_sweep(c, "gamma_values", {0.9}), std::invalid_argument);
    CHECK_THROWS_AS(run_sweep(c, "learning_rates", {}), std::invalid_argument);

    fs::remove_all("harness_test_sweep");
    c.seeds = {1, 2};
    auto rows = run_sweep(c, "learning_rates", {0.1});
    REQUIRE(rows.size() == 2);  // baseline and shaped arm for the single value
    CHECK(rows[0].value == 0.1);
    CHECK_FALSE(rows[0].sibre);
    CHECK(rows[1].sibre);
    CHECK(fs::exists(fs::path("harness_test_sweep") / "frozenlake_sweep_summary.csv"));
    fs::remove_all("harness_test_sweep");
}

TEST_CASE("transfer carries the threshold across stages") {
    fs::path out = "harness_test_transfer";
    fs::remove_all(out);
    ExperimentConfig c = preset("transfer_doorkey");
    c.seeds = {1, 2};
    c.agent.budget = 1200;
    c.transfer_stage2_budget = 1200;
    c.agent.hidden_dims = {8};
    c.output_dir = out.string();

    TransferResult result = run_transfer(c);
    REQUIRE(result.rho_end_stage1.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(result.rho_end_stage1[i] != 0.0);  // stage 1 moved the threshold
        CHECK(result.rho_start_stage2[i] == result.rho_end_stage1[i]);  // exact carry
    }
    // the frame axis continues across the stage boundary
    for (std::size_t i = 0; i < 2; ++i) {
        REQUIRE(!result.stage2.curves[i].records.empty());
        CHECK(result.stage2.curves[i].records.front().steps >
              result.stage1.curves[i].records.back().steps);
    }
    CHECK(fs::exists(out / "transfer_doorkey_stage1_aggregate.csv"));
    CHECK(fs::exists(out / "transfer_doorkey_stage2_aggregate.csv"));
    fs::remove_all(out);
}

TEST_CASE("transfer with a disabled shaper carries no threshold") {
    fs::path out = "harness_test_transfer_plain";
    fs::remove_all(out);
    ExperimentConfig c = preset("transfer_doorkey");
    c.seeds = {1};
    c.agent.budget = 800;
    c.transfer_stage2_budget = 800;
    c.agent.hidden_dims = {8};
    c.shaper.enabled = false;
    c.output_dir = out.string();
    TransferResult result = run_transfer(c);
    CHECK(result.rho_end_stage1[0] == 0.0);
    CHECK(result.rho_start_stage2[0] == 0.0);
    fs::remove_all(out);
}

TEST_CASE("transfer with zero stage-2 budget stops after stage 1") {
    fs::path out = "harness_test_transfer_stage1_only";
    fs::remove_all(out);
    ExperimentConfig c = preset("transfer_doorkey");
    c.seeds = {1};
    c.agent.budget = 600;
    c.transfer_stage2_budget = 0;
    c.agent.hidden_dims = {8};
    c.output_dir = out.string();
    TransferResult result = run_transfer(c);
    CHECK(!result.stage1.curves[0].records.empty());
    CHECK(result.stage2.curves[0].records.empty());
    CHECK_FALSE(fs::exists(out / "transfer_doorkey_stage2_aggregate.csv"));
    fs::remove_all(out);
}

TEST_CASE("emit_plot renders the threshold as a dotted line") {
    fs::path dir = "harness_test_plot";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream csv(dir / "agg.csv");
        csv << "index,mean_return,se_return,mean_rho,mean_beta,n\n";
        csv << "0,1.0,0.1,0.5,0.1,3\n1,2.0,0.1,0.8,0.1,3\n";
    }
    emit_plot((dir / "agg.csv").string(), (dir / "agg.svg").string());
    std::string svg = slurp(dir / "agg.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);

    {
        std::ofstream csv(dir / "flat.csv");
        csv << "index,mean_return,se_return,mean_rho,mean_beta,n\n";
        csv << "0,1.0,0.0,0,0,1\n1,2.0,0.0,0,0,1\n";
    }
    emit_plot((dir / "flat.csv").string(), (dir / "flat.svg").string());
    CHECK(slurp(dir / "flat.svg").find("stroke-dasharray") == std::string::npos);

    {
        std::ofstream csv(dir / "bad.csv");
        csv << "time,value\n0,1\n";
    }
    CHECK_THROWS(emit_plot((dir / "bad.csv").string(), (dir / "bad.svg").string()));
    CHECK_THROWS(emit_plot((dir / "missing.csv").string(), (dir / "x.svg").string()));
    fs::remove_all(dir);
}

TEST_CASE("aggregate bucketing carries values through empty frame buckets") {
    agents::SeedCurve curve;
    curve.seed = 1;
    curve.records.push_back({0, 1.0, 0.3, 0.1, 0.0, 10});
    curve.records.push_back({1, 3.0, 0.4, 0.1, 0.0, 90});
    auto rows = aggregate_curves({curve}, /*frame_budget=*/true, /*budget=*/100,
                                 /*num_buckets=*/10);
    REQUIRE(rows.size() == 10);
    CHECK(rows[1].mean_return == 1.0);
    CHECK(rows[5].mean_return == 1.0);  // carried forward
    CHECK(rows[9].mean_return == 3.0);
    CHECK(rows[9].mean_rho == 0.4);
}
