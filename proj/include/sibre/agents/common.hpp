#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sibre/mdp.hpp"
#include "sibre/shaper.hpp"

namespace sibre::agents {

struct AgentConfig {
    double alpha = 0.1;
    double gamma = 0.99;

    // exploration
    double epsilon_start = 1.0;
    double epsilon_decay = 0.9;      // multiplicative, applied every epsilon_decay_every episodes
    int epsilon_decay_every = 100;   // episodes between decays (tabular style)
    double epsilon_floor = 0.0;
    double epsilon_decay_per_step = 0.9999;  // DQN style, applied every step

    // actor-critic
    double entropy_coefficient = 0.01;
    int rollout_length = 5;
    double grad_clip_norm = 0.5;  // global L2 clip per update; <= 0 disables
    std::vector<int> hidden_dims = {64, 64};

    // DQN
    int batch_size = 32;
    int target_update_period = 1000;
    int replay_capacity = 100000;
    int replay_warmup = 1000;

    // budget: episodes when budget_in_frames is false, environment steps
    // otherwise
    long budget = 10000;
    bool budget_in_frames = false;
    bool continuing = false;   // continuing-task DQN (window-based shaping)
    int window_length = 500;   // reporting/shaping window for continuing runs
};

/// One learning-curve row. `ret` is always on the ORIGINAL reward scale so
/// shaped and baseline arms stay comparable.
struct EpisodeRecord {
    long index = 0;   // episode (episodic) or window (continuing)
    double ret = 0.0;
    double rho = 0.0;
    double beta = 0.0;
    double epsilon = 0.0;
    long steps = 0;   // cumulative environment steps at the row's end
};

struct SeedCurve {
    std::uint64_t seed = 0;
    std::vector<EpisodeRecord> records;
};

/// CSV with the run schema: seed,episode_or_window,return,rho,beta,epsilon,steps
std::string curves_to_csv(const std::vector<SeedCurve>& curves);

}  // namespace sibre::agents
