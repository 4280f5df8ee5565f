#pragma once

#include "sibre/agents/common.hpp"

namespace sibre::agents {

struct QTable {
    std::vector<std::vector<double>> table;  // |S| x |A|
    int num_states = 0;
    int num_actions = 0;

    QTable() = default;
    QTable(int states, int actions)
        : table(states, std::vector<double>(actions, 0.0)),
          num_states(states),
          num_actions(actions) {}
};

/// One Q-learning backup with an already-shaped (or original) reward:
///   Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a))
/// `next_terminal` drops the bootstrap term (terminal rows stay zero).
void q_update(QTable& q, int s, int a, double shaped_reward, int next_s, bool next_terminal,
              double alpha, double gamma);

/// Greedy with probability 1-eps (lowest-index tie-break), uniform otherwise.
int epsilon_greedy(const QTable& q, int s, double epsilon, Rng& rng);

struct TabularResult {
    SeedCurve curve;
    QTable qtable;
    std::optional<ThresholdState> shaper;  // final threshold state when shaped
};

/// Q-learning over `config.budget` episodes on a tabular environment.
/// When `shaper0` is set, the final step's reward is replaced by G - rho
/// before the backup and rho is updated from the episode return.
TabularResult train_tabular_q(Env& env, const AgentConfig& config,
                              const std::optional<ThresholdState>& shaper0, std::uint64_t seed);

/// Greedy policy read off a Q-table.
std::vector<int> greedy_policy(const QTable& q);

}  // namespace sibre::agents
