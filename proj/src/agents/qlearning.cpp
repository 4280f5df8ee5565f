#include "sibre/agents/qlearning.hpp"

#include <algorithm>
#include <stdexcept>

namespace sibre::agents {

void q_update(QTable& q, int s, int a, double shaped_reward, int next_s, bool next_terminal,
              double alpha, double gamma) {
    double bootstrap = 0.0;
    if (!next_terminal) {
        const std::vector<double>& row = q.table[next_s];
        bootstrap = *std::max_element(row.begin(), row.end());
    }
    q.table[s][a] += alpha * (shaped_reward + gamma * bootstrap - q.table[s][a]);
}

int epsilon_greedy(const QTable& q, int s, double epsilon, Rng& rng) {
    if (epsilon > 0.0 && rng.uniform() < epsilon) return rng.uniform_int(q.num_actions);
    const std::vector<double>& row = q.table[s];
    int best = 0;
    for (int a = 1; a < q.num_actions; ++a)
        if (row[a] > row[best]) best = a;
    return best;
}

std::vector<int> greedy_policy(const QTable& q) {
    std::vector<int> policy(q.num_states, 0);
    for (int s = 0; s < q.num_states; ++s) {
        const std::vector<double>& row = q.table[s];
        int best = 0;
        for (int a = 1; a < q.num_actions; ++a)
            if (row[a] > row[best]) best = a;
        policy[s] = best;
    }
    return policy;
}

TabularResult train_tabular_q(Env& env, const AgentConfig& config,
                              const std::optional<ThresholdState>& shaper0, std::uint64_t seed) {
    auto states = env.state_count();
    if (!states) throw std::invalid_argument("train_tabular_q needs a tabular environment");
    if (env.action_spec().kind != ActionSpec::Kind::Discrete)
        throw std::invalid_argument("train_tabular_q needs discrete actions");

    TabularResult result;
    result.qtable = QTable(*states, env.action_spec().count);
    result.curve.seed = seed;
    result.shaper = shaper0;

    Rng base(seed);
    Rng explore = base.split(1);
    Rng episode_seeds = base.split(2);

    double epsilon = config.epsilon_start;
    long total_steps = 0;

    for (long ep = 0; ep < config.budget; ++ep) {
        Observation obs = env.reset(episode_seeds.raw());
        int s = *obs.discrete_index;
        double episode_return = 0.0;

        while (true) {
            int a = epsilon_greedy(result.qtable, s, epsilon, explore);
            StepOutcome out = env.step(Action::of(a));
            episode_return += out.reward;
            ++total_steps;

            bool episode_end = out.terminal || out.truncated;
            double reward = out.reward;
            if (result.shaper && episode_end)
                reward = shape_step(*result.shaper, out, episode_return).value;

            int next_s = *out.next_observation.discrete_index;
            // truncation ends the episode with no bootstrap, matching the
            // environments' "terminates with a reward of 0" turn limit
            q_update(result.qtable, s, a, reward, next_s, episode_end, config.alpha,
                     config.gamma);
            s = next_s;
            if (episode_end) break;
        }

        if ((ep + 1) % config.epsilon_decay_every == 0)
            epsilon = std::max(epsilon * config.epsilon_decay, config.epsilon_floor);

        double rho = 0.0, beta = 0.0;
        if (result.shaper) {
            double fraction = static_cast<double>(ep + 1) / config.budget;
            record_return_and_maybe_update(*result.shaper, episode_return, fraction);
            rho = result.shaper->rho;
            beta = result.shaper->last_beta;
        }
        result.curve.records.push_back({ep, episode_return, rho, beta, epsilon, total_steps});
    }
    return result;
}

}  // namespace sibre::agents
