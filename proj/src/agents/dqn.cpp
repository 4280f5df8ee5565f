#include "sibre/agents/dqn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sibre::agents {
namespace {

using tinynet::DenseNet;

int argmax_q(const std::vector<double>& q) {
    int best = 0;
    for (std::size_t a = 1; a < q.size(); ++a)
        if (q[a] > q[best]) best = static_cast<int>(a);
    return best;
}

int act_epsilon_greedy(const DenseNet& net, const std::vector<double>& obs, double epsilon,
                       int num_actions, Rng& rng) {
    if (epsilon > 0.0 && rng.uniform() < epsilon) return rng.uniform_int(num_actions);
    return argmax_q(tinynet::forward(net, obs));
}

void train_batch(DenseNet& net, const DenseNet& target_net, ReplayBuffer& replay,
                 const AgentConfig& config, tinynet::AdamState& adam, Rng& rng) {
    tinynet::GradientSet grads = tinynet::zero_gradients(net);
    for (int b = 0; b < config.batch_size; ++b) {
        const Transition& tr = replay.sample(rng);
        double target = tr.reward;
        if (!tr.terminal) {
            std::vector<double> next_q = tinynet::forward(target_net, tr.next_obs);
            target += config.gamma * *std::max_element(next_q.begin(), next_q.end());
        }
        std::vector<double> q = tinynet::forward(net, tr.obs);
        // Huber loss (delta = 1) on the TD error, averaged over the batch
        double error = q[tr.action] - target;
        std::vector<double> upstream(q.size(), 0.0);
        upstream[tr.action] = std::clamp(error, -1.0, 1.0) / config.batch_size;
        grads.accumulate(tinynet::backward(net, tr.obs, upstream));
    }
    if (config.grad_clip_norm > 0.0) grads.clip_by_global_norm(config.grad_clip_norm);
    tinynet::adam_step(net, grads, adam, config.alpha);
}

}  // namespace

DqnResult train_dqn(Env& env, const AgentConfig& config,
                    const std::optional<ThresholdState>& shaper0, std::uint64_t seed) {
    if (env.action_spec().kind != ActionSpec::Kind::Discrete)
        throw std::invalid_argument("train_dqn needs a discrete action space");

    const int num_actions = env.action_spec().count;
    Rng base(seed);
    Rng init_rng = base.split(1);
    Rng explore = base.split(2);
    Rng sample_rng = base.split(3);
    Rng episode_seeds = base.split(4);

    std::vector<int> dims;
    dims.push_back(env.observation_dim());
    for (int h : config.hidden_dims) dims.push_back(h);
    dims.push_back(num_actions);

    DqnResult result;
    result.curve.seed = seed;
    result.shaper = shaper0;
    result.net = tinynet::make_net(dims, tinynet::Activation::Relu, tinynet::Head::Linear,
                                   init_rng);
    DenseNet target_net = result.net;
    tinynet::AdamState adam;
    ReplayBuffer replay(config.replay_capacity);

    double epsilon = config.epsilon_start;
    long total_steps = 0;
    const long budget = config.budget;  // frames

    auto maybe_train = [&]() {
        if (replay.size() >= config.replay_warmup)
            train_batch(result.net, target_net, replay, config, adam, sample_rng);
        if (total_steps % config.target_update_period == 0) target_net = result.net;
    };

    if (config.continuing) {
        const int window = result.shaper ? result.shaper->update_period : config.window_length;
        const double window_gamma = result.shaper ? result.shaper->gamma : config.gamma;
        std::vector<double> window_rewards;
        long window_index = 0;

        Observation obs = env.reset(episode_seeds.raw());
        while (total_steps < budget) {
            int a = act_epsilon_greedy(result.net, obs.encoding, epsilon, num_actions, explore);
            StepOutcome out = env.step(Action::of(a));
            ++total_steps;
            epsilon = std::max(epsilon * config.epsilon_decay_per_step, config.epsilon_floor);

            window_rewards.push_back(out.reward);
            replay.push({obs.encoding, a, out.reward, out.next_observation.encoding, false});

            if (static_cast<int>(window_rewards.size()) >= window) {
                double g = continuing_window_return(window_rewards, window_gamma);
                double rho = 0.0, beta = 0.0;
                if (result.shaper) {
                    // shaped boundary reward uses rho before the update
                    replay.at(replay.last_index()).reward = g - result.shaper->rho;
                    double fraction = static_cast<double>(total_steps) / budget;
                    record_return_and_maybe_update(*result.shaper, g, fraction);
                    rho = result.shaper->rho;
                    beta = result.shaper->last_beta;
                }
                result.curve.records.push_back(
                    {window_index++, g, rho, beta, epsilon, total_steps});
                window_rewards.clear();
            }
            maybe_train();
            obs = std::move(out.next_observation);
        }
        return result;
    }

    // episodic: frame budget, per-episode records
    long episode = 0;
    while (total_steps < budget) {
        Observation obs = env.reset(episode_seeds.raw());
        double episode_return = 0.0;
        bool done = false;
        while (!done && total_steps < budget) {
            int a = act_epsilon_greedy(result.net, obs.encoding, epsilon, num_actions, explore);
            StepOutcome out = env.step(Action::of(a));
            ++total_steps;
            epsilon = std::max(epsilon * config.epsilon_decay_per_step, config.epsilon_floor);
            episode_return += out.reward;

            done = out.terminal || out.truncated;
            double reward = out.reward;
            if (result.shaper && done)
                reward = shape_step(*result.shaper, out, episode_return).value;
            replay.push({obs.encoding, a, reward, out.next_observation.encoding, done});
            maybe_train();
            obs = std::move(out.next_observation);
        }

        double rho = 0.0, beta = 0.0;
        if (result.shaper) {
            double fraction = static_cast<double>(total_steps) / budget;
            record_return_and_maybe_update(*result.shaper, episode_return, fraction);
            rho = result.shaper->rho;
            beta = result.shaper->last_beta;
        }
        result.curve.records.push_back({episode++, episode_return, rho, beta, epsilon,
                                        total_steps});
    }
    return result;
}

}  // namespace sibre::agents
