#include "sibre/agents/a2c.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sibre::agents {
namespace {

using tinynet::DenseNet;

struct RolloutStep {
    std::vector<double> obs;
    int discrete_action = 0;
    std::vector<double> continuous_action;  // unclipped sample
    double shaped_reward = 0.0;
};

}  // namespace

A2cCheckpoint A2cResult::checkpoint() const {
    A2cCheckpoint cp{policy, value, std::nullopt};
    if (shaper) cp.rho = shaper->rho;
    return cp;
}

A2cCheckpoint transfer_checkpoint(const A2cCheckpoint& source, const Env& target_env,
                                  bool carry_threshold) {
    if (source.policy.input_dim() != target_env.observation_dim())
        throw std::invalid_argument("checkpoint observation encoding does not fit target env");
    const ActionSpec& spec = target_env.action_spec();
    int expected_out = spec.kind == ActionSpec::Kind::Discrete
                           ? spec.count
                           : 2 * static_cast<int>(spec.low.size());
    if (source.policy.output_dim() != expected_out)
        throw std::invalid_argument("checkpoint action head does not fit target env");
    A2cCheckpoint out = source;
    if (!carry_threshold) out.rho.reset();
    return out;
}

A2cResult train_a2c(Env& env, const AgentConfig& config,
                    const std::optional<ThresholdState>& shaper0, std::uint64_t seed,
                    const A2cCheckpoint* warm_start) {
    const ActionSpec& spec = env.action_spec();
    const bool discrete = spec.kind == ActionSpec::Kind::Discrete;
    const int action_dim = discrete ? spec.count : static_cast<int>(spec.low.size());

    Rng base(seed);
    Rng init_rng = base.split(1);
    Rng act_rng = base.split(2);
    Rng episode_seeds = base.split(3);

    auto dims_for = [&](int out) {
        std::vector<int> dims{env.observation_dim()};
        for (int h : config.hidden_dims) dims.push_back(h);
        dims.push_back(out);
        return dims;
    };

    A2cResult result;
    result.curve.seed = seed;
    result.shaper = shaper0;
    if (warm_start) {
        result.policy = warm_start->policy;
        result.value = warm_start->value;
        if (warm_start->rho && result.shaper) result.shaper->rho = *warm_start->rho;
    } else {
        result.policy = tinynet::make_net(
            dims_for(discrete ? action_dim : 2 * action_dim), tinynet::Activation::Tanh,
            discrete ? tinynet::Head::Softmax : tinynet::Head::Gaussian, init_rng);
        result.value = tinynet::make_net(dims_for(1), tinynet::Activation::Tanh,
                                         tinynet::Head::Linear, init_rng);
    }
    tinynet::AdamState policy_adam, value_adam;

    const long budget = config.budget;  // frames or episodes (budget_in_frames)
    long total_steps = 0;
    long episode = 0;
    double episode_return = 0.0;
    auto budget_left = [&]() {
        return config.budget_in_frames ? total_steps < budget : episode < budget;
    };

    Observation obs = env.reset(episode_seeds.raw());

    while (budget_left()) {
        std::vector<RolloutStep> rollout;
        bool episode_ended = false;
        bool true_terminal = false;

        while (static_cast<int>(rollout.size()) < config.rollout_length && budget_left()) {
            RolloutStep step;
            step.obs = obs.encoding;

            std::vector<double> out = tinynet::forward(result.policy, obs.encoding);
            Action action;
            if (discrete) {
                step.discrete_action = act_rng.categorical(out);
                action = Action::of(step.discrete_action);
            } else {
                std::vector<double> a(action_dim), clipped(action_dim);
                for (int d = 0; d < action_dim; ++d) {
                    double mean = out[d];
                    double sigma = std::exp(out[action_dim + d]);
                    a[d] = mean + sigma * act_rng.gaussian();
                    clipped[d] = std::clamp(a[d], spec.low[d], spec.high[d]);
                }
                step.continuous_action = a;
                action = Action::of(clipped);
            }

            StepOutcome outcome = env.step(action);
            ++total_steps;
            episode_return += outcome.reward;

            episode_ended = outcome.terminal || outcome.truncated;
            true_terminal = outcome.terminal;
            if (result.shaper && episode_ended)
                step.shaped_reward = shape_step(*result.shaper, outcome, episode_return).value;
            else
                step.shaped_reward = outcome.reward;
            rollout.push_back(std::move(step));

            if (episode_ended) {
                double rho = 0.0, beta = 0.0;
                if (result.shaper) {
                    double fraction = config.budget_in_frames
                                          ? static_cast<double>(total_steps) / budget
                                          : static_cast<double>(episode + 1) / budget;
                    record_return_and_maybe_update(*result.shaper, episode_return, fraction);
                    rho = result.shaper->rho;
                    beta = result.shaper->last_beta;
                }
                result.curve.records.push_back(
                    {episode++, episode_return, rho, beta, 0.0, total_steps});
                episode_return = 0.0;
                break;
            }
            obs = std::move(outcome.next_observation);
        }
        if (rollout.empty()) break;

        // n-step targets, bootstrapping from V(s_last) unless the episode ended
        double running_target = 0.0;
        if (!episode_ended) running_target = tinynet::forward(result.value, obs.encoding)[0];
        (void)true_terminal;  // truncation also stops the bootstrap chain

        const int n = static_cast<int>(rollout.size());
        std::vector<double> targets(n);
        for (int i = n - 1; i >= 0; --i) {
            running_target = rollout[i].shaped_reward + config.gamma * running_target;
            targets[i] = running_target;
        }

        tinynet::GradientSet policy_grads = tinynet::zero_gradients(result.policy);
        tinynet::GradientSet value_grads = tinynet::zero_gradients(result.value);
        for (int i = 0; i < n; ++i) {
            const RolloutStep& step = rollout[i];
            double v = tinynet::forward(result.value, step.obs)[0];
            double advantage = targets[i] - v;

            value_grads.accumulate(
                tinynet::backward(result.value, step.obs, {2.0 * (v - targets[i]) / n}));

            std::vector<double> out = tinynet::forward(result.policy, step.obs);
            std::vector<double> upstream(out.size(), 0.0);
            if (discrete) {
                // loss = -log pi(a) * adv - c * H(p)
                for (std::size_t j = 0; j < out.size(); ++j)
                    upstream[j] = config.entropy_coefficient * (std::log(out[j] + 1e-12) + 1.0);
                upstream[step.discrete_action] -= advantage / (out[step.discrete_action] + 1e-12);
            } else {
                for (int d = 0; d < action_dim; ++d) {
                    double mean = out[d];
                    double log_sigma = out[action_dim + d];
                    double sigma = std::exp(log_sigma);
                    double zscore = (step.continuous_action[d] - mean) / sigma;
                    // d(-log pi)/dmean and /dlog_sigma, plus -c dH/dlog_sigma
                    upstream[d] = -advantage * zscore / sigma;
                    upstream[action_dim + d] =
                        -advantage * (zscore * zscore - 1.0) - config.entropy_coefficient;
                }
            }
            for (double& u : upstream) u /= n;
            policy_grads.accumulate(tinynet::backward(result.policy, step.obs, upstream));
        }
        if (config.grad_clip_norm > 0.0) {
            policy_grads.clip_by_global_norm(config.grad_clip_norm);
            value_grads.clip_by_global_norm(config.grad_clip_norm);
        }
        tinynet::adam_step(result.policy, policy_grads, policy_adam, config.alpha);
        tinynet::adam_step(result.value, value_grads, value_adam, config.alpha);

        if (episode_ended && budget_left()) {
            obs = env.reset(episode_seeds.raw());
        }
    }
    result.frames = total_steps;
    return result;
}

}  // namespace sibre::agents
