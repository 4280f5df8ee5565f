#include "sibre/mdp.hpp"

#include <cmath>

namespace sibre {

EpisodeTrace run_episode(Env& env, const Policy& policy, int max_steps, std::uint64_t seed) {
    if (max_steps < 1) throw std::invalid_argument("max_steps must be >= 1");
    EpisodeTrace trace;
    trace.seed = seed;
    Rng base(seed);
    Rng policy_rng = base.split(1);

    Observation obs = env.reset(seed);
    for (int k = 0; k < max_steps; ++k) {
        Action action = policy(obs, policy_rng);
        StepOutcome out = env.step(action);
        trace.steps.push_back({obs, action, out.reward, out.terminal});
        if (out.terminal) return trace;
        if (out.truncated) {
            trace.truncated = true;
            return trace;
        }
        obs = std::move(out.next_observation);
    }
    trace.truncated = true;
    return trace;
}

ReturnValue compute_return(const std::vector<double>& rewards, double gamma) {
    if (!(gamma > 0.0) || gamma > 1.0) throw std::invalid_argument("gamma must be in (0, 1]");
    ReturnValue rv;
    rv.gamma = gamma;
    double discount = 1.0;
    for (double r : rewards) {
        rv.undiscounted += r;
        rv.discounted += discount * r;
        discount *= gamma;
    }
    return rv;
}

ReturnValue compute_return(const EpisodeTrace& trace, double gamma) {
    std::vector<double> rewards;
    rewards.reserve(trace.steps.size());
    for (const TraceStep& s : trace.steps) rewards.push_back(s.reward);
    return compute_return(rewards, gamma);
}

}  // namespace sibre
