#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sibre/rng.hpp"

namespace sibre {

/// Feature-vector view of a state. Tabular environments also carry the
/// flat state index.
struct Observation {
    std::vector<double> encoding;
    std::optional<int> discrete_index;
};

struct ActionSpec {
    enum class Kind { Discrete, Continuous };
    Kind kind = Kind::Discrete;
    int count = 0;                  // discrete
    std::vector<double> low, high;  // continuous, per-dim bounds

    static ActionSpec discrete(int n) {
        if (n < 2) throw std::invalid_argument("discrete action count must be >= 2");
        ActionSpec s;
        s.kind = Kind::Discrete;
        s.count = n;
        return s;
    }
    static ActionSpec continuous(std::vector<double> lo, std::vector<double> hi) {
        if (lo.size() != hi.size() || lo.empty())
            throw std::invalid_argument("continuous bounds must be nonempty and congruent");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] < hi[i])) throw std::invalid_argument("continuous bounds require low < high");
        ActionSpec s;
        s.kind = Kind::Continuous;
        s.low = std::move(lo);
        s.high = std::move(hi);
        return s;
    }
    int dim() const { return kind == Kind::Discrete ? 1 : static_cast<int>(low.size()); }
};

/// Either a discrete index or a continuous vector, depending on the spec.
struct Action {
    int discrete = 0;
    std::vector<double> continuous;

    static Action of(int a) {
        Action x;
        x.discrete = a;
        return x;
    }
    static Action of(std::vector<double> v) {
        Action x;
        x.continuous = std::move(v);
        return x;
    }
};

struct StepOutcome {
    double reward = 0.0;
    Observation next_observation;
    bool terminal = false;
    bool truncated = false;  // turn-limit hit, not a true terminal
};

struct TraceStep {
    Observation observation;  // observation the action was chosen from
    Action action;
    double reward = 0.0;
    bool terminal = false;
};

struct EpisodeTrace {
    std::vector<TraceStep> steps;
    std::uint64_t seed = 0;
    bool truncated = false;
    int length() const { return static_cast<int>(steps.size()); }
};

struct ReturnValue {
    double undiscounted = 0.0;
    double discounted = 0.0;
    double gamma = 1.0;
};

/// One row of a tabular transition model: P(next | state, action) entries.
struct TabularTransition {
    int next = 0;
    double probability = 0.0;
    double reward = 0.0;
    bool terminal = false;
};

/// Explicit MDP model for tabular environments; consumed by the oracle.
struct TabularModel {
    int num_states = 0;
    int num_actions = 0;
    int start_state = 0;
    // transitions[s][a] lists the support of P(.|s,a)
    std::vector<std::vector<std::vector<TabularTransition>>> transitions;
    std::vector<bool> terminal_state;
};

/// Single-threaded environment state machine behind reset/step.
class Env {
public:
    virtual ~Env() = default;

    /// Fresh initial state; identical seed gives an identical episode stream.
    virtual Observation reset(std::uint64_t seed) = 0;

    /// One transition. Throws std::invalid_argument for out-of-spec actions
    /// and std::logic_error when the episode is already over.
    virtual StepOutcome step(const Action& action) = 0;

    virtual const ActionSpec& action_spec() const = 0;
    virtual int observation_dim() const = 0;
    virtual int turn_limit() const = 0;

    /// Present for tabular environments only.
    virtual std::optional<int> state_count() const { return std::nullopt; }
    virtual std::optional<TabularModel> tabular_model() const { return std::nullopt; }

    bool episode_over() const { return episode_over_; }

protected:
    void check_discrete_action(const Action& a) const {
        const ActionSpec& spec = action_spec();
        if (a.discrete < 0 || a.discrete >= spec.count)
            throw std::invalid_argument("discrete action index out of range");
    }
    void check_continuous_action(const Action& a) const {
        const ActionSpec& spec = action_spec();
        if (a.continuous.size() != spec.low.size())
            throw std::invalid_argument("continuous action has wrong dimension");
        for (std::size_t i = 0; i < spec.low.size(); ++i)
            if (a.continuous[i] < spec.low[i] || a.continuous[i] > spec.high[i])
                throw std::invalid_argument("continuous action out of bounds");
    }
    void check_not_over() const {
        if (episode_over_) throw std::logic_error("step() on a finished episode; call reset()");
    }

    bool episode_over_ = false;
};

using Policy = std::function<Action(const Observation&, Rng&)>;

/// Runs one full episode. The policy is queried exactly once per step and
/// draws randomness from a stream derived from `seed` (distinct from the
/// environment's own stream).
EpisodeTrace run_episode(Env& env, const Policy& policy, int max_steps, std::uint64_t seed);

ReturnValue compute_return(const EpisodeTrace& trace, double gamma);
ReturnValue compute_return(const std::vector<double>& rewards, double gamma);

}  // namespace sibre
