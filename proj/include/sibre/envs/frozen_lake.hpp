#pragma once

#include <array>
#include <string>

#include "sibre/mdp.hpp"

namespace sibre::envs {

/// 4x4 FrozenLake. Actions: 0 left, 1 down, 2 right, 3 up. On slippery
/// cells the agent moves in the intended direction with probability 1/3
/// and in each perpendicular direction with probability 1/3. Goal pays +1
/// and terminates; holes terminate with 0; walls (grid edges) block.
class FrozenLake : public Env {
public:
    explicit FrozenLake(bool slippery = true, int turn_limit = 100);

    Observation reset(std::uint64_t seed) override;
    StepOutcome step(const Action& action) override;

    const ActionSpec& action_spec() const override { return spec_; }
    int observation_dim() const override { return kStates; }
    int turn_limit() const override { return turn_limit_; }
    std::optional<int> state_count() const override { return kStates; }
    std::optional<TabularModel> tabular_model() const override;

    static constexpr int kSize = 4;
    static constexpr int kStates = kSize * kSize;
    static constexpr int kActions = 4;

    int state() const { return state_; }

private:
    Observation observe(int s) const;
    static bool is_hole(int s);
    static bool is_goal(int s);
    static int move(int s, int dir);

    ActionSpec spec_;
    bool slippery_;
    int turn_limit_;
    int state_ = 0;
    int steps_ = 0;
    Rng rng_{0};
};

}  // namespace sibre::envs
