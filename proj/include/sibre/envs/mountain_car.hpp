#pragma once

#include "sibre/mdp.hpp"

namespace sibre::envs {

struct MountainCarState {
    double position = -0.5;
    double velocity = 0.0;
};

/// Continuous-action mountain car. Force in [-1, 1]; each step costs
/// 0.1 * force^2 and reaching the goal position adds +100 and terminates.
class MountainCar : public Env {
public:
    explicit MountainCar(int turn_limit = 999);

    Observation reset(std::uint64_t seed) override;
    StepOutcome step(const Action& action) override;

    const ActionSpec& action_spec() const override { return spec_; }
    int observation_dim() const override { return 2; }
    int turn_limit() const override { return turn_limit_; }

    const MountainCarState& state() const { return state_; }
    void set_state(const MountainCarState& s) { state_ = s; }

    static constexpr double kMinPosition = -1.2;
    static constexpr double kMaxPosition = 0.6;
    static constexpr double kGoalPosition = 0.45;
    static constexpr double kMaxSpeed = 0.07;
    static constexpr double kPower = 0.0015;
    static constexpr double kGravityCoeff = 0.0025;

private:
    Observation observe() const;

    ActionSpec spec_;
    int turn_limit_;
    MountainCarState state_;
    int steps_ = 0;
    Rng rng_{0};
};

}  // namespace sibre::envs
