#include "sibre/envs/mountain_car.hpp"

#include <algorithm>
#include <cmath>

namespace sibre::envs {

MountainCar::MountainCar(int turn_limit)
    : spec_(ActionSpec::continuous({-1.0}, {1.0})), turn_limit_(turn_limit) {}

Observation MountainCar::observe() const {
    Observation obs;
    obs.encoding = {state_.position, state_.velocity};
    return obs;
}

Observation MountainCar::reset(std::uint64_t seed) {
    rng_ = Rng(seed);
    state_.position = rng_.uniform(-0.6, -0.4);
    state_.velocity = 0.0;
    steps_ = 0;
    episode_over_ = false;
    return observe();
}

StepOutcome MountainCar::step(const Action& action) {
    check_not_over();
    check_continuous_action(action);

    double force = action.continuous[0];
    state_.velocity += force * kPower - kGravityCoeff * std::cos(3.0 * state_.position);
    state_.velocity = std::clamp(state_.velocity, -kMaxSpeed, kMaxSpeed);
    state_.position += state_.velocity;
    state_.position = std::clamp(state_.position, kMinPosition, kMaxPosition);
    if (state_.position <= kMinPosition && state_.velocity < 0.0) state_.velocity = 0.0;
    ++steps_;

    StepOutcome out;
    out.reward = -0.1 * force * force;
    if (state_.position >= kGoalPosition) {
        out.reward += 100.0;
        out.terminal = true;
    } else if (steps_ >= turn_limit_) {
        out.truncated = true;
    }
    out.next_observation = observe();
    episode_over_ = out.terminal || out.truncated;
    return out;
}

}  // namespace sibre::envs
