#include "sibre/envs/cartpole.hpp"

#include <cmath>

namespace sibre::envs {
namespace {

constexpr double kGravity = 9.8;
constexpr double kCartMass = 1.0;
constexpr double kPoleMass = 0.1;
constexpr double kTotalMass = kCartMass + kPoleMass;
constexpr double kHalfLength = 0.5;
constexpr double kPoleMassLength = kPoleMass * kHalfLength;
constexpr double kForceMag = 10.0;
constexpr double kDt = 0.02;

}  // namespace

CartPole::CartPole(Mode mode, int turn_limit)
    : spec_(ActionSpec::discrete(2)), mode_(mode), turn_limit_(turn_limit) {}

CartPoleState CartPole::integrate(const CartPoleState& s, double force) {
    double cos_t = std::cos(s.theta);
    double sin_t = std::sin(s.theta);
    double temp = (force + kPoleMassLength * s.theta_dot * s.theta_dot * sin_t) / kTotalMass;
    double theta_acc = (kGravity * sin_t - cos_t * temp) /
                       (kHalfLength * (4.0 / 3.0 - kPoleMass * cos_t * cos_t / kTotalMass));
    double x_acc = temp - kPoleMassLength * theta_acc * cos_t / kTotalMass;

    CartPoleState next;
    next.x = s.x + kDt * s.x_dot;
    next.x_dot = s.x_dot + kDt * x_acc;
    next.theta = s.theta + kDt * s.theta_dot;
    next.theta_dot = s.theta_dot + kDt * theta_acc;
    return next;
}

bool CartPole::failed(const CartPoleState& s) {
    return std::abs(s.theta) > kThetaLimit || std::abs(s.x) > kXLimit;
}

Observation CartPole::observe() const {
    Observation obs;
    obs.encoding = {state_.x, state_.x_dot, state_.theta, state_.theta_dot};
    return obs;
}

void CartPole::sample_initial() {
    state_.x = rng_.uniform(-0.05, 0.05);
    state_.x_dot = rng_.uniform(-0.05, 0.05);
    state_.theta = rng_.uniform(-0.05, 0.05);
    state_.theta_dot = rng_.uniform(-0.05, 0.05);
}

Observation CartPole::reset(std::uint64_t seed) {
    rng_ = Rng(seed);
    sample_initial();
    steps_ = 0;
    episode_over_ = false;
    return observe();
}

StepOutcome CartPole::step(const Action& action) {
    check_not_over();
    check_discrete_action(action);

    double force = action.discrete == 1 ? kForceMag : -kForceMag;
    state_ = integrate(state_, force);
    ++steps_;

    StepOutcome out;
    bool fell = failed(state_);
    if (mode_ == Mode::Episodic) {
        out.reward = 1.0;
        out.terminal = fell;
        if (!fell && steps_ >= turn_limit_) out.truncated = true;
    } else {
        out.reward = fell ? -1.0 : 0.0;
        if (fell) sample_initial();  // silent restart, never terminal
    }
    out.next_observation = observe();
    episode_over_ = out.terminal || out.truncated;
    return out;
}

}  // namespace sibre::envs
