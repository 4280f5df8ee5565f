#pragma once

#include "sibre/mdp.hpp"

namespace sibre::envs {

struct CartPoleState {
    double x = 0.0;
    double x_dot = 0.0;
    double theta = 0.0;
    double theta_dot = 0.0;
};

/// Cart-pole with Euler-integrated classic dynamics. Actions: 0 push left,
/// 1 push right. Failure when |theta| > 15 degrees or |x| > 2.4.
///
/// Episodic mode: +1 per step, terminal on failure.
/// Continuing mode: 0 per step, -1 on failure followed by an internal
/// re-initialization; terminal is never set.
class CartPole : public Env {
public:
    enum class Mode { Episodic, Continuing };

    explicit CartPole(Mode mode, int turn_limit = 1000);

    Observation reset(std::uint64_t seed) override;
    StepOutcome step(const Action& action) override;

    const ActionSpec& action_spec() const override { return spec_; }
    int observation_dim() const override { return 4; }
    int turn_limit() const override { return turn_limit_; }

    const CartPoleState& state() const { return state_; }
    void set_state(const CartPoleState& s) { state_ = s; }

    /// One Euler step of the dynamics with the standard benchmark constants
    /// (gravity 9.8, cart 1.0, pole 0.1, half-length 0.5, force 10, dt 0.02).
    static CartPoleState integrate(const CartPoleState& s, double force);

    static constexpr double kThetaLimit = 15.0 * 3.14159265358979323846 / 180.0;
    static constexpr double kXLimit = 2.4;

private:
    Observation observe() const;
    void sample_initial();
    static bool failed(const CartPoleState& s);

    ActionSpec spec_;
    Mode mode_;
    int turn_limit_;
    CartPoleState state_;
    int steps_ = 0;
    Rng rng_{0};
};

}  // namespace sibre::envs
