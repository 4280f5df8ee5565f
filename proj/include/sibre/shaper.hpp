#pragma once

#include <span>
#include <vector>

#include "sibre/mdp.hpp"

namespace sibre {

/// Step size beta for threshold updates. Either a constant, or a staircase
/// that rises from `start` to `end` in `num_stages` equal fractions of the
/// training budget.
struct BetaSchedule {
    enum class Kind { Constant, LinearStaircase };
    Kind kind = Kind::Constant;
    double value = 0.1;
    double start = 0.001;
    double end = 0.1;
    int num_stages = 10;

    static BetaSchedule constant(double v);
    static BetaSchedule linear_staircase(double start, double end, int num_stages);
};

/// Beta at a point of training. `training_fraction` in [0, 1] is episodes
/// consumed over budget (episodic) or steps over budget (continuing).
double current_beta(const BetaSchedule& schedule, double training_fraction);

enum class ShapingMode { Episodic, Continuing };

/// The self-improvement threshold rho and everything needed to update it:
/// the return buffer for the current update window, the beta schedule and
/// the update period K.
struct ThresholdState {
    double rho = 0.0;
    int update_period = 1;  // K: episodes (episodic) or window count (continuing)
    std::vector<double> pending_returns;
    long episodes_seen = 0;
    BetaSchedule schedule;
    ShapingMode mode = ShapingMode::Episodic;
    double gamma = 0.99;  // discount for continuing-mode window returns
    double last_beta = 0.0;

    ThresholdState() = default;
    ThresholdState(double rho0, int period, BetaSchedule sched,
                   ShapingMode m = ShapingMode::Episodic, double discount = 0.99);
};

struct ShapedReward {
    double value = 0.0;
    bool was_terminal_replacement = false;
};

/// Eq-style terminal replacement: a final (terminal or truncated) step gets
/// G_t - rho_t, every other step passes the original reward through
/// unchanged. `return_so_far` must already include the current step's
/// original reward when that step ends the episode.
ShapedReward shape_step(const ThresholdState& state, const StepOutcome& outcome,
                        double return_so_far);

/// Records one episode return (or window return in continuing mode). Once
/// `update_period` returns are buffered, applies
///   rho <- rho + beta * (mean(buffered) - rho)
/// and clears the buffer. Returns true when an update fired.
bool record_return_and_maybe_update(ThresholdState& state, double episode_return,
                                    double training_fraction);

/// Discounted return over a window of step rewards, i starting at 0.
double continuing_window_return(std::span<const double> rewards, double gamma);

}  // namespace sibre
