#include "sibre/shaper.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sibre {

BetaSchedule BetaSchedule::constant(double v) {
    if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument("beta must be in (0, 1)");
    BetaSchedule s;
    s.kind = Kind::Constant;
    s.value = v;
    return s;
}

BetaSchedule BetaSchedule::linear_staircase(double start, double end, int num_stages) {
    if (!(start > 0.0 && start < 1.0) || !(end > 0.0 && end < 1.0))
        throw std::invalid_argument("beta must be in (0, 1)");
    if (end < start) throw std::invalid_argument("staircase must be nondecreasing");
    if (num_stages < 1) throw std::invalid_argument("num_stages must be >= 1");
    BetaSchedule s;
    s.kind = Kind::LinearStaircase;
    s.start = start;
    s.end = end;
    s.num_stages = num_stages;
    return s;
}

double current_beta(const BetaSchedule& schedule, double training_fraction) {
    if (schedule.kind == BetaSchedule::Kind::Constant) return schedule.value;
    double f = std::clamp(training_fraction, 0.0, 1.0);
    double stage = std::floor(f * schedule.num_stages);
    double denom = std::max(schedule.num_stages - 1, 1);
    double beta = schedule.start + (schedule.end - schedule.start) * stage / denom;
    return std::min(beta, schedule.end);
}

ThresholdState::ThresholdState(double rho0, int period, BetaSchedule sched, ShapingMode m,
                               double discount)
    : rho(rho0), update_period(period), schedule(sched), mode(m), gamma(discount) {
    if (period < 1) throw std::invalid_argument("update_period must be >= 1");
}

ShapedReward shape_step(const ThresholdState& state, const StepOutcome& outcome,
                        double return_so_far) {
    if (outcome.terminal || outcome.truncated)
        return {return_so_far - state.rho, true};
    return {outcome.reward, false};
}

bool record_return_and_maybe_update(ThresholdState& state, double episode_return,
                                    double training_fraction) {
    state.pending_returns.push_back(episode_return);
    ++state.episodes_seen;
    // In continuing mode update_period counts steps; each recorded value is
    // already one K-step window return, so every call fires an update.
    int needed = state.mode == ShapingMode::Continuing ? 1 : state.update_period;
    if (static_cast<int>(state.pending_returns.size()) < needed) return false;

    double mean = std::accumulate(state.pending_returns.begin(), state.pending_returns.end(), 0.0) /
                  static_cast<double>(state.pending_returns.size());
    double beta = current_beta(state.schedule, training_fraction);
    state.rho += beta * (mean - state.rho);
    state.last_beta = beta;
    state.pending_returns.clear();
    return true;
}

double continuing_window_return(std::span<const double> rewards, double gamma) {
    double g = 0.0;
    double discount = 1.0;
    for (double r : rewards) {
        g += discount * r;
        discount *= gamma;
    }
    return g;
}

}  // namespace sibre
