#include <doctest.h>

#include <cmath>

#include "sibre/shaper.hpp"

using namespace sibre;

TEST_CASE("shape_step passes non-final rewards through and replaces final ones") {
    ThresholdState state(0.5, 1, BetaSchedule::constant(0.1));

    StepOutcome mid;
    mid.reward = -0.1;
    ShapedReward shaped = shape_step(state, mid, -0.3);
    CHECK(shaped.value == -0.1);  // exact pass-through
    CHECK_FALSE(shaped.was_terminal_replacement);

    StepOutcome last;
    last.reward = 1.0;
    last.terminal = true;
    shaped = shape_step(state, last, 2.0);
    CHECK(shaped.value == doctest::Approx(1.5));
    CHECK(shaped.was_terminal_replacement);

    // return exactly at the threshold nets zero
    shaped = shape_step(state, last, 0.5);
    CHECK(shaped.value == 0.0);

    // truncation is an episode boundary too
    StepOutcome cut;
    cut.reward = 0.0;
    cut.truncated = true;
    shaped = shape_step(state, cut, 0.2);
    CHECK(shaped.value == doctest::Approx(0.2 - 0.5));
    CHECK(shaped.was_terminal_replacement);
}

TEST_CASE("sign semantics of the replaced reward") {
    ThresholdState state(1.0, 1, BetaSchedule::constant(0.1));
    StepOutcome last;
    last.terminal = true;
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        double g = rng.uniform(-3, 3);
        double v = shape_step(state, last, g).value;
        if (g > state.rho) CHECK(v > 0.0);
        if (g < state.rho) CHECK(v < 0.0);
        if (g == state.rho) CHECK(v == 0.0);
    }
}

TEST_CASE("threshold update arithmetic") {
    ThresholdState state(0.0, 1, BetaSchedule::constant(0.1));
    CHECK(record_return_and_maybe_update(state, 10.0, 0.0));
    CHECK(state.rho == doctest::Approx(1.0));

    ThresholdState pair(5.0, 2, BetaSchedule::constant(0.1));
    CHECK_FALSE(record_return_and_maybe_update(pair, 3.0, 0.0));
    CHECK(pair.rho == doctest::Approx(5.0));
    CHECK(record_return_and_maybe_update(pair, 7.0, 0.0));
    CHECK(pair.rho == doctest::Approx(5.0));  // mean(3,7) = rho, no movement
    CHECK(pair.pending_returns.empty());
}

TEST_CASE("constant returns follow the closed-form geometric recurrence") {
    const double mu = 2.5, beta = 0.07, rho0 = -1.0;
    ThresholdState state(rho0, 1, BetaSchedule::constant(beta));
    for (int t = 1; t <= 200; ++t) {
        record_return_and_maybe_update(state, mu, 0.0);
        double expected = mu + std::pow(1.0 - beta, t) * (rho0 - mu);
        CHECK(state.rho == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("updated threshold is a convex combination of rho and the batch mean") {
    Rng rng(8);
    for (int rep = 0; rep < 100; ++rep) {
        double beta = rng.uniform(0.01, 0.99);
        int k = 1 + rng.uniform_int(5);
        ThresholdState state(rng.uniform(-5, 5), k, BetaSchedule::constant(beta));
        double before = state.rho;
        double sum = 0.0;
        for (int i = 0; i < k; ++i) {
            double g = rng.uniform(-10, 10);
            sum += g;
            record_return_and_maybe_update(state, g, 0.0);
        }
        double mean = sum / k;
        double lo = std::min(before, mean), hi = std::max(before, mean);
        CHECK(state.rho >= lo - 1e-12);
        CHECK(state.rho <= hi + 1e-12);
    }
}

TEST_CASE("iid returns drive the threshold to the mean geometrically") {
    const double mu = 1.5, beta = 0.2;
    Rng rng(31);
    ThresholdState state(10.0, 1, BetaSchedule::constant(beta));
    const int T = 150;
    for (int t = 0; t < T; ++t)
        record_return_and_maybe_update(state, mu + rng.gaussian() * 0.5, 0.0);
    // contraction plus a generous noise allowance (sd * sqrt(beta / (2 - beta)))
    double bound = std::pow(1.0 - beta, T) * std::abs(10.0 - mu) +
                   6.0 * 0.5 * std::sqrt(beta / (2.0 - beta));
    CHECK(std::abs(state.rho - mu) <= bound);
}

TEST_CASE("beta schedules") {
    BetaSchedule c = BetaSchedule::constant(0.1);
    CHECK(current_beta(c, 0.0) == doctest::Approx(0.1));
    CHECK(current_beta(c, 0.73) == doctest::Approx(0.1));
    CHECK(current_beta(c, 1.0) == doctest::Approx(0.1));

    BetaSchedule s = BetaSchedule::linear_staircase(0.001, 0.1, 10);
    CHECK(current_beta(s, 0.0) == doctest::Approx(0.001));
    CHECK(current_beta(s, 1.0) == doctest::Approx(0.1));
    // staircase is nondecreasing and piecewise constant
    double prev = 0.0;
    for (double f = 0.0; f <= 1.0; f += 0.01) {
        double b = current_beta(s, f);
        CHECK(b >= prev - 1e-15);
        CHECK(b >= 0.001);
        CHECK(b <= 0.1);
        prev = b;
    }
    // one stage covers 10% of training
    CHECK(current_beta(s, 0.05) == doctest::Approx(0.001));
    CHECK(current_beta(s, 0.15) == doctest::Approx(0.001 + (0.1 - 0.001) / 9.0));

    CHECK_THROWS_AS(BetaSchedule::constant(0.0), std::invalid_argument);
    CHECK_THROWS_AS(BetaSchedule::constant(1.0), std::invalid_argument);
    CHECK_THROWS_AS(BetaSchedule::linear_staircase(0.1, 0.001, 10), std::invalid_argument);
}

TEST_CASE("continuing-mode window returns") {
    std::vector<double> zeros(10, 0.0);
    CHECK(continuing_window_return(zeros, 0.99) == 0.0);

    std::vector<double> fall = {0.0, 0.0, -1.0};
    CHECK(continuing_window_return(fall, 0.99) == doctest::Approx(-0.9801));

    // 500 mixed rewards against a direct left-fold evaluation
    Rng rng(77);
    std::vector<double> window(500);
    for (double& r : window) r = rng.uniform(-1, 1);
    double gamma = 0.95, acc = 0.0, g = 1.0;
    for (double r : window) {
        acc += g * r;
        g *= gamma;
    }
    CHECK(continuing_window_return(window, gamma) == doctest::Approx(acc).epsilon(1e-12));
}

TEST_CASE("continuing mode updates on every window boundary") {
    ThresholdState state(0.0, 500, BetaSchedule::constant(0.5), ShapingMode::Continuing, 0.99);
    CHECK(record_return_and_maybe_update(state, -2.0, 0.0));
    CHECK(state.rho == doctest::Approx(-1.0));
    CHECK(record_return_and_maybe_update(state, -2.0, 0.0));
    CHECK(state.rho == doctest::Approx(-1.5));
}

TEST_CASE("schedule advances with training progress on update events") {
    ThresholdState state(0.0, 1, BetaSchedule::linear_staircase(0.001, 0.1, 10));
    record_return_and_maybe_update(state, 1.0, 0.0);
    CHECK(state.last_beta == doctest::Approx(0.001));
    record_return_and_maybe_update(state, 1.0, 0.95);
    CHECK(state.last_beta == doctest::Approx(0.1));
}
