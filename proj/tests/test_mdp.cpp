#include <doctest.h>

#include <stdexcept>

#include "sibre/envs/frozen_lake.hpp"
#include "sibre/mdp.hpp"

using namespace sibre;

namespace {

Action scripted(const std::vector<int>& moves, int& cursor) {
    return Action::of(moves[cursor++ % moves.size()]);
}

}  // namespace

TEST_CASE("compute_return basic arithmetic") {
    ReturnValue r = compute_return(std::vector<double>{-0.1, -0.1, 4.0}, 1.0);
    CHECK(r.undiscounted == doctest::Approx(3.8));
    CHECK(r.discounted == doctest::Approx(3.8));

    r = compute_return(std::vector<double>{1.0, 1.0}, 0.99);
    CHECK(r.undiscounted == doctest::Approx(2.0));
    CHECK(r.discounted == doctest::Approx(1.99));

    r = compute_return(std::vector<double>{}, 0.9);
    CHECK(r.undiscounted == 0.0);
    CHECK(r.discounted == 0.0);
}

TEST_CASE("compute_return additivity over concatenation") {
    Rng rng(42);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> a, b, both;
        int na = rng.uniform_int(10), nb = rng.uniform_int(10);
        for (int i = 0; i < na; ++i) a.push_back(rng.uniform(-2, 2));
        for (int i = 0; i < nb; ++i) b.push_back(rng.uniform(-2, 2));
        both = a;
        both.insert(both.end(), b.begin(), b.end());
        double sum = compute_return(a, 1.0).undiscounted + compute_return(b, 1.0).undiscounted;
        CHECK(compute_return(both, 1.0).undiscounted == doctest::Approx(sum).epsilon(1e-12));
    }
}

TEST_CASE("run_episode on a deterministic lake reaches the goal in 6 moves") {
    envs::FrozenLake lake(/*slippery=*/false);
    // right, right, down, down, down, right threads between the holes
    std::vector<int> moves = {2, 2, 1, 1, 1, 2};
    int cursor = 0;
    Policy policy = [&](const Observation&, Rng&) { return scripted(moves, cursor); };
    EpisodeTrace trace = run_episode(lake, policy, 100, 7);
    CHECK(trace.length() == 6);
    CHECK(trace.steps.back().reward == doctest::Approx(1.0));
    CHECK(trace.steps.back().terminal);
    CHECK_FALSE(trace.truncated);
}

TEST_CASE("run_episode truncates a never-terminating policy at the turn limit") {
    envs::FrozenLake lake(/*slippery=*/false);
    Policy left = [](const Observation&, Rng&) { return Action::of(0); };  // blocked by wall
    EpisodeTrace trace = run_episode(lake, left, 100, 7);
    CHECK(trace.length() == 100);
    CHECK(trace.truncated);
    CHECK_FALSE(trace.steps.back().terminal);
}

TEST_CASE("run_episode is deterministic in (env, policy, seed)") {
    envs::FrozenLake lake(/*slippery=*/true);
    Policy random = [](const Observation&, Rng& rng) { return Action::of(rng.uniform_int(4)); };
    EpisodeTrace a = run_episode(lake, random, 100, 123);
    EpisodeTrace b = run_episode(lake, random, 100, 123);
    REQUIRE(a.length() == b.length());
    for (int i = 0; i < a.length(); ++i) {
        CHECK(a.steps[i].action.discrete == b.steps[i].action.discrete);
        CHECK(a.steps[i].reward == b.steps[i].reward);
        CHECK(a.steps[i].observation.discrete_index == b.steps[i].observation.discrete_index);
    }
    EpisodeTrace c = run_episode(lake, random, 100, 124);
    bool identical = a.length() == c.length();
    if (identical)
        for (int i = 0; i < a.length(); ++i)
            identical = identical && a.steps[i].action.discrete == c.steps[i].action.discrete;
    CHECK_FALSE(identical);  // different seed, different trace (with overwhelming probability)
}

TEST_CASE("trace invariants: terminal only at the last step") {
    envs::FrozenLake lake(/*slippery=*/true);
    Policy random = [](const Observation&, Rng& rng) { return Action::of(rng.uniform_int(4)); };
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        EpisodeTrace t = run_episode(lake, random, 100, seed);
        REQUIRE(t.length() >= 1);
        REQUIRE(t.length() <= 100);
        for (int i = 0; i + 1 < t.length(); ++i) CHECK_FALSE(t.steps[i].terminal);
        if (t.truncated) CHECK_FALSE(t.steps.back().terminal);
    }
}

TEST_CASE("action and lifecycle errors") {
    envs::FrozenLake lake(/*slippery=*/false);
    lake.reset(0);
    CHECK_THROWS_AS(lake.step(Action::of(4)), std::invalid_argument);
    CHECK_THROWS_AS(lake.step(Action::of(-1)), std::invalid_argument);
    // drive into the hole at (1,1): down, right
    lake.step(Action::of(1));
    StepOutcome out = lake.step(Action::of(2));
    CHECK(out.terminal);
    CHECK(out.reward == 0.0);
    CHECK_THROWS_AS(lake.step(Action::of(0)), std::logic_error);
}

TEST_CASE("action spec validation") {
    CHECK_THROWS_AS(ActionSpec::discrete(1), std::invalid_argument);
    CHECK_THROWS_AS(ActionSpec::continuous({0.0}, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(ActionSpec::continuous({0.0, 1.0}, {1.0}), std::invalid_argument);
    ActionSpec c = ActionSpec::continuous({-1.0}, {1.0});
    CHECK(c.dim() == 1);
    CHECK(ActionSpec::discrete(4).count == 4);
}

TEST_CASE("rng split gives decorrelated but reproducible streams") {
    Rng a(99);
    Rng b(99);
    CHECK(a.raw() == b.raw());
    Rng s1 = Rng(99).split(1);
    Rng s2 = Rng(99).split(2);
    Rng s1_again = Rng(99).split(1);
    CHECK(s1.raw() == s1_again.raw());
    Rng s1b = Rng(99).split(1);
    s1b.raw();
    CHECK(Rng(99).split(2).raw() == s2.raw());
}
