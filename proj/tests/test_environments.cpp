#include <doctest.h>

#include <cmath>
#include <set>

#include "sibre/envs/cartpole.hpp"
#include "sibre/envs/frozen_lake.hpp"
#include "sibre/envs/gridworld.hpp"
#include "sibre/envs/mountain_car.hpp"

using namespace sibre;
using namespace sibre::envs;

TEST_CASE("frozen lake deterministic motion and rewards") {
    FrozenLake lake(/*slippery=*/false);
    Observation obs = lake.reset(0);
    REQUIRE(obs.discrete_index.has_value());
    CHECK(*obs.discrete_index == 0);

    StepOutcome out = lake.step(Action::of(2));  // right from (0,0)
    CHECK(*out.next_observation.discrete_index == 1);
    CHECK(out.reward == 0.0);
    CHECK_FALSE(out.terminal);

    // walk the safe corridor to the goal
    lake.reset(0);
    for (int a : {2, 2, 1, 1, 1}) lake.step(Action::of(a));
    out = lake.step(Action::of(2));
    CHECK(out.reward == doctest::Approx(1.0));
    CHECK(out.terminal);
    CHECK(*out.next_observation.discrete_index == 15);
}

TEST_CASE("frozen lake slip frequencies match the 1/3 model") {
    // From the start, intending 'down' can land on state 4 (intended), state 1
    // (perpendicular right) or stay on 0 (perpendicular left, blocked).
    FrozenLake lake(/*slippery=*/true);
    const int n = 100000;
    int to_down = 0, to_right = 0, to_stay = 0;
    for (int i = 0; i < n; ++i) {
        lake.reset(static_cast<std::uint64_t>(i));
        StepOutcome out = lake.step(Action::of(1));
        int s = *out.next_observation.discrete_index;
        if (s == 4) ++to_down;
        else if (s == 1) ++to_right;
        else if (s == 0) ++to_stay;
        else FAIL("unexpected successor state " << s);
    }
    double sigma = std::sqrt(n * (1.0 / 3.0) * (2.0 / 3.0));
    for (int c : {to_down, to_right, to_stay}) {
        CHECK(std::abs(c - n / 3.0) <= 3.0 * sigma);
        CHECK(std::abs(c / static_cast<double>(n) - 1.0 / 3.0) <= 0.01);
    }
}

TEST_CASE("frozen lake tabular model row stochasticity") {
    FrozenLake lake(/*slippery=*/true);
    auto model = lake.tabular_model();
    REQUIRE(model.has_value());
    CHECK(model->num_states == 16);
    CHECK(model->num_actions == 4);
    for (int s = 0; s < 16; ++s)
        for (int a = 0; a < 4; ++a) {
            double mass = 0.0;
            for (const auto& t : model->transitions[s][a]) mass += t.probability;
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
        }
    // entering the goal pays +1 in the model too
    bool found_goal_reward = false;
    for (const auto& t : model->transitions[14][2])
        if (t.next == 15 && t.reward == 1.0 && t.terminal) found_goal_reward = true;
    CHECK(found_goal_reward);
}

TEST_CASE("doorkey mechanics: walls, penalties, key and door") {
    GridWorld world(GridWorld::Task::DoorKey, 6);
    world.restore_layout(
        "######\n"
        "#>k#.#\n"
        "#..#.#\n"
        "#..D.#\n"
        "#..#G#\n"
        "######\n"
        "carrying 0\n");
    CHECK(world.agent_row() == 1);
    CHECK(world.agent_col() == 1);
    CHECK(world.heading() == 0);

    // toggle the locked door without the key: stays locked
    GridWorld locked = world;
    locked.restore_layout(
        "######\n"
        "#.k#.#\n"
        "#..#.#\n"
        "#.>D.#\n"
        "#..#G#\n"
        "######\n"
        "carrying 0\n");
    StepOutcome out = locked.step(Action::of(kToggle));
    CHECK(out.reward == doctest::Approx(-0.1));
    CHECK(locked.cell(3, 3) == Cell::DoorLocked);
    out = locked.step(Action::of(kForward));  // blocked by the locked door
    CHECK(locked.agent_col() == 2);
    CHECK(out.reward == doctest::Approx(-0.1));

    // pick up the key, then the door opens
    out = world.step(Action::of(kPickup));
    CHECK(world.carrying_key());
    CHECK(world.cell(1, 2) == Cell::Floor);
    CHECK(out.reward == doctest::Approx(-0.1));

    // forward into the outer wall leaves the position unchanged
    GridWorld blocked = world;
    blocked.restore_layout(
        "######\n"
        "#^.#.#\n"
        "#..#.#\n"
        "#..D.#\n"
        "#..#G#\n"
        "######\n"
        "carrying 1\n");
    out = blocked.step(Action::of(kForward));
    CHECK(blocked.agent_row() == 1);
    CHECK(blocked.agent_col() == 1);
    CHECK(out.reward == doctest::Approx(-0.1));
}

TEST_CASE("doorkey scripted solve pays 4.0 minus the step penalties") {
    GridWorld world(GridWorld::Task::DoorKey, 6);
    world.reset(17);
    std::string layout = world.dump_layout();
    auto plan = solve_gridworld_bfs(world);
    REQUIRE(plan.has_value());
    double ret = 0.0;
    StepOutcome out;
    for (int a : *plan) {
        out = world.step(Action::of(a));
        ret += out.reward;
    }
    CHECK(out.terminal);
    int n = static_cast<int>(plan->size());
    CHECK(ret == doctest::Approx(4.0 - 0.1 * (n - 1)).epsilon(1e-12));
    // layout replay: the same seed regenerates the same layout
    GridWorld again(GridWorld::Task::DoorKey, 6);
    again.reset(17);
    CHECK(again.dump_layout() == layout);
}

TEST_CASE("every generated layout is solvable") {
    for (auto [task, size] : {std::pair{GridWorld::Task::DoorKey, 5},
                              {GridWorld::Task::DoorKey, 6},
                              {GridWorld::Task::DoorKey, 8},
                              {GridWorld::Task::MultiRoom, 6}}) {
        GridWorld world(task, size);
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            world.reset(seed);
            auto plan = solve_gridworld_bfs(world);
            REQUIRE_MESSAGE(plan.has_value(), "unsolvable layout, seed " << seed);
        }
    }
}

TEST_CASE("layout dump/restore round trip") {
    GridWorld world(GridWorld::Task::DoorKey, 8);
    world.reset(3);
    world.step(Action::of(kTurnRight));
    std::string text = world.dump_layout();
    GridWorld copy(GridWorld::Task::DoorKey, 8);
    copy.restore_layout(text);
    CHECK(copy.dump_layout() == text);
    CHECK(copy.agent_row() == world.agent_row());
    CHECK(copy.heading() == world.heading());
    CHECK_THROWS_AS(copy.restore_layout("###\n###\n###\ncarrying 0\n"), std::invalid_argument);
}

TEST_CASE("gridworld truncates at its turn limit") {
    GridWorld world(GridWorld::Task::DoorKey, 6, 0, /*turn_limit=*/25);
    world.reset(5);
    StepOutcome out;
    for (int i = 0; i < 25; ++i) out = world.step(Action::of(kTurnLeft));
    CHECK(out.truncated);
    CHECK_FALSE(out.terminal);
    CHECK_THROWS_AS(world.step(Action::of(kTurnLeft)), std::logic_error);
}

TEST_CASE("gridworld padded encodings share a layout across sizes") {
    GridWorld small(GridWorld::Task::DoorKey, 5, /*encode_size=*/8);
    GridWorld big(GridWorld::Task::DoorKey, 8);
    CHECK(small.observation_dim() == big.observation_dim());
}

TEST_CASE("cartpole integration matches an independent Euler oracle") {
    // Re-derive one Euler step directly from the equations of motion.
    auto oracle = [](CartPoleState s, double force) {
        const double g = 9.8, mc = 1.0, mp = 0.1, l = 0.5, dt = 0.02;
        double total = mc + mp;
        double cos_t = std::cos(s.theta), sin_t = std::sin(s.theta);
        double temp = (force + mp * l * s.theta_dot * s.theta_dot * sin_t) / total;
        double theta_acc =
            (g * sin_t - cos_t * temp) / (l * (4.0 / 3.0 - mp * cos_t * cos_t / total));
        double x_acc = temp - mp * l * theta_acc * cos_t / total;
        CartPoleState n;
        n.x = s.x + dt * s.x_dot;
        n.x_dot = s.x_dot + dt * x_acc;
        n.theta = s.theta + dt * s.theta_dot;
        n.theta_dot = s.theta_dot + dt * theta_acc;
        return n;
    };
    Rng rng(11);
    for (int i = 0; i < 50; ++i) {
        CartPoleState s{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-0.2, 0.2),
                        rng.uniform(-1, 1)};
        double force = rng.uniform() < 0.5 ? -10.0 : 10.0;
        CartPoleState got = CartPole::integrate(s, force);
        CartPoleState want = oracle(s, force);
        CHECK(got.x == doctest::Approx(want.x).epsilon(1e-12));
        CHECK(got.x_dot == doctest::Approx(want.x_dot).epsilon(1e-12));
        CHECK(got.theta == doctest::Approx(want.theta).epsilon(1e-12));
        CHECK(got.theta_dot == doctest::Approx(want.theta_dot).epsilon(1e-12));
    }
    // zero force, zero state: nothing moves
    CartPoleState zero{};
    CartPoleState still = CartPole::integrate(zero, 0.0);
    CHECK(still.x == 0.0);
    CHECK(still.theta == 0.0);
}

TEST_CASE("episodic cartpole terminates past the angle limit") {
    CartPole pole(CartPole::Mode::Episodic);
    pole.reset(1);
    CartPoleState tilted{};
    tilted.theta = 0.24;  // within the limit, one push right crosses it
    tilted.theta_dot = 3.0;
    pole.set_state(tilted);
    StepOutcome out = pole.step(Action::of(1));
    CHECK(out.terminal);
    CHECK(out.reward == doctest::Approx(1.0));
}

TEST_CASE("continuing cartpole reports -1 and restarts instead of terminating") {
    CartPole pole(CartPole::Mode::Continuing);
    pole.reset(1);
    CartPoleState tilted{};
    tilted.theta = 0.24;
    tilted.theta_dot = 3.0;
    pole.set_state(tilted);
    StepOutcome out = pole.step(Action::of(1));
    CHECK(out.reward == doctest::Approx(-1.0));
    CHECK_FALSE(out.terminal);
    CHECK_FALSE(out.truncated);
    CHECK(std::abs(pole.state().theta) <= 0.05);  // freshly re-initialized
    // healthy steps pay 0 and the stream never ends
    for (int i = 0; i < 200; ++i) {
        out = pole.step(Action::of(i % 2));
        CHECK_FALSE(out.terminal);
        CHECK_FALSE(out.truncated);
        CHECK((out.reward == 0.0 || out.reward == -1.0));
    }
}

TEST_CASE("mountain car force penalty, clamps and goal bonus") {
    MountainCar car;
    car.reset(4);
    // zero force costs nothing until truncation
    StepOutcome out;
    for (int i = 0; i < 999; ++i) {
        out = car.step(Action::of(std::vector<double>{0.0}));
        CHECK(out.reward == 0.0);
    }
    CHECK(out.truncated);
}

TEST_CASE("mountain car bang-bang policy reaches the goal") {
    MountainCar car;
    car.reset(4);
    double penalty = 0.0;
    StepOutcome out;
    bool reached = false;
    for (int i = 0; i < 999 && !reached; ++i) {
        double f = car.state().velocity >= 0.0 ? 1.0 : -1.0;  // pump energy
        out = car.step(Action::of(std::vector<double>{f}));
        penalty += 0.1 * f * f;
        reached = out.terminal;
    }
    REQUIRE(reached);
    double total = 0.0;
    {
        MountainCar replay;
        replay.reset(4);
        bool done = false;
        while (!done) {
            double f = replay.state().velocity >= 0.0 ? 1.0 : -1.0;
            StepOutcome o = replay.step(Action::of(std::vector<double>{f}));
            total += o.reward;
            done = o.terminal;
        }
    }
    CHECK(total == doctest::Approx(100.0 - penalty).epsilon(1e-9));

    // velocity clamps exactly to the bound
    MountainCar fast;
    fast.reset(0);
    MountainCarState s{-0.9, 0.0699};
    fast.set_state(s);
    fast.step(Action::of(std::vector<double>{1.0}));
    CHECK(fast.state().velocity <= MountainCar::kMaxSpeed);

    // out-of-bounds force rejected
    MountainCar strict;
    strict.reset(0);
    CHECK_THROWS_AS(strict.step(Action::of(std::vector<double>{1.5})), std::invalid_argument);
    CHECK_THROWS_AS(strict.step(Action::of(std::vector<double>{0.0, 0.0})),
                    std::invalid_argument);
}
