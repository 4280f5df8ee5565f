#include "sibre/envs/frozen_lake.hpp"

namespace sibre::envs {
namespace {

// S F F F
// F H F H
// F F F H
// H F F G
constexpr const char* kMap = "SFFFFHFHFFFHHFFG";

// dir: 0 left, 1 down, 2 right, 3 up
constexpr int kDRow[4] = {0, 1, 0, -1};
constexpr int kDCol[4] = {-1, 0, 1, 0};

}  // namespace

FrozenLake::FrozenLake(bool slippery, int turn_limit)
    : spec_(ActionSpec::discrete(kActions)), slippery_(slippery), turn_limit_(turn_limit) {}

bool FrozenLake::is_hole(int s) { return kMap[s] == 'H'; }
bool FrozenLake::is_goal(int s) { return kMap[s] == 'G'; }

int FrozenLake::move(int s, int dir) {
    int row = s / kSize + kDRow[dir];
    int col = s % kSize + kDCol[dir];
    if (row < 0 || row >= kSize || col < 0 || col >= kSize) return s;  // edge blocks
    return row * kSize + col;
}

Observation FrozenLake::observe(int s) const {
    Observation obs;
    obs.encoding.assign(kStates, 0.0);
    obs.encoding[s] = 1.0;
    obs.discrete_index = s;
    return obs;
}

Observation FrozenLake::reset(std::uint64_t seed) {
    rng_ = Rng(seed);
    state_ = 0;
    steps_ = 0;
    episode_over_ = false;
    return observe(state_);
}

StepOutcome FrozenLake::step(const Action& action) {
    check_not_over();
    check_discrete_action(action);

    int dir = action.discrete;
    if (slippery_) {
        // intended or either perpendicular, each with probability 1/3
        int roll = rng_.uniform_int(3);
        if (roll == 1)
            dir = (dir + 1) % 4;
        else if (roll == 2)
            dir = (dir + 3) % 4;
    }
    state_ = move(state_, dir);
    ++steps_;

    StepOutcome out;
    out.next_observation = observe(state_);
    if (is_goal(state_)) {
        out.reward = 1.0;
        out.terminal = true;
    } else if (is_hole(state_)) {
        out.reward = 0.0;
        out.terminal = true;
    } else if (steps_ >= turn_limit_) {
        out.truncated = true;
    }
    episode_over_ = out.terminal || out.truncated;
    return out;
}

std::optional<TabularModel> FrozenLake::tabular_model() const {
    TabularModel m;
    m.num_states = kStates;
    m.num_actions = kActions;
    m.start_state = 0;
    m.terminal_state.assign(kStates, false);
    m.transitions.assign(kStates, std::vector<std::vector<TabularTransition>>(kActions));

    for (int s = 0; s < kStates; ++s) {
        bool term = is_hole(s) || is_goal(s);
        m.terminal_state[s] = term;
        for (int a = 0; a < kActions; ++a) {
            auto& row = m.transitions[s][a];
            if (term) {
                row.push_back({s, 1.0, 0.0, true});
                continue;
            }
            std::vector<int> dirs = slippery_ ? std::vector<int>{a, (a + 1) % 4, (a + 3) % 4}
                                              : std::vector<int>{a};
            double p = 1.0 / static_cast<double>(dirs.size());
            for (int d : dirs) {
                int next = move(s, d);
                double reward = is_goal(next) ? 1.0 : 0.0;
                row.push_back({next, p, reward, is_hole(next) || is_goal(next)});
            }
        }
    }
    return m;
}

}  // namespace sibre::envs
