#include "sibre/envs/gridworld.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <sstream>
#include <tuple>

namespace sibre::envs {
namespace {

// heading: 0 E, 1 S, 2 W, 3 N
constexpr int kDRow[4] = {0, 1, 0, -1};
constexpr int kDCol[4] = {1, 0, -1, 0};
constexpr char kAgentChar[4] = {'>', 'v', '<', '^'};

constexpr double kStepPenalty = -0.1;
constexpr double kGoalReward = 4.0;

int channel_of(Cell c) {
    switch (c) {
        case Cell::Wall: return 0;
        case Cell::Floor: return 1;
        case Cell::Key: return 2;
        case Cell::DoorLocked:
        case Cell::DoorClosed: return 3;
        case Cell::DoorOpen: return 4;
        case Cell::Goal: return 5;
    }
    return 1;
}

}  // namespace

GridWorld::GridWorld(Task task, int size, int encode_size, int turn_limit)
    : spec_(ActionSpec::discrete(kNumActions)),
      task_(task),
      size_(size),
      encode_size_(encode_size > 0 ? encode_size : size),
      turn_limit_(turn_limit) {
    if (size_ < 5) throw std::invalid_argument("grid size must be >= 5");
    if (encode_size_ < size_) throw std::invalid_argument("encode_size must cover the grid");
    grid_.assign(size_ * size_, Cell::Floor);
}

void GridWorld::generate(Rng& rng) {
    std::fill(grid_.begin(), grid_.end(), Cell::Floor);
    for (int i = 0; i < size_; ++i) {
        set_cell(0, i, Cell::Wall);
        set_cell(size_ - 1, i, Cell::Wall);
        set_cell(i, 0, Cell::Wall);
        set_cell(i, size_ - 1, Cell::Wall);
    }

    // dividing wall with a door; left room holds the agent (and key for
    // DoorKey), goal sits in the right room
    int wall_col = 2 + rng.uniform_int(size_ - 4);  // in [2, size-3]
    int door_row = 1 + rng.uniform_int(size_ - 2);
    for (int r = 1; r < size_ - 1; ++r) set_cell(r, wall_col, Cell::Wall);
    set_cell(door_row, wall_col, task_ == Task::DoorKey ? Cell::DoorLocked : Cell::DoorClosed);

    set_cell(size_ - 2, size_ - 2, Cell::Goal);

    auto random_left_cell = [&](int& row, int& col) {
        do {
            row = 1 + rng.uniform_int(size_ - 2);
            col = 1 + rng.uniform_int(wall_col - 1);
        } while (cell(row, col) != Cell::Floor);
    };
    agent_row_ = agent_col_ = 1;
    random_left_cell(agent_row_, agent_col_);
    if (task_ == Task::DoorKey) {
        int kr, kc;
        do {
            random_left_cell(kr, kc);
        } while (kr == agent_row_ && kc == agent_col_);
        set_cell(kr, kc, Cell::Key);
    }
    heading_ = rng.uniform_int(4);
    carrying_key_ = false;
}

Observation GridWorld::reset(std::uint64_t seed) {
    Rng rng(seed);
    generate(rng);
    steps_ = 0;
    episode_over_ = false;
    return observe();
}

int GridWorld::observation_dim() const {
    return kCellChannels * encode_size_ * encode_size_ + 4 + 1;
}

Observation GridWorld::observe() const {
    Observation obs;
    obs.encoding.assign(observation_dim(), 0.0);
    for (int r = 0; r < size_; ++r)
        for (int c = 0; c < size_; ++c) {
            int base = kCellChannels * (r * encode_size_ + c);
            obs.encoding[base + channel_of(cell(r, c))] = 1.0;
        }
    obs.encoding[kCellChannels * (agent_row_ * encode_size_ + agent_col_) + 6] = 1.0;
    int tail = kCellChannels * encode_size_ * encode_size_;
    obs.encoding[tail + heading_] = 1.0;
    obs.encoding[tail + 4] = carrying_key_ ? 1.0 : 0.0;
    return obs;
}

StepOutcome GridWorld::step(const Action& action) {
    check_not_over();
    check_discrete_action(action);

    int fr = agent_row_ + kDRow[heading_];
    int fc = agent_col_ + kDCol[heading_];
    Cell front = cell(fr, fc);

    bool reached_goal = false;
    switch (action.discrete) {
        case kTurnLeft:
            heading_ = (heading_ + 3) % 4;
            break;
        case kTurnRight:
            heading_ = (heading_ + 1) % 4;
            break;
        case kForward:
            if (front == Cell::Floor || front == Cell::DoorOpen || front == Cell::Goal) {
                agent_row_ = fr;
                agent_col_ = fc;
                reached_goal = (front == Cell::Goal);
            }
            break;
        case kPickup:
            if (front == Cell::Key && !carrying_key_) {
                carrying_key_ = true;
                set_cell(fr, fc, Cell::Floor);
            }
            break;
        case kToggle:
            if (front == Cell::DoorClosed || (front == Cell::DoorLocked && carrying_key_))
                set_cell(fr, fc, Cell::DoorOpen);
            break;
    }
    ++steps_;

    StepOutcome out;
    if (reached_goal) {
        out.reward = kGoalReward;
        out.terminal = true;
    } else {
        out.reward = kStepPenalty;
        out.truncated = steps_ >= turn_limit_;
    }
    out.next_observation = observe();
    episode_over_ = out.terminal || out.truncated;
    return out;
}

std::string GridWorld::dump_layout() const {
    std::ostringstream os;
    for (int r = 0; r < size_; ++r) {
        for (int c = 0; c < size_; ++c) {
            if (r == agent_row_ && c == agent_col_)
                os << kAgentChar[heading_];
            else
                os << static_cast<char>(cell(r, c));
        }
        os << '\n';
    }
    os << "carrying " << (carrying_key_ ? 1 : 0) << '\n';
    return os.str();
}

void GridWorld::restore_layout(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::vector<std::string> rows;
    bool carrying = false;
    while (std::getline(is, line)) {
        if (line.rfind("carrying", 0) == 0) {
            carrying = line.back() == '1';
            break;
        }
        if (!line.empty()) rows.push_back(line);
    }
    if (static_cast<int>(rows.size()) != size_)
        throw std::invalid_argument("layout has wrong number of rows");
    for (int r = 0; r < size_; ++r) {
        if (static_cast<int>(rows[r].size()) != size_)
            throw std::invalid_argument("layout has wrong row length");
        for (int c = 0; c < size_; ++c) {
            char ch = rows[r][c];
            const char* pos = std::find(std::begin(kAgentChar), std::end(kAgentChar), ch);
            if (pos != std::end(kAgentChar)) {
                agent_row_ = r;
                agent_col_ = c;
                heading_ = static_cast<int>(pos - std::begin(kAgentChar));
                set_cell(r, c, Cell::Floor);
            } else {
                set_cell(r, c, static_cast<Cell>(ch));
            }
        }
    }
    carrying_key_ = carrying;
    steps_ = 0;
    episode_over_ = false;
}

std::optional<std::vector<int>> solve_gridworld_bfs(const GridWorld& world) {
    const int n = world.size();
    // door cell, if any
    int door_r = -1, door_c = -1;
    bool locked = false;
    int key_r = -1, key_c = -1;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            Cell cc = world.cell(r, c);
            if (cc == Cell::DoorLocked || cc == Cell::DoorClosed || cc == Cell::DoorOpen) {
                door_r = r;
                door_c = c;
                locked = (cc == Cell::DoorLocked);
            } else if (cc == Cell::Key) {
                key_r = r;
                key_c = c;
            }
        }

    // state: row, col, heading, carrying, key_present, door_open
    using State = std::tuple<int, int, int, bool, bool, bool>;
    State start{world.agent_row(), world.agent_col(), world.heading(), world.carrying_key(),
                key_r >= 0, world.cell(door_r < 0 ? 0 : door_r, door_c < 0 ? 0 : door_c) ==
                                Cell::DoorOpen};
    std::map<State, std::pair<State, int>> parent;
    std::queue<State> frontier;
    parent[start] = {start, -1};
    frontier.push(start);

    auto passable = [&](int r, int c, bool key_present, bool door_open) {
        if (r < 0 || r >= n || c < 0 || c >= n) return false;
        if (r == door_r && c == door_c) return door_open;
        if (r == key_r && c == key_c && key_present) return false;
        Cell cc = world.cell(r, c);
        return cc != Cell::Wall;
    };

    constexpr int dR[4] = {0, 1, 0, -1};
    constexpr int dC[4] = {1, 0, -1, 0};

    while (!frontier.empty()) {
        State s = frontier.front();
        frontier.pop();
        auto [r, c, h, carrying, key_present, door_open] = s;
        if (world.cell(r, c) == Cell::Goal) {
            std::vector<int> actions;
            State cur = s;
            while (parent[cur].second >= 0) {
                actions.push_back(parent[cur].second);
                cur = parent[cur].first;
            }
            std::reverse(actions.begin(), actions.end());
            return actions;
        }
        for (int a = 0; a < GridWorld::kNumActions; ++a) {
            State t = s;
            auto& [tr, tc, th, tcar, tkey, tdoor] = t;
            int fr = r + dR[h], fc = c + dC[h];
            switch (a) {
                case kTurnLeft: th = (h + 3) % 4; break;
                case kTurnRight: th = (h + 1) % 4; break;
                case kForward:
                    if (passable(fr, fc, key_present, door_open)) {
                        tr = fr;
                        tc = fc;
                    }
                    break;
                case kPickup:
                    if (key_present && fr == key_r && fc == key_c && !carrying) {
                        tcar = true;
                        tkey = false;
                    }
                    break;
                case kToggle:
                    if (fr == door_r && fc == door_c && !door_open && (!locked || carrying))
                        tdoor = true;
                    break;
            }
            if (!parent.count(t)) {
                parent[t] = {s, a};
                frontier.push(t);
            }
        }
    }
    return std::nullopt;
}

}  // namespace sibre::envs
