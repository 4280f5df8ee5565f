#pragma once

#include <string>
#include <vector>

#include "sibre/mdp.hpp"

namespace sibre::envs {

enum class Cell : char {
    Wall = '#',
    Floor = '.',
    Key = 'k',
    DoorLocked = 'D',   // needs the key
    DoorClosed = 'd',   // unlocked, toggle opens
    DoorOpen = 'o',
    Goal = 'G',
};

/// Actions shared by DoorKey and MultiRoom.
enum GridAction : int {
    kTurnLeft = 0,
    kTurnRight = 1,
    kForward = 2,
    kPickup = 3,
    kToggle = 4,
};

/// Seeded DoorKey / MultiRoom gridworld. Step reward is -0.1 everywhere
/// except entering the goal, which pays +4.0 and terminates. Episodes
/// truncate at 1000 steps.
class GridWorld : public Env {
public:
    enum class Task { DoorKey, MultiRoom };

    /// `size` is the full grid side including the outer wall (5, 6 or 8 for
    /// DoorKey). `encode_size >= size` pads the observation to a larger grid
    /// so checkpoints transfer across sizes; 0 means encode at native size.
    GridWorld(Task task, int size, int encode_size = 0, int turn_limit = 1000);

    Observation reset(std::uint64_t seed) override;
    StepOutcome step(const Action& action) override;

    const ActionSpec& action_spec() const override { return spec_; }
    int observation_dim() const override;
    int turn_limit() const override { return turn_limit_; }

    int size() const { return size_; }
    int encode_size() const { return encode_size_; }

    // state inspection, used by the tests' path oracle
    Cell cell(int row, int col) const { return grid_[row * size_ + col]; }
    int agent_row() const { return agent_row_; }
    int agent_col() const { return agent_col_; }
    int heading() const { return heading_; }  // 0 E, 1 S, 2 W, 3 N
    bool carrying_key() const { return carrying_key_; }

    /// Plain-text layout: one row per line, agent drawn as > v < ^, then a
    /// "carrying" line. Inverse of restore_layout.
    std::string dump_layout() const;
    void restore_layout(const std::string& text);

    static constexpr int kCellChannels = 7;  // 6 cell types + agent marker
    static constexpr int kNumActions = 5;

private:
    void generate(Rng& rng);
    Observation observe() const;
    void set_cell(int row, int col, Cell c) { grid_[row * size_ + col] = c; }

    ActionSpec spec_;
    Task task_;
    int size_;
    int encode_size_;
    int turn_limit_;

    std::vector<Cell> grid_;
    int agent_row_ = 1, agent_col_ = 1;
    int heading_ = 0;
    bool carrying_key_ = false;
    int steps_ = 0;
};

/// Shortest action sequence solving the current layout, found by breadth
/// first search over (position, heading, carrying, door state). Empty
/// optional when the layout is unsolvable.
std::optional<std::vector<int>> solve_gridworld_bfs(const GridWorld& world);

}  // namespace sibre::envs
