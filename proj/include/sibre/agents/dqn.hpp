#pragma once

#include "sibre/agents/common.hpp"
#include "sibre/tinynet.hpp"

namespace sibre::agents {

struct Transition {
    std::vector<double> obs;
    int action = 0;
    double reward = 0.0;  // shaped reward, as trained on
    std::vector<double> next_obs;
    bool terminal = false;
};

/// Fixed-capacity ring with uniform sampling over current contents.
class ReplayBuffer {
public:
    explicit ReplayBuffer(int capacity) : capacity_(capacity) {}

    void push(Transition t) {
        if (static_cast<int>(ring_.size()) < capacity_) {
            ring_.push_back(std::move(t));
        } else {
            ring_[write_] = std::move(t);
        }
        write_ = (write_ + 1) % capacity_;
    }
    const Transition& sample(Rng& rng) const { return ring_[rng.uniform_int(size())]; }
    Transition& at(int i) { return ring_[i]; }
    int size() const { return static_cast<int>(ring_.size()); }
    int capacity() const { return capacity_; }
    /// Index of the most recently pushed transition.
    int last_index() const { return (write_ + capacity_ - 1) % capacity_; }

private:
    int capacity_;
    int write_ = 0;
    std::vector<Transition> ring_;
};

struct DqnResult {
    SeedCurve curve;
    tinynet::DenseNet net;
    std::optional<ThresholdState> shaper;
};

/// DQN with replay and a hard-copied target network. Episodic runs shape
/// the final transition's reward; continuing runs (config.continuing) cut
/// the step stream into K-step windows, use the discounted window return
/// for the threshold, and inject the shaped window reward G_w - rho into
/// the boundary transition. Reported curves always carry original rewards.
DqnResult train_dqn(Env& env, const AgentConfig& config,
                    const std::optional<ThresholdState>& shaper0, std::uint64_t seed);

}  // namespace sibre::agents
