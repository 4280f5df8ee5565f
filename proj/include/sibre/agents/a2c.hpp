#pragma once

#include "sibre/agents/common.hpp"
#include "sibre/tinynet.hpp"

namespace sibre::agents {

/// Networks and threshold carried from one training run into another
/// (larger) instance of the same task family.
struct A2cCheckpoint {
    tinynet::DenseNet policy;
    tinynet::DenseNet value;
    std::optional<double> rho;  // present when the source run was shaped
};

struct A2cResult {
    SeedCurve curve;
    tinynet::DenseNet policy;
    tinynet::DenseNet value;
    std::optional<ThresholdState> shaper;
    long frames = 0;

    A2cCheckpoint checkpoint() const;
};

/// n-step advantage actor critic with separate policy and value nets.
/// Discrete environments get a softmax policy head; continuous ones a
/// Gaussian head (actions clipped to bounds when stepping). All targets
/// are computed from shaped rewards; curves report original rewards.
A2cResult train_a2c(Env& env, const AgentConfig& config,
                    const std::optional<ThresholdState>& shaper0, std::uint64_t seed,
                    const A2cCheckpoint* warm_start = nullptr);

/// Validates that a checkpoint fits the target environment (same encoding
/// width and action head) and returns it ready to pass to train_a2c.
/// Throws std::invalid_argument on mismatch.
A2cCheckpoint transfer_checkpoint(const A2cCheckpoint& source, const Env& target_env,
                                  bool carry_threshold);

}  // namespace sibre::agents
