#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace sibre {

/// Deterministic random source. Wraps mt19937_64 but maps raw bits to
/// doubles with fixed arithmetic, so sequences are identical across
/// standard libraries (std::*_distribution is implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix(seed)), seed_base_(mix(seed)) {}

    /// Derived generator for an independent stream (env vs policy vs trials).
    Rng split(std::uint64_t stream) const {
        return Rng(mix(seed_base_ ^ (0x9e3779b97f4a7c15ULL * (stream + 1))), 0);
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be positive.
    int uniform_int(int n) {
        // modulo bias is < 2^-40 for any n that fits an int
        return static_cast<int>(engine_() % static_cast<std::uint64_t>(n));
    }

    /// Standard normal via Box-Muller (one value per call, cached pair).
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    /// Index drawn from a discrete distribution given by weights (sum > 0).
    int categorical(const std::vector<double>& probs) {
        double u = uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(probs.size()) - 1;
    }

    std::uint64_t raw() { return engine_(); }

private:
    Rng(std::uint64_t mixed_seed, int) : engine_(mixed_seed), seed_base_(mixed_seed) {}

    static std::uint64_t mix(std::uint64_t x) {
        // splitmix64 finalizer
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
    std::uint64_t seed_base_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace sibre
