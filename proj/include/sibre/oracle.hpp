#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sibre/mdp.hpp"

namespace sibre::oracle {

struct OracleSolution {
    std::vector<double> optimal_values;  // V*
    std::vector<int> optimal_policy;     // greedy, lowest-index tie-break
    double rho_star = 0.0;               // V*(s0)
};

/// Value iteration on an explicit tabular model. Stops when one more
/// Bellman backup changes V by at most `tolerance` in sup norm.
OracleSolution value_iteration(const TabularModel& model, double gamma, double tolerance);

/// One Bellman backup of V; used to assert the fixed-point invariant.
std::vector<double> bellman_backup(const TabularModel& model, double gamma,
                                   const std::vector<double>& values);

/// Which of the three threshold regimes a run was checked against.
struct CaseVerdict {
    int case_label = 0;  // 1 below rho*, 2 above, 3 at
    bool holds = false;
    std::string detail;
};

struct DynamicsReport {
    CaseVerdict verdict;
    std::vector<double> mean_rho;  // E[rho_t] across trials, index 0 = rho0
    std::vector<double> ci_low, ci_high;  // 99% t-intervals
    std::string to_csv() const;
};

using ReturnSampler = std::function<double(Rng&)>;

/// Simulates the threshold recursion rho <- rho + beta (G - rho) with G
/// drawn from `sampler` (returns under the converged policy), across
/// independent trials, and checks the case the start point falls in:
///   case 1 (rho0 < rho*): mean trajectory increasing, staying below rho*
///   case 2 (rho0 > rho*): decreasing, staying above... decreasing toward rho*
///   case 3 (rho0 = rho*): stationary within the confidence interval
/// Increments are tested pairwise at 99% confidence: an increment
/// significantly opposing the case's direction fails the verdict, and the
/// point-estimate trajectory must follow the direction after smoothing.
DynamicsReport verify_threshold_dynamics(const ReturnSampler& sampler, double rho0,
                                         double rho_star, double beta, int num_updates,
                                         int num_trials, std::uint64_t seed);

struct EquivalenceReport {
    double learned_value = 0.0;   // Monte-Carlo mean return of the learned policy from s0
    double rho_star = 0.0;        // Monte-Carlo mean return of the oracle policy from s0
    double value_gap = 0.0;       // rho_star - learned_value
    double agreement = 0.0;       // action agreement on states reachable under pi*
    bool within_tolerance = false;
};

/// Monte-Carlo comparison of a learned tabular policy against the oracle
/// policy, on the simulator itself (turn limit included). `tolerance` is
/// relative to rho*.
EquivalenceReport policy_equivalence_check(Env& env, const std::vector<int>& learned_policy,
                                           const OracleSolution& oracle, int num_episodes,
                                           double tolerance, std::uint64_t seed);

/// Mean undiscounted return of a fixed tabular policy from the start state.
double evaluate_tabular_policy(Env& env, const std::vector<int>& policy, int num_episodes,
                               std::uint64_t seed, double gamma = 1.0);

/// States with positive visit probability under `policy` in `model`.
std::vector<bool> reachable_states(const TabularModel& model, const std::vector<int>& policy);

}  // namespace sibre::oracle
