#include "sibre/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace sibre::oracle {
namespace {

/// Inverse standard normal CDF (Beasley-Springer-Moro).
double normal_quantile(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425, p_high = 1.0 - p_low;
    double q, r;
    if (p < p_low) {
        q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= p_high) {
        q = p - 0.5;
        r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

struct MeanSem {
    double mean = 0.0, sem = 0.0;
};

MeanSem mean_sem(const std::vector<double>& xs) {
    double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    double var = xs.size() > 1 ? ss / (xs.size() - 1) : 0.0;
    return {mean, std::sqrt(var / xs.size())};
}

}  // namespace

std::vector<double> bellman_backup(const TabularModel& model, double gamma,
                                   const std::vector<double>& values) {
    std::vector<double> out(model.num_states, 0.0);
    for (int s = 0; s < model.num_states; ++s) {
        if (model.terminal_state[s]) continue;  // V(terminal) = 0
        double best = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < model.num_actions; ++a) {
            double q = 0.0;
            for (const TabularTransition& tr : model.transitions[s][a])
                q += tr.probability * (tr.reward + (tr.terminal ? 0.0 : gamma * values[tr.next]));
            best = std::max(best, q);
        }
        out[s] = best;
    }
    return out;
}

OracleSolution value_iteration(const TabularModel& model, double gamma, double tolerance) {
    if (model.num_states <= 0) throw std::invalid_argument("empty tabular model");
    std::vector<double> values(model.num_states, 0.0);
    // iterate until a backup moves V by <= gamma * tolerance, so the next
    // backup after the returned V changes it by at most tolerance
    double stop = gamma < 1.0 ? gamma * tolerance : tolerance;
    for (long iter = 0;; ++iter) {
        std::vector<double> next = bellman_backup(model, gamma, values);
        double delta = 0.0;
        for (int s = 0; s < model.num_states; ++s)
            delta = std::max(delta, std::abs(next[s] - values[s]));
        values = std::move(next);
        if (delta <= stop) break;
        if (iter > 10'000'000) throw std::runtime_error("value iteration failed to converge");
    }

    OracleSolution sol;
    sol.optimal_values = values;
    sol.optimal_policy.assign(model.num_states, 0);
    for (int s = 0; s < model.num_states; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        int best_a = 0;
        for (int a = 0; a < model.num_actions; ++a) {
            double q = 0.0;
            for (const TabularTransition& tr : model.transitions[s][a])
                q += tr.probability * (tr.reward + (tr.terminal ? 0.0 : gamma * values[tr.next]));
            if (q > best + 1e-12) {  // lowest-index tie-break
                best = q;
                best_a = a;
            }
        }
        sol.optimal_policy[s] = best_a;
    }
    sol.rho_star = values[model.start_state];
    return sol;
}

std::string DynamicsReport::to_csv() const {
    std::ostringstream os;
    os.precision(12);
    os << "update,mean_rho,ci_low,ci_high\n";
    for (std::size_t t = 0; t < mean_rho.size(); ++t)
        os << t << ',' << mean_rho[t] << ',' << ci_low[t] << ',' << ci_high[t] << '\n';
    return os.str();
}

DynamicsReport verify_threshold_dynamics(const ReturnSampler& sampler, double rho0,
                                         double rho_star, double beta, int num_updates,
                                         int num_trials, std::uint64_t seed) {
    if (num_updates < 1 || num_trials < 1)
        throw std::invalid_argument("need at least one update and one trial");

    std::vector<std::vector<double>> rho(num_updates + 1,
                                         std::vector<double>(num_trials, rho0));
    Rng base(seed);
    for (int trial = 0; trial < num_trials; ++trial) {
        Rng rng = base.split(static_cast<std::uint64_t>(trial));
        double r = rho0;
        for (int t = 0; t < num_updates; ++t) {
            r += beta * (sampler(rng) - r);
            rho[t + 1][trial] = r;
        }
    }

    DynamicsReport report;
    const double z99 = normal_quantile(0.995);
    for (int t = 0; t <= num_updates; ++t) {
        MeanSem ms = mean_sem(rho[t]);
        report.mean_rho.push_back(ms.mean);
        report.ci_low.push_back(ms.mean - z99 * ms.sem);
        report.ci_high.push_back(ms.mean + z99 * ms.sem);
    }

    // paired per-update increments
    std::vector<MeanSem> inc(num_updates);
    for (int t = 0; t < num_updates; ++t) {
        std::vector<double> d(num_trials);
        for (int i = 0; i < num_trials; ++i) d[i] = rho[t + 1][i] - rho[t][i];
        inc[t] = mean_sem(d);
    }

    // family-wise 99% via Bonferroni across the trajectory
    const double z_family = normal_quantile(1.0 - 0.01 / (2.0 * num_updates));
    const double z_one_sided = normal_quantile(0.99);

    int case_label;
    if (rho0 < rho_star)
        case_label = 1;
    else if (rho0 > rho_star)
        case_label = 2;
    else
        case_label = 3;

    double direction = case_label == 1 ? 1.0 : case_label == 2 ? -1.0 : 0.0;
    bool degenerate = case_label == 3;
    std::ostringstream detail;
    bool holds = true;

    if (case_label == 3) {
        // stationarity: every mean rho CI (family-wise) contains rho*
        for (int t = 1; t <= num_updates; ++t) {
            MeanSem ms = mean_sem(rho[t]);
            if (std::abs(ms.mean - rho_star) > z_family * std::max(ms.sem, 1e-300) &&
                ms.sem > 0.0) {
                holds = false;
                detail << "rho drifted from rho* at update " << t << "; ";
                break;
            }
            if (ms.sem == 0.0 && ms.mean != rho_star) {
                holds = false;
                detail << "deterministic drift at update " << t << "; ";
                break;
            }
        }
        if (holds) detail << (degenerate ? "stationary at rho*" : "");
    } else {
        int significant_in_direction = 0;
        for (int t = 0; t < num_updates && holds; ++t) {
            double m = direction * inc[t].mean;
            if (inc[t].sem == 0.0) {
                if (m <= 0.0) {
                    holds = false;
                    detail << "increment " << t << " not in direction; ";
                }
                ++significant_in_direction;
                continue;
            }
            // an increment significantly counter to the case direction fails
            if (m + z_family * inc[t].sem < 0.0) {
                holds = false;
                detail << "increment " << t << " significantly counter-direction; ";
            }
            if (m - z_one_sided * inc[t].sem > 0.0) ++significant_in_direction;
        }
        if (holds && significant_in_direction * 2 < num_updates) {
            holds = false;
            detail << "too few significant increments (" << significant_in_direction << '/'
                   << num_updates << "); ";
        }
        // boundedness: trajectory stays on rho0's side of rho*
        for (int t = 0; t <= num_updates && holds; ++t) {
            MeanSem ms = mean_sem(rho[t]);
            double bound = direction * (rho_star - ms.mean);  // must stay positive
            if (bound + z_family * ms.sem < 0.0) {
                holds = false;
                detail << "trajectory crossed rho* at update " << t << "; ";
            }
        }
        if (holds)
            detail << "monotone toward rho*, " << significant_in_direction << '/' << num_updates
                   << " increments significant";
    }

    report.verdict = {case_label, holds, detail.str()};
    return report;
}

double evaluate_tabular_policy(Env& env, const std::vector<int>& policy, int num_episodes,
                               std::uint64_t seed, double gamma) {
    Policy act = [&policy](const Observation& obs, Rng&) {
        if (!obs.discrete_index) throw std::invalid_argument("tabular policy needs a tabular env");
        return Action::of(policy[*obs.discrete_index]);
    };
    Rng base(seed);
    double total = 0.0;
    for (int e = 0; e < num_episodes; ++e) {
        EpisodeTrace trace = run_episode(env, act, env.turn_limit(), base.raw());
        ReturnValue rv = compute_return(trace, gamma);
        total += gamma < 1.0 ? rv.discounted : rv.undiscounted;
    }
    return total / num_episodes;
}

std::vector<bool> reachable_states(const TabularModel& model, const std::vector<int>& policy) {
    std::vector<bool> seen(model.num_states, false);
    std::queue<int> frontier;
    seen[model.start_state] = true;
    frontier.push(model.start_state);
    while (!frontier.empty()) {
        int s = frontier.front();
        frontier.pop();
        if (model.terminal_state[s]) continue;
        for (const TabularTransition& tr : model.transitions[s][policy[s]]) {
            if (tr.probability > 0.0 && !seen[tr.next]) {
                seen[tr.next] = true;
                frontier.push(tr.next);
            }
        }
    }
    return seen;
}

EquivalenceReport policy_equivalence_check(Env& env, const std::vector<int>& learned_policy,
                                           const OracleSolution& oracle, int num_episodes,
                                           double tolerance, std::uint64_t seed) {
    EquivalenceReport report;
    report.learned_value = evaluate_tabular_policy(env, learned_policy, num_episodes, seed);
    report.rho_star =
        evaluate_tabular_policy(env, oracle.optimal_policy, num_episodes, seed + 1);
    report.value_gap = report.rho_star - report.learned_value;

    auto model = env.tabular_model();
    if (!model) throw std::invalid_argument("policy_equivalence_check needs a tabular env");
    std::vector<bool> reachable = reachable_states(*model, oracle.optimal_policy);
    int agree = 0, total = 0;
    for (int s = 0; s < model->num_states; ++s) {
        if (!reachable[s] || model->terminal_state[s]) continue;
        ++total;
        if (learned_policy[s] == oracle.optimal_policy[s]) ++agree;
    }
    report.agreement = total > 0 ? static_cast<double>(agree) / total : 1.0;
    report.within_tolerance =
        report.value_gap <= tolerance * std::max(std::abs(report.rho_star), 1e-12);
    return report;
}

}  // namespace sibre::oracle
