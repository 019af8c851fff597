#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "blackwell/mdp.hpp"

namespace blackwell {

/// Delayed Q-learning run parameters. When m is unset it defaults to
/// ceil(ln(3 |S| |A| / delta) / (2 eps^2 (1-gamma)^2)); the constant follows
/// the published form of the algorithm and is a heuristic default only.
struct LearnerConfig {
    double gamma = 0.9;
    double epsilon = 0.05;  // the eps_1 update tolerance
    double delta = 0.1;
    std::optional<int> m;   // samples per attempted update
    std::uint64_t seed = 0;
    std::uint64_t max_steps = 10'000'000;
};

int default_m(const Mdp& mdp, const LearnerConfig& config);

struct LearnerTrace {
    std::uint64_t steps_taken = 0;
    // "converged_at_<state>" when the greedy action at a probability-1
    // self-loop state has its learn flag down, else "step_budget".
    std::string terminated_by;
    int terminal_state = -1;  // -1 when the budget ran out
    Policy greedy_policy;
    Eigen::MatrixXd q_final;                    // NaN where (s,a) undefined
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> visit_counts;
    int m_used = 0;
    // Q-based gap estimate |Q(s, greedy) - best other Q| at the state with
    // the largest initial mass; unset when that state has a single action.
    std::optional<std::pair<int, double>> empirical_policy_gap;
};

/**
 * Delayed Q-learning with optimistic initialization Q = r_max/(1-gamma),
 * batched updates of size m with bonus epsilon, learn flags, and greedy
 * action selection (ties to the lowest action index). Terminates when the
 * greedy action at the current state self-loops with probability 1 and its
 * learn flag is false, or when the step budget runs out (returned in the
 * trace, not thrown). Bit-for-bit deterministic for a fixed (mdp, config).
 */
LearnerTrace run_delayed_q(const Mdp& mdp, const LearnerConfig& config);

struct RunRecord {
    LearnerConfig config;        // seed is the per-run derived seed
    std::uint64_t steps = 0;
    std::string terminated_by;
    Policy greedy_policy;
    bool blackwell_optimal = false;  // oracle-classified, never Q-inferred
    bool gain_optimal = false;
    std::optional<std::pair<int, double>> empirical_policy_gap;
};

struct ExperimentRow {
    LearnerConfig config;
    int runs = 0;
    double steps_mean = 0.0;
    double steps_stddev = 0.0;  // sample standard deviation
    double fraction_blackwell = 0.0;
    double fraction_gain_optimal = 0.0;
    int gap_state = -1;          // state with the largest initial mass
    double exact_policy_gap = 0.0;  // PG of beta at (gap_state, config.gamma)
};

struct ExperimentSummary {
    std::vector<ExperimentRow> rows;
    std::vector<RunRecord> runs;
};

/// Runs each config `runs_per_config` times (per-run seed = config.seed + run
/// index) and classifies every returned policy against the exact Blackwell
/// and gain oracles.
ExperimentSummary experiment(const Mdp& mdp, const std::vector<LearnerConfig>& configs,
                             int runs_per_config, std::uint64_t cap = kDefaultPolicyCap);

}  // namespace blackwell
