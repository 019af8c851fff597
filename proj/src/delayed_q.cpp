#include "blackwell/delayed_q.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "blackwell/blackwell.hpp"
#include "blackwell/regret.hpp"
#include "blackwell/solver.hpp"

namespace blackwell {

namespace {

void check_config(const LearnerConfig& config) {
    if (!(config.gamma >= 0.0) || !(config.gamma < 1.0))
        throw ValidationError("gamma must be in [0,1)");
    if (!(config.epsilon > 0.0)) throw ValidationError("epsilon must be positive");
    if (!(config.delta > 0.0) || !(config.delta < 1.0))
        throw ValidationError("delta must be in (0,1)");
    if (config.m && *config.m < 1) throw ValidationError("m must be >= 1");
}

bool self_loops_surely(const Mdp& mdp, int state, int action) {
    for (const Transition& t : mdp.arcs(state, action))
        if (t.target != state && t.probability > 0.0) return false;
    return true;
}

int greedy_action(const Mdp& mdp, const Eigen::MatrixXd& q, int state) {
    int best = mdp.defined_actions(state).front();
    for (int a : mdp.defined_actions(state))
        if (q(state, a) > q(state, best)) best = a;
    return best;
}

}  // namespace

int default_m(const Mdp& mdp, const LearnerConfig& config) {
    const double pairs = static_cast<double>(mdp.state_count()) * mdp.action_count();
    const double numerator = std::log(3.0 * pairs / config.delta);
    const double denominator =
        2.0 * config.epsilon * config.epsilon * (1.0 - config.gamma) * (1.0 - config.gamma);
    return std::max(1, static_cast<int>(std::ceil(numerator / denominator)));
}

LearnerTrace run_delayed_q(const Mdp& mdp, const LearnerConfig& config) {
    check_config(config);
    const int n = mdp.state_count();
    const int na = mdp.action_count();
    const int m = config.m ? *config.m : default_m(mdp, config);
    const double eps = config.epsilon;
    const double q_max = mdp.r_max() / (1.0 - config.gamma);

    Eigen::MatrixXd q = Eigen::MatrixXd::Constant(n, na, std::numeric_limits<double>::quiet_NaN());
    for (int s = 0; s < n; ++s)
        for (int a : mdp.defined_actions(s)) q(s, a) = q_max;

    Eigen::MatrixXd accumulator = Eigen::MatrixXd::Zero(n, na);
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> batch_count =
        Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, na);
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> batch_start =
        Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, na);
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> visits =
        Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, na);
    std::vector<std::vector<bool>> learn(n, std::vector<bool>(na, true));
    std::int64_t last_success = -1;  // timestamp of the last successful update

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    auto sample_from = [&](const Eigen::VectorXd& distribution) {
        const double u = uniform(rng);
        double mass = 0.0;
        for (int s = 0; s < n; ++s) {
            mass += distribution[s];
            if (u < mass) return s;
        }
        return n - 1;
    };

    LearnerTrace trace;
    int state = sample_from(mdp.initial());
    std::uint64_t step = 0;
    while (step < config.max_steps) {
        const int action = greedy_action(mdp, q, state);
        if (!learn[state][action] && self_loops_surely(mdp, state, action)) {
            trace.terminated_by = "converged_at_" + mdp.state_name(state);
            trace.terminal_state = state;
            break;
        }
        // Sample the transition.
        const double u = uniform(rng);
        double mass = 0.0;
        int next = mdp.arcs(state, action).back().target;
        double reward = mdp.arcs(state, action).back().reward;
        for (const Transition& t : mdp.arcs(state, action)) {
            mass += t.probability;
            if (u < mass) {
                next = t.target;
                reward = t.reward;
                break;
            }
        }
        ++step;
        visits(state, action) += 1;

        if (learn[state][action]) {
            if (batch_count(state, action) == 0)
                batch_start(state, action) = static_cast<std::int64_t>(step);
            double best_next = -std::numeric_limits<double>::infinity();
            for (int a : mdp.defined_actions(next)) best_next = std::max(best_next, q(next, a));
            accumulator(state, action) += reward + config.gamma * best_next;
            batch_count(state, action) += 1;
            if (batch_count(state, action) == m) {
                const double estimate = accumulator(state, action) / m;
                if (q(state, action) - estimate >= 2.0 * eps) {
                    const double updated = estimate + eps;
                    if (updated >= q(state, action))
                        throw NumericalError("delayed-q update failed to decrease Q");
                    q(state, action) = updated;
                    last_success = static_cast<std::int64_t>(step);
                    for (auto& row : learn) row.assign(na, true);
                } else if (last_success < batch_start(state, action)) {
                    // No successful update anywhere since this attempt began.
                    learn[state][action] = false;
                }
                accumulator(state, action) = 0.0;
                batch_count(state, action) = 0;
            }
        }
        state = next;
    }
    if (trace.terminated_by.empty()) trace.terminated_by = "step_budget";
    trace.steps_taken = step;
    trace.q_final = q;
    trace.visit_counts = visits;
    trace.m_used = m;
    trace.greedy_policy.actions.resize(n);
    for (int s = 0; s < n; ++s) trace.greedy_policy.actions[s] = greedy_action(mdp, q, s);

    int probe_state = 0;
    mdp.initial().maxCoeff(&probe_state);
    if (mdp.defined_actions(probe_state).size() >= 2) {
        const int chosen = trace.greedy_policy[probe_state];
        double best_other = -std::numeric_limits<double>::infinity();
        for (int a : mdp.defined_actions(probe_state))
            if (a != chosen) best_other = std::max(best_other, q(probe_state, a));
        trace.empirical_policy_gap = {probe_state, std::abs(q(probe_state, chosen) - best_other)};
    }
    return trace;
}

ExperimentSummary experiment(const Mdp& mdp, const std::vector<LearnerConfig>& configs,
                             int runs_per_config, std::uint64_t cap) {
    if (runs_per_config < 0) throw ValidationError("runs_per_config must be >= 0");
    ExperimentSummary summary;
    if (configs.empty() || runs_per_config == 0) return summary;

    const BlackwellReport blackwell = find_blackwell(mdp, 1e-10, cap);
    const std::vector<Policy> policies = enumerate_policies(mdp, cap);

    // Oracle references: beta's values on the classification grid and the
    // state-wise maximal gain vector.
    const double class_grid[] = {1.0 - 1e-4, 1.0 - 1e-5, 1.0 - 1e-6};
    std::vector<Eigen::VectorXd> beta_values;
    for (double g : class_grid) beta_values.push_back(evaluate(mdp, blackwell.beta, g).values);
    Eigen::VectorXd best_gain =
        Eigen::VectorXd::Constant(mdp.state_count(), -std::numeric_limits<double>::infinity());
    for (const Policy& pi : policies)
        best_gain = best_gain.cwiseMax(gain_bias(mdp, pi).gain);

    auto is_blackwell = [&](const Policy& pi) {
        for (std::size_t i = 0; i < beta_values.size(); ++i) {
            const Eigen::VectorXd v = evaluate(mdp, pi, class_grid[i]).values;
            for (int s = 0; s < mdp.state_count(); ++s) {
                const double scale = std::max(1.0, std::abs(beta_values[i][s]));
                if (std::abs(v[s] - beta_values[i][s]) > 1e-9 * scale) return false;
            }
        }
        return true;
    };
    auto is_gain_optimal = [&](const Policy& pi) {
        const Eigen::VectorXd gain = gain_bias(mdp, pi).gain;
        for (int s = 0; s < mdp.state_count(); ++s)
            if (gain[s] < best_gain[s] - 1e-9 * std::max(1.0, std::abs(best_gain[s])))
                return false;
        return true;
    };

    int gap_state = 0;
    mdp.initial().maxCoeff(&gap_state);

    for (const LearnerConfig& config : configs) {
        ExperimentRow row;
        row.config = config;
        row.runs = runs_per_config;
        row.gap_state = gap_state;
        row.exact_policy_gap = mdp.defined_actions(gap_state).size() >= 2
                                   ? policy_gap(mdp, blackwell.beta, config.gamma, gap_state, cap)
                                         .policy_gap
                                   : 0.0;
        double sum = 0.0, sum_sq = 0.0;
        for (int run = 0; run < runs_per_config; ++run) {
            LearnerConfig per_run = config;
            per_run.seed = config.seed + static_cast<std::uint64_t>(run);
            const LearnerTrace trace = run_delayed_q(mdp, per_run);
            RunRecord record;
            record.config = per_run;
            record.steps = trace.steps_taken;
            record.terminated_by = trace.terminated_by;
            record.greedy_policy = trace.greedy_policy;
            record.blackwell_optimal = is_blackwell(trace.greedy_policy);
            record.gain_optimal = is_gain_optimal(trace.greedy_policy);
            record.empirical_policy_gap = trace.empirical_policy_gap;
            sum += static_cast<double>(trace.steps_taken);
            sum_sq += static_cast<double>(trace.steps_taken) *
                      static_cast<double>(trace.steps_taken);
            row.fraction_blackwell += record.blackwell_optimal ? 1.0 : 0.0;
            row.fraction_gain_optimal += record.gain_optimal ? 1.0 : 0.0;
            summary.runs.push_back(std::move(record));
        }
        row.steps_mean = sum / runs_per_config;
        row.steps_stddev =
            runs_per_config > 1
                ? std::sqrt(std::max(0.0, (sum_sq - sum * sum / runs_per_config) /
                                              (runs_per_config - 1)))
                : 0.0;
        row.fraction_blackwell /= runs_per_config;
        row.fraction_gain_optimal /= runs_per_config;
        summary.rows.push_back(std::move(row));
    }
    return summary;
}

}  // namespace blackwell
