#include "blackwell/regret.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace blackwell {

namespace {

void check_gamma_range(double gamma) {
    if (!(gamma >= 0.0) || !(gamma < 1.0))
        throw ValidationError("gamma must be in [0,1), got " + std::to_string(gamma));
}

double initial_expectation(const Mdp& mdp, const Eigen::VectorXd& values) {
    return mdp.initial().dot(values);
}

}  // namespace

RegretReport blackwell_regret(const Mdp& mdp, const Policy& policy, double gamma_learn,
                              const BlackwellReport& report) {
    check_gamma_range(gamma_learn);
    check_policy(mdp, policy);
    RegretReport out;
    out.gamma_learn = gamma_learn;
    out.gamma_star = report.gamma_star;
    out.gamma_prime = std::max(report.gamma_star, gamma_learn);
    const Eigen::VectorXd v_beta = evaluate(mdp, report.beta, out.gamma_prime).values;
    const Eigen::VectorXd v_policy = evaluate(mdp, policy, out.gamma_prime).values;
    out.blackwell_regret = initial_expectation(mdp, v_beta - v_policy);
    out.standard_regret_at_gamma_prime = standard_regret(mdp, policy, out.gamma_prime);
    return out;
}

RegretReport blackwell_regret(const Mdp& mdp, const Policy& policy, double gamma_learn) {
    return blackwell_regret(mdp, policy, gamma_learn, find_blackwell(mdp));
}

double standard_regret(const Mdp& mdp, const Policy& policy, double gamma) {
    check_gamma_range(gamma);
    check_policy(mdp, policy);
    const Solution opt = optimal_policy(mdp, gamma);
    const Eigen::VectorXd v_policy = evaluate(mdp, policy, gamma).values;
    return initial_expectation(mdp, opt.values.values - v_policy);
}

Lemma1Check lemma1_check(const Mdp& mdp, const Policy& policy, double gamma_learn,
                         const BlackwellReport& report) {
    if (!(gamma_learn < report.gamma_star))
        throw ValidationError("lemma hypothesis violated: gamma_learn " +
                              std::to_string(gamma_learn) + " is not below gamma_star " +
                              std::to_string(report.gamma_star));
    Lemma1Check out;
    out.blackwell_regret = blackwell_regret(mdp, policy, gamma_learn, report).blackwell_regret;
    out.regret_at_gamma_star = standard_regret(mdp, policy, report.gamma_star);
    out.agree = std::abs(out.blackwell_regret - out.regret_at_gamma_star) <= 1e-9;
    return out;
}

Lemma1Check lemma1_check(const Mdp& mdp, const Policy& policy, double gamma_learn) {
    return lemma1_check(mdp, policy, gamma_learn, find_blackwell(mdp));
}

double action_gap(const Mdp& mdp, double gamma, int state) {
    check_gamma_range(gamma);
    if (state < 0 || state >= mdp.state_count())
        throw ValidationError("state index out of range");
    if (mdp.defined_actions(state).size() < 2)
        throw ValidationError("action gap undefined: state " + mdp.state_name(state) +
                              " has a single action");
    const Solution opt = optimal_policy(mdp, gamma);
    const Eigen::MatrixXd q = q_values_from(mdp, opt.values);
    double second_best = -std::numeric_limits<double>::infinity();
    for (int a : mdp.defined_actions(state)) {
        if (a == opt.policy[state]) continue;
        second_best = std::max(second_best, q(state, a));
    }
    return opt.values.values[state] - second_best;
}

double max_action_gap(const Mdp& mdp, const Policy& policy, double gamma) {
    check_gamma_range(gamma);
    const Eigen::MatrixXd q = q_values(mdp, policy, gamma);
    double mag = 0.0;
    for (int s = 0; s < mdp.state_count(); ++s) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (int a : mdp.defined_actions(s)) {
            lo = std::min(lo, q(s, a));
            hi = std::max(hi, q(s, a));
        }
        mag = std::max(mag, hi - lo);
    }
    return mag;
}

GapReport policy_gap(const Mdp& mdp, const Policy& policy, double gamma, int state,
                     std::uint64_t cap) {
    check_gamma_range(gamma);
    check_policy(mdp, policy);
    if (state < 0 || state >= mdp.state_count())
        throw ValidationError("state index out of range");
    if (mdp.defined_actions(state).size() < 2)
        throw ValidationError("no alternative policy exists at state " + mdp.state_name(state));
    const double reference = evaluate(mdp, policy, gamma).values[state];
    GapReport out;
    out.state = state;
    out.gamma = gamma;
    out.policy_gap = std::numeric_limits<double>::infinity();
    for (const Policy& other : enumerate_policies(mdp, cap)) {
        if (other[state] == policy[state]) continue;
        const double gap = std::abs(evaluate(mdp, other, gamma).values[state] - reference);
        if (gap < out.policy_gap) {
            out.policy_gap = gap;
            out.witness = other;
        }
    }
    return out;
}

PivotScanReport pivot_scan(const Mdp& mdp, std::vector<double> gammas, double tolerance,
                           std::uint64_t cap) {
    const BlackwellReport blackwell = find_blackwell(mdp, tolerance, cap);
    PivotScanReport out;
    out.beta = blackwell.beta;
    out.gamma_star = blackwell.gamma_star;
    out.warnings = blackwell.warnings;
    if (blackwell.gamma_star <= 0.0) {
        out.vacuous = true;
        out.warnings.push_back("gamma_star is 0: every discount is Blackwell realizable, "
                               "the myopic scan range is empty");
        return out;
    }
    if (gammas.empty()) {
        for (int k = 1; k <= 8; ++k) {
            const double g = blackwell.gamma_star - std::pow(10.0, -k);
            if (g >= 0.0) gammas.push_back(g);
        }
    }
    for (double g : gammas)
        if (!(g >= 0.0) || !(g < blackwell.gamma_star))
            throw ValidationError("scan gamma " + std::to_string(g) +
                                  " outside [0, gamma_star)");
    out.gammas = gammas;

    const std::vector<Policy> policies = enumerate_policies(mdp, cap);
    const int n = mdp.state_count();
    const auto num_gammas = static_cast<Eigen::Index>(gammas.size());
    out.gaps = Eigen::MatrixXd::Constant(num_gammas, n,
                                         std::numeric_limits<double>::quiet_NaN());
    const Eigen::VectorXd v_beta_star =
        evaluate(mdp, blackwell.beta, blackwell.gamma_star).values;

    // Per gamma: policy gaps, plus every competitor's value at every state
    // (kept for the witness search below).
    std::vector<Eigen::VectorXd> beta_values(gammas.size());
    std::vector<std::vector<Eigen::VectorXd>> competitor_values(gammas.size());
    for (std::size_t j = 0; j < gammas.size(); ++j) {
        const double gamma = gammas[j];
        beta_values[j] = evaluate(mdp, blackwell.beta, gamma).values;
        competitor_values[j].reserve(policies.size());
        for (const Policy& pi : policies) {
            competitor_values[j].push_back(evaluate(mdp, pi, gamma).values);
            const Eigen::VectorXd& v = competitor_values[j].back();
            for (int s = 0; s < n; ++s) {
                if (pi[s] == blackwell.beta[s]) continue;
                const double gap = std::abs(v[s] - beta_values[j][s]);
                if (std::isnan(out.gaps(j, s)) || gap < out.gaps(j, s)) out.gaps(j, s) = gap;
            }
        }
    }

    // Pivot: state minimizing the gap at the gamma closest to gamma_star.
    const std::size_t closest = gammas.size() - 1;
    double min_gap = std::numeric_limits<double>::infinity();
    for (int s = 0; s < n; ++s) {
        const double gap = out.gaps(closest, s);
        if (!std::isnan(gap) && gap < min_gap) min_gap = gap;
    }
    for (int s = 0; s < n; ++s) {
        const double gap = out.gaps(closest, s);
        if (!std::isnan(gap) && gap <= min_gap + 1e-12 * std::max(1.0, min_gap))
            out.pivot_states.push_back(s);
    }
    if (out.pivot_states.empty()) {
        out.warnings.push_back("no state has two defined actions; pivot scan is vacuous");
        out.vacuous = true;
        return out;
    }

    // Theorem witness per gamma: a competitor differing from beta at the
    // pivot that satisfies the full inequality chain, preferring the one with
    // the highest value there; the best beater is reported when none does.
    const int pivot = out.pivot_states.front();
    const double slack = 1e-9 * std::max(1.0, std::abs(v_beta_star[pivot]));
    std::vector<double> star_values(policies.size());
    for (std::size_t p = 0; p < policies.size(); ++p)
        star_values[p] = policies[p][pivot] == blackwell.beta[pivot]
                             ? 0.0
                             : evaluate(mdp, policies[p], blackwell.gamma_star).values[pivot];
    for (std::size_t j = 0; j < gammas.size(); ++j) {
        PivotChainCheck check;
        check.gamma = gammas[j];
        check.v_beta_at_gamma = beta_values[j][pivot];
        check.v_beta_at_gamma_star = v_beta_star[pivot];
        double best_value = -std::numeric_limits<double>::infinity();
        bool best_full_chain = false;
        for (std::size_t p = 0; p < policies.size(); ++p) {
            if (policies[p][pivot] == blackwell.beta[pivot]) continue;
            const double at_gamma = competitor_values[j][p][pivot];
            const double at_star = star_values[p];
            const bool h1 = at_gamma > check.v_beta_at_gamma;
            const bool h2 = at_star > at_gamma;
            const bool h3 = check.v_beta_at_gamma_star >= at_star - slack;
            const bool full = h1 && h2 && h3;
            const bool better =
                (full && !best_full_chain) || (full == best_full_chain && at_gamma > best_value);
            if (better) {
                best_full_chain = full;
                best_value = at_gamma;
                check.witness = policies[p];
                check.v_witness_at_gamma = at_gamma;
                check.v_witness_at_gamma_star = at_star;
                check.holds_1 = h1;
                check.holds_2 = h2;
                check.holds_3 = h3;
            }
        }
        out.chain_checks.push_back(std::move(check));
    }
    return out;
}

}  // namespace blackwell
