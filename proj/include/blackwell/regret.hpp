#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blackwell/blackwell.hpp"
#include "blackwell/mdp.hpp"

namespace blackwell {

/// Blackwell regret of a policy learned at gamma_learn: both value functions
/// are evaluated at gamma_prime = max(gamma_star, gamma_learn), expectation
/// over the initial state distribution.
struct RegretReport {
    double gamma_learn = 0.0;
    double gamma_star = 0.0;
    double gamma_prime = 0.0;
    double blackwell_regret = 0.0;
    double standard_regret_at_gamma_prime = 0.0;
};

RegretReport blackwell_regret(const Mdp& mdp, const Policy& policy, double gamma_learn,
                              const BlackwellReport& report);
RegretReport blackwell_regret(const Mdp& mdp, const Policy& policy, double gamma_learn);

/// E{V^{pi*_gamma} - V^pi} at gamma over the initial distribution.
double standard_regret(const Mdp& mdp, const Policy& policy, double gamma);

struct Lemma1Check {
    double blackwell_regret = 0.0;
    double regret_at_gamma_star = 0.0;
    bool agree = false;  // |difference| <= 1e-9
};

/// Requires gamma_learn < gamma_star (the hypothesis); throws otherwise.
Lemma1Check lemma1_check(const Mdp& mdp, const Policy& policy, double gamma_learn,
                         const BlackwellReport& report);
Lemma1Check lemma1_check(const Mdp& mdp, const Policy& policy, double gamma_learn);

/// V^{pi*}(s) minus the best Q-value among the non-chosen actions at s.
/// Requires at least two defined actions at the state.
double action_gap(const Mdp& mdp, double gamma, int state);

/// Largest per-state spread of Q^pi over defined actions.
double max_action_gap(const Mdp& mdp, const Policy& policy, double gamma);

/// Exact policy gap at one state: minimum |V^pi(s) - V^pi'(s)| over every
/// enumerated policy choosing a different action at s.
struct GapReport {
    int state = -1;
    double gamma = 0.0;
    double policy_gap = 0.0;
    Policy witness;
};

GapReport policy_gap(const Mdp& mdp, const Policy& policy, double gamma, int state,
                     std::uint64_t cap = kDefaultPolicyCap);

/// One verified instance of the pivot-state inequality chain
/// V^beta_g(s) < V^w_g(s) < V^w_g*(s) <= V^beta_g*(s).
struct PivotChainCheck {
    double gamma = 0.0;
    Policy witness;                 // best competitor differing from beta at the pivot
    double v_beta_at_gamma = 0.0;
    double v_witness_at_gamma = 0.0;
    double v_witness_at_gamma_star = 0.0;
    double v_beta_at_gamma_star = 0.0;
    bool holds_1 = false, holds_2 = false, holds_3 = false;
};

struct PivotScanReport {
    Policy beta;
    double gamma_star = 0.0;
    bool vacuous = false;  // gamma_star == 0: no myopic range to scan
    std::vector<double> gammas;
    // policy gaps of beta, one row per gamma; NaN where a state has one action
    Eigen::MatrixXd gaps;
    std::vector<int> pivot_states;  // argmin gap at the gamma closest to gamma_star (ties all)
    std::vector<PivotChainCheck> chain_checks;  // per gamma, at the first pivot state
    std::vector<std::string> warnings;
};

/// Policy gaps of beta across a gamma grid approaching gamma_star from below
/// (default {gamma_star - 10^-k : k = 1..8} clipped to [0, gamma_star)), the
/// flagged pivot state, and the theorem's inequality chain at each gamma.
PivotScanReport pivot_scan(const Mdp& mdp, std::vector<double> gammas = {},
                           double tolerance = 1e-10, std::uint64_t cap = kDefaultPolicyCap);

}  // namespace blackwell
