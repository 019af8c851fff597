#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blackwell/mdp.hpp"
#include "blackwell/solver.hpp"

namespace blackwell {

enum class Family { chain, two_state };

/// Parameters of a distracting long-horizon instance: a low-reward absorbing
/// action near the start and a maximal-reward absorbing action at hitting
/// distance d, all other rewards zero.
struct DistractingSpec {
    Family family = Family::chain;
    double d = 1.0;        // target diameter / expected hitting distance
    double r_d = 0.0;      // distractor reward, 0 < r_d < r_max
    double r_max = 1.0;
    double p_escape = 1.0;  // two_state only: s_d -> s_H success probability
};

/// Line of states s0..sH with actions {left, right}; staying left at s0 pays
/// eps forever, the right self-loop at sH pays r_max, everything else is 0.
Mdp generate_chain(int h, double eps, double r_max);

/// Two states s_d, s_H; a1 self-loops at s_d with reward r_d, a2 escapes to
/// s_H with probability p_escape (reward 0), a2 self-loops at s_H with
/// reward r_max, a1 returns from s_H with reward 0. Initial mass on s_d.
Mdp generate_two_state(double p_escape, double r_d, double r_max);

/// Structural match against the two generated families (topology, rewards,
/// initial distribution); nullopt for anything else.
std::optional<DistractingSpec> recognize_family(const Mdp& mdp);

struct DiameterResult {
    double diameter = 0.0;
    int from = -1;
    int to = -1;
};

/// max over ordered pairs (s, s') of the minimal expected first hitting time,
/// solved by value iteration on the shortest-expected-path equations.
/// Throws ValidationError naming the pair when some state cannot reach some
/// other state under any policy.
DiameterResult diameter(const Mdp& mdp);

/// Blackwell threshold in closed form: (r_d/r_max)^(1/d) for chains; for the
/// two_state family the root of the exact indifference equation
/// r_d (1 - gamma (1 - p)) = gamma p r_max, which the d-th-root formula only
/// approximates because the escape time is geometric rather than a fixed path.
double gamma_star_closed_form(const DistractingSpec& spec);

/// Oracle-knowledge discount recommendation: min(gamma* + margin, (1+gamma*)/2).
double corollary3_select(double d, double r_d, double r_max, double margin);

/// Two of {d, r_d, r_max} known. Returns a chain instance consistent with the
/// known pair on which the given discount is myopic (its optimal policy keeps
/// the distractor gain) while every discount above the instance's threshold
/// recovers the Blackwell optimal policy; also returns the solved third
/// parameter.
struct AdversaryInstance {
    Mdp mdp;
    std::string unknown_name;
    double unknown_value = 0.0;
    DistractingSpec spec;
};

struct KnownFeatures {
    std::optional<double> d;
    std::optional<double> r_d;
    std::optional<double> r_max;
};

AdversaryInstance corollary4_adversary(const KnownFeatures& known, double gamma);

/// Instance whose Blackwell policy and its stay-at-s_d twin have sup-norm
/// value gap below eps at gamma_star while their gains differ by r_max - r_d.
struct NearTieInstance {
    Mdp mdp;
    Policy beta;
    Policy pi_tilde;
    double gamma_star = 0.0;
    double sup_value_gap = 0.0;
    double gain_gap = 0.0;
};

NearTieInstance corollary5_construct(double eps);

/// True iff under every enumerated policy each positive-probability, nonzero-
/// reward transition leaves a transient state of the induced chain.
struct TransientRewardCheck {
    bool all_transient = false;
    std::optional<std::pair<Policy, int>> witness;  // (policy, recurrent state) when false
};

TransientRewardCheck rewards_all_transient(const Mdp& mdp,
                                           std::uint64_t cap = kDefaultPolicyCap);

struct VmaxTrend {
    std::vector<double> gammas;
    std::vector<double> vmax;   // max_s V^{pi*_gamma}(s)
    bool communicating = false;
};

VmaxTrend vmax_trend(const Mdp& mdp, const std::vector<double>& gammas);

/// Warnings for a numerically located threshold on a recognized instance:
/// disagreement with the closed form, and, on the canonical two-state
/// instance (p = 1/500, r_d = 0.1, r_max = 1), the note that the widely
/// quoted threshold 0.84724541 for that example matches p = 1/50, not the
/// instance as given.
std::vector<std::string> threshold_cross_check_warnings(const Mdp& mdp,
                                                        double numeric_gamma_star);

}  // namespace blackwell
