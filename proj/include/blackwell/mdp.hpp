#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "blackwell/errors.hpp"

namespace blackwell {

/// Probability sums (transition rows, initial distribution) must equal 1 within this.
inline constexpr double kProbabilityTolerance = 1e-9;

/// Default ceiling on deterministic-policy enumeration.
inline constexpr std::uint64_t kDefaultPolicyCap = 1'000'000;

/// One weighted arc of a transition distribution: target state, probability, reward.
struct Transition {
    int target = 0;
    double probability = 0.0;
    double reward = 0.0;

    friend bool operator==(const Transition&, const Transition&) = default;
};

/**
 * Finite tabular MDP. States and actions are identified by name; all numeric
 * work uses their declared ordering indices. An action may be undefined at a
 * state (empty arc list); every state carries at least one defined action.
 *
 * The discount factor is deliberately not a field: it is an argument to
 * evaluation. Instances are immutable after construction and safe to share
 * across threads.
 */
class Mdp {
  public:
    /// Validates every invariant (probability sums, reward range, initial
    /// distribution) and throws ValidationError naming the offending field.
    Mdp(std::vector<std::string> states, std::vector<std::string> actions, double r_max,
        Eigen::VectorXd initial, std::vector<std::vector<std::vector<Transition>>> arcs);

    int state_count() const { return static_cast<int>(states_.size()); }
    int action_count() const { return static_cast<int>(actions_.size()); }
    const std::vector<std::string>& states() const { return states_; }
    const std::vector<std::string>& actions() const { return actions_; }
    const std::string& state_name(int s) const { return states_[s]; }
    const std::string& action_name(int a) const { return actions_[a]; }
    double r_max() const { return r_max_; }
    const Eigen::VectorXd& initial() const { return initial_; }

    bool action_defined(int s, int a) const { return !arcs_[s][a].empty(); }
    const std::vector<Transition>& arcs(int s, int a) const { return arcs_[s][a]; }
    /// Ascending indices of the actions defined at s (never empty).
    const std::vector<int>& defined_actions(int s) const { return defined_[s]; }

    /// Index lookup by name; -1 when unknown.
    int state_index(std::string_view name) const;
    int action_index(std::string_view name) const;

    friend bool operator==(const Mdp& a, const Mdp& b);

  private:
    std::vector<std::string> states_;
    std::vector<std::string> actions_;
    double r_max_;
    Eigen::VectorXd initial_;
    std::vector<std::vector<std::vector<Transition>>> arcs_;
    std::vector<std::vector<int>> defined_;
};

/// Deterministic stationary policy: one action index per state.
struct Policy {
    std::vector<int> actions;

    int operator[](int s) const { return actions[s]; }
    friend bool operator==(const Policy&, const Policy&) = default;
    friend auto operator<=>(const Policy&, const Policy&) = default;
};

/// Markov chain induced by fixing a policy: row-stochastic matrix and
/// per-state expected one-step reward.
struct InducedChain {
    Eigen::MatrixXd transition;
    Eigen::VectorXd reward;
};

/// Throws ValidationError unless the policy is total over the MDP's states
/// and every chosen action is defined.
void check_policy(const Mdp& mdp, const Policy& policy);

InducedChain induce_chain(const Mdp& mdp, const Policy& policy);

/// Number of deterministic stationary policies, saturating at UINT64_MAX.
std::uint64_t policy_count(const Mdp& mdp);

/**
 * Every deterministic stationary policy exactly once, in lexicographic order
 * over the state ordering (the last state's action varies fastest). Throws
 * CapExceededError carrying the exact count when the policy set is larger
 * than cap.
 */
std::vector<Policy> enumerate_policies(const Mdp& mdp, std::uint64_t cap = kDefaultPolicyCap);

/// Parses and validates the JSON MDP file format. Unknown keys are rejected;
/// errors carry the offending field path.
Mdp load_mdp(std::istream& in);
Mdp parse_mdp(const std::string& text);
Mdp load_mdp_file(const std::string& path);

/// Deterministic serialization; load_mdp(serialize_mdp(m)) == m.
std::string serialize_mdp(const Mdp& mdp);

/// Action names in state order, separated by ';' (CSV-safe).
std::string format_policy(const Mdp& mdp, const Policy& policy);

/// Parses "state=action,state=action,..."; every state must be assigned.
Policy parse_policy(const Mdp& mdp, std::string_view text);

}  // namespace blackwell
