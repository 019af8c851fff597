#pragma once

#include <Eigen/Dense>

#include "blackwell/mdp.hpp"

namespace blackwell {

/// Per-state discounted values at a fixed evaluation discount.
struct ValueVector {
    double gamma = 0.0;
    Eigen::VectorXd values;
};

/// Per-state long-run average reward (gain) and transient deviation (bias).
/// For unichain policies the gain vector is constant.
struct GainBias {
    Eigen::VectorXd gain;
    Eigen::VectorXd bias;
    bool multichain = false;
};

struct Solution {
    Policy policy;
    ValueVector values;
};

/// Exact policy evaluation: solves (I - gamma * P_pi) v = r_pi densely.
ValueVector evaluate(const Mdp& mdp, const Policy& policy, double gamma);

/// Q(s,a) = sum_s' p(s'|s,a) (r(s,a,s') + gamma * v(s')) for the given state
/// values; NaN where (s,a) is undefined.
Eigen::MatrixXd q_values_from(const Mdp& mdp, const ValueVector& values);

Eigen::MatrixXd q_values(const Mdp& mdp, const Policy& policy, double gamma);

/**
 * Discounted optimal policy by exact policy iteration. The returned policy is
 * greedy-stable, ties are broken by lowest action index, and the value vector
 * satisfies the Bellman optimality equation to solver precision.
 */
Solution optimal_policy(const Mdp& mdp, double gamma);

/**
 * Average-reward quantities for a fixed policy: gain = P* r_pi with P* the
 * Cesaro limiting matrix, bias from the deviation matrix
 * (I - P + P*)^{-1} (I - P*) r_pi.
 */
GainBias gain_bias(const Mdp& mdp, const Policy& policy);

}  // namespace blackwell
