#include "blackwell/solver.hpp"

#include <cmath>
#include <limits>

#include "blackwell/markov_chain.hpp"

namespace blackwell {

namespace {

void check_gamma(double gamma) {
    if (!(gamma >= 0.0) || !(gamma < 1.0))
        throw ValidationError("gamma must be in [0,1), got " + std::to_string(gamma));
}

double tie_tolerance(const Eigen::VectorXd& values) {
    return 1e-12 * std::max(1.0, values.lpNorm<Eigen::Infinity>());
}

// Lowest-index argmax over the defined actions of each state.
Policy greedy_policy(const Mdp& mdp, const Eigen::MatrixXd& q, double tol) {
    Policy policy;
    policy.actions.resize(mdp.state_count());
    for (int s = 0; s < mdp.state_count(); ++s) {
        double best = -std::numeric_limits<double>::infinity();
        for (int a : mdp.defined_actions(s)) best = std::max(best, q(s, a));
        for (int a : mdp.defined_actions(s)) {
            if (q(s, a) >= best - tol) {
                policy.actions[s] = a;
                break;
            }
        }
    }
    return policy;
}

}  // namespace

ValueVector evaluate(const Mdp& mdp, const Policy& policy, double gamma) {
    check_gamma(gamma);
    const InducedChain chain = induce_chain(mdp, policy);
    const int n = mdp.state_count();
    const Eigen::MatrixXd system =
        Eigen::MatrixXd::Identity(n, n) - gamma * chain.transition;
    ValueVector out;
    out.gamma = gamma;
    out.values = system.partialPivLu().solve(chain.reward);
    return out;
}

Eigen::MatrixXd q_values_from(const Mdp& mdp, const ValueVector& values) {
    const int n = mdp.state_count();
    const int na = mdp.action_count();
    Eigen::MatrixXd q =
        Eigen::MatrixXd::Constant(n, na, std::numeric_limits<double>::quiet_NaN());
    for (int s = 0; s < n; ++s) {
        for (int a : mdp.defined_actions(s)) {
            double total = 0.0;
            for (const Transition& t : mdp.arcs(s, a))
                total += t.probability * (t.reward + values.gamma * values.values[t.target]);
            q(s, a) = total;
        }
    }
    return q;
}

Eigen::MatrixXd q_values(const Mdp& mdp, const Policy& policy, double gamma) {
    return q_values_from(mdp, evaluate(mdp, policy, gamma));
}

Solution optimal_policy(const Mdp& mdp, double gamma) {
    check_gamma(gamma);
    Policy policy;
    policy.actions.resize(mdp.state_count());
    for (int s = 0; s < mdp.state_count(); ++s)
        policy.actions[s] = mdp.defined_actions(s).front();

    ValueVector values = evaluate(mdp, policy, gamma);
    const int max_iterations = 100 + 10 * mdp.state_count() * mdp.action_count();
    for (int iteration = 0; iteration < max_iterations; ++iteration) {
        const Eigen::MatrixXd q = q_values_from(mdp, values);
        const double tol = tie_tolerance(values.values);
        // Switch an action only on strict improvement; keeps iteration monotone.
        Policy improved = policy;
        for (int s = 0; s < mdp.state_count(); ++s) {
            double best = q(s, policy[s]);
            for (int a : mdp.defined_actions(s)) {
                if (q(s, a) > best + tol) {
                    best = q(s, a);
                    improved.actions[s] = a;
                }
            }
        }
        if (improved == policy) {
            // Converged; re-break ties toward the lowest action index.
            Policy tie_broken = greedy_policy(mdp, q, tol);
            if (tie_broken != policy) {
                ValueVector check = evaluate(mdp, tie_broken, gamma);
                if ((check.values - values.values).lpNorm<Eigen::Infinity>() <= 1e3 * tol)
                    return {tie_broken, std::move(check)};
            }
            return {policy, std::move(values)};
        }
        policy = std::move(improved);
        values = evaluate(mdp, policy, gamma);
    }
    throw NumericalError("policy iteration failed to converge");
}

GainBias gain_bias(const Mdp& mdp, const Policy& policy) {
    const InducedChain chain = induce_chain(mdp, policy);
    const ChainDecomposition decomposition = decompose_chain(chain.transition);
    const Eigen::MatrixXd limit = cesaro_limit(chain.transition, decomposition);

    const int n = mdp.state_count();
    GainBias out;
    out.gain = limit * chain.reward;
    out.multichain = decomposition.recurrent_classes.size() > 1;

    const Eigen::MatrixXd fundamental =
        Eigen::MatrixXd::Identity(n, n) - chain.transition + limit;
    const Eigen::VectorXd rhs =
        chain.reward - limit * chain.reward;  // (I - P*) r
    auto lu = fundamental.partialPivLu();
    out.bias = lu.solve(rhs);
    const double residual = (fundamental * out.bias - rhs).lpNorm<Eigen::Infinity>();
    const double scale = std::max(1.0, out.bias.lpNorm<Eigen::Infinity>());
    if (!out.bias.allFinite() || residual > 1e-8 * scale)
        throw NumericalError("deviation-matrix solve is numerically degenerate (residual " +
                             std::to_string(residual) + ")");
    return out;
}

}  // namespace blackwell
