#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "blackwell/generators.hpp"
#include "blackwell/mdp.hpp"
#include "blackwell/solver.hpp"

namespace blackwell::testing {

inline Mdp chain_h2_quarter() { return generate_chain(2, 0.25, 1.0); }
inline Mdp two_state_paper() { return generate_two_state(1.0 / 500.0, 0.1, 1.0); }

/// Independent oracle: plain value iteration for a fixed policy.
inline Eigen::VectorXd value_iteration(const Mdp& mdp, const Policy& policy, double gamma,
                                       double tol = 1e-12) {
    const InducedChain chain = induce_chain(mdp, policy);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(mdp.state_count());
    double residual = 1.0;
    while (residual > tol) {
        Eigen::VectorXd next = chain.reward + gamma * (chain.transition * v);
        residual = (next - v).lpNorm<Eigen::Infinity>();
        v = std::move(next);
    }
    return v;
}

/// Independent oracle: state-wise maximum value over every policy.
inline Eigen::VectorXd enumeration_max(const Mdp& mdp, double gamma,
                                       std::uint64_t cap = kDefaultPolicyCap) {
    Eigen::VectorXd best = Eigen::VectorXd::Constant(
        mdp.state_count(), -std::numeric_limits<double>::infinity());
    for (const Policy& pi : enumerate_policies(mdp, cap))
        best = best.cwiseMax(evaluate(mdp, pi, gamma).values);
    return best;
}

/// Independent oracle: long-run average reward by simulation.
inline double simulate_average_reward(const Mdp& mdp, const Policy& policy, int start,
                                      std::uint64_t steps, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    int state = start;
    double total = 0.0;
    for (std::uint64_t i = 0; i < steps; ++i) {
        const double u = uniform(rng);
        double mass = 0.0;
        const auto& arcs = mdp.arcs(state, policy[state]);
        int next = arcs.back().target;
        double reward = arcs.back().reward;
        for (const Transition& t : arcs) {
            mass += t.probability;
            if (u < mass) {
                next = t.target;
                reward = t.reward;
                break;
            }
        }
        total += reward;
        state = next;
    }
    return total / static_cast<double>(steps);
}

/// Small random MDP: 2-4 states, 1-3 actions defined per state, rewards in
/// [0,1] with a bias toward exact zeros, normalized random transitions.
inline Mdp random_mdp(std::mt19937_64& rng, int max_states = 4, int max_actions = 3) {
    std::uniform_int_distribution<int> state_dist(2, max_states);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int n = state_dist(rng);
    const int na = std::uniform_int_distribution<int>(2, max_actions)(rng);
    std::vector<std::string> states, actions;
    for (int s = 0; s < n; ++s) states.push_back("s" + std::to_string(s));
    for (int a = 0; a < na; ++a) actions.push_back("a" + std::to_string(a));
    std::vector<std::vector<std::vector<Transition>>> arcs(
        n, std::vector<std::vector<Transition>>(na));
    for (int s = 0; s < n; ++s) {
        bool any = false;
        for (int a = 0; a < na; ++a) {
            if (unit(rng) < 0.25 && !(a == na - 1 && !any)) continue;  // leave undefined
            any = true;
            const int support = std::uniform_int_distribution<int>(1, n)(rng);
            std::vector<int> targets(n);
            for (int i = 0; i < n; ++i) targets[i] = i;
            std::shuffle(targets.begin(), targets.end(), rng);
            targets.resize(support);
            std::sort(targets.begin(), targets.end());
            std::vector<double> weights(support);
            double sum = 0.0;
            for (double& w : weights) sum += (w = 0.1 + unit(rng));
            double assigned = 0.0;
            for (int k = 0; k < support; ++k) {
                double p = k + 1 == support ? 1.0 - assigned : weights[k] / sum;
                assigned += p;
                const double reward = unit(rng) < 0.5 ? 0.0 : unit(rng);
                arcs[s][a].push_back({targets[k], p, reward});
            }
        }
    }
    Eigen::VectorXd initial = Eigen::VectorXd::Zero(n);
    initial[std::uniform_int_distribution<int>(0, n - 1)(rng)] = 1.0;
    return Mdp(std::move(states), std::move(actions), 1.0, std::move(initial), std::move(arcs));
}

}  // namespace blackwell::testing
