#include <doctest.h>

#include <random>

#include "blackwell/markov_chain.hpp"
#include "blackwell/solver.hpp"
#include "helpers.hpp"

using namespace blackwell;
using namespace blackwell::testing;

namespace {

Mdp one_state_loop(double reward) {
    std::vector<std::vector<std::vector<Transition>>> arcs(
        1, std::vector<std::vector<Transition>>(1));
    arcs[0][0] = {{0, 1.0, reward}};
    Eigen::VectorXd initial(1);
    initial << 1.0;
    return Mdp({"s"}, {"a"}, std::max(reward, 1.0), initial, arcs);
}

}  // namespace

TEST_CASE("evaluation matches geometric closed forms") {
    const Mdp m = two_state_paper();

    // stay: r_d / (1 - gamma)
    CHECK(evaluate(m, Policy{{0, 1}}, 0.5).values[0] == doctest::Approx(0.2).epsilon(1e-12));

    // escape policy, hand-solved 2x2 system: gamma/((1-gamma)(500 - 499 gamma))
    const double v = evaluate(m, Policy{{1, 1}}, 0.9).values[0];
    CHECK(v == doctest::Approx(0.9 / (0.1 * 50.9)).epsilon(1e-12));
    const Eigen::VectorXd oracle = value_iteration(m, Policy{{1, 1}}, 0.9);
    CHECK(v == doctest::Approx(oracle[0]).epsilon(1e-10));

    // gamma = 0 collapses to the one-step expected reward
    const InducedChain chain = induce_chain(m, Policy{{1, 1}});
    CHECK(evaluate(m, Policy{{1, 1}}, 0.0).values.isApprox(chain.reward, 1e-15));

    CHECK_THROWS_AS(evaluate(m, Policy{{1, 1}}, 1.0), ValidationError);
    CHECK_THROWS_AS(evaluate(m, Policy{{1, 1}}, -0.1), ValidationError);
}

TEST_CASE("evaluation agrees with value iteration on random instances") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 15; ++i) {
        const Mdp m = random_mdp(rng);
        const auto policies = enumerate_policies(m);
        const Policy& pi = policies[i % policies.size()];
        for (double gamma : {0.0, 0.3, 0.9}) {
            const Eigen::VectorXd fast = evaluate(m, pi, gamma).values;
            const Eigen::VectorXd slow = value_iteration(m, pi, gamma);
            CHECK((fast - slow).lpNorm<Eigen::Infinity>() < 1e-10);
        }
    }
}

TEST_CASE("values are monotone in gamma and bounded by r_max/(1-gamma)") {
    std::mt19937_64 rng(1234);
    for (int i = 0; i < 12; ++i) {
        const Mdp m = random_mdp(rng);
        const Policy pi = enumerate_policies(m).front();
        const double gammas[] = {0.0, 0.2, 0.5, 0.8, 0.95, 0.999};
        Eigen::VectorXd previous;
        for (double gamma : gammas) {
            const Eigen::VectorXd v = evaluate(m, pi, gamma).values;
            for (int s = 0; s < m.state_count(); ++s) {
                CHECK(v[s] <= m.r_max() / (1.0 - gamma) + 1e-9);
                CHECK(v[s] >= -1e-12);
                if (previous.size() > 0) CHECK(v[s] >= previous[s] - 1e-9);
            }
            previous = v;
        }
    }
}

TEST_CASE("q-values: absorbing loop, myopic case, consistency identity") {
    const Mdp m = two_state_paper();
    const Policy all_escape{{1, 1}};

    const Eigen::MatrixXd q = q_values(m, all_escape, 0.9);
    CHECK(q(1, 1) == doctest::Approx(10.0).epsilon(1e-12));  // 1 + 0.9 * 1/(1-0.9)

    const Eigen::MatrixXd q0 = q_values(m, all_escape, 0.0);
    CHECK(q0(0, 0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(q0(0, 1) == 0.0);

    // Q(s, pi(s)) == V(s)
    std::mt19937_64 rng(5);
    for (int i = 0; i < 8; ++i) {
        const Mdp r = random_mdp(rng);
        for (const Policy& pi : enumerate_policies(r)) {
            const ValueVector v = evaluate(r, pi, 0.7);
            const Eigen::MatrixXd qq = q_values_from(r, v);
            for (int s = 0; s < r.state_count(); ++s)
                CHECK(qq(s, pi[s]) == doctest::Approx(v.values[s]).epsilon(1e-10));
        }
    }
}

TEST_CASE("optimal policy on the distracting chain") {
    const Mdp m = chain_h2_quarter();  // threshold at gamma = 0.5

    SUBCASE("below the threshold the distractor wins") {
        const Solution sol = optimal_policy(m, 0.4);
        CHECK(sol.policy[0] == 0);
        CHECK(sol.values.values[0] == doctest::Approx(0.25 / 0.6).epsilon(1e-12));
        // moving right is worth strictly less from s0
        CHECK(0.25 / 0.6 > 0.4 * 0.4 / 0.6);
    }
    SUBCASE("above the threshold the optimal policy moves right everywhere") {
        const Solution sol = optimal_policy(m, 0.6);
        CHECK(sol.policy == Policy{{1, 1, 1}});
        CHECK(sol.values.values[0] == doctest::Approx(0.36 / 0.4).epsilon(1e-12));
    }
    SUBCASE("one-state instance returns its only policy") {
        const Solution sol = optimal_policy(one_state_loop(0.7), 0.5);
        CHECK(sol.policy == Policy{{0}});
        CHECK(sol.values.values[0] == doctest::Approx(1.4).epsilon(1e-12));
    }
}

TEST_CASE("optimal policy dominates every enumerated policy") {
    std::mt19937_64 rng(4242);
    for (int i = 0; i < 12; ++i) {
        const Mdp m = random_mdp(rng);
        for (double gamma : {0.0, 0.35, 0.9, 0.99}) {
            const Solution sol = optimal_policy(m, gamma);
            const Eigen::VectorXd best = enumeration_max(m, gamma);
            CHECK((sol.values.values - best).lpNorm<Eigen::Infinity>() < 1e-9);
            // Bellman fixed point
            const Eigen::MatrixXd q = q_values_from(m, sol.values);
            for (int s = 0; s < m.state_count(); ++s) {
                double row_best = -1e300;
                for (int a : m.defined_actions(s)) row_best = std::max(row_best, q(s, a));
                CHECK(std::abs(sol.values.values[s] - row_best) <= 1e-11);
            }
        }
    }
}

TEST_CASE("gain and bias on the two-state instance") {
    const Mdp m = two_state_paper();

    SUBCASE("all-escape is absorbed at the high-reward state") {
        const GainBias gb = gain_bias(m, Policy{{1, 1}});
        CHECK(gb.gain[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(gb.gain[1] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK_FALSE(gb.multichain);
        // deviation matrix gives bias -500 at the transient state
        CHECK(gb.bias[0] == doctest::Approx(-500.0).epsilon(1e-9));
        CHECK(gb.bias[1] == doctest::Approx(0.0).epsilon(1e-9));
        // simulation oracle
        const double sim = simulate_average_reward(m, Policy{{1, 1}}, 0, 1'000'000, 321);
        CHECK(gb.gain[0] == doctest::Approx(sim).epsilon(5e-3));
    }
    SUBCASE("staying keeps the distractor gain") {
        const GainBias gb = gain_bias(m, Policy{{0, 1}});
        CHECK(gb.gain[0] == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(gb.gain[1] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(gb.multichain);  // two absorbing classes
    }
    SUBCASE("single self-loop has gain r and zero bias") {
        const GainBias gb = gain_bias(one_state_loop(0.7), Policy{{0}});
        CHECK(gb.gain[0] == doctest::Approx(0.7).epsilon(1e-15));
        CHECK(gb.bias[0] == doctest::Approx(0.0).epsilon(1e-15));
    }
}

TEST_CASE("Abel and Cesaro limits agree as gamma approaches 1") {
    std::mt19937_64 rng(31337);
    std::vector<Mdp> instances;
    instances.push_back(two_state_paper());
    for (int i = 0; i < 6; ++i) instances.push_back(random_mdp(rng));
    for (const Mdp& m : instances) {
        const Policy pi = enumerate_policies(m).back();
        const GainBias gb = gain_bias(m, pi);
        double first_abel = 0.0, first_laurent = 0.0;
        double previous_abel = std::numeric_limits<double>::infinity();
        double previous_laurent = std::numeric_limits<double>::infinity();
        for (double gamma : {0.9, 0.99, 0.999, 0.9999}) {
            const Eigen::VectorXd v = evaluate(m, pi, gamma).values;
            const double abel = ((1.0 - gamma) * v - gb.gain).lpNorm<Eigen::Infinity>();
            const double laurent =
                (v - gb.gain / (1.0 - gamma) - gb.bias).lpNorm<Eigen::Infinity>();
            CHECK(abel <= previous_abel + 1e-10);
            CHECK(laurent <= previous_laurent + 1e-10);
            if (gamma == 0.9) {
                first_abel = abel;
                first_laurent = laurent;
            }
            previous_abel = abel;
            previous_laurent = laurent;
        }
        // shrunk substantially over the grid; absolute scale follows the bias
        const double bias_scale = std::max(1.0, gb.bias.lpNorm<Eigen::Infinity>());
        CHECK(previous_abel <= std::max(0.25 * first_abel, 1e-10));
        CHECK(previous_laurent <= std::max(0.25 * first_laurent, 1e-10));
        CHECK(previous_abel <= 0.1 * bias_scale);
        CHECK(previous_laurent <= 0.1 * bias_scale);
    }
}

TEST_CASE("gain is invariant under cyclic rotation of the reward sequence") {
    // Ring of four states; both actions advance, one reads the shifted reward.
    const int n = 4;
    const double rewards[] = {0.9, 0.2, 0.6, 0.1};
    std::vector<std::string> states, actions = {"step", "step_shifted"};
    std::vector<std::vector<std::vector<Transition>>> arcs(
        n, std::vector<std::vector<Transition>>(2));
    for (int i = 0; i < n; ++i) {
        states.push_back("s" + std::to_string(i));
        arcs[i][0] = {{(i + 1) % n, 1.0, rewards[i]}};
        arcs[i][1] = {{(i + 1) % n, 1.0, rewards[(i + 1) % n]}};
    }
    Eigen::VectorXd initial = Eigen::VectorXd::Zero(n);
    initial[0] = 1.0;
    const Mdp ring(states, actions, 1.0, initial, arcs);

    const GainBias plain = gain_bias(ring, Policy{{0, 0, 0, 0}});
    const GainBias rotated = gain_bias(ring, Policy{{1, 1, 1, 1}});
    const double mean = (0.9 + 0.2 + 0.6 + 0.1) / 4.0;
    for (int s = 0; s < n; ++s) {
        CHECK(plain.gain[s] == doctest::Approx(mean).epsilon(1e-12));
        CHECK(rotated.gain[s] == doctest::Approx(mean).epsilon(1e-12));
    }
}

TEST_CASE("chain decomposition identifies recurrent classes") {
    const Mdp m = two_state_paper();
    const InducedChain stay = induce_chain(m, Policy{{0, 1}});
    const ChainDecomposition d1 = decompose_chain(stay.transition);
    CHECK(d1.recurrent_classes.size() == 2);  // both self-loops absorb
    const InducedChain escape = induce_chain(m, Policy{{1, 1}});
    const ChainDecomposition d2 = decompose_chain(escape.transition);
    REQUIRE(d2.recurrent_classes.size() == 1);
    CHECK(d2.recurrent_classes[0] == std::vector<int>{1});
    CHECK(d2.recurrent_class_of[0] == -1);  // s_d is transient

    // periodic two-cycle: Cesaro limit is the uniform distribution
    Eigen::MatrixXd cycle(2, 2);
    cycle << 0, 1, 1, 0;
    const Eigen::MatrixXd limit = cesaro_limit(cycle);
    CHECK(limit(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(limit(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("unichain policies have a constant gain vector") {
    std::mt19937_64 rng(2718);
    for (int i = 0; i < 10; ++i) {
        const Mdp m = random_mdp(rng);
        for (const Policy& pi : enumerate_policies(m)) {
            const GainBias gb = gain_bias(m, pi);
            if (!gb.multichain)
                CHECK(gb.gain.maxCoeff() - gb.gain.minCoeff() < 1e-9);
        }
    }
}
