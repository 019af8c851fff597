#include <doctest.h>

#include <random>
#include <sstream>

#include "blackwell/mdp.hpp"
#include "helpers.hpp"

using namespace blackwell;
using namespace blackwell::testing;

namespace {

const char* kTwoStateDoc = R"({
  "states": ["s_d", "s_H"],
  "actions": ["a1", "a2"],
  "r_max": 1.0,
  "initial": {"s_d": 1.0},
  "transitions": [
    {"s": "s_d", "a": "a1", "to": [{"sp": "s_d", "p": 1.0, "r": 0.1}]},
    {"s": "s_d", "a": "a2", "to": [{"sp": "s_H", "p": 0.002, "r": 0.0},
                                    {"sp": "s_d", "p": 0.998, "r": 0.0}]},
    {"s": "s_H", "a": "a1", "to": [{"sp": "s_d", "p": 1.0, "r": 0.0}]},
    {"s": "s_H", "a": "a2", "to": [{"sp": "s_H", "p": 1.0, "r": 1.0}]}
  ]
})";

}  // namespace

TEST_CASE("two-state distracting document loads") {
    const Mdp m = parse_mdp(kTwoStateDoc);
    CHECK(m.state_count() == 2);
    CHECK(m.action_count() == 2);
    CHECK(m.r_max() == 1.0);
    CHECK(m.initial()[0] == 1.0);
    CHECK(m.arcs(0, 1).size() == 2);
    CHECK(m == two_state_paper());
}

TEST_CASE("degenerate one-state document loads") {
    const Mdp m = parse_mdp(R"({
      "states": ["s"], "actions": ["a"], "r_max": 0.0,
      "initial": {"s": 1.0},
      "transitions": [{"s": "s", "a": "a", "to": [{"sp": "s", "p": 1.0, "r": 0.0}]}]
    })");
    CHECK(m.state_count() == 1);
    CHECK(induce_chain(m, Policy{{0}}).transition(0, 0) == 1.0);
}

TEST_CASE("bad probability sum names the state-action pair") {
    const std::string doc = R"({
      "states": ["s0"], "actions": ["a0"], "r_max": 1.0,
      "initial": {"s0": 1.0},
      "transitions": [{"s": "s0", "a": "a0", "to": [{"sp": "s0", "p": 0.9, "r": 0.0}]}]
    })";
    CHECK_THROWS_WITH_AS(parse_mdp(doc),
                         doctest::Contains("(s0,a0): successor probabilities sum to"),
                         ValidationError);
}

TEST_CASE("validation rejects malformed documents") {
    CHECK_THROWS_AS(parse_mdp("not json"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_mdp(R"({"states": ["s"], "bogus": 1})"),
                         doctest::Contains("unknown key \"bogus\""), ValidationError);
    // negative reward
    CHECK_THROWS_WITH_AS(parse_mdp(R"({
        "states": ["s"], "actions": ["a"], "r_max": 1.0, "initial": {"s": 1.0},
        "transitions": [{"s": "s", "a": "a", "to": [{"sp": "s", "p": 1.0, "r": -0.5}]}]
      })"),
                         doctest::Contains(".r: reward"), ValidationError);
    // reward above the declared ceiling
    CHECK_THROWS_WITH_AS(parse_mdp(R"({
        "states": ["s"], "actions": ["a"], "r_max": 1.0, "initial": {"s": 1.0},
        "transitions": [{"s": "s", "a": "a", "to": [{"sp": "s", "p": 1.0, "r": 1.5}]}]
      })"),
                         doctest::Contains("r_max"), ValidationError);
    // unknown identifier with field path
    CHECK_THROWS_WITH_AS(parse_mdp(R"({
        "states": ["s"], "actions": ["a"], "r_max": 1.0, "initial": {"s": 1.0},
        "transitions": [{"s": "zz", "a": "a", "to": [{"sp": "s", "p": 1.0, "r": 0.0}]}]
      })"),
                         doctest::Contains("transitions[0].s: unknown state \"zz\""),
                         ValidationError);
    // state with no defined action
    CHECK_THROWS_WITH_AS(parse_mdp(R"({
        "states": ["s", "t"], "actions": ["a"], "r_max": 1.0, "initial": {"s": 1.0},
        "transitions": [{"s": "s", "a": "a", "to": [{"sp": "t", "p": 1.0, "r": 0.0}]}]
      })"),
                         doctest::Contains("state t has no defined action"), ValidationError);
    // bad initial distribution
    CHECK_THROWS_WITH_AS(parse_mdp(R"({
        "states": ["s"], "actions": ["a"], "r_max": 1.0, "initial": {"s": 0.5},
        "transitions": [{"s": "s", "a": "a", "to": [{"sp": "s", "p": 1.0, "r": 0.0}]}]
      })"),
                         doctest::Contains("initial: probabilities sum to"), ValidationError);
}

TEST_CASE("induced chain on the two-state instance") {
    const Mdp m = two_state_paper();

    SUBCASE("stay at s_d, absorb at s_H gives the identity chain") {
        const InducedChain chain = induce_chain(m, Policy{{0, 1}});
        CHECK(chain.transition.isApprox(Eigen::MatrixXd::Identity(2, 2)));
        CHECK(chain.reward[0] == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(chain.reward[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("escape policy keeps the geometric arc") {
        const InducedChain chain = induce_chain(m, Policy{{1, 1}});
        CHECK(chain.transition(0, 0) == doctest::Approx(499.0 / 500.0).epsilon(1e-15));
        CHECK(chain.transition(0, 1) == doctest::Approx(1.0 / 500.0).epsilon(1e-15));
        CHECK(chain.reward[0] == 0.0);
        CHECK(chain.reward[1] == 1.0);
    }
    SUBCASE("undefined action is rejected") {
        CHECK_THROWS_AS(induce_chain(m, Policy{{2, 1}}), ValidationError);
    }
}

TEST_CASE("policy enumeration is lexicographic and capped") {
    const Mdp two = two_state_paper();
    const auto policies = enumerate_policies(two);
    REQUIRE(policies.size() == 4);
    CHECK(policies[0] == Policy{{0, 0}});
    CHECK(policies[1] == Policy{{0, 1}});
    CHECK(policies[2] == Policy{{1, 0}});
    CHECK(policies[3] == Policy{{1, 1}});

    const Mdp chain = generate_chain(3, 0.125, 1.0);  // 4 states, 2 actions each
    CHECK(enumerate_policies(chain).size() == 16);

    try {
        enumerate_policies(chain, 10);
        FAIL("cap should have been exceeded");
    } catch (const CapExceededError& e) {
        CHECK(e.count() == 16);
    }
}

TEST_CASE("serialize/load round trip is structural identity") {
    std::mt19937_64 rng(20240811);
    for (int i = 0; i < 25; ++i) {
        const Mdp m = random_mdp(rng);
        const Mdp reloaded = parse_mdp(serialize_mdp(m));
        CHECK(reloaded == m);
    }
    const Mdp figure = two_state_paper();
    CHECK(parse_mdp(serialize_mdp(figure)) == figure);
    // byte-identical across repeated serialization
    CHECK(serialize_mdp(figure) == serialize_mdp(parse_mdp(serialize_mdp(figure))));
}

TEST_CASE("every enumerated policy induces a stochastic chain") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 10; ++i) {
        const Mdp m = random_mdp(rng);
        const auto policies = enumerate_policies(m);
        std::uint64_t expected = 1;
        for (int s = 0; s < m.state_count(); ++s) expected *= m.defined_actions(s).size();
        CHECK(policies.size() == expected);
        for (const Policy& pi : policies) {
            const InducedChain chain = induce_chain(m, pi);
            for (int s = 0; s < m.state_count(); ++s)
                CHECK(chain.transition.row(s).sum() == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("policy text helpers") {
    const Mdp m = two_state_paper();
    const Policy pi = parse_policy(m, "s_d=a1,s_H=a2");
    CHECK(pi == Policy{{0, 1}});
    CHECK(format_policy(m, pi) == "a1;a2");
    CHECK_THROWS_AS(parse_policy(m, "s_d=a1"), ValidationError);
    CHECK_THROWS_AS(parse_policy(m, "s_d=a1,s_H=zz"), ValidationError);
}

TEST_CASE("loading from a stream") {
    std::istringstream in(kTwoStateDoc);
    CHECK(load_mdp(in) == two_state_paper());
}
