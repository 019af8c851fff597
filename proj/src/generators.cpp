#include "blackwell/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "blackwell/blackwell.hpp"
#include "blackwell/markov_chain.hpp"

namespace blackwell {

namespace {

constexpr double kExact = 1e-12;  // tolerance for structural family matching

bool near(double a, double b) { return std::abs(a - b) <= kExact * std::max(1.0, std::abs(b)); }

// Single deterministic arc (p = 1) check.
bool deterministic_arc(const std::vector<Transition>& arcs, int target, double reward) {
    return arcs.size() == 1 && arcs[0].target == target && near(arcs[0].probability, 1.0) &&
           near(arcs[0].reward, reward);
}

}  // namespace

Mdp generate_chain(int h, double eps, double r_max) {
    if (h < 1) throw ValidationError("h must be >= 1");
    if (!(eps > 0.0) || !(eps < r_max))
        throw ValidationError("eps must satisfy 0 < eps < r_max");
    const int n = h + 1;
    std::vector<std::string> states;
    for (int i = 0; i < n; ++i) states.push_back("s" + std::to_string(i));
    std::vector<std::string> actions = {"left", "right"};
    std::vector<std::vector<std::vector<Transition>>> arcs(
        n, std::vector<std::vector<Transition>>(2));
    arcs[0][0] = {{0, 1.0, eps}};      // stay on the distractor
    arcs[0][1] = {{1, 1.0, 0.0}};
    for (int i = 1; i < h; ++i) {
        arcs[i][0] = {{i - 1, 1.0, 0.0}};
        arcs[i][1] = {{i + 1, 1.0, 0.0}};
    }
    arcs[h][0] = {{h - 1, 1.0, 0.0}};
    arcs[h][1] = {{h, 1.0, r_max}};    // high-reward self-loop
    Eigen::VectorXd initial = Eigen::VectorXd::Zero(n);
    initial[0] = 1.0;
    return Mdp(std::move(states), std::move(actions), r_max, std::move(initial),
               std::move(arcs));
}

Mdp generate_two_state(double p_escape, double r_d, double r_max) {
    if (!(p_escape > 0.0) || !(p_escape <= 1.0))
        throw ValidationError("p_escape must be in (0,1]");
    if (!(r_d > 0.0) || !(r_d < r_max))
        throw ValidationError("r_d must satisfy 0 < r_d < r_max");
    std::vector<std::string> states = {"s_d", "s_H"};
    std::vector<std::string> actions = {"a1", "a2"};
    std::vector<std::vector<std::vector<Transition>>> arcs(
        2, std::vector<std::vector<Transition>>(2));
    arcs[0][0] = {{0, 1.0, r_d}};
    arcs[0][1] = {{1, p_escape, 0.0}};
    if (p_escape < 1.0) arcs[0][1].push_back({0, 1.0 - p_escape, 0.0});
    arcs[1][0] = {{0, 1.0, 0.0}};
    arcs[1][1] = {{1, 1.0, r_max}};
    Eigen::VectorXd initial(2);
    initial << 1.0, 0.0;
    return Mdp(std::move(states), std::move(actions), r_max, std::move(initial),
               std::move(arcs));
}

std::optional<DistractingSpec> recognize_family(const Mdp& mdp) {
    const int n = mdp.state_count();
    if (mdp.action_count() != 2 || n < 2) return std::nullopt;
    if (mdp.initial()[0] != 1.0) return std::nullopt;
    for (int s = 0; s < n; ++s)
        if (!mdp.action_defined(s, 0) || !mdp.action_defined(s, 1)) return std::nullopt;

    if (n == 2) {
        // two_state shape: distractor self-loop, geometric escape, return arc.
        const auto& stay = mdp.arcs(0, 0);
        const auto& go = mdp.arcs(0, 1);
        const auto& back = mdp.arcs(1, 0);
        const auto& high = mdp.arcs(1, 1);
        if (stay.size() == 1 && stay[0].target == 0 && near(stay[0].probability, 1.0) &&
            stay[0].reward > 0.0 && deterministic_arc(back, 0, 0.0) && high.size() == 1 &&
            high[0].target == 1 && near(high[0].probability, 1.0) &&
            near(high[0].reward, mdp.r_max()) && stay[0].reward < mdp.r_max()) {
            double p = -1.0;
            if (go.size() == 1 && go[0].target == 1 && near(go[0].probability, 1.0) &&
                near(go[0].reward, 0.0)) {
                p = 1.0;
            } else if (go.size() == 2 && go[0].target == 1 && go[1].target == 0 &&
                       near(go[0].reward, 0.0) && near(go[1].reward, 0.0) &&
                       near(go[0].probability + go[1].probability, 1.0)) {
                p = go[0].probability;
            }
            if (p > 0.0) {
                DistractingSpec spec;
                spec.family = Family::two_state;
                spec.p_escape = p;
                spec.d = 1.0 / p;
                spec.r_d = stay[0].reward;
                spec.r_max = mdp.r_max();
                return spec;
            }
        }
        // fall through: a 2-state MDP may still be an h=1 chain
    }

    const int h = n - 1;
    if (h < 1) return std::nullopt;
    const auto& stay = mdp.arcs(0, 0);
    if (!(stay.size() == 1 && stay[0].target == 0 && near(stay[0].probability, 1.0) &&
          stay[0].reward > 0.0 && stay[0].reward < mdp.r_max()))
        return std::nullopt;
    if (!deterministic_arc(mdp.arcs(0, 1), 1, 0.0)) return std::nullopt;
    for (int i = 1; i < h; ++i) {
        if (!deterministic_arc(mdp.arcs(i, 0), i - 1, 0.0)) return std::nullopt;
        if (!deterministic_arc(mdp.arcs(i, 1), i + 1, 0.0)) return std::nullopt;
    }
    if (!deterministic_arc(mdp.arcs(h, 0), h - 1, 0.0)) return std::nullopt;
    if (!deterministic_arc(mdp.arcs(h, 1), h, mdp.r_max())) return std::nullopt;
    DistractingSpec spec;
    spec.family = Family::chain;
    spec.d = h;
    spec.r_d = stay[0].reward;
    spec.r_max = mdp.r_max();
    return spec;
}

DiameterResult diameter(const Mdp& mdp) {
    const int n = mdp.state_count();
    DiameterResult out;
    constexpr double kTol = 1e-10;
    constexpr double kDivergence = 1e13;
    constexpr int kMaxIterations = 2'000'000;
    for (int target = 0; target < n; ++target) {
        // Backward reachability over "some action, positive probability" arcs.
        std::vector<bool> can_reach(n, false);
        can_reach[target] = true;
        for (bool changed = true; changed;) {
            changed = false;
            for (int s = 0; s < n; ++s) {
                if (can_reach[s]) continue;
                for (int a : mdp.defined_actions(s))
                    for (const Transition& t : mdp.arcs(s, a))
                        if (t.probability > 0.0 && can_reach[t.target]) {
                            can_reach[s] = true;
                            changed = true;
                        }
            }
        }
        for (int s = 0; s < n; ++s)
            if (!can_reach[s])
                throw ValidationError("state " + mdp.state_name(target) +
                                      " is not reachable from " + mdp.state_name(s) +
                                      " under any policy");
        // h(s) = 1 + min_a sum_{s'' != target} p(s''|s,a) h(s''), h(target) = 0.
        Eigen::VectorXd h = Eigen::VectorXd::Zero(n);
        double residual = std::numeric_limits<double>::infinity();
        int iteration = 0;
        while (residual > kTol) {
            residual = 0.0;
            for (int s = 0; s < n; ++s) {
                if (s == target) continue;
                double best = std::numeric_limits<double>::infinity();
                for (int a : mdp.defined_actions(s)) {
                    double expected = 1.0;
                    for (const Transition& t : mdp.arcs(s, a))
                        if (t.target != target) expected += t.probability * h[t.target];
                    best = std::min(best, expected);
                }
                residual = std::max(residual, best - h[s]);
                h[s] = best;
            }
            if (h.maxCoeff() > kDivergence || ++iteration > kMaxIterations) {
                int worst = 0;
                h.maxCoeff(&worst);
                throw ValidationError("state " + mdp.state_name(target) +
                                      " is not reachable from " + mdp.state_name(worst) +
                                      " under any policy (divergent hitting time)");
            }
        }
        for (int s = 0; s < n; ++s) {
            if (s == target) continue;
            if (h[s] > out.diameter) {
                out.diameter = h[s];
                out.from = s;
                out.to = target;
            }
        }
    }
    return out;
}

double gamma_star_closed_form(const DistractingSpec& spec) {
    if (!(spec.r_d > 0.0) || !(spec.r_d < spec.r_max))
        throw ValidationError("spec requires 0 < r_d < r_max");
    if (!(spec.d >= 1.0)) throw ValidationError("spec requires d >= 1");
    if (spec.family == Family::chain) return std::pow(spec.r_d / spec.r_max, 1.0 / spec.d);
    // two_state indifference r_d (1 - gamma (1-p)) = gamma p r_max is linear in gamma.
    const double p = spec.p_escape;
    if (!(p > 0.0) || !(p <= 1.0)) throw ValidationError("spec requires p_escape in (0,1]");
    return spec.r_d / (spec.r_d * (1.0 - p) + p * spec.r_max);
}

double corollary3_select(double d, double r_d, double r_max, double margin) {
    if (margin < 0.0) throw ValidationError("margin must be nonnegative");
    DistractingSpec spec;
    spec.family = Family::chain;
    spec.d = d;
    spec.r_d = r_d;
    spec.r_max = r_max;
    const double gamma_star = gamma_star_closed_form(spec);
    return std::min(gamma_star + margin, 0.5 * (1.0 + gamma_star));
}

AdversaryInstance corollary4_adversary(const KnownFeatures& known, double gamma) {
    if (!(gamma >= 0.0) || !(gamma < 1.0))
        throw ValidationError("gamma must be in [0,1), got " + std::to_string(gamma));
    const int given =
        (known.d ? 1 : 0) + (known.r_d ? 1 : 0) + (known.r_max ? 1 : 0);
    if (given != 2) throw ValidationError("exactly two of {d, r_d, r_max} must be known");

    AdversaryInstance out{generate_chain(1, 0.5, 1.0), "", 0.0, {}};
    if (!known.d) {
        const double r_d = *known.r_d, r_max = *known.r_max;
        if (!(r_d > 0.0) || !(r_d < r_max))
            throw ValidationError("no consistent instance: need 0 < r_d < r_max");
        // Smallest horizon on which gamma is myopic: gamma^d < r_d/r_max.
        int d = 1;
        if (gamma > 0.0) {
            const double bound = std::log(r_d / r_max) / std::log(gamma);
            d = static_cast<int>(std::floor(bound)) + 1;
            while (std::pow(gamma, d) >= r_d / r_max) ++d;  // guard float rounding
            d = std::max(d, 1);
        }
        out.unknown_name = "d";
        out.unknown_value = d;
        out.spec = {Family::chain, static_cast<double>(d), r_d, r_max, 1.0};
    } else if (!known.r_d) {
        const double d = *known.d, r_max = *known.r_max;
        if (!(d >= 1.0) || !(r_max > 0.0))
            throw ValidationError("no consistent instance: need d >= 1 and r_max > 0");
        const double boundary = std::pow(gamma, d) * r_max;  // indifference reward
        const double r_d = boundary + std::min(0.01 * r_max, 0.5 * (r_max - boundary));
        out.unknown_name = "r_d";
        out.unknown_value = r_d;
        out.spec = {Family::chain, d, r_d, r_max, 1.0};
    } else {
        const double d = *known.d, r_d = *known.r_d;
        if (!(d >= 1.0) || !(r_d > 0.0))
            throw ValidationError("no consistent instance: need d >= 1 and r_d > 0");
        // Any r_max in (r_d, r_d / gamma^d) keeps gamma myopic.
        const double half_power = std::pow(gamma, 0.5 * d);
        const double r_max =
            half_power > 0.0 ? std::min(r_d / half_power, 100.0 * r_d) : 100.0 * r_d;
        out.unknown_name = "r_max";
        out.unknown_value = r_max;
        out.spec = {Family::chain, d, r_d, r_max, 1.0};
    }
    out.mdp = generate_chain(static_cast<int>(out.spec.d), out.spec.r_d, out.spec.r_max);
    return out;
}

NearTieInstance corollary5_construct(double eps) {
    if (!(eps > 0.0)) throw ValidationError("eps must be positive");
    // At gamma_star the distractor state is exactly indifferent, so the value
    // gap between beta and its stay-at-s0 twin vanishes by construction; the
    // gains still differ by r_max - r_d. Fixed shape: d = 2, r_max = 1.
    const double r_d = 0.45, r_max = 1.0;
    NearTieInstance out{generate_chain(2, r_d, r_max), {}, {}, 0.0, 0.0, 0.0};
    out.gamma_star = gamma_star_closed_form({Family::chain, 2.0, r_d, r_max, 1.0});
    out.beta = Policy{{1, 1, 1}};
    out.pi_tilde = Policy{{0, 1, 1}};
    const Eigen::VectorXd v_beta = evaluate(out.mdp, out.beta, out.gamma_star).values;
    const Eigen::VectorXd v_tilde = evaluate(out.mdp, out.pi_tilde, out.gamma_star).values;
    out.sup_value_gap = (v_beta - v_tilde).lpNorm<Eigen::Infinity>();
    const GainBias gb_beta = gain_bias(out.mdp, out.beta);
    const GainBias gb_tilde = gain_bias(out.mdp, out.pi_tilde);
    out.gain_gap = out.mdp.initial().dot(gb_beta.gain - gb_tilde.gain);
    if (out.sup_value_gap >= eps)
        throw NumericalError("near-tie construction failed: value gap " +
                             std::to_string(out.sup_value_gap) + " is not below eps");
    return out;
}

TransientRewardCheck rewards_all_transient(const Mdp& mdp, std::uint64_t cap) {
    TransientRewardCheck out;
    for (const Policy& policy : enumerate_policies(mdp, cap)) {
        const InducedChain chain = induce_chain(mdp, policy);
        const ChainDecomposition decomposition = decompose_chain(chain.transition);
        for (int s = 0; s < mdp.state_count(); ++s) {
            if (decomposition.recurrent_class_of[s] < 0) continue;
            for (const Transition& t : mdp.arcs(s, policy[s])) {
                if (t.probability > 0.0 && t.reward != 0.0) {
                    out.all_transient = false;
                    out.witness = {policy, s};
                    return out;
                }
            }
        }
    }
    out.all_transient = true;
    return out;
}

std::vector<std::string> threshold_cross_check_warnings(const Mdp& mdp,
                                                        double numeric_gamma_star) {
    std::vector<std::string> warnings;
    const auto spec = recognize_family(mdp);
    if (!spec) return warnings;
    const double closed = gamma_star_closed_form(*spec);
    if (std::abs(closed - numeric_gamma_star) > 1e-8)
        warnings.push_back("numeric gamma_star " + std::to_string(numeric_gamma_star) +
                           " disagrees with the closed form " + std::to_string(closed) +
                           " beyond 1e-8");
    if (spec->family == Family::two_state && near(spec->p_escape, 1.0 / 500.0) &&
        near(spec->r_d, 0.1) && near(spec->r_max, 1.0)) {
        warnings.push_back(
            "this instance (p=1/500, r_d=0.1, r_max=1) has gamma_star = 50/50.9 = "
            "0.9823183; the value 0.84724541 quoted for this example elsewhere is "
            "inconsistent with p=1/500 and is close to the p=1/50 threshold "
            "0.84745763; both numbers are reported and the instance is analyzed as "
            "given");
    }
    return warnings;
}

VmaxTrend vmax_trend(const Mdp& mdp, const std::vector<double>& gammas) {
    VmaxTrend out;
    out.gammas = gammas;
    for (double gamma : gammas)
        out.vmax.push_back(optimal_policy(mdp, gamma).values.values.maxCoeff());

    // Communicating check: union graph over all defined actions is one SCC.
    const int n = mdp.state_count();
    Eigen::MatrixXd adjacency = Eigen::MatrixXd::Zero(n, n);
    for (int s = 0; s < n; ++s)
        for (int a : mdp.defined_actions(s))
            for (const Transition& t : mdp.arcs(s, a))
                if (t.probability > 0.0) adjacency(s, t.target) = 1.0;
    out.communicating = strongly_connected_components(adjacency).size() == 1;
    return out;
}

}  // namespace blackwell
