#include "blackwell/blackwell.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace blackwell {

namespace {

// Relative tolerance for sign decisions on value differences. Grows toward
// gamma = 1 where the evaluation system's conditioning degrades as 1/(1-gamma).
double sign_tolerance(double gamma) {
    return std::max(1e-12, 1e-13 / (1.0 - gamma));
}

bool is_negative(double diff, double gamma, double scale) {
    return diff < -sign_tolerance(gamma) * std::max(1.0, scale);
}

bool within_tie(double diff, double gamma, double scale) {
    return std::abs(diff) <= sign_tolerance(gamma) * std::max(1.0, scale);
}

// Ascending scan grid: 2^-12 steps over [0,1), geometric refinement near 1,
// and the probe itself as the topmost point.
std::vector<double> scan_grid(double probe) {
    std::vector<double> grid;
    grid.reserve(4096 + 10);
    for (int i = 0; i < 4096; ++i) grid.push_back(i * (1.0 / 4096.0));
    for (int k = 13; k <= 20; ++k) grid.push_back(1.0 - std::ldexp(1.0, -k));
    grid.push_back(probe);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

// Largest root of V^beta - V^pi at `state` inside (lo, hi], by bisection on
// the sign predicate; returns the certified non-negative endpoint.
double bisect_crossover(const Mdp& mdp, const Policy& beta, const Policy& pi, int state,
                        double lo, double hi, double tolerance) {
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        const double vb = evaluate(mdp, beta, mid).values[state];
        const double vp = evaluate(mdp, pi, mid).values[state];
        if (is_negative(vb - vp, mid, std::max(std::abs(vb), std::abs(vp))))
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

enum class VectorOrder { equal, first_geq, second_geq, mixed };

VectorOrder compare_state_wise(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol) {
    bool first_above = false, second_above = false;
    for (int s = 0; s < a.size(); ++s) {
        const double d = a[s] - b[s];
        if (d > tol) first_above = true;
        if (d < -tol) second_above = true;
    }
    if (first_above && second_above) return VectorOrder::mixed;
    if (first_above) return VectorOrder::first_geq;
    if (second_above) return VectorOrder::second_geq;
    return VectorOrder::equal;
}

}  // namespace

BlackwellReport find_blackwell(const Mdp& mdp, double tolerance, std::uint64_t cap) {
    if (!(tolerance > 0.0)) throw ValidationError("tolerance must be positive");
    const std::vector<Policy> policies = enumerate_policies(mdp, cap);

    BlackwellReport report;
    const double probes[] = {1.0 - 1e-6, 1.0 - 1e-9};
    for (int attempt = 0; attempt < 2; ++attempt) {
        const double probe = probes[attempt];
        report.beta = optimal_policy(mdp, probe).policy;
        report.gamma_star = 0.0;
        report.crossovers.clear();
        report.certified_grid.clear();

        const std::vector<double> grid = scan_grid(probe);
        std::vector<Eigen::VectorXd> beta_values(grid.size());
        for (std::size_t j = 0; j < grid.size(); ++j)
            beta_values[j] = evaluate(mdp, report.beta, grid[j]).values;

        const int n = mdp.state_count();
        for (const Policy& pi : policies) {
            if (pi == report.beta) continue;
            std::optional<std::pair<double, int>> crossover;  // (gamma, state)
            bool tied_everywhere = true;
            std::vector<bool> negative_above(n, false);
            for (std::size_t jj = grid.size(); jj-- > 0;) {
                const double gamma = grid[jj];
                const Eigen::VectorXd vp = evaluate(mdp, pi, gamma).values;
                bool found_here = false;
                for (int s = 0; s < n; ++s) {
                    const double diff = beta_values[jj][s] - vp[s];
                    const double scale = std::max(std::abs(beta_values[jj][s]), std::abs(vp[s]));
                    if (!within_tie(diff, gamma, scale)) tied_everywhere = false;
                    const bool neg = is_negative(diff, gamma, scale);
                    if (neg && jj + 1 < grid.size() && !negative_above[s]) {
                        const double root = bisect_crossover(mdp, report.beta, pi, s, gamma,
                                                             grid[jj + 1], tolerance);
                        if (!crossover || root > crossover->first) crossover = {root, s};
                        found_here = true;
                    }
                    negative_above[s] = neg;
                }
                if (found_here) break;  // topmost sign change is the largest root
            }
            if (crossover) {
                const auto [gamma_c, state] = *crossover;
                const double gap = std::abs(evaluate(mdp, report.beta, gamma_c).values[state] -
                                            evaluate(mdp, pi, gamma_c).values[state]);
                report.crossovers.push_back({pi, state, gamma_c, gap, false});
                report.gamma_star = std::max(report.gamma_star, gamma_c);
            } else if (tied_everywhere) {
                report.crossovers.push_back({pi, -1, 0.0, 0.0, true});
            }
        }

        // Certify beta's optimality on the decade grid, safely above gamma_star.
        bool failed = false;
        const double margin = std::max(1e-8, 100.0 * tolerance);
        for (int k = 1; k <= 6; ++k) {
            const double g = 1.0 - std::pow(10.0, -k);
            if (g < report.gamma_star + margin) continue;
            const Solution opt = optimal_policy(mdp, g);
            const Eigen::VectorXd vb = evaluate(mdp, report.beta, g).values;
            for (int s = 0; s < n; ++s) {
                const double scale = std::max(1.0, std::abs(opt.values.values[s]));
                if (opt.values.values[s] - vb[s] >
                    std::max(1e-9, sign_tolerance(g)) * scale) {
                    failed = true;
                    break;
                }
            }
            if (failed) break;
            report.certified_grid.push_back(g);
        }
        if (!failed) return report;
        if (attempt == 0) {
            report.warnings.push_back(
                "probe 1-1e-6 lost optimality on the certification grid; refined to 1-1e-9");
        } else {
            throw NumericalError(
                "probe non-stationarity: candidate Blackwell policy fails certification even "
                "at probe 1-1e-9");
        }
    }
    return report;  // unreachable
}

DiscountClassification classify_discount(const BlackwellReport& report, double gamma) {
    if (!(gamma >= 0.0) || !(gamma < 1.0))
        throw ValidationError("gamma must be in [0,1), got " + std::to_string(gamma));
    DiscountClassification out;
    out.gamma = gamma;
    out.gamma_star = report.gamma_star;
    out.verdict = gamma < report.gamma_star ? Verdict::myopic : Verdict::blackwell_realizable;
    return out;
}

DiscountClassification classify_discount(const Mdp& mdp, double gamma, double tolerance,
                                         std::uint64_t cap) {
    return classify_discount(find_blackwell(mdp, tolerance, cap), gamma);
}

OrderingResult compare_n_discount(const Mdp& mdp, const Policy& pi1, const Policy& pi2, int n) {
    if (n < -1) throw ValidationError("n-discount order must be >= -1");
    check_policy(mdp, pi1);
    check_policy(mdp, pi2);

    if (n <= 0) {
        const GainBias gb1 = gain_bias(mdp, pi1);
        const GainBias gb2 = gain_bias(mdp, pi2);
        const double gain_tol =
            1e-9 * std::max({1.0, gb1.gain.lpNorm<Eigen::Infinity>(),
                             gb2.gain.lpNorm<Eigen::Infinity>()});
        if (n == -1) {
            switch (compare_state_wise(gb1.gain, gb2.gain, gain_tol)) {
                case VectorOrder::first_geq: return {Ordering::pi1_better, ""};
                case VectorOrder::second_geq: return {Ordering::pi2_better, ""};
                case VectorOrder::equal: return {Ordering::tied_at_order_n, ""};
                case VectorOrder::mixed:
                    return {Ordering::tied_at_order_n,
                            "gain vectors are not state-wise comparable"};
            }
        }
        // n == 0: per-state lexicographic (gain, then bias).
        const double bias_tol =
            1e-9 * std::max({1.0, gb1.bias.lpNorm<Eigen::Infinity>(),
                             gb2.bias.lpNorm<Eigen::Infinity>()});
        bool first_above = false, second_above = false;
        for (int s = 0; s < mdp.state_count(); ++s) {
            const double dg = gb1.gain[s] - gb2.gain[s];
            const double db = gb1.bias[s] - gb2.bias[s];
            const double d = std::abs(dg) > gain_tol ? dg : (std::abs(db) > bias_tol ? db : 0.0);
            if (d > 0.0) first_above = true;
            if (d < 0.0) second_above = true;
        }
        if (first_above && second_above)
            return {Ordering::tied_at_order_n,
                    "(gain, bias) orderings are not state-wise comparable"};
        if (first_above) return {Ordering::pi1_better, ""};
        if (second_above) return {Ordering::pi2_better, ""};
        return {Ordering::tied_at_order_n, ""};
    }

    // Numeric mode for n >= 1: sign of (1-gamma)^-n (V1 - V2) on a gamma->1 grid.
    std::string note = "order n >= 1 comparison is numeric (gamma -> 1 grid), not exact";
    enum { plus, minus, zero, mixed };
    std::vector<int> verdicts;
    for (int k = 3; k <= 8; ++k) {
        const double gamma = 1.0 - std::pow(10.0, -k);
        const Eigen::VectorXd v1 = evaluate(mdp, pi1, gamma).values;
        const Eigen::VectorXd v2 = evaluate(mdp, pi2, gamma).values;
        const double tol =
            1e-9 * std::max({1.0, v1.lpNorm<Eigen::Infinity>(), v2.lpNorm<Eigen::Infinity>()});
        bool pos = false, neg = false;
        for (int s = 0; s < mdp.state_count(); ++s) {
            const double d = v1[s] - v2[s];
            if (d > tol) pos = true;
            if (d < -tol) neg = true;
        }
        verdicts.push_back(pos && neg ? mixed : pos ? plus : neg ? minus : zero);
    }
    const int last = verdicts[verdicts.size() - 1];
    const bool stable = last != mixed && verdicts[verdicts.size() - 2] == last &&
                        verdicts[verdicts.size() - 3] == last;
    if (!stable)
        return {Ordering::tied_at_order_n, note + "; sign unstable across the last three grid points"};
    if (last == plus) return {Ordering::pi1_better, note};
    if (last == minus) return {Ordering::pi2_better, note};
    return {Ordering::tied_at_order_n, note};
}

}  // namespace blackwell
