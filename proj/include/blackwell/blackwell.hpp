#pragma once

#include <string>
#include <vector>

#include "blackwell/mdp.hpp"
#include "blackwell/solver.hpp"

namespace blackwell {

/// Largest discount at which a competitor overtakes beta at some state, found
/// by sign-change scan plus bisection. Policies whose values coincide with
/// beta's everywhere are recorded as ties with zero-gap markers.
struct CrossoverRecord {
    Policy competitor;
    int state = -1;        // -1 for ties
    double gamma = 0.0;
    double value_gap = 0.0;  // |V^beta - V^competitor| at the reported gamma
    bool tied = false;
};

struct BlackwellReport {
    Policy beta;
    double gamma_star = 0.0;
    std::vector<CrossoverRecord> crossovers;
    std::vector<double> certified_grid;  // gammas where beta's optimality was verified
    std::vector<std::string> warnings;
};

/**
 * Identifies the Blackwell optimal policy and the Blackwell threshold.
 *
 * beta is the discount-optimal policy at the probe 1 - 1e-6 (ties broken
 * lexicographically), re-verified on the grid {1 - 10^-k : k = 1..6}; if the
 * verification fails the probe is refined once to 1 - 1e-9. gamma_star is the
 * largest crossover against any enumerated competitor at any state, located
 * by a sign-change scan on a 2^-12-step grid (refined geometrically near 1)
 * followed by bisection to `tolerance`; 0 when beta dominates on all of [0,1).
 */
BlackwellReport find_blackwell(const Mdp& mdp, double tolerance = 1e-10,
                               std::uint64_t cap = kDefaultPolicyCap);

enum class Verdict { myopic, blackwell_realizable };

struct DiscountClassification {
    double gamma = 0.0;
    Verdict verdict = Verdict::blackwell_realizable;
    double gamma_star = 0.0;
};

/// gamma is myopic iff gamma < gamma_star.
DiscountClassification classify_discount(const Mdp& mdp, double gamma, double tolerance = 1e-10,
                                         std::uint64_t cap = kDefaultPolicyCap);
DiscountClassification classify_discount(const BlackwellReport& report, double gamma);

enum class Ordering { pi1_better, pi2_better, tied_at_order_n };

struct OrderingResult {
    Ordering ordering = Ordering::tied_at_order_n;
    std::string note;  // numeric-mode caveats, incomparability, instability
};

/**
 * n-discount comparison of two policies. Orders n = -1 (gain) and n = 0
 * (gain, then bias) are exact; n >= 1 evaluates (1-gamma)^-n (V1 - V2) on a
 * gamma -> 1 grid and reports the sign if it is stable across the last three
 * grid points, else tied with a stability warning in `note`.
 */
OrderingResult compare_n_discount(const Mdp& mdp, const Policy& pi1, const Policy& pi2, int n);

}  // namespace blackwell
