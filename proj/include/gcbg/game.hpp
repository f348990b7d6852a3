#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "gcbg/errors.hpp"

namespace gcbg {

namespace detail {

inline std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

}  // namespace detail

enum class Player { a, b };

inline constexpr double kValueSumTolerance = 1e-12;

// Canonical two-player constant-sum allocation game: valuations sorted
// non-increasing and summing to one, player a holding the larger budget.
// Build through validate_instance(); the solver assumes these invariants.
struct GameInstance {
    std::size_t n = 0;
    std::vector<double> values;            // v_1 >= ... >= v_n, each > 0
    double resource_a = 0.0;               // R^a, the larger budget
    double resource_b = 0.0;               // R^b
    double k = 0.0;                        // smoothing index of the payoff
    std::vector<std::size_t> permutation;  // permutation[i] = original index of sorted slot i
    bool players_swapped = false;          // input had R^b > R^a, labels were exchanged

    double gap_total() const { return resource_a - resource_b; }  // D
    double min_value() const { return values.back(); }            // v_n
    bool all_values_equal() const { return values.front() == values.back(); }
};

struct Allocation {
    std::vector<double> amounts;  // one entry per battlefield, each >= 0
    Player owner = Player::a;
};

// Per-battlefield allocation differences z_i = r_i^a - r_i^b.
struct GapVector {
    std::vector<double> gaps;
    double total = 0.0;  // D for gaps produced by the solver
};

// Unvalidated input record.
struct RawInstance {
    std::vector<double> values;
    double resource_a = 0.0;
    double resource_b = 0.0;
    double k = 0.0;
};

inline GameInstance validate_instance(const RawInstance& raw, bool auto_normalize = false) {
    const std::size_t n = raw.values.size();
    if (n < 2)
        throw ValidationError("instance needs at least 2 battlefields, got " + std::to_string(n));
    for (double v : raw.values)
        if (!std::isfinite(v) || v <= 0.0)
            throw ValuationError("every valuation must be a positive finite real, got " + detail::num(v));

    std::vector<double> values = raw.values;
    const double sum = std::accumulate(values.begin(), values.end(), 0.0);
    if (auto_normalize) {
        for (double& v : values) v /= sum;
    } else if (std::abs(sum - 1.0) > kValueSumTolerance) {
        throw NormalizationError("valuations sum to " + detail::num(sum) +
                                 ", expected 1 (set auto_normalize to rescale)");
    }

    if (!std::isfinite(raw.k) || raw.k <= 0.0)
        throw ValidationError("smoothing index k must be positive, got " + detail::num(raw.k));

    double ra = raw.resource_a;
    double rb = raw.resource_b;
    if (!std::isfinite(ra) || !std::isfinite(rb) || ra < 0.0 || rb < 0.0)
        throw ValidationError("resource totals must be nonnegative finite reals");
    const bool swapped = rb > ra;
    if (swapped) std::swap(ra, rb);

    const double d = ra - rb;
    if (d <= 0.0)
        throw ResourceBoundError("budgets are equal: the budget difference D must be strictly positive");
    if (d >= (static_cast<double>(n) - 1.0) * rb)
        throw ResourceBoundError("budget difference D = " + detail::num(d) +
                                 " must stay below (n-1) R^b = " +
                                 detail::num((static_cast<double>(n) - 1.0) * rb));

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::stable_sort(perm.begin(), perm.end(),
                     [&values](std::size_t l, std::size_t r) { return values[l] > values[r]; });
    std::vector<double> sorted(n);
    for (std::size_t i = 0; i < n; ++i) sorted[i] = values[perm[i]];

    GameInstance inst;
    inst.n = n;
    inst.values = std::move(sorted);
    inst.resource_a = ra;
    inst.resource_b = rb;
    inst.k = raw.k;
    inst.permutation = std::move(perm);
    inst.players_swapped = swapped;
    return inst;
}

// Winner-take-all payoff with split ties. Ties compare exactly; this path is
// the reference the smooth payoff is checked against, not a solver input.
inline double classical_battlefield_payoff(double r_own, double r_opp, double v) {
    if (r_own > r_opp) return v;
    if (r_own == r_opp) return 0.5 * v;
    return 0.0;
}

// Smooth stand-in for the step payoff: (v/pi) atan(k (r_own - r_opp)) + v/2.
// Approaches the classical payoff pointwise as k grows, except on ties.
inline double approx_battlefield_payoff(double r_own, double r_opp, double v, double k) {
    return (v / std::numbers::pi) * std::atan(k * (r_own - r_opp)) + 0.5 * v;
}

inline double classical_utility(const Allocation& own, const Allocation& opp,
                                const GameInstance& inst) {
    if (own.amounts.size() != inst.n || opp.amounts.size() != inst.n)
        throw DimensionError("allocation length does not match the instance");
    double acc = 0.0;
    for (std::size_t i = 0; i < inst.n; ++i)
        acc += classical_battlefield_payoff(own.amounts[i], opp.amounts[i], inst.values[i]);
    return acc;
}

// Sum of smooth battlefield payoffs; together with the opponent's utility it
// sums to 1 up to rounding, which is what makes the game constant sum.
inline double approx_utility(const Allocation& own, const Allocation& opp,
                             const GameInstance& inst) {
    if (own.amounts.size() != inst.n || opp.amounts.size() != inst.n)
        throw DimensionError("allocation length does not match the instance");
    double acc = 0.0;
    for (std::size_t i = 0; i < inst.n; ++i)
        acc += approx_battlefield_payoff(own.amounts[i], opp.amounts[i], inst.values[i], inst.k);
    return acc;
}

}  // namespace gcbg
