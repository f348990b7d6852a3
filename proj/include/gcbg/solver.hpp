#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gcbg/game.hpp"

namespace gcbg {

enum class BaseAllocationRule { proportional_to_values, uniform, user_supplied };

struct SolverSettings {
    double root_tolerance = 1e-12;  // on |f_k(z_n) - D|
    int max_iterations = 200;
    BaseAllocationRule base_allocation_rule = BaseAllocationRule::proportional_to_values;
};

// Two lower bounds on D*k that jointly guarantee a unique positive gap root
// with a feasible lift: term_positivity keeps f_k(0) <= D so the positive
// branch carries a root, term_hessian keeps every lifted gap at most R^a.
struct ThresholdReport {
    double term_hessian = 0.0;     // (n-1)/sqrt(v_n (2n-1))
    double term_positivity = 0.0;  // sum_i sqrt((v_i - v_n)/v_n)
    double required_Dk = 0.0;      // max of the two terms
    double actual_Dk = 0.0;        // D * k
    bool satisfied = false;        // actual_Dk >= required_Dk
};

struct Equilibrium {
    GapVector gap;               // z*, sorted-battlefield order
    Allocation alloc_a;          // r^a* = r^b* + z*
    Allocation alloc_b;          // r^b*, one representative of the equilibrium family
    double value_a = 0.0;
    double value_b = 0.0;        // 1 - value_a
    double root_residual = 0.0;  // |f_k(z_n*) - D|
    ThresholdReport threshold;
};

inline ThresholdReport check_thresholds(const GameInstance& inst) {
    const double vn = inst.min_value();
    const double n = static_cast<double>(inst.n);
    ThresholdReport report;
    report.term_hessian = (n - 1.0) / std::sqrt(vn * (2.0 * n - 1.0));
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < inst.n; ++i)
        acc += std::sqrt((inst.values[i] - vn) / vn);
    report.term_positivity = acc;
    report.required_Dk = std::max(report.term_hessian, report.term_positivity);
    report.actual_Dk = inst.gap_total() * inst.k;
    report.satisfied = report.actual_Dk >= report.required_Dk;
    return report;
}

// f_k(z_n) = z_n + sum_{i<n} sqrt((k^2 z_n^2 v_i + v_i - v_n) / (k^2 v_n)).
// Strictly convex; its positive root under f_k(z_n) = D is the equilibrium
// gap on the least-valued battlefield. Radicals with v_i = v_n collapse to
// |z_n| exactly, which keeps tied valuations on the closed form.
inline double f_k_eval(double z_n, const GameInstance& inst) {
    const double vn = inst.min_value();
    const double k2 = inst.k * inst.k;
    double acc = z_n;
    for (std::size_t i = 0; i + 1 < inst.n; ++i) {
        const double vi = inst.values[i];
        if (vi == vn)
            acc += std::abs(z_n);
        else
            acc += std::sqrt((k2 * z_n * z_n * vi + vi - vn) / (k2 * vn));
    }
    return acc;
}

// d f_k / d z_n. Strictly increasing in z_n. Tied valuations contribute
// sign(z_n), the kink that is undefined at z_n = 0.
inline double f_k_derivative(double z_n, const GameInstance& inst) {
    const double vn = inst.min_value();
    const double k2 = inst.k * inst.k;
    double acc = 1.0;
    for (std::size_t i = 0; i + 1 < inst.n; ++i) {
        const double vi = inst.values[i];
        if (vi == vn) {
            if (z_n == 0.0)
                throw SingularityError(
                    "f_k is not differentiable at z_n = 0 when some v_i equals v_n");
            acc += z_n > 0.0 ? 1.0 : -1.0;
            continue;
        }
        const double radical = std::sqrt((k2 * z_n * z_n * vi + vi - vn) / (k2 * vn));
        acc += (vi / vn) * z_n / radical;
    }
    return acc;
}

// Where the upper slant asymptote of f_k meets D: a strict upper bound on the
// positive root, itself strictly below R^a whenever the instance is valid.
inline double asymptote_root(double d, const GameInstance& inst) {
    const double vn = inst.min_value();
    double denom = 1.0;
    for (std::size_t i = 0; i + 1 < inst.n; ++i)
        denom += std::sqrt(inst.values[i] / vn);
    return d / denom;
}

struct FMinimum {
    double z_n_min = 0.0;  // argmin of f_k, never positive
    double d_floor = 0.0;  // f_k(z_n_min); f_k(z_n) = D has no solution for D below it
};

inline FMinimum find_f_minimum(const GameInstance& inst, const SolverSettings& settings = {}) {
    // All valuations equal: f_k(t) = n|t| for t >= 0 and t + (n-1)|t| in
    // general, piecewise linear with its minimum 0 at the kink.
    if (inst.all_values_equal()) return {0.0, 0.0};

    // Partial ties v_i = v_n put a kink at 0 with left slope 1 - #ties <= 0,
    // so the minimum sits exactly on the kink.
    std::size_t ties = 0;
    for (std::size_t i = 0; i + 1 < inst.n; ++i)
        if (inst.values[i] == inst.min_value()) ++ties;
    if (ties > 0) return {0.0, f_k_eval(0.0, inst)};

    // Smooth case: f_k'(0) = 1 > 0 and f_k' tends to 1 - sum sqrt(v_i/v_n) < 0
    // as z_n -> -inf, so a sign change exists left of zero. Expand, then bisect
    // the strictly increasing derivative.
    double hi = 0.0;
    double lo = -1.0 / inst.k;
    int expansions = 0;
    while (f_k_derivative(lo, inst) >= 0.0) {
        lo *= 2.0;
        if (++expansions > 200)
            throw ConvergenceError("failed to bracket the minimum of f_k");
    }
    for (int iter = 0; iter < settings.max_iterations; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;  // bracket collapsed to adjacent doubles
        (f_k_derivative(mid, inst) < 0.0 ? lo : hi) = mid;
    }
    const double z_min = 0.5 * (lo + hi);
    return {z_min, f_k_eval(z_min, inst)};
}

// Unique positive solution of f_k(z_n) = D, found by bisection on the proven
// bracket [0, asymptote_root]. Existence is checked against the minimum of
// f_k first, then the D*k threshold guarantees the root is positive, unique,
// and lifts inside the feasibility window.
inline double solve_gap_root(const GameInstance& inst, const SolverSettings& settings = {}) {
    const double d = inst.gap_total();
    const FMinimum fmin = find_f_minimum(inst, settings);
    if (d < fmin.d_floor)
        throw NoSolutionError("f_k(z_n) = D has no solution: D = " + detail::num(d) +
                              " lies below the minimum of f_k, " + detail::num(fmin.d_floor));
    const ThresholdReport report = check_thresholds(inst);
    if (!report.satisfied)
        throw ThresholdError("D*k = " + detail::num(report.actual_Dk) +
                             " is below the required threshold " + detail::num(report.required_Dk) +
                             "; the closed form does not apply to this instance");

    if (inst.all_values_equal()) return d / static_cast<double>(inst.n);  // f_k(t) = n t here

    double lo = 0.0;                        // f_k(0) <= D under the threshold
    double hi = asymptote_root(d, inst);    // f_k exceeds its asymptote, so f_k(hi) > D
    double best = hi;
    double best_residual = std::abs(f_k_eval(hi, inst) - d);
    for (int iter = 0; iter < settings.max_iterations; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double value = f_k_eval(mid, inst);
        const double residual = std::abs(value - d);
        if (residual < best_residual) {
            best = mid;
            best_residual = residual;
        }
        if (residual <= settings.root_tolerance) return mid;
        (value < d ? lo : hi) = mid;
    }
    if (best_residual <= settings.root_tolerance) return best;
    throw ConvergenceError("bisection stalled at residual " + detail::num(best_residual) +
                           ", above the tolerance " + detail::num(settings.root_tolerance));
}

// Recovers the full gap vector from the last battlefield's gap:
// z_i = sqrt((k^2 z_n^2 v_i + v_i - v_n) / (k^2 v_n)) for i < n. The identity
// k^2 z_i^2 + 1 = (v_i/v_n)(k^2 z_n^2 + 1) then holds by construction, which
// is exactly the stationarity condition of the smooth utility.
inline GapVector lift_gaps(double z_n_star, const GameInstance& inst) {
    const double vn = inst.min_value();
    const double k2 = inst.k * inst.k;
    GapVector gap;
    gap.gaps.resize(inst.n);
    for (std::size_t i = 0; i + 1 < inst.n; ++i) {
        const double vi = inst.values[i];
        gap.gaps[i] = vi == vn
                          ? std::abs(z_n_star)
                          : std::sqrt((k2 * z_n_star * z_n_star * vi + vi - vn) / (k2 * vn));
    }
    gap.gaps[inst.n - 1] = z_n_star;
    gap.total = 0.0;
    for (double z : gap.gaps) gap.total += z;
    return gap;
}

// Every gap strictly positive and at most R^a: the window in which the
// lifted stationary point is a best response the budget can realize.
inline bool check_gap_feasibility(const GapVector& gap, const GameInstance& inst) {
    if (gap.gaps.empty()) return false;
    for (double z : gap.gaps)
        if (!(z > 0.0) || z > inst.resource_a) return false;
    return true;
}

struct GameValue {
    double value_a = 0.0;
    double value_b = 0.0;
};

// V^a = 1/2 + sum_i (v_i/pi) atan(k z_i), V^b = 1 - V^a. The subtraction is
// exact for value_a in [1/2, 1], so the pair sums to 1 exactly.
inline GameValue game_value(const GapVector& gap, const GameInstance& inst) {
    if (gap.gaps.size() != inst.n)
        throw DimensionError("gap vector length does not match the instance");
    double acc = 0.5;
    for (std::size_t i = 0; i < inst.n; ++i)
        acc += (inst.values[i] / std::numbers::pi) * std::atan(inst.k * gap.gaps[i]);
    return {acc, 1.0 - acc};
}

// Solves the instance and assembles one equilibrium of the family
// r^a* = r^b* + z*, where r^b* is base_b when given, otherwise built from
// settings.base_allocation_rule. Every member of the family shares z* and
// therefore the game value.
inline Equilibrium build_equilibrium(const GameInstance& inst, const SolverSettings& settings = {},
                                     const std::optional<Allocation>& base_b = std::nullopt) {
    Allocation alloc_b;
    alloc_b.owner = Player::b;
    if (base_b.has_value()) {
        if (base_b->amounts.size() != inst.n)
            throw BaseAllocationError("base allocation has " + std::to_string(base_b->amounts.size()) +
                                      " entries, instance has " + std::to_string(inst.n));
        double sum = 0.0;
        for (double r : base_b->amounts) {
            if (!(r >= 0.0))
                throw BaseAllocationError("base allocation entries must be nonnegative");
            sum += r;
        }
        if (std::abs(sum - inst.resource_b) > 1e-9 * std::max(1.0, inst.resource_b))
            throw BaseAllocationError("base allocation spends " + detail::num(sum) +
                                      ", the full budget R^b = " + detail::num(inst.resource_b) +
                                      " is required");
        alloc_b.amounts = base_b->amounts;
    } else {
        alloc_b.amounts.resize(inst.n);
        switch (settings.base_allocation_rule) {
            case BaseAllocationRule::proportional_to_values:
                for (std::size_t i = 0; i < inst.n; ++i)
                    alloc_b.amounts[i] = inst.values[i] * inst.resource_b;
                break;
            case BaseAllocationRule::uniform:
                for (std::size_t i = 0; i < inst.n; ++i)
                    alloc_b.amounts[i] = inst.resource_b / static_cast<double>(inst.n);
                break;
            case BaseAllocationRule::user_supplied:
                throw BaseAllocationError("user_supplied rule selected but no base allocation given");
        }
    }

    const double z_n_star = solve_gap_root(inst, settings);
    GapVector gap = lift_gaps(z_n_star, inst);
    if (!check_gap_feasibility(gap, inst))
        throw Error("internal: lifted gaps violate feasibility despite a satisfied threshold");

    Equilibrium eq;
    eq.threshold = check_thresholds(inst);
    eq.root_residual = std::abs(f_k_eval(z_n_star, inst) - inst.gap_total());
    eq.alloc_b = std::move(alloc_b);
    eq.alloc_a.owner = Player::a;
    eq.alloc_a.amounts.resize(inst.n);
    for (std::size_t i = 0; i < inst.n; ++i)
        eq.alloc_a.amounts[i] = eq.alloc_b.amounts[i] + gap.gaps[i];
    const GameValue value = game_value(gap, inst);
    eq.value_a = value.value_a;
    eq.value_b = value.value_b;
    eq.gap = std::move(gap);
    return eq;
}

}  // namespace gcbg
