#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "gcbg/game.hpp"
#include "gcbg/solver.hpp"

namespace gcbg {

// Findings of one oracle pass over a solved instance. Pass tolerances are
// owned by the caller; the report only carries measurements.
struct VerificationReport {
    double grid_best_utility = 0.0;
    double solver_utility = 0.0;
    double grid_gap = 0.0;  // grid_best_utility - solver_utility
    double max_gradient_residual = 0.0;
    bool hessian_negative_definite = false;
    double grid_step = 0.0;
    std::uint64_t samples_checked = 0;
};

// Number of weak compositions of total_units into parts nonnegative terms,
// C(total_units + parts - 1, parts - 1). Saturates at UINT64_MAX.
inline std::uint64_t composition_count(std::uint64_t total_units, std::size_t parts) {
    unsigned __int128 c = 1;
    for (std::size_t j = 1; j < parts; ++j) {
        c = c * (total_units + j) / j;  // exact: each prefix is itself a binomial
        if (c > std::numeric_limits<std::uint64_t>::max())
            return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(c);
}

// Visits every weak composition of total_units into parts terms in
// lexicographically ascending order. The visitor sees one reused buffer.
template <class Visitor>
inline void for_each_composition(std::uint64_t total_units, std::size_t parts, Visitor&& visit) {
    if (parts == 0) return;
    std::vector<std::uint64_t> units(parts, 0);
    auto recurse = [&](auto&& self, std::size_t pos, std::uint64_t remaining) -> void {
        if (pos + 1 == parts) {
            units[pos] = remaining;
            visit(static_cast<const std::vector<std::uint64_t>&>(units));
            return;
        }
        for (std::uint64_t c = 0; c <= remaining; ++c) {
            units[pos] = c;
            self(self, pos + 1, remaining - c);
        }
    };
    recurse(recurse, 0, total_units);
}

namespace detail {

// total/step must be an integer; the grid bookkeeping is exact in that unit.
inline std::uint64_t units_for(double total, double step) {
    if (!(step > 0.0)) throw GridError("grid step must be positive, got " + num(step));
    const double ratio = total / step;
    const double rounded = std::round(ratio);
    if (rounded < 0.0 || std::abs(ratio - rounded) > 1e-9)
        throw GridError("total/step = " + num(ratio) + " is not an integer");
    return static_cast<std::uint64_t>(rounded);
}

}  // namespace detail

// Streams every allocation of `total` across n battlefields in multiples of
// `step`, in lexicographically ascending order. Sums are exact in units of
// the step. The visitor sees one reused amounts buffer.
template <class Visitor>
inline void enumerate_simplex_grid(double total, std::size_t n, double step, Visitor&& visit) {
    const std::uint64_t m = detail::units_for(total, step);
    std::vector<double> amounts(n, 0.0);
    for_each_composition(m, n, [&](const std::vector<std::uint64_t>& units) {
        for (std::size_t i = 0; i < n; ++i)
            amounts[i] = static_cast<double>(units[i]) * step;
        visit(static_cast<const std::vector<double>&>(amounts));
    });
}

struct GridBestResponse {
    Allocation best;
    double utility = 0.0;
    std::uint64_t points = 0;
};

// Exhaustive best response for player a on the step grid against a fixed
// opponent. Strict improvement keeps the first maximizer, so ties resolve to
// the lexicographically smallest point.
inline GridBestResponse grid_best_response(const Allocation& opp, const GameInstance& inst,
                                           double step, std::uint64_t max_points = 10'000'000) {
    if (opp.amounts.size() != inst.n)
        throw DimensionError("opponent allocation length does not match the instance");
    const std::uint64_t m = detail::units_for(inst.resource_a, step);
    const std::uint64_t count = composition_count(m, inst.n);
    if (count > max_points)
        throw GridTooLargeError("grid holds " + std::to_string(count) +
                                    " points, above the cap of " + std::to_string(max_points),
                                count);

    GridBestResponse out;
    out.best.owner = Player::a;
    out.points = count;
    double best_utility = -std::numeric_limits<double>::infinity();
    std::vector<double> best_amounts;
    enumerate_simplex_grid(inst.resource_a, inst.n, step, [&](const std::vector<double>& amounts) {
        double u = 0.0;
        for (std::size_t i = 0; i < inst.n; ++i)
            u += approx_battlefield_payoff(amounts[i], opp.amounts[i], inst.values[i], inst.k);
        if (u > best_utility) {
            best_utility = u;
            best_amounts = amounts;
        }
    });
    out.best.amounts = std::move(best_amounts);
    out.utility = best_utility;
    return out;
}

// Gradient of the reduced smooth utility, the n-1 free gap coordinates with
// z_n eliminated through the fixed total:
// g_i = (1/pi) (k v_i/(k^2 z_i^2 + 1) - k v_n/(k^2 z_n^2 + 1)).
inline std::vector<double> analytical_gradient(const GapVector& gap, const GameInstance& inst) {
    if (gap.gaps.size() != inst.n)
        throw DimensionError("gap vector length does not match the instance");
    const double k = inst.k;
    const double z_n = gap.gaps[inst.n - 1];
    const double last = k * inst.min_value() / (k * k * z_n * z_n + 1.0);
    std::vector<double> grad(inst.n - 1);
    for (std::size_t i = 0; i + 1 < inst.n; ++i) {
        const double zi = gap.gaps[i];
        grad[i] = (k * inst.values[i] / (k * k * zi * zi + 1.0) - last) / std::numbers::pi;
    }
    return grad;
}

// Central differences of the same reduced utility, the independent
// cross-check for analytical_gradient.
inline std::vector<double> finite_diff_gradient(const GapVector& gap, const GameInstance& inst,
                                                double h = 1e-6) {
    if (gap.gaps.size() != inst.n)
        throw DimensionError("gap vector length does not match the instance");
    if (!(h > 0.0)) throw RangeError("finite-difference step must be positive");
    auto reduced = [&](const std::vector<double>& z_free) {
        double z_n = gap.total;
        double acc = 0.5;
        for (std::size_t i = 0; i + 1 < inst.n; ++i) {
            acc += (inst.values[i] / std::numbers::pi) * std::atan(inst.k * z_free[i]);
            z_n -= z_free[i];
        }
        return acc + (inst.min_value() / std::numbers::pi) * std::atan(inst.k * z_n);
    };
    std::vector<double> z(gap.gaps.begin(), gap.gaps.end() - 1);
    std::vector<double> grad(inst.n - 1);
    for (std::size_t i = 0; i + 1 < inst.n; ++i) {
        const double original = z[i];
        z[i] = original + h;
        const double up = reduced(z);
        z[i] = original - h;
        const double down = reduced(z);
        z[i] = original;
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

// Assembles the closed-form (n-1)x(n-1) Hessian of the reduced utility at a
// stationary gap and reports whether it is negative definite, decided by the
// signs of the symmetric elimination pivots.
inline bool hessian_definiteness(const GapVector& gap, const GameInstance& inst) {
    const std::vector<double> grad = analytical_gradient(gap, inst);
    double residual = 0.0;
    for (double g : grad) residual = std::max(residual, std::abs(g));
    if (residual > 1e-6)
        throw StationarityError("gradient residual " + detail::num(residual) +
                                " is too large: definiteness is only meaningful at a stationary point");

    const std::size_t m = inst.n - 1;
    const double k = inst.k;
    const double k3 = k * k * k;
    const double z_n = gap.gaps[inst.n - 1];
    const double den_n = k * k * z_n * z_n + 1.0;
    // Every entry shares the curvature of the eliminated coordinate; the
    // diagonal adds the coordinate's own curvature.
    const double off = -(2.0 * k3 * inst.min_value() * z_n) / (std::numbers::pi * den_n * den_n);
    std::vector<std::vector<double>> h(m, std::vector<double>(m, off));
    for (std::size_t i = 0; i < m; ++i) {
        const double zi = gap.gaps[i];
        const double den = k * k * zi * zi + 1.0;
        h[i][i] = off - (2.0 * k3 * inst.values[i] * zi) / (std::numbers::pi * den * den);
    }

    for (std::size_t col = 0; col < m; ++col) {
        const double pivot = h[col][col];
        if (!(pivot < 0.0)) return false;
        for (std::size_t row = col + 1; row < m; ++row) {
            const double factor = h[row][col] / pivot;
            for (std::size_t c = col; c < m; ++c)
                h[row][c] -= factor * h[col][c];
        }
    }
    return true;
}

// Worst |approx - classical| payoff deviation over sampled pairs whose
// allocation difference stays at least delta away from a tie, one entry per
// k in the sequence. Sampling is seeded internally, so results are
// reproducible. The deviation obeys the bound v/(pi k delta).
inline std::vector<double> limit_convergence_check(const GameInstance& inst,
                                                   const std::vector<double>& k_sequence,
                                                   double delta) {
    if (!(delta > 0.0)) throw RangeError("delta must be positive");
    std::mt19937_64 rng(0x743d1f0cULL);
    auto unit = [&rng] { return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53; };

    constexpr int samples = 256;
    std::vector<double> offsets(samples);
    std::vector<double> bases(samples);
    std::vector<int> signs(samples);
    offsets[0] = delta;  // the boundary case, where the bound is tightest
    bases[0] = 1.0;
    signs[0] = 1;
    for (int s = 1; s < samples; ++s) {
        offsets[s] = delta * (1.0 + 9.0 * unit());
        bases[s] = 10.0 * unit();
        signs[s] = unit() < 0.5 ? -1 : 1;
    }

    std::vector<double> out;
    out.reserve(k_sequence.size());
    for (double k : k_sequence) {
        double worst = 0.0;
        for (double v : inst.values) {
            for (int s = 0; s < samples; ++s) {
                const double z = signs[s] * offsets[s];
                const double r_opp = z >= 0.0 ? bases[s] : bases[s] - z;
                const double r_own = r_opp + z;
                const double deviation = std::abs(approx_battlefield_payoff(r_own, r_opp, v, k) -
                                                  classical_battlefield_payoff(r_own, r_opp, v));
                worst = std::max(worst, deviation);
            }
        }
        out.push_back(worst);
    }
    return out;
}

// One-stop certification of a solved equilibrium: grid best response against
// the solver's opponent allocation, stationarity residual, and Hessian
// definiteness. max_gradient_residual carries the stationarity residual; the
// finite-difference agreement check lives with the caller.
inline VerificationReport verify_equilibrium(const Equilibrium& eq, const GameInstance& inst,
                                             double step, std::uint64_t max_points = 10'000'000) {
    VerificationReport report;
    report.grid_step = step;
    const GridBestResponse grid = grid_best_response(eq.alloc_b, inst, step, max_points);
    report.grid_best_utility = grid.utility;
    report.solver_utility = eq.value_a;
    report.grid_gap = grid.utility - eq.value_a;
    report.samples_checked = grid.points;
    const std::vector<double> grad = analytical_gradient(eq.gap, inst);
    for (double g : grad)
        report.max_gradient_residual = std::max(report.max_gradient_residual, std::abs(g));
    report.hessian_negative_definite = hessian_definiteness(eq.gap, inst);
    return report;
}

}  // namespace gcbg
