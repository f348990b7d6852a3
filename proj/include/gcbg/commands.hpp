#pragma once

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "gcbg/config.hpp"
#include "gcbg/oracle.hpp"
#include "gcbg/solver.hpp"

namespace gcbg {

// Exit-code taxonomy shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;       // unreadable or invalid configuration
inline constexpr int kExitThreshold = 2;    // instance valid, closed form not applicable
inline constexpr int kExitConvergence = 3;  // root finding stalled
inline constexpr int kExitGrid = 4;         // oracle grid unusable at this size
inline constexpr int kExitVerifyFailed = 5; // oracle ran and a check failed

// 17 significant digits: enough for a lossless binary64 round trip.
inline std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct SweepRow {
    double swept_value = 0.0;
    std::vector<double> z_star;  // empty when the threshold failed at this point
    double value_a = 0.0;
    double value_b = 0.0;
    double root_residual = 0.0;
    bool threshold_satisfied = false;
};

// Materializes the instance a config describes, generating valuations from
// (seed, v_n_target) when they are not explicit.
inline GameInstance instance_from_config(const RunConfig& config) {
    std::vector<double> values = config.values;
    if (values.empty()) {
        if (!config.seed.has_value() || !config.v_n_target.has_value())
            throw ValidationError("values are absent and no (seed, v_n_target) pair was given");
        values = generate_random_values(config.n, *config.v_n_target, *config.seed);
    }
    return validate_instance({values, config.resource_a, config.resource_b, config.k},
                             config.auto_normalize);
}

namespace detail {

// Unix line endings regardless of platform, hence binary mode.
inline void write_output(const std::string& path, const std::string& payload) {
    if (path.empty()) {
        std::cout << payload;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open output file '" + path + "'");
    out << payload;
    if (!out) throw Error("failed writing output file '" + path + "'");
}

}  // namespace detail

// Solves one instance and renders the equilibrium as CSV: one row per
// battlefield under its original 1-based index, then a summary block.
// Returns a process exit code; nothing is written unless the solve succeeds.
inline int run_solve(const RunConfig& config, std::ostream& diag = std::cerr) {
    try {
        const GameInstance inst = instance_from_config(config);
        const Equilibrium eq = build_equilibrium(inst);

        std::string csv = "battlefield,value,r_b_star,r_a_star,z_star\n";
        for (std::size_t i = 0; i < inst.n; ++i) {
            csv += std::to_string(inst.permutation[i] + 1);
            csv += ',';
            csv += format_real(inst.values[i]);
            csv += ',';
            csv += format_real(eq.alloc_b.amounts[i]);
            csv += ',';
            csv += format_real(eq.alloc_a.amounts[i]);
            csv += ',';
            csv += format_real(eq.gap.gaps[i]);
            csv += '\n';
        }
        csv += "value_a,value_b,root_residual,Dk_required,Dk_actual\n";
        csv += format_real(eq.value_a);
        csv += ',';
        csv += format_real(eq.value_b);
        csv += ',';
        csv += format_real(eq.root_residual);
        csv += ',';
        csv += format_real(eq.threshold.required_Dk);
        csv += ',';
        csv += format_real(eq.threshold.actual_Dk);
        csv += '\n';

        detail::write_output(config.output_path, csv);
        return kExitOk;
    } catch (const ThresholdError& e) {
        diag << "threshold: " << e.what() << '\n';
        return kExitThreshold;
    } catch (const NoSolutionError& e) {
        diag << "threshold: " << e.what() << '\n';
        return kExitThreshold;
    } catch (const ConvergenceError& e) {
        diag << "convergence: " << e.what() << '\n';
        return kExitConvergence;
    } catch (const Error& e) {
        diag << "config: " << e.what() << '\n';
        return kExitConfig;
    }
}

namespace detail {

inline SweepRow evaluate_sweep_point(const std::vector<double>& values, const RunConfig& config,
                                     double swept) {
    RawInstance raw;
    raw.values = values;
    raw.resource_b = config.resource_b;
    if (config.sweep->parameter == SweepParameter::D) {
        raw.resource_a = config.resource_b + swept;
        raw.k = config.k;
    } else {
        raw.resource_a = config.resource_a;
        raw.k = swept;
    }
    const GameInstance inst = validate_instance(raw, config.auto_normalize);

    SweepRow row;
    row.swept_value = swept;
    row.threshold_satisfied = check_thresholds(inst).satisfied;
    if (!row.threshold_satisfied) return row;  // reported, never dropped

    const Equilibrium eq = build_equilibrium(inst);
    row.z_star.resize(inst.n);
    for (std::size_t i = 0; i < inst.n; ++i)
        row.z_star[inst.permutation[i]] = eq.gap.gaps[i];  // original battlefield order
    row.value_a = eq.value_a;
    row.value_b = eq.value_b;
    row.root_residual = eq.root_residual;
    return row;
}

}  // namespace detail

// Solves the config's instance across an evenly spaced D or k sweep and
// renders one CSV row per point, in sweep order. Points are independent, so
// extra workers only change the schedule, never the bytes written.
inline int run_sweep(const RunConfig& config, std::size_t workers = 1,
                     std::ostream& diag = std::cerr) {
    try {
        if (!config.sweep.has_value())
            throw ValidationError("sweep requested but the config has no sweep_* keys");
        const SweepSpec& sweep = *config.sweep;

        std::vector<double> values = config.values;
        if (values.empty()) {
            if (!config.seed.has_value() || !config.v_n_target.has_value())
                throw ValidationError("values are absent and no (seed, v_n_target) pair was given");
            values = generate_random_values(config.n, *config.v_n_target, *config.seed);
        }

        std::vector<double> points(sweep.count);
        const double span = sweep.stop - sweep.start;
        for (std::size_t j = 0; j < sweep.count; ++j)
            points[j] = sweep.start + span * static_cast<double>(j) /
                                          static_cast<double>(sweep.count - 1);
        points.back() = sweep.stop;

        std::vector<SweepRow> rows(sweep.count);
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto work = [&] {
            for (;;) {
                const std::size_t j = next.fetch_add(1);
                if (j >= points.size()) return;
                try {
                    rows[j] = detail::evaluate_sweep_point(values, config, points[j]);
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        };
        const std::size_t thread_count = std::max<std::size_t>(1, std::min(workers, sweep.count));
        if (thread_count == 1) {
            work();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(thread_count);
            for (std::size_t t = 0; t < thread_count; ++t) pool.emplace_back(work);
            for (std::thread& t : pool) t.join();
        }
        if (failure) std::rethrow_exception(failure);

        std::string csv = "swept_value";
        for (std::size_t i = 1; i <= config.n; ++i) csv += ",z_star_" + std::to_string(i);
        csv += ",value_a,value_b,root_residual,threshold_satisfied\n";
        for (const SweepRow& row : rows) {
            csv += format_real(row.swept_value);
            if (row.threshold_satisfied) {
                for (double z : row.z_star) {
                    csv += ',';
                    csv += format_real(z);
                }
                csv += ',';
                csv += format_real(row.value_a);
                csv += ',';
                csv += format_real(row.value_b);
                csv += ',';
                csv += format_real(row.root_residual);
                csv += ",true\n";
            } else {
                csv.append(config.n + 3, ',');
                csv += ",false\n";
            }
        }

        detail::write_output(config.output_path, csv);
        return kExitOk;
    } catch (const ThresholdError& e) {
        diag << "threshold: " << e.what() << '\n';
        return kExitThreshold;
    } catch (const NoSolutionError& e) {
        diag << "threshold: " << e.what() << '\n';
        return kExitThreshold;
    } catch (const ConvergenceError& e) {
        diag << "convergence: " << e.what() << '\n';
        return kExitConvergence;
    } catch (const Error& e) {
        diag << "config: " << e.what() << '\n';
        return kExitConfig;
    }
}

// Certifies a solved instance against the brute-force oracle. Exit 0 only
// when the grid gap stays within its Lipschitz bound and the stationarity,
// finite-difference agreement, and Hessian checks all pass.
inline int run_verify(const RunConfig& config, double step = 0.0, std::ostream& diag = std::cerr) {
    constexpr std::uint64_t kMaxGridPoints = 10'000'000;
    constexpr double kStationarityTolerance = 1e-8;
    constexpr double kAgreementTolerance = 1e-5;
    try {
        const GameInstance inst = instance_from_config(config);
        if (inst.n > 5) {
            diag << "grid: exhaustive verification supports n <= 5, got n = " << inst.n << '\n';
            return kExitGrid;
        }
        if (!(step > 0.0)) step = inst.resource_a / 200.0;

        const Equilibrium eq = build_equilibrium(inst);
        VerificationReport report;
        try {
            report = verify_equilibrium(eq, inst, step, kMaxGridPoints);
        } catch (const GridTooLargeError& e) {
            std::uint64_t m = detail::units_for(inst.resource_a, step);
            while (m > 1 && composition_count(m, inst.n) > kMaxGridPoints) m /= 2;
            diag << "grid: " << e.what() << "; try --step "
                 << format_real(inst.resource_a / static_cast<double>(m)) << " or larger\n";
            return kExitGrid;
        }

        const std::vector<double> analytical = analytical_gradient(eq.gap, inst);
        const std::vector<double> differenced = finite_diff_gradient(eq.gap, inst);
        double agreement = 0.0;
        for (std::size_t i = 0; i < analytical.size(); ++i)
            agreement = std::max(agreement, std::abs(analytical[i] - differenced[i]));

        double value_sum = 0.0;
        for (double v : inst.values) value_sum += v;
        const double lipschitz_bound = value_sum * inst.k / std::numbers::pi * report.grid_step;

        std::string csv =
            "grid_best_utility,solver_utility,grid_gap,max_gradient_residual,"
            "hessian_negative_definite,grid_step,samples_checked\n";
        csv += format_real(report.grid_best_utility);
        csv += ',';
        csv += format_real(report.solver_utility);
        csv += ',';
        csv += format_real(report.grid_gap);
        csv += ',';
        csv += format_real(report.max_gradient_residual);
        csv += ',';
        csv += report.hessian_negative_definite ? "true" : "false";
        csv += ',';
        csv += format_real(report.grid_step);
        csv += ',';
        csv += std::to_string(report.samples_checked);
        csv += '\n';
        detail::write_output(config.output_path, csv);

        bool ok = true;
        if (!(std::abs(report.grid_gap) <= lipschitz_bound)) {
            diag << "verify: grid gap " << format_real(report.grid_gap)
                 << " exceeds the Lipschitz bound " << format_real(lipschitz_bound) << '\n';
            ok = false;
        }
        if (!(report.max_gradient_residual <= kStationarityTolerance)) {
            diag << "verify: stationarity residual " << format_real(report.max_gradient_residual)
                 << " exceeds " << format_real(kStationarityTolerance) << '\n';
            ok = false;
        }
        if (!(agreement <= kAgreementTolerance)) {
            diag << "verify: analytical and finite-difference gradients disagree by "
                 << format_real(agreement) << ", above " << format_real(kAgreementTolerance) << '\n';
            ok = false;
        }
        if (!report.hessian_negative_definite) {
            diag << "verify: Hessian is not negative definite at the solver's gap\n";
            ok = false;
        }
        return ok ? kExitOk : kExitVerifyFailed;
    } catch (const GridTooLargeError& e) {
        diag << "grid: " << e.what() << '\n';
        return kExitGrid;
    } catch (const GridError& e) {
        diag << "grid: " << e.what() << '\n';
        return kExitGrid;
    } catch (const ThresholdError& e) {
        diag << "threshold: " << e.what() << '\n';
        return kExitThreshold;
    } catch (const NoSolutionError& e) {
        diag << "threshold: " << e.what() << '\n';
        return kExitThreshold;
    } catch (const ConvergenceError& e) {
        diag << "convergence: " << e.what() << '\n';
        return kExitConvergence;
    } catch (const Error& e) {
        diag << "config: " << e.what() << '\n';
        return kExitConfig;
    }
}

// Expands a seeded config into one with explicit valuations. Sweep keys pass
// through, so the output feeds straight into solve or sweep.
inline int run_gen(const RunConfig& config, std::ostream& diag = std::cerr) {
    try {
        if (!config.seed.has_value() || !config.v_n_target.has_value())
            throw ValidationError("gen requires both seed and v_n_target");
        const std::vector<double> values =
            generate_random_values(config.n, *config.v_n_target, *config.seed);

        std::string text = "n = " + std::to_string(config.n) + "\n";
        text += "values = ";
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i != 0) text += ", ";
            text += format_real(values[i]);
        }
        text += "\n";
        text += "resource_a = " + format_real(config.resource_a) + "\n";
        text += "resource_b = " + format_real(config.resource_b) + "\n";
        text += "k = " + format_real(config.k) + "\n";
        if (config.sweep.has_value()) {
            const SweepSpec& sweep = *config.sweep;
            text += std::string("sweep_parameter = ") +
                    (sweep.parameter == SweepParameter::D ? "D" : "k") + "\n";
            text += "sweep_start = " + format_real(sweep.start) + "\n";
            text += "sweep_stop = " + format_real(sweep.stop) + "\n";
            text += "sweep_count = " + std::to_string(sweep.count) + "\n";
        }
        detail::write_output(config.output_path, text);
        return kExitOk;
    } catch (const Error& e) {
        diag << "config: " << e.what() << '\n';
        return kExitConfig;
    }
}

}  // namespace gcbg
