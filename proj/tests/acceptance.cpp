// Acceptance gate for the solver library. Twelve independent checks, one
// PASS/FAIL line each; the binary exits nonzero when any of them fails.
// Every tolerance is pinned here on purpose: none are configurable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gcbg/gcbg.hpp>

#include "golden.hpp"
#include "support.hpp"

namespace {

using gcbg::detail::num;

gcbg::GameInstance golden_instance() {
    return gcbg::validate_instance({{golden::kValues.begin(), golden::kValues.end()},
                                    golden::kResourceA,
                                    golden::kResourceB,
                                    golden::kSmoothing});
}

std::string temp_path(const std::string& name) {
    const std::filesystem::path p = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove(p);
    return p.string();
}

gcbg::RunConfig golden_sweep_config(gcbg::SweepParameter parameter, double start, double stop,
                                    std::size_t count) {
    gcbg::RunConfig config;
    config.n = golden::kValues.size();
    config.values.assign(golden::kValues.begin(), golden::kValues.end());
    config.resource_a = golden::kResourceA;
    config.resource_b = golden::kResourceB;
    config.k = golden::kSmoothing;
    gcbg::SweepSpec sweep;
    sweep.parameter = parameter;
    sweep.start = start;
    sweep.stop = stop;
    sweep.count = count;
    config.sweep = sweep;
    return config;
}

// Column `col` of a sweep CSV, header skipped.
std::vector<double> csv_column(const std::vector<std::string>& lines, std::size_t col) {
    std::vector<double> out;
    for (std::size_t row = 1; row < lines.size(); ++row)
        out.push_back(std::stod(testsup::split_csv_line(lines[row])[col]));
    return out;
}

bool nondecreasing(const std::vector<double>& xs) {
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (xs[i] < xs[i - 1]) return false;
    return true;
}

}  // namespace

int main() {
    int failures = 0;
    int id = 0;
    auto criterion = [&](const char* name, auto&& body) {
        ++id;
        bool ok = false;
        std::string detail;
        try {
            ok = body(detail);
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("unexpected exception: ") + e.what();
        }
        std::printf("%s %2d %-46s %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
        if (!ok) ++failures;
    };

    criterion("constant-sum smooth utilities", [](std::string& detail) {
        std::mt19937_64 rng(9001);
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const gcbg::GameInstance inst = testsup::random_satisfiable_instance(rng);
            for (int pair = 0; pair < 1000; ++pair) {
                const gcbg::Allocation pa =
                    testsup::random_feasible_allocation(rng, inst.resource_a, inst.n, gcbg::Player::a);
                const gcbg::Allocation pb =
                    testsup::random_feasible_allocation(rng, inst.resource_b, inst.n, gcbg::Player::b);
                const double sum =
                    gcbg::approx_utility(pa, pb, inst) + gcbg::approx_utility(pb, pa, inst);
                worst = std::max(worst, std::abs(sum - 1.0));
            }
        }
        detail = "20 instances x 1000 pairs, max |u_a + u_b - 1| = " + num(worst) + " (tol 1e-12)";
        return worst <= 1e-12;
    });

    // One equilibrium per random instance feeds the next three criteria.
    std::mt19937_64 shared_rng(9002);
    std::vector<gcbg::GameInstance> instances;
    std::vector<gcbg::Equilibrium> equilibria;
    std::string shared_error;
    try {
        for (int trial = 0; trial < 50; ++trial) {
            instances.push_back(testsup::random_satisfiable_instance(shared_rng));
            equilibria.push_back(gcbg::build_equilibrium(instances.back()));
        }
    } catch (const std::exception& e) {
        shared_error = std::string("shared instance pool failed: ") + e.what();
    }

    criterion("gap root residual inside its bracket", [&](std::string& detail) {
        if (!shared_error.empty()) {
            detail = shared_error;
            return false;
        }
        double worst = 0.0;
        for (std::size_t t = 0; t < instances.size(); ++t) {
            const gcbg::GameInstance& inst = instances[t];
            const gcbg::Equilibrium& eq = equilibria[t];
            worst = std::max(worst, eq.root_residual);
            const double z_n = eq.gap.gaps.back();
            double denom = 1.0;
            for (std::size_t i = 0; i + 1 < inst.n; ++i)
                denom += std::sqrt(inst.values[i] / inst.min_value());
            const double z_bar = inst.gap_total() / denom;
            if (!(z_n > 0.0 && z_n < z_bar)) {
                detail = "root " + num(z_n) + " escapes (0, " + num(z_bar) + ")";
                return false;
            }
        }
        detail = "50 instances, max residual = " + num(worst) + " (tol 1e-12)";
        return worst <= 1e-12;
    });

    criterion("stationarity of the lifted gaps", [&](std::string& detail) {
        if (!shared_error.empty()) {
            detail = shared_error;
            return false;
        }
        double worst = 0.0;
        for (std::size_t t = 0; t < instances.size(); ++t) {
            const gcbg::GameInstance& inst = instances[t];
            const std::vector<double>& z = equilibria[t].gap.gaps;
            const double k = inst.k;
            const double z_n = z.back();
            const double last = k * inst.min_value() / (k * k * z_n * z_n + 1.0);
            for (std::size_t i = 0; i + 1 < inst.n; ++i) {
                const double zi = z[i];
                const double residual = k * inst.values[i] / (k * k * zi * zi + 1.0) - last;
                worst = std::max(worst, std::abs(residual));
            }
        }
        detail = "max |k v_i/(k^2 z_i^2+1) - k v_n/(k^2 z_n^2+1)| = " + num(worst) + " (tol 1e-8)";
        return worst <= 1e-8;
    });

    criterion("Hessian negative definite at every solution", [&](std::string& detail) {
        if (!shared_error.empty()) {
            detail = shared_error;
            return false;
        }
        for (std::size_t t = 0; t < instances.size(); ++t) {
            if (!gcbg::hessian_definiteness(equilibria[t].gap, instances[t])) {
                detail = "instance " + std::to_string(t) + " is not a strict maximum";
                return false;
            }
        }
        detail = "50 instances";
        return true;
    });

    criterion("grid best response within the Lipschitz bound", [](std::string& detail) {
        std::mt19937_64 rng(9003);
        const auto start = std::chrono::steady_clock::now();
        double worst_ratio = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const gcbg::GameInstance inst = testsup::random_satisfiable_instance(rng, 2, 4);
            const gcbg::Equilibrium eq = gcbg::build_equilibrium(inst);
            const double step = inst.resource_a / 200.0;
            const gcbg::GridBestResponse grid = gcbg::grid_best_response(eq.alloc_b, inst, step);
            double value_sum = 0.0;
            for (double v : inst.values) value_sum += v;
            const double bound = value_sum * inst.k / std::numbers::pi * step;
            const double gap = std::abs(grid.utility - eq.value_a);
            worst_ratio = std::max(worst_ratio, gap / bound);
            if (gap > bound) {
                detail = "grid gap " + num(gap) + " exceeds the bound " + num(bound);
                return false;
            }
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        detail = "10 instances (n <= 4), worst gap/bound = " + num(worst_ratio) + ", " +
                 num(seconds) + " s (cap 20)";
        return seconds <= 20.0;
    });

    criterion("equal valuations collapse to the uniform gap", [](std::string& detail) {
        const std::size_t n = 10;
        const gcbg::GameInstance inst =
            gcbg::validate_instance({std::vector<double>(n, 0.1), 15.0, 10.0, 100.0});
        const gcbg::Equilibrium eq = gcbg::build_equilibrium(inst);
        const double uniform = inst.gap_total() / static_cast<double>(n);
        for (double z : eq.gap.gaps)
            if (z != uniform) {
                detail = "gap " + num(z) + " is not exactly D/n = " + num(uniform);
                return false;
            }
        const double expected =
            0.5 + (1.0 / std::numbers::pi) * std::atan(inst.k * uniform);
        const double error = std::abs(eq.value_a - expected);
        detail = "z = D/n exactly, |value_a - closed form| = " + num(error) + " (tol 1e-14)";
        return error <= 1e-14;
    });

    criterion("winner's advantage and value-invariant family", [&](std::string& detail) {
        if (!shared_error.empty()) {
            detail = shared_error;
            return false;
        }
        for (std::size_t t = 0; t < equilibria.size(); ++t)
            if (!(equilibria[t].value_a > 0.5)) {
                detail = "instance " + std::to_string(t) + " has value_a = " +
                         num(equilibria[t].value_a) + ", not above 1/2";
                return false;
            }
        std::mt19937_64 rng(9004);
        const gcbg::GameInstance inst = golden_instance();
        const gcbg::Equilibrium reference = gcbg::build_equilibrium(inst);
        if (!(reference.value_a > 0.5)) {
            detail = "value_a = " + num(reference.value_a) + " is not above 1/2";
            return false;
        }
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const gcbg::Allocation base =
                testsup::random_full_budget_allocation(rng, inst.resource_b, inst.n, gcbg::Player::b);
            const gcbg::Equilibrium eq = gcbg::build_equilibrium(inst, {}, base);
            worst = std::max(worst, std::abs(eq.value_a - reference.value_a));
            worst = std::max(
                worst, std::abs(gcbg::approx_utility(eq.alloc_a, eq.alloc_b, inst) - eq.value_a));
        }
        detail = "value_a > 1/2 on 51 instances; 20 bases drift " + num(worst) + " (tol 1e-12)";
        return worst <= 1e-12;
    });

    criterion("frozen threshold scalars reproduced", [](std::string& detail) {
        const gcbg::ThresholdReport report = gcbg::check_thresholds(golden_instance());
        const double error = std::abs(report.term_hessian - golden::kTermHessian);
        detail = "|term_hessian - " + num(golden::kTermHessian) + "| = " + num(error) +
                 " (tol 1e-9), D*k = " + num(report.actual_Dk);
        return error <= 1e-9 && report.actual_Dk == 250.0 && report.satisfied;
    });

    criterion("sweeps are monotone in D and in k", [](std::string& detail) {
        std::ostringstream diag;

        gcbg::RunConfig d_config = golden_sweep_config(gcbg::SweepParameter::D, 1.0, 9.0, 17);
        d_config.output_path = temp_path("gcbg_acc_sweep_d.csv");
        if (gcbg::run_sweep(d_config, 1, diag) != gcbg::kExitOk) {
            detail = "D sweep failed: " + diag.str();
            return false;
        }
        const std::vector<std::string> d_lines = testsup::read_lines(d_config.output_path);
        if (d_lines.size() != 18) {
            detail = "D sweep produced " + std::to_string(d_lines.size()) + " lines, expected 18";
            return false;
        }
        for (std::size_t col = 1; col <= 10; ++col)
            if (!nondecreasing(csv_column(d_lines, col))) {
                detail = "z_star_" + std::to_string(col) + " is not nondecreasing in D";
                return false;
            }
        if (!nondecreasing(csv_column(d_lines, 11))) {
            detail = "value_a is not nondecreasing in D";
            return false;
        }
        std::vector<double> value_b = csv_column(d_lines, 12);
        std::reverse(value_b.begin(), value_b.end());
        if (!nondecreasing(value_b)) {
            detail = "value_b is not nonincreasing in D";
            return false;
        }

        gcbg::RunConfig k_config = golden_sweep_config(gcbg::SweepParameter::k, 20.0, 200.0, 17);
        k_config.output_path = temp_path("gcbg_acc_sweep_k.csv");
        if (gcbg::run_sweep(k_config, 1, diag) != gcbg::kExitOk) {
            detail = "k sweep failed: " + diag.str();
            return false;
        }
        const std::vector<std::string> k_lines = testsup::read_lines(k_config.output_path);
        if (!nondecreasing(csv_column(k_lines, 11))) {
            detail = "value_a is not nondecreasing in k";
            return false;
        }
        detail = "17-point D and k sweeps, every tracked column monotone";
        return true;
    });

    criterion("high-k payoffs approach the classical game", [](std::string& detail) {
        const gcbg::GameInstance inst = golden_instance();
        const std::vector<double> ks = {1e2, 1e4, 1e6};
        const double delta = 0.1;
        const std::vector<double> deviations = gcbg::limit_convergence_check(inst, ks, delta);
        if (!nondecreasing({deviations[2], deviations[1], deviations[0]})) {
            detail = "deviations do not shrink as k grows";
            return false;
        }
        const double v_max = inst.values.front();
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const double bound = 1.1 * v_max / (std::numbers::pi * ks[i] * delta);
            if (!(deviations[i] <= bound)) {
                detail = "k = " + num(ks[i]) + ": deviation " + num(deviations[i]) +
                         " above 1.1 v_max/(pi k delta) = " + num(bound);
                return false;
            }
        }
        detail = "deviation at k = 1e6 is " + num(deviations.back());
        return true;
    });

    criterion("analytical and differenced gradients agree", [](std::string& detail) {
        std::mt19937_64 rng(9005);
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const gcbg::GameInstance inst = testsup::random_satisfiable_instance(rng);
            for (int probe = 0; probe < 100; ++probe) {
                gcbg::GapVector gap;
                gap.gaps.resize(inst.n);
                gap.total = 0.0;
                for (double& z : gap.gaps) {
                    z = 0.01 + testsup::unit_draw(rng);
                    gap.total += z;
                }
                const std::vector<double> a = gcbg::analytical_gradient(gap, inst);
                const std::vector<double> d = gcbg::finite_diff_gradient(gap, inst);
                for (std::size_t i = 0; i < a.size(); ++i)
                    worst = std::max(worst, std::abs(a[i] - d[i]));
            }
        }
        detail = "2000 probe points, max disagreement = " + num(worst) + " (tol 1e-5)";
        return worst <= 1e-5;
    });

    criterion("reruns are byte-identical", [](std::string& detail) {
        std::ostringstream diag;
        gcbg::RunConfig config = golden_sweep_config(gcbg::SweepParameter::D, 1.0, 9.0, 17);

        config.output_path = temp_path("gcbg_acc_rerun_1.csv");
        if (gcbg::run_sweep(config, 1, diag) != gcbg::kExitOk) {
            detail = "first run failed: " + diag.str();
            return false;
        }
        const std::string first = testsup::read_file(config.output_path);

        config.output_path = temp_path("gcbg_acc_rerun_2.csv");
        if (gcbg::run_sweep(config, 4, diag) != gcbg::kExitOk) {
            detail = "second run failed: " + diag.str();
            return false;
        }
        const std::string second = testsup::read_file(config.output_path);

        if (first.empty() || first != second) {
            detail = "outputs differ across reruns";
            return false;
        }
        detail = std::to_string(first.size()) + " bytes, 1 worker vs 4 workers";
        return true;
    });

    std::printf("acceptance: %d/%d criteria passed\n", id - failures, id);
    return failures == 0 ? 0 : 1;
}
