#pragma once

// Shared helpers for the test suites: deterministic random instances,
// feasible allocations, and a small CSV reader.

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gcbg/gcbg.hpp>

namespace testsup {

inline double unit_draw(std::mt19937_64& rng) {  // (0, 1]
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

// Random canonical instance whose D*k threshold is satisfied by construction,
// with distinct valuations and a budget difference well inside (0, (n-1) R^b).
inline gcbg::GameInstance random_satisfiable_instance(std::mt19937_64& rng, std::size_t n_min = 2,
                                                      std::size_t n_max = 8) {
    const std::size_t n = n_min + static_cast<std::size_t>(rng() % (n_max - n_min + 1));
    std::vector<double> values(n);
    double sum = 0.0;
    for (double& v : values) {
        v = 0.05 + unit_draw(rng);
        sum += v;
    }
    for (double& v : values) v /= sum;

    const double rb = 1.0 + 9.0 * unit_draw(rng);
    const double d = (0.1 + 0.5 * unit_draw(rng)) * (static_cast<double>(n) - 1.0) * rb;
    gcbg::RawInstance raw{values, rb + d, rb, 1.0};
    gcbg::GameInstance probe = gcbg::validate_instance(raw);
    const double required = gcbg::check_thresholds(probe).required_Dk;
    raw.k = std::max(1.0, required / d * (1.5 + 2.0 * unit_draw(rng)));
    return gcbg::validate_instance(raw);
}

// Allocation spending at most the budget.
inline gcbg::Allocation random_feasible_allocation(std::mt19937_64& rng, double budget,
                                                   std::size_t n, gcbg::Player owner) {
    gcbg::Allocation alloc;
    alloc.owner = owner;
    alloc.amounts.resize(n);
    double sum = 0.0;
    for (double& r : alloc.amounts) {
        r = unit_draw(rng);
        sum += r;
    }
    const double scale = budget * unit_draw(rng) / sum;
    for (double& r : alloc.amounts) r *= scale;
    return alloc;
}

// Allocation spending the budget in full, up to rounding.
inline gcbg::Allocation random_full_budget_allocation(std::mt19937_64& rng, double budget,
                                                      std::size_t n, gcbg::Player owner) {
    gcbg::Allocation alloc;
    alloc.owner = owner;
    alloc.amounts.resize(n);
    double sum = 0.0;
    for (double& r : alloc.amounts) {
        r = unit_draw(rng);
        sum += r;
    }
    for (double& r : alloc.amounts) r *= budget / sum;
    return alloc;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

inline std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace testsup
