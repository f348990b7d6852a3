#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gcbg/game.hpp"

namespace gcbg {

enum class SweepParameter { D, k };

struct SweepSpec {
    SweepParameter parameter = SweepParameter::D;
    double start = 0.0;
    double stop = 0.0;
    std::size_t count = 0;
};

// One parsed run description. values may be empty, in which case they are
// generated from (seed, v_n_target) when the instance is materialized.
struct RunConfig {
    std::size_t n = 0;
    std::vector<double> values;
    double resource_a = 0.0;
    double resource_b = 0.0;
    double k = 0.0;
    std::optional<SweepSpec> sweep;
    std::optional<std::uint64_t> seed;
    std::optional<double> v_n_target;
    std::string output_path;  // empty: write to stdout
    bool auto_normalize = false;
};

// Deterministic valuation generator: n-1 uniform draws are shifted above
// v_n_target and rescaled so the full sequence sums to 1, then sorted
// non-increasing with v_n_target appended as the exact minimum. Uses the raw
// engine output directly, so the sequence is identical on every platform.
inline std::vector<double> generate_random_values(std::size_t n, double v_n_target,
                                                  std::uint64_t seed) {
    if (n < 2)
        throw RangeError("need at least 2 battlefields, got " + std::to_string(n));
    if (!(v_n_target > 0.0) || !(v_n_target < 1.0 / static_cast<double>(n)))
        throw RangeError("v_n_target = " + detail::num(v_n_target) +
                         " must lie in (0, 1/n); nothing above it could sum to 1 otherwise");

    std::mt19937_64 rng(seed);
    auto unit = [&rng] {  // (0, 1]
        return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
    };

    std::vector<double> draws(n - 1);
    double draw_sum = 0.0;
    for (double& u : draws) {
        u = unit();
        draw_sum += u;
    }
    const double spare = 1.0 - static_cast<double>(n) * v_n_target;
    std::vector<double> values(n);
    for (std::size_t i = 0; i + 1 < n; ++i)
        values[i] = v_n_target + spare * (draws[i] / draw_sum);
    std::sort(values.begin(), values.end() - 1, std::greater<>());
    values[n - 1] = v_n_target;
    return values;
}

namespace detail {

inline std::string trim(std::string_view s) {
    const char* ws = " \t\r\n";
    const auto begin = s.find_first_not_of(ws);
    if (begin == std::string_view::npos) return {};
    const auto end = s.find_last_not_of(ws);
    return std::string(s.substr(begin, end - begin + 1));
}

inline double parse_real(const std::string& text, const std::string& key, int line) {
    try {
        std::size_t consumed = 0;
        const double value = std::stod(text, &consumed);
        if (consumed == text.size()) return value;
    } catch (const std::exception&) {
    }
    throw ParseError("line " + std::to_string(line) + ": '" + text + "' is not a real number (key '" +
                         key + "')",
                     line);
}

inline std::uint64_t parse_unsigned(const std::string& text, const std::string& key, int line) {
    if (!text.empty() && text.front() != '-') {
        try {
            std::size_t consumed = 0;
            const std::uint64_t value = std::stoull(text, &consumed);
            if (consumed == text.size()) return value;
        } catch (const std::exception&) {
        }
    }
    throw ParseError("line " + std::to_string(line) + ": '" + text +
                         "' is not a nonnegative integer (key '" + key + "')",
                     line);
}

inline bool parse_bool(const std::string& text, const std::string& key, int line) {
    if (text == "true") return true;
    if (text == "false") return false;
    throw ParseError("line " + std::to_string(line) + ": '" + text + "' must be true or false (key '" +
                         key + "')",
                     line);
}

inline std::vector<double> parse_real_list(const std::string& text, const std::string& key,
                                           int line) {
    std::vector<double> out;
    std::string item;
    std::istringstream stream(text);
    while (std::getline(stream, item, ',')) {
        const std::string trimmed = trim(item);
        if (trimmed.empty())
            throw ParseError("line " + std::to_string(line) + ": empty entry in '" + key + "'", line);
        out.push_back(parse_real(trimmed, key, line));
    }
    if (out.empty())
        throw ParseError("line " + std::to_string(line) + ": '" + key + "' holds no entries", line);
    return out;
}

}  // namespace detail

// Parses the flat "key = value" config dialect: one pair per line, '#' opens
// a comment, lists are comma separated. Unknown and duplicate keys are
// rejected with their line number. The result is fully validated, including
// the game instance itself whenever values are explicit.
inline RunConfig parse_config(const std::string& text) {
    static const char* const known_keys[] = {
        "n",           "values",      "resource_a",  "resource_b",  "k",
        "sweep_parameter", "sweep_start", "sweep_stop",  "sweep_count", "seed",
        "v_n_target",  "auto_normalize", "output_path",
    };

    struct Entry {
        std::string value;
        int line = 0;
    };
    std::map<std::string, Entry> entries;

    std::istringstream stream(text);
    std::string raw_line;
    int line_no = 0;
    while (std::getline(stream, raw_line)) {
        ++line_no;
        const auto hash = raw_line.find('#');
        if (hash != std::string::npos) raw_line.erase(hash);
        const std::string line = detail::trim(raw_line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'", line_no);
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'", line_no);
        if (std::none_of(std::begin(known_keys), std::end(known_keys),
                         [&key](const char* k) { return key == k; }))
            throw ParseError("line " + std::to_string(line_no) + ": unknown key '" + key + "'",
                             line_no);
        if (!entries.emplace(key, Entry{value, line_no}).second)
            throw ParseError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'",
                             line_no);
    }

    auto has = [&entries](const std::string& key) { return entries.count(key) != 0; };
    auto get = [&entries](const std::string& key) -> const Entry& { return entries.at(key); };
    for (const char* required : {"n", "resource_a", "resource_b", "k"})
        if (!has(required))
            throw ParseError(std::string("missing required key '") + required + "'");

    RunConfig config;
    {
        const Entry& e = get("n");
        const std::uint64_t n = detail::parse_unsigned(e.value, "n", e.line);
        if (n < 2)
            throw ParseError("line " + std::to_string(e.line) + ": n must be at least 2", e.line);
        config.n = static_cast<std::size_t>(n);
    }
    config.resource_a = detail::parse_real(get("resource_a").value, "resource_a", get("resource_a").line);
    config.resource_b = detail::parse_real(get("resource_b").value, "resource_b", get("resource_b").line);
    config.k = detail::parse_real(get("k").value, "k", get("k").line);

    if (has("values")) {
        const Entry& e = get("values");
        config.values = detail::parse_real_list(e.value, "values", e.line);
        if (config.values.size() != config.n)
            throw ParseError("line " + std::to_string(e.line) + ": expected " +
                                 std::to_string(config.n) + " values, got " +
                                 std::to_string(config.values.size()),
                             e.line);
    }
    if (has("seed"))
        config.seed = detail::parse_unsigned(get("seed").value, "seed", get("seed").line);
    if (has("v_n_target"))
        config.v_n_target = detail::parse_real(get("v_n_target").value, "v_n_target", get("v_n_target").line);
    if (has("auto_normalize"))
        config.auto_normalize = detail::parse_bool(get("auto_normalize").value, "auto_normalize",
                                                   get("auto_normalize").line);
    if (has("output_path")) config.output_path = get("output_path").value;

    const bool any_sweep = has("sweep_parameter") || has("sweep_start") || has("sweep_stop") ||
                           has("sweep_count");
    if (any_sweep) {
        for (const char* key : {"sweep_parameter", "sweep_start", "sweep_stop", "sweep_count"})
            if (!has(key))
                throw ParseError(std::string("sweep requested but key '") + key + "' is missing");
        SweepSpec sweep;
        const Entry& par = get("sweep_parameter");
        if (par.value == "D")
            sweep.parameter = SweepParameter::D;
        else if (par.value == "k")
            sweep.parameter = SweepParameter::k;
        else
            throw ParseError("line " + std::to_string(par.line) + ": sweep_parameter must be D or k",
                             par.line);
        sweep.start = detail::parse_real(get("sweep_start").value, "sweep_start", get("sweep_start").line);
        sweep.stop = detail::parse_real(get("sweep_stop").value, "sweep_stop", get("sweep_stop").line);
        const Entry& cnt = get("sweep_count");
        const std::uint64_t count = detail::parse_unsigned(cnt.value, "sweep_count", cnt.line);
        if (count < 2)
            throw ParseError("line " + std::to_string(cnt.line) + ": sweep_count must be at least 2",
                             cnt.line);
        sweep.count = static_cast<std::size_t>(count);
        if (!(sweep.start < sweep.stop))
            throw ParseError("sweep_start must be strictly below sweep_stop");
        if (!(sweep.start > 0.0))
            throw ParseError("sweep_start must be positive: both D and k are");
        if (sweep.parameter == SweepParameter::D &&
            sweep.stop >= (static_cast<double>(config.n) - 1.0) * config.resource_b)
            throw ParseError("sweep_stop = " + detail::num(sweep.stop) +
                             " leaves the admissible interval D < (n-1) R^b = " +
                             detail::num((static_cast<double>(config.n) - 1.0) * config.resource_b));
        config.sweep = sweep;
    }

    if (config.values.empty()) {
        if (!config.seed.has_value() || !config.v_n_target.has_value())
            throw ParseError("values are absent: seed and v_n_target are required to generate them");
    } else {
        // The instance itself must be sound; sweeps validate against their
        // first point since it overrides the fixed D or k.
        RawInstance raw;
        raw.values = config.values;
        raw.resource_b = config.resource_b;
        raw.resource_a = config.resource_a;
        raw.k = config.k;
        if (config.sweep && config.sweep->parameter == SweepParameter::D)
            raw.resource_a = config.resource_b + config.sweep->start;
        if (config.sweep && config.sweep->parameter == SweepParameter::k)
            raw.k = config.sweep->start;
        validate_instance(raw, config.auto_normalize);
    }
    return config;
}

}  // namespace gcbg
