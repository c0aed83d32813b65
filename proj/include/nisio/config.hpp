#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "nisio/diagnostics.hpp"
#include "nisio/mc.hpp"

namespace nisio {

struct SolveSection {
    double t = 1.0;
    RefineOptions refine;
};

struct PropertiesSection {
    std::vector<ProbeSpec> probes;
    std::vector<double> t_list{1.0};
    SuiteOptions suite;
};

struct DppSection {
    double s = 0.5;
    double t = 0.5;
};

struct ControlSection {
    unsigned m = 64;
    unsigned random_trials = 0;
};

struct McSection {
    std::size_t paths = 100000;
    State x0{};
    unsigned m = 64;
    std::optional<SafetyBox> box;
};

/// Limits checked after a subcommand runs; absent entries are not asserted.
struct AssertSection {
    std::optional<double> solve_max_error;
    std::string solve_oracle;  // expression in x
    std::optional<std::array<double, 2>> solve_region;
    bool solve_converged = false;
    bool properties_pass = false;
    std::optional<double> dpp_max_defect;
    std::optional<double> control_max_gap;
    std::optional<double> mc_max_abs_z;
};

/// Parsed and validated run configuration. Construction builds the grid and
/// the family, so every schema and parameter error surfaces before any
/// subcommand writes output.
struct RunConfig {
    nlohmann::json source;
    GridPtr grid;
    std::optional<SemigroupFamily> family;
    ProbeSpec u0;
    SolveSection solve;
    PropertiesSection properties;
    DppSection dpp;
    ControlSection control;
    McSection mc;
    AssertSection asserts;
    std::uint64_t seed = 1;

    /// Throws ConfigError on unknown keys, wrong types or invalid values.
    static RunConfig parse(const nlohmann::json& j);
    static RunConfig load(const std::string& path);

    /// FNV-1a of the canonical (sorted-key, compact) dump, as 16 hex digits.
    [[nodiscard]] std::string hash() const;
    [[nodiscard]] GridFunction initial() const;
};

}  // namespace nisio
