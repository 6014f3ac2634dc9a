#pragma once

#include "nonloc/grid.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nonloc {

/// Settings for the descent solver that a config file may override; anything
/// left unset falls back to the preset (or built-in) defaults.
struct OptimizerOverrides {
    std::optional<double> grad_tol;
    std::optional<std::size_t> max_iters;
    std::optional<double> armijo_c;
    std::optional<double> backtrack;
    std::optional<double> initial_step;
    std::optional<std::string> init; // "zero" | "boundary_extend"
};

struct FixedPointOverrides {
    std::optional<double> tol;
    std::optional<std::size_t> max_iters;
    std::optional<double> theta;
};

struct SolverConfig {
    std::optional<double> tol;             // generic tolerance fallback
    std::optional<std::size_t> max_iters;  // generic iteration cap fallback
    std::uint64_t seed = 12345;
    OptimizerOverrides optimizer;
    FixedPointOverrides fixed_point;
};

/// A semilinear right-hand side assembled from named parts (the CLI does not
/// accept arbitrary code): f0(x,u) = c0 + scale*(arctan u + 1)/(x^2+1) for
/// "arctan", f0(x,u) = c0 - c1*u for "linear".
struct SemilinearConfig {
    std::string rhs = "arctan";
    double m0 = 0.5;
    double scale = 2.0; // arctan only
    double c0 = 0.0;
    double c1 = 0.0;    // linear only
};

struct OutputConfig {
    std::string dir = ".";
    std::vector<std::string> emit = {"solution_csv", "report_json"};
};

/// Parsed and validated run configuration.  Strict: unknown keys anywhere in
/// the document are configuration errors, so typos fail before any compute.
struct RunConfig {
    bool has_domain = false;
    double a = -1.0;
    double b = 1.0;
    double collar_width = 1.0;
    std::size_t node_count = 201;
    std::vector<Interval> gamma_prime;

    bool has_kernel = false;
    KernelSpec kernel;

    std::string preset_name; // empty unless problem.preset_name given
    bool has_semilinear = false;
    SemilinearConfig semilinear;

    SolverConfig solver;
    OutputConfig output;

    static RunConfig from_file(const std::string& path);
    static RunConfig from_text(const std::string& text, const std::string& origin);
};

/// Domain from the config's domain block (or its defaults when absent).
DomainPtr domain_from_config(const RunConfig& cfg);

/// FNV-1a, 64-bit; hashes the canonical serialized configuration so summary
/// files can fingerprint the run.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace nonloc
