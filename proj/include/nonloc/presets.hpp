#pragma once

#include "nonloc/functional.hpp"
#include "nonloc/grid.hpp"
#include "nonloc/minimize.hpp"
#include "nonloc/semilinear.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nonloc {

/// How `preset run` treats the entry: descend on the energy, iterate the
/// fixed point, or run the ill-posedness demonstration.
enum class PresetKind { Minimize, FixedPoint, Demo };

const char* to_string(PresetKind k);

/// A ready-to-run problem: domain, kernel, integrand and/or semilinear data,
/// boundary values, solver defaults, and the residual check that certifies a
/// solution.
struct Preset {
    std::string name;
    std::string title;      // one line, human oriented
    std::string provenance; // what the problem is and why it is in the catalog

    PresetKind kind = PresetKind::Minimize;
    DomainPtr domain;
    KernelSpec kernel_spec;
    KernelTable mu;

    bool has_integrand = false;
    Integrand integrand;
    bool has_semilinear = false;
    SemilinearProblem semilinear;

    /// collar values (free nodes hold the initial guess where relevant)
    GridFunction boundary_data;

    /// per-node field whose sup-norm over free nodes verify_preset() checks
    std::function<GridFunction(const GridFunction&)> el_residual;
    double verify_tol = 1e-6;

    double fp_tol = 1e-8;
    std::size_t fp_max_iters = 500;
    MinimizeOptions minimize_opts;

    int demo_trials = 100;
    int demo_ls_iters = 300;

    std::optional<CoercivityData> coercivity;
    std::optional<GrowthDataLocal> growth_local;
    std::optional<GrowthDataPolynomial> growth_polynomial;
};

std::vector<std::string> preset_names();

/// Catalog lookup; unknown names are parameter errors.
Preset preset(const std::string& name);

/// Evaluates the preset's residual field on the proposed solution and
/// compares its sup-norm over the free nodes with verify_tol.
DiagnosticReport verify_preset(const Preset& p, const GridFunction& solution);

/// Runs the hypothesis checks the preset declares (convexity, coercivity,
/// growth) and returns one report per check.
std::vector<DiagnosticReport> audit_preset(const Preset& p, int trials,
                                           std::uint64_t seed);

/// semilinear_convolution only: confirms the normalization constant computed
/// from the mass difference agrees with the one the difference kernel was
/// scaled by, and that the scaled kernel has unit discrete mass.
DiagnosticReport check_constant_consistency(const Preset& p);

/// Samples of |x|^{-1/2} clamped at the grid scale: the steeper the grid, the
/// taller the spike.  The right-hand side of the ill-posed demo.
GridFunction truncated_spike(const DomainPtr& d);

} // namespace nonloc
