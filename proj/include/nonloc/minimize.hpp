#pragma once

#include "nonloc/functional.hpp"
#include "nonloc/grid.hpp"

#include <cstdint>
#include <vector>

namespace nonloc {

enum class InitMode { Zero, BoundaryExtend, Given };

enum class TerminationReason { GradientTol, MaxIters, LineSearchFailure };

const char* to_string(TerminationReason r);

struct MinimizeOptions {
    double grad_tol = 1e-8;
    std::size_t max_iters = 10000;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    double initial_step = 1.0;
    InitMode init = InitMode::BoundaryExtend;
};

struct MinimizeResult {
    GridFunction u_star;
    std::vector<double> energy_trace; // initial energy, then one entry per accepted step
    double grad_inf_norm = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    TerminationReason termination_reason = TerminationReason::MaxIters;
};

/// Nodal gradient of the energy: g_i = w_i * residual_i on free nodes, zero on
/// collar-fixed ones, so that sum_i g_i phi_i reproduces gateaux(u, phi).
GridFunction assemble_gradient(const GridFunction& u, const Integrand& f);

/// Projected steepest descent with Armijo backtracking.  u0 supplies the
/// collar-fixed data (and, for InitMode::Given, the full starting iterate);
/// those nodes are never touched by the iteration.
MinimizeResult minimize(const Integrand& f, const GridFunction& u0,
                        const MinimizeOptions& opts = {});

/// Runs minimize from n_starts randomized starting iterates sharing the same
/// collar data and reports the maximum pairwise distance of the solutions.
/// Any non-converged start marks the probe inconclusive (passed = false).
DiagnosticReport uniqueness_probe(const Integrand& f, const GridFunction& u0, int n_starts,
                                  std::uint64_t seed, const MinimizeOptions& opts = {});

} // namespace nonloc
