#pragma once

#include "nonloc/functional.hpp"
#include "nonloc/grid.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace nonloc {

/// Data for L_mu[u] = f0(x, u) with a unit-mass translation-invariant kernel.
/// df0 may be empty; a central difference of f0 stands in for it.
/// monotonicity_floor m0 > 0 asserts 1 + (1/2) d_u f0 >= m0, which makes the
/// per-point inversion well defined.
struct SemilinearProblem {
    DomainPtr domain;
    KernelTable mu;
    std::function<double(double, double)> f0;
    std::function<double(double, double)> df0;
    double m0 = 0.5;
};

/// Validates the kernel mass and samples the monotonicity floor before
/// returning the problem; violations raise parameter errors.
SemilinearProblem make_semilinear_problem(DomainPtr d, KernelTable mu,
                                          std::function<double(double, double)> f0,
                                          std::function<double(double, double)> df0,
                                          double m0, double sample_box = 10.0);

struct SolveResult {
    GridFunction u_star;
    double residual_inf = 0.0; // ||L_mu[u] - f0(.,u)||_inf over the interior
    std::size_t iterations = 0;
    std::vector<double> update_norms;
    std::vector<double> contraction_estimates;
    bool converged = false;
};

/// Solves v + (1/2) f0(x, v) = w for v by safeguarded Newton.  The bracket is
/// grown geometrically from w; growth past 1e6 means f0 does not honor the
/// declared monotonicity and raises a solver error.
double invert_pointwise(const SemilinearProblem& p, double x, double w, double tol);

/// Fixed-point iteration u <- g(x, u * mu) on interior nodes with collar
/// values held fixed.  Stops when the Laplacian-form residual drops below tol
/// (certified on exit) or max_iters is hit; a 10x growth of the update norm
/// over 50 iterations aborts with converged = false.  theta in (0,1] damps
/// the update; 1 is the plain iteration.
SolveResult solve_fixed_point(const SemilinearProblem& p, const GridFunction& u_init,
                              double tol, std::size_t max_iters, double theta = 1.0);

/// Max magnitude of the order-k centered difference over interior nodes whose
/// whole stencil is interior.  1 <= order <= 4.
double fd_derivative_max(const GridFunction& u, int order);

/// Solves on d and on its refinement via solve_on, then compares max
/// finite-difference magnitudes of orders 1..k across the two resolutions.
/// Ratios near 1 signal a smooth solution; a ratio tracking 1/h (2 per
/// refinement) signals roughness.
DiagnosticReport smoothness_diagnostic(
    const std::function<GridFunction(const DomainPtr&)>& solve_on, const DomainPtr& d,
    int k);

/// (a) samples the convolution bound linf(u*mu) <= l1(u)*linf(mu); (b) runs
/// least-squares descent on ||u*mu - h||^2 and reports the l1 mass any
/// small-residual u is forced to carry, linf(h)/linf(mu).
DiagnosticReport illposed_demo(const GridFunction& h, const KernelTable& mu, int trials,
                               std::uint64_t seed = 12345, int ls_iters = 300);

} // namespace nonloc
