#include "doctest.h"

#include "helpers.hpp"
#include "nonloc/error.hpp"
#include "nonloc/minimize.hpp"
#include "nonloc/operators.hpp"

#include <cmath>

using namespace nonloc;
using namespace testutil;

namespace {

/// xi^2 mu(z) with the default gaussian density exp(-z^2)/sqrt(pi).
Integrand quadratic_integrand() {
    const double norm = 1.0 / std::sqrt(4.0 * std::atan(1.0));
    Integrand f;
    f.eval = [norm](double, double z, double, double xi) {
        return xi * xi * norm * std::exp(-z * z);
    };
    f.du = [](double, double, double, double) { return 0.0; };
    f.dxi = [norm](double, double z, double, double xi) {
        return 2.0 * xi * norm * std::exp(-z * z);
    };
    f.claims_convex = true;
    f.claims_coercive = true;
    return f;
}

GridFunction cosine_collar_data(const DomainPtr& d) {
    GridFunction u0(d);
    for (std::size_t i : d->collar_fixed_nodes())
        u0[i] = 0.5 * std::cos(1.5 * d->node(i));
    return u0;
}

} // namespace

TEST_SUITE("minimize") {

TEST_CASE("assembled gradient is dual to the first variation") {
    DomainPtr d = build_domain(-1.0, 1.0, 1.0, 41);
    auto gen = rng(41);
    Integrand f;
    f.eval = [](double x, double z, double u, double xi) {
        return std::exp(-z * z) * xi * xi + 0.2 * std::cos(x) * u * u * u;
    };
    f.du = [](double x, double, double u, double) { return 0.6 * std::cos(x) * u * u; };
    f.dxi = [](double, double z, double, double xi) {
        return 2.0 * std::exp(-z * z) * xi;
    };

    for (int trial = 0; trial < 5; ++trial) {
        const GridFunction u = random_grid_function(d, gen);
        const GridFunction g = assemble_gradient(u, f);
        for (std::size_t i : d->collar_fixed_nodes()) CHECK(g[i] == 0.0);
        for (int k = 0; k < 4; ++k) {
            const GridFunction phi = random_variation(d, gen);
            double dot = 0.0;
            for (std::size_t i = 0; i < d->node_count(); ++i) dot += phi[i] * g[i];
            const double ref = gateaux(u, phi, f);
            CHECK(std::abs(dot - ref) < 1e-12 * std::max(1.0, std::abs(ref)));
        }
    }
}

TEST_CASE("quadratic problem matches a dense direct solve") {
    DomainPtr d = build_domain(-1.0, 1.0, 1.0, 201);
    const KernelTable mu = sample_kernel(d, KernelSpec{});
    const GridFunction u0 = cosine_collar_data(d);

    MinimizeOptions opts;
    opts.grad_tol = 1e-10;
    opts.max_iters = 60000;
    const MinimizeResult res = minimize(quadratic_integrand(), u0, opts);
    CHECK(res.converged);

    // stationarity of the energy is the discrete harmonic equation L_mu u = 0
    const GridFunction residual = nonlocal_laplacian(res.u_star, mu);
    CHECK(linf_norm(residual, Region::Free) <= 1e-8);

    const GridFunction direct = dense_harmonic_solve(mu, u0);
    CHECK(linf_diff(res.u_star, direct) <= 1e-6);

    // energy decreases monotonically along the accepted steps
    for (std::size_t k = 1; k < res.energy_trace.size(); ++k)
        CHECK(res.energy_trace[k] <= res.energy_trace[k - 1] + 1e-14);
}

TEST_CASE("constant collar data yields the constant minimizer") {
    DomainPtr d = build_domain(-1.0, 1.0, 1.0, 81);
    GridFunction u0(d);
    for (std::size_t i : d->collar_fixed_nodes()) u0[i] = 2.5;

    const MinimizeResult res = minimize(quadratic_integrand(), u0);
    CHECK(res.converged);
    for (std::size_t i = 0; i < d->node_count(); ++i)
        CHECK(res.u_star[i] == doctest::Approx(2.5).epsilon(1e-9));
}

TEST_CASE("initialization modes steer the starting iterate") {
    DomainPtr d = build_domain(-1.0, 1.0, 1.0, 41);
    GridFunction u0(d);
    for (std::size_t i : d->collar_fixed_nodes()) u0[i] = 1.0;
    for (std::size_t i : d->free_nodes()) u0[i] = 123.0; // ignored unless Given

    MinimizeOptions opts;
    opts.max_iters = 0; // observe the raw starting iterate
    opts.init = InitMode::Zero;
    MinimizeResult z = minimize(quadratic_integrand(), u0, opts);
    for (std::size_t i : d->free_nodes()) CHECK(z.u_star[i] == 0.0);
    CHECK_FALSE(z.converged);
    CHECK(z.termination_reason == TerminationReason::MaxIters);

    opts.init = InitMode::Given;
    MinimizeResult g = minimize(quadratic_integrand(), u0, opts);
    for (std::size_t i : d->free_nodes()) CHECK(g.u_star[i] == 123.0);
}

TEST_CASE("non-coercive energy runs out of iterations instead of lying") {
    DomainPtr d = build_domain(-1.0, 1.0, 1.0, 31);
    Integrand runaway;
    // concave in u with a tilt off the unstable stationary point at zero:
    // the infimum is -infinity, so no minimizer exists
    runaway.eval = [](double, double z, double u, double xi) {
        return std::exp(-z * z) * xi * xi - 2.0 * u * u - u;
    };
    runaway.du = [](double, double, double u, double) { return -4.0 * u - 1.0; };
    runaway.dxi = [](double, double z, double, double xi) {
        return 2.0 * std::exp(-z * z) * xi;
    };

    GridFunction u0(d);
    MinimizeOptions opts;
    opts.max_iters = 40;
    const MinimizeResult res = minimize(runaway, u0, opts);
    // the iterate races to -infinity until the step or budget gives out;
    // either way the solver must not report success
    CHECK_FALSE(res.converged);
    CHECK(res.termination_reason != TerminationReason::GradientTol);
    CHECK(res.energy_trace.back() < -1.0e6);
}

TEST_CASE("uniqueness probe agrees across starts for a convex energy") {
    DomainPtr d = build_domain(-1.0, 1.0, 1.0, 61);
    const GridFunction u0 = cosine_collar_data(d);
    MinimizeOptions opts;
    opts.grad_tol = 1e-9;
    opts.max_iters = 30000;
    const DiagnosticReport rep = uniqueness_probe(quadratic_integrand(), u0, 3, 51, opts);
    CHECK(rep.passed);
    CHECK(rep.worst_margin < 1e-4);
    CHECK(rep.witness.count("max_pairwise_distance") == 1);
}

TEST_CASE("uniqueness probe separates the wells of a double-well energy") {
    DomainPtr d = build_domain(-1.0, 1.0, 1.0, 41);
    Integrand dw;
    // tiny coupling + (u^2-1)^2 potential: minimizers sit near u = +-1
    dw.eval = [](double, double z, double u, double xi) {
        const double q = u * u - 1.0;
        return 1e-4 * std::exp(-z * z) * xi * xi + q * q;
    };
    dw.du = [](double, double, double u, double) { return 4.0 * u * (u * u - 1.0); };
    dw.dxi = [](double, double z, double, double xi) {
        return 2e-4 * std::exp(-z * z) * xi;
    };

    GridFunction u0(d); // zero collar keeps both wells reachable
    MinimizeOptions opts;
    opts.grad_tol = 1e-7;
    opts.max_iters = 20000;
    const DiagnosticReport rep = uniqueness_probe(dw, u0, 6, 52, opts);
    CHECK(rep.worst_margin > 0.5); // distinct wells are far apart in linf
}

TEST_CASE("option validation rejects nonsense") {
    DomainPtr d = build_domain(-1.0, 1.0, 1.0, 21);
    GridFunction u0(d);
    const Integrand f = quadratic_integrand();

    MinimizeOptions opts;
    opts.backtrack = 1.5;
    CHECK_THROWS_AS(minimize(f, u0, opts), Error);
    opts = MinimizeOptions{};
    opts.grad_tol = -1.0;
    CHECK_THROWS_AS(minimize(f, u0, opts), Error);
    opts = MinimizeOptions{};
    opts.initial_step = 0.0;
    CHECK_THROWS_AS(minimize(f, u0, opts), Error);
    opts = MinimizeOptions{};
    opts.armijo_c = 1.0;
    CHECK_THROWS_AS(minimize(f, u0, opts), Error);
    CHECK_THROWS_AS(uniqueness_probe(f, u0, 1, 7), Error); // needs >= 2 starts
}

} // TEST_SUITE
