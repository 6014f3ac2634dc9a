#include "nonloc/semilinear.hpp"

#include "nonloc/error.hpp"
#include "nonloc/operators.hpp"
#include "nonloc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace nonloc {

namespace {

double slope_of(const SemilinearProblem& p, double x, double u) {
    if (p.df0) return p.df0(x, u);
    const double e = 1e-6 * (1.0 + std::abs(u));
    return (p.f0(x, u + e) - p.f0(x, u - e)) / (2.0 * e);
}

// phi(v) = coef*v + (1/2) f0(x, v); solve phi(v) = w.
// coef is 1 for the public inversion and the per-node kernel mass inside the
// fixed-point loop, where truncation makes the discrete mass dip below 1.
double solve_scalar(const SemilinearProblem& p, double coef, double x, double w,
                    double tol) {
    auto phi = [&](double v) { return coef * v + 0.5 * p.f0(x, v); };

    // grow a bracket with a sign change of phi - w
    double radius = std::max(1.0, std::abs(w));
    double lo = w - radius, hi = w + radius;
    while (phi(lo) > w || phi(hi) < w) {
        radius *= 2.0;
        if (radius > 1e6)
            throw_solver("pointwise inversion: no bracket within 1e6 of w; "
                         "f0 violates the declared monotonicity");
        lo = w - radius;
        hi = w + radius;
    }

    double v = w;
    for (int it = 0; it < 200; ++it) {
        const double fv = phi(v) - w;
        if (std::abs(fv) <= tol) return v;
        if (fv > 0.0)
            hi = std::min(hi, v);
        else
            lo = std::max(lo, v);
        const double dv = coef + 0.5 * slope_of(p, x, v);
        double next = dv > 0.0 ? v - fv / dv : v;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi); // bisection safeguard
        v = next;
    }
    throw_solver("pointwise inversion: no convergence in 200 iterations");
}

} // namespace

SemilinearProblem make_semilinear_problem(DomainPtr d, KernelTable mu,
                                          std::function<double(double, double)> f0,
                                          std::function<double(double, double)> df0,
                                          double m0, double sample_box) {
    if (!d) throw_config("semilinear: null domain");
    if (!f0) throw_config("semilinear: f0 required");
    if (!(m0 > 0.0)) throw_param("semilinear: monotonicity floor must be positive");
    if (!mu.translation_invariant())
        throw_param("semilinear: translation-invariant kernel required");
    if (!d->same_grid_as(*mu.domain()))
        throw_param("semilinear: kernel sampled on the wrong grid");

    const double mass = mu.difference_mass();
    if (std::abs(mass - 1.0) > 1e-6)
        throw_param("semilinear: kernel mass " + std::to_string(mass) +
                    " is not 1 within 1e-6");

    SemilinearProblem p{std::move(d), std::move(mu), std::move(f0), std::move(df0), m0};

    // sample the floor 1 + (1/2) d_u f0 >= m0 over nodes x and a u sweep
    const int nu = 101;
    for (std::size_t i = 0; i < p.domain->node_count(); ++i) {
        const double x = p.domain->node(i);
        for (int iu = 0; iu < nu; ++iu) {
            const double u =
                -sample_box + 2.0 * sample_box * static_cast<double>(iu) / (nu - 1);
            if (1.0 + 0.5 * slope_of(p, x, u) < m0 - 1e-12)
                throw_param("semilinear: monotonicity floor violated at x=" +
                            std::to_string(x) + ", u=" + std::to_string(u));
        }
    }
    return p;
}

double invert_pointwise(const SemilinearProblem& p, double x, double w, double tol) {
    if (!(tol > 0.0)) throw_param("invert_pointwise: tol must be positive");
    if (!std::isfinite(w)) throw_param("invert_pointwise: non-finite target");
    return solve_scalar(p, 1.0, x, w, tol);
}

SolveResult solve_fixed_point(const SemilinearProblem& p, const GridFunction& u_init,
                              double tol, std::size_t max_iters, double theta) {
    if (!(tol > 0.0)) throw_param("solve_fixed_point: tol must be positive");
    if (!(theta > 0.0 && theta <= 1.0))
        throw_param("solve_fixed_point: damping must lie in (0,1]");
    if (!u_init.domain() || !u_init.domain()->same_grid_as(*p.domain))
        throw_param("solve_fixed_point: u_init on the wrong grid");
    for (std::size_t i = 0; i < u_init.size(); ++i)
        if (!std::isfinite(u_init[i]))
            throw_data("solve_fixed_point: non-finite initial value at node " +
                       std::to_string(i));

    const Domain& d = *p.domain;
    const auto& interior = d.interior_nodes();

    // per-node discrete mass (1 * mu)(x_i); near the grid edge truncation
    // pulls it below 1, so it replaces the analytic value in the inversion
    GridFunction ones(p.domain);
    for (std::size_t i = 0; i < ones.size(); ++i) ones[i] = 1.0;
    const GridFunction node_mass = convolve(ones, p.mu);

    const double inner_tol = 0.05 * tol;

    SolveResult res{u_init, 0.0, 0, {}, {}, false};
    GridFunction& u = res.u_star;

    auto certificate = [&]() {
        const GridFunction lap = nonlocal_laplacian(u, p.mu);
        double r = 0.0;
        for (std::size_t i : interior)
            r = std::max(r, std::abs(lap[i] - p.f0(d.node(i), u[i])));
        return r;
    };

    while (true) {
        const GridFunction conv = convolve(u, p.mu);

        // cheap residual from values already in hand:
        // L_mu[u]_i = 2(conv_i - mass_i u_i) up to rounding
        double cheap = 0.0;
        for (std::size_t i : interior) {
            const double r = 2.0 * (conv[i] - node_mass[i] * u[i]) - p.f0(d.node(i), u[i]);
            cheap = std::max(cheap, std::abs(r));
        }
        if (cheap <= tol) {
            res.residual_inf = certificate();
            if (res.residual_inf <= tol) {
                res.converged = true;
                return res;
            }
            // rounding put the certified residual a hair above the cheap one;
            // another contraction step settles it
        }
        if (res.iterations >= max_iters) {
            res.residual_inf = certificate();
            return res;
        }

        GridFunction u_next = u;
        try {
            parallel_for(interior.size(), [&](std::size_t t) {
                const std::size_t i = interior[t];
                const double v = solve_scalar(p, node_mass[i], d.node(i), conv[i],
                                              inner_tol);
                u_next[i] = (1.0 - theta) * u[i] + theta * v;
            });
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Solver)
                throw_solver(std::string("solve_fixed_point: ") + e.what());
            throw;
        }

        double un = 0.0;
        for (std::size_t i : interior) un = std::max(un, std::abs(u_next[i] - u[i]));
        if (!res.update_norms.empty() && res.update_norms.back() > 0.0)
            res.contraction_estimates.push_back(un / res.update_norms.back());
        res.update_norms.push_back(un);
        u = u_next;
        ++res.iterations;

        // divergence guard: update norms growing an order of magnitude over a
        // 50-iteration window
        const std::size_t k = res.update_norms.size();
        if (k > 50 && res.update_norms[k - 1] > 10.0 * res.update_norms[k - 51]) {
            res.residual_inf = certificate();
            return res;
        }
    }
}

// ===========================================================================
// regularity surrogate: centered differences under refinement
// ===========================================================================

namespace {

struct Stencil {
    int halfwidth;
    double scale_pow; // h exponent in the denominator
    std::vector<double> c;
};

const Stencil& stencil_for(int order) {
    static const Stencil s1{1, 1.0, {-0.5, 0.0, 0.5}};
    static const Stencil s2{1, 2.0, {1.0, -2.0, 1.0}};
    static const Stencil s3{2, 3.0, {-0.5, 1.0, 0.0, -1.0, 0.5}};
    static const Stencil s4{2, 4.0, {1.0, -4.0, 6.0, -4.0, 1.0}};
    switch (order) {
        case 1: return s1;
        case 2: return s2;
        case 3: return s3;
        case 4: return s4;
        default: throw_param("fd_derivative_max: order must be in 1..4");
    }
}

} // namespace

double fd_derivative_max(const GridFunction& u, int order) {
    if (!u.domain()) throw_config("fd_derivative_max: function has no domain");
    if (u.components() != 1)
        throw_param("fd_derivative_max: single-component function required");
    const Stencil& st = stencil_for(order);
    const Domain& d = *u.domain();
    const double denom = std::pow(d.spacing(), st.scale_pow);

    double best = 0.0;
    bool any = false;
    for (std::size_t i : d.interior_nodes()) {
        // the solution need not be smooth across the interior/collar seam, so
        // only stencils fully inside the interior count
        const std::ptrdiff_t hw = st.halfwidth;
        const auto ii = static_cast<std::ptrdiff_t>(i);
        if (ii - hw < 0 || ii + hw >= static_cast<std::ptrdiff_t>(d.node_count())) continue;
        bool ok = true;
        for (std::ptrdiff_t o = -hw; o <= hw && ok; ++o)
            ok = d.node_class(static_cast<std::size_t>(ii + o)) == NodeClass::Interior;
        if (!ok) continue;
        double acc = 0.0;
        for (std::ptrdiff_t o = -hw; o <= hw; ++o)
            acc += st.c[static_cast<std::size_t>(o + hw)] *
                   u[static_cast<std::size_t>(ii + o)];
        best = std::max(best, std::abs(acc / denom));
        any = true;
    }
    if (!any) throw_param("fd_derivative_max: no interior node carries a full stencil");
    return best;
}

DiagnosticReport smoothness_diagnostic(
    const std::function<GridFunction(const DomainPtr&)>& solve_on, const DomainPtr& d,
    int k) {
    if (!d) throw_config("smoothness_diagnostic: null domain");
    if (!solve_on) throw_config("smoothness_diagnostic: solver callback required");
    if (k < 1 || k > 4) throw_param("smoothness_diagnostic: order must be in 1..4");

    const DomainPtr fine = refine_domain(*d);
    const GridFunction uc = solve_on(d);
    const GridFunction uf = solve_on(fine);
    if (!uc.domain()->same_grid_as(*d) || !uf.domain()->same_grid_as(*fine))
        throw_data("smoothness_diagnostic: solver returned a mismatched grid");

    DiagnosticReport rep;
    rep.check = "smoothness";
    rep.tolerance = 0.0;
    rep.trials = k;
    rep.seed = 0;
    rep.sample_box = 0.0;
    rep.worst_margin = -std::numeric_limits<double>::infinity();
    bool all_stable = true;
    for (int order = 1; order <= k; ++order) {
        const double coarse = fd_derivative_max(uc, order);
        const double finev = fd_derivative_max(uf, order);
        const double ratio = coarse != 0.0 ? finev / coarse
                                           : (finev == 0.0 ? 1.0 : INFINITY);
        const std::string tag = std::to_string(order);
        rep.witness["order" + tag + "_coarse"] = coarse;
        rep.witness["order" + tag + "_fine"] = finev;
        rep.witness["order" + tag + "_ratio"] = ratio;
        // a smooth solution keeps the magnitudes put; 1/h growth doubles them
        const bool stable = ratio >= 0.5 && ratio <= 1.8;
        if (!stable) all_stable = false;
        rep.worst_margin = std::max(rep.worst_margin, ratio - 1.0);
    }
    rep.passed = all_stable;
    return rep;
}

// ===========================================================================
// ill-posed convolution equation demo
// ===========================================================================

namespace {

// adjoint of u -> convolve(u, mu) in the plain Euclidean pairing
GridFunction convolve_adjoint(const GridFunction& v, const KernelTable& mu) {
    const Domain& d = *v.domain();
    const std::size_t m = d.node_count();
    GridFunction out(v.domain());
    parallel_for(m, [&](std::size_t j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += mu.at(j, i) * v[i]; // mu(x_i - y_j)
        out[j] = d.weight(j) * acc;
    });
    return out;
}

} // namespace

DiagnosticReport illposed_demo(const GridFunction& h, const KernelTable& mu, int trials,
                               std::uint64_t seed, int ls_iters) {
    if (!h.domain()) throw_config("illposed_demo: h has no domain");
    if (trials < 1) throw_param("illposed_demo: trials must be >= 1");
    if (!mu.translation_invariant())
        throw_param("illposed_demo: translation-invariant kernel required");
    if (!h.domain()->same_grid_as(*mu.domain()))
        throw_param("illposed_demo: kernel sampled on the wrong grid");
    const double mu_inf = [&] {
        double v = 0.0;
        for (double s : mu.samples()) v = std::max(v, std::abs(s));
        return v;
    }();
    if (!(mu_inf > 0.0) || !std::isfinite(mu_inf))
        throw_param("illposed_demo: kernel must be bounded and nonzero");

    const DomainPtr dom = h.domain();

    DiagnosticReport rep;
    rep.check = "illposed_demo";
    rep.tolerance = 0.0;
    rep.trials = trials;
    rep.seed = seed;
    rep.sample_box = 1.0;

    // (a) the convolution bound linf(u*mu) <= l1(u) * linf(mu) holds for
    // every u up to rounding
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> box(-1.0, 1.0);
    int violations = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        GridFunction u(dom);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = box(rng);
        const double lhs = linf_norm(convolve(u, mu));
        const double bound = lp_norm(u, 1.0) * mu_inf;
        const double margin = lhs - bound; // positive would break the bound
        worst = std::max(worst, margin);
        if (margin > 1e-12 * (1.0 + bound)) ++violations;
    }
    rep.worst_margin = worst;
    rep.witness["young_violations"] = violations;

    // (b) least-squares descent on ||u*mu - h||^2: conjugate gradient on the
    // normal equations
    GridFunction u(dom);
    GridFunction r = h; // residual h - A u, starting from u = 0
    GridFunction s = convolve_adjoint(r, mu);
    GridFunction pdir = s;
    double gamma = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) gamma += s[i] * s[i];
    for (int it = 0; it < ls_iters && gamma > 0.0; ++it) {
        const GridFunction q = convolve(pdir, mu);
        double qq = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) qq += q[i] * q[i];
        if (qq == 0.0) break;
        const double alpha = gamma / qq;
        for (std::size_t i = 0; i < u.size(); ++i) u[i] += alpha * pdir[i];
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= alpha * q[i];
        s = convolve_adjoint(r, mu);
        double gnew = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) gnew += s[i] * s[i];
        const double beta = gnew / gamma;
        for (std::size_t i = 0; i < pdir.size(); ++i) pdir[i] = s[i] + beta * pdir[i];
        gamma = gnew;
    }

    double res_inf = 0.0, res_l2 = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        res_inf = std::max(res_inf, std::abs(r[i]));
        res_l2 += r[i] * r[i];
    }
    rep.witness["h_linf"] = linf_norm(h);
    rep.witness["mu_linf"] = mu_inf;
    rep.witness["forced_l1_bound"] = linf_norm(h) / mu_inf;
    rep.witness["achieved_l1_u"] = lp_norm(u, 1.0);
    rep.witness["residual_linf"] = res_inf;
    rep.witness["residual_l2"] = std::sqrt(res_l2);

    rep.passed = violations == 0;
    return rep;
}

} // namespace nonloc
