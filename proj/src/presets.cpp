#include "nonloc/presets.hpp"

#include "nonloc/error.hpp"
#include "nonloc/operators.hpp"

#include <cmath>

namespace nonloc {

const char* to_string(PresetKind k) {
    switch (k) {
        case PresetKind::Minimize: return "minimize";
        case PresetKind::FixedPoint: return "fixed_point";
        case PresetKind::Demo: return "demo";
    }
    return "unknown";
}

namespace {

constexpr double kInvSqrtPi = 0.5641895835477563; // 1/sqrt(pi)

double gauss_mu(double z) { return kInvSqrtPi * std::exp(-z * z); }

double scaled_square(double v, double) { return 0.5 * v * v; }
double square_minus_self(double v, double) { return v * v - v; }
double divide_by(double v, double a) { return v / a; }

KernelTable constant_ti_table(const DomainPtr& d, double value) {
    return KernelTable::translation_invariant_from_samples(
        d, std::vector<double>(2 * d->node_count() - 1, value));
}

GridFunction sampled(const DomainPtr& d, double (*fn)(double)) {
    GridFunction g(d);
    for (std::size_t i = 0; i < d->node_count(); ++i) g[i] = fn(d->node(i));
    return g;
}

// ---------------------------------------------------------------------------
// arctan_semilinear: L_mu[u] = 2(arctan u + 1)/(x^2+1) on (-1,1), u = 0 on
// the collar.  The energy potential is calibrated so the descent path and the
// fixed-point path solve the same discrete equation.
// ---------------------------------------------------------------------------
Preset build_arctan() {
    Preset p;
    p.name = "arctan_semilinear";
    p.title = "semilinear diffusion with an arctan reaction, Gaussian kernel";
    p.provenance =
        "semilinear nonlocal diffusion on a symmetric interval with zero collar data; "
        "solvable both by a monotone pointwise fixed point and by convex energy descent, "
        "which makes it the cross-validation workhorse of the catalog";
    p.kind = PresetKind::FixedPoint;
    p.domain = build_domain(-1.0, 1.0, 3.0, 401);
    p.kernel_spec = KernelSpec{}; // Gaussian defaults: mu(z) = exp(-z^2)/sqrt(pi)
    p.mu = sample_kernel(p.domain, p.kernel_spec);

    const double measure = p.domain->span(); // 8
    const double ln_sec1 = -std::log(std::cos(1.0));

    p.has_integrand = true;
    p.integrand.eval = [measure](double x, double z, double u, double xi) {
        const double pot =
            (2.0 * u * std::atan(u) - std::log1p(u * u) + 2.0 * u) / (x * x + 1.0);
        return xi * xi * gauss_mu(z) + (2.0 / measure) * pot;
    };
    p.integrand.du = [measure](double x, double, double u, double) {
        return (4.0 / measure) * (std::atan(u) + 1.0) / (x * x + 1.0);
    };
    p.integrand.dxi = [](double, double z, double, double xi) {
        return 2.0 * xi * gauss_mu(z);
    };
    p.integrand.p = 2.0;
    p.integrand.q = 1.0;
    p.integrand.claims_convex = true;
    p.integrand.claims_coercive = true;

    p.has_semilinear = true;
    p.semilinear = make_semilinear_problem(
        p.domain, p.mu,
        [](double x, double u) { return 2.0 * (std::atan(u) + 1.0) / (x * x + 1.0); },
        [](double x, double u) { return 2.0 / ((1.0 + u * u) * (x * x + 1.0)); },
        /*m0=*/1.0);

    p.boundary_data = GridFunction(p.domain); // zero collar data

    KernelTable mu_copy = p.mu;
    // residual in the semilinear form L_mu[u] - f0(., u)
    p.el_residual = [mu_copy, f0 = p.semilinear.f0](const GridFunction& u) {
        GridFunction r = nonlocal_laplacian(u, mu_copy);
        const Domain& d = *u.domain();
        for (std::size_t i = 0; i < d.node_count(); ++i) r[i] -= f0(d.node(i), u[i]);
        return r;
    };
    p.verify_tol = 1e-7;
    p.fp_tol = 1e-8;
    p.fp_max_iters = 300;
    p.minimize_opts.grad_tol = 2e-9;
    p.minimize_opts.max_iters = 20000;

    // lower bound f >= mu(z) xi^2 + alpha3(x): the potential's minimum over u
    // sits at u = tan(-1)
    {
        const std::size_t m = p.domain->node_count();
        std::vector<double> a3(m * m);
        for (std::size_t i = 0; i < m; ++i) {
            const double x = p.domain->node(i);
            const double v = -(4.0 * ln_sec1 / measure) / (x * x + 1.0);
            for (std::size_t j = 0; j < m; ++j) a3[i * m + j] = v;
        }
        p.coercivity = CoercivityData{p.mu, constant_ti_table(p.domain, 0.0),
                                      KernelTable::two_point_from_samples(p.domain, a3),
                                      2.0, 1.0, 0.43, 0.5};
    }

    GrowthDataLocal gl;
    for (double R : {1.0, 10.0}) {
        const double c_R = (2.0 / measure) * (2.0 * std::atan(R) + 2.0);
        gl.majorants.push_back(GrowthMajorant{R, [c_R, R](double x, double z) {
            return c_R / (x * x + 1.0) + 2.0 * R * gauss_mu(z);
        }});
    }
    p.growth_local = std::move(gl);
    return p;
}

// ---------------------------------------------------------------------------
// illposed: the convolution equation u * mu = h with h unbounded in the grid
// limit; carries the f0(x,u) = h(x) - u semilinear form and the demo hooks.
// ---------------------------------------------------------------------------
Preset build_illposed() {
    Preset p;
    p.name = "illposed";
    p.title = "convolution equation with a spike right-hand side";
    p.provenance =
        "convolution equation whose right-hand side grows without bound under grid "
        "refinement; the convolution bound forces the l1 mass of any small-residual "
        "candidate to diverge, the discrete shadow of non-existence";
    p.kind = PresetKind::Demo;
    p.domain = build_domain(-1.0, 1.0, 1.0, 101);
    p.kernel_spec = KernelSpec{};
    p.mu = sample_kernel(p.domain, p.kernel_spec);

    const DomainPtr d = p.domain;
    const GridFunction spike = truncated_spike(d);
    const std::vector<double> hv = spike.values();
    const double x0 = d->node(0);
    const double hs = d->spacing();
    const std::size_t m = d->node_count();
    auto h_at = [hv, x0, hs, m](double x) {
        auto idx = static_cast<std::ptrdiff_t>(std::llround((x - x0) / hs));
        if (idx < 0) idx = 0;
        if (idx >= static_cast<std::ptrdiff_t>(m)) idx = static_cast<std::ptrdiff_t>(m) - 1;
        return hv[static_cast<std::size_t>(idx)];
    };

    p.has_semilinear = true;
    p.semilinear = make_semilinear_problem(
        p.domain, p.mu, [h_at](double x, double u) { return h_at(x) - u; },
        [](double, double) { return -1.0; }, /*m0=*/0.5);

    p.boundary_data = GridFunction(p.domain);

    KernelTable mu_copy = p.mu;
    p.el_residual = [mu_copy, h_at](const GridFunction& u) {
        GridFunction r = nonlocal_laplacian(u, mu_copy);
        const Domain& dd = *u.domain();
        for (std::size_t i = 0; i < dd.node_count(); ++i)
            r[i] -= h_at(dd.node(i)) - u[i];
        return r;
    };
    p.verify_tol = 1e-6;
    p.demo_trials = 100;
    p.demo_ls_iters = 300;
    return p;
}

// ---------------------------------------------------------------------------
// quasilinear_potential: f = |xi mu(z)|^p / p + G(x,u)/|D| with p = 2 and
// G(x,u) = u^4/4; the minimizer satisfies L^p_mu[u] = u^3.
// ---------------------------------------------------------------------------
Preset build_quasilinear() {
    Preset p;
    p.name = "quasilinear_potential";
    p.title = "power-law interaction energy with a quartic on-site potential";
    p.provenance =
        "two-point power-law energy plus a quartic on-site potential with smooth "
        "nonzero collar data; the minimizer is checked against the power-type "
        "interaction equation it must satisfy";
    p.kind = PresetKind::Minimize;
    p.domain = build_domain(-1.0, 1.0, 1.0, 201);
    p.kernel_spec = KernelSpec{};
    p.mu = sample_kernel(p.domain, p.kernel_spec);

    const double measure = p.domain->span(); // 4

    p.has_integrand = true;
    p.integrand.eval = [measure](double, double z, double u, double xi) {
        const double t = xi * gauss_mu(z);
        return 0.5 * t * t + (u * u * u * u / 4.0) / measure;
    };
    p.integrand.du = [measure](double, double, double u, double) {
        return u * u * u / measure;
    };
    p.integrand.dxi = [](double, double z, double, double xi) {
        const double mu = gauss_mu(z);
        return xi * mu * mu;
    };
    p.integrand.p = 2.0;
    p.integrand.q = 1.0;
    p.integrand.claims_convex = true;
    p.integrand.claims_coercive = true;

    GridFunction bd(p.domain);
    for (std::size_t i = 0; i < p.domain->node_count(); ++i)
        bd[i] = 0.4 * std::cos(3.141592653589793 * p.domain->node(i) / 4.0);
    p.boundary_data = std::move(bd);

    KernelTable mu_copy = p.mu;
    p.el_residual = [mu_copy](const GridFunction& u) {
        GridFunction r = nonlocal_p_laplacian(u, mu_copy, 2.0);
        for (std::size_t i = 0; i < u.size(); ++i) r[i] -= u[i] * u[i] * u[i];
        return r;
    };
    p.verify_tol = 1e-6;
    p.minimize_opts.grad_tol = 1e-9;
    p.minimize_opts.max_iters = 30000;

    p.coercivity = CoercivityData{p.mu.map(&scaled_square, 0.0),
                                  constant_ti_table(p.domain, 1.0 / measure),
                                  constant_ti_table(p.domain, -1.0 / measure),
                                  2.0, 1.0, 0.09, 0.5};

    GrowthDataPolynomial gp;
    gp.a = [](double, double) { return 0.2; };
    gp.beta = [](double, double) { return 0.3; };
    gp.p = 4.0;
    p.growth_polynomial = std::move(gp);
    return p;
}

// ---------------------------------------------------------------------------
// double_power: interaction power q = 2, on-site power p = 3.  Verified
// against the printed equation L^q_mu[u] = (p/q)||mu^q||_1 u|u|^{p-2}, whose
// reference solution here is u = 0.
// ---------------------------------------------------------------------------
Preset build_double_power() {
    Preset p;
    p.name = "double_power";
    p.title = "separate interaction and on-site power laws";
    p.provenance =
        "energy with different power laws for the interaction and on-site terms; the "
        "catalog pins its equation at the zero solution, where both sides vanish "
        "identically regardless of how the printed constants are read";
    p.kind = PresetKind::Minimize;
    p.domain = build_domain(-1.0, 1.0, 1.0, 201);
    p.kernel_spec = KernelSpec{};
    p.mu = sample_kernel(p.domain, p.kernel_spec);

    const double measure = p.domain->span();
    const double mass_q = p.mu.map(&scaled_square, 0.0).difference_mass() * 2.0; // ||mu^2||_1
    const double m_pq = 1.5 * mass_q; // (p/q) ||mu^q||_1 with p=3, q=2

    p.has_integrand = true;
    p.integrand.eval = [measure, mass_q](double, double z, double u, double xi) {
        const double t = xi * gauss_mu(z);
        return 0.5 * t * t + (mass_q / (2.0 * measure)) * std::abs(u) * u * u;
    };
    p.integrand.du = [measure, mass_q](double, double, double u, double) {
        return (1.5 * mass_q / measure) * u * std::abs(u);
    };
    p.integrand.dxi = [](double, double z, double, double xi) {
        const double mu = gauss_mu(z);
        return xi * mu * mu;
    };
    p.integrand.p = 3.0;
    p.integrand.q = 2.0;
    p.integrand.claims_convex = true;
    p.integrand.claims_coercive = true;

    p.boundary_data = GridFunction(p.domain);

    KernelTable mu_copy = p.mu;
    p.el_residual = [mu_copy, m_pq](const GridFunction& u) {
        GridFunction r = nonlocal_p_laplacian(u, mu_copy, 2.0);
        for (std::size_t i = 0; i < u.size(); ++i) r[i] -= m_pq * u[i] * std::abs(u[i]);
        return r;
    };
    p.verify_tol = 1e-8;
    p.minimize_opts.grad_tol = 1e-9;

    p.coercivity = CoercivityData{p.mu.map(&scaled_square, 0.0),
                                  constant_ti_table(p.domain, mass_q / (2.0 * measure)),
                                  constant_ti_table(p.domain, -mass_q / (2.0 * measure)),
                                  2.0, 1.0, 0.09, 0.5};
    return p;
}

// ---------------------------------------------------------------------------
// semilinear_convolution: constant kernel with mu^2 > mu on its support;
// the combination G(x,u) + 2u xi mu(z) + (xi mu(z))^2 reduces the equation to
// L_gamma[u] = C g(x,u) for the normalized difference kernel gamma.
// ---------------------------------------------------------------------------
Preset build_semilinear_convolution() {
    Preset p;
    p.name = "semilinear_convolution";
    p.title = "constant kernel whose square dominates it";
    p.provenance =
        "compactly supported constant kernel chosen so its square dominates it "
        "pointwise; completing the square in the integrand turns the minimization "
        "into a semilinear equation for the normalized difference kernel";
    p.kind = PresetKind::Minimize;
    p.domain = build_domain(-1.0, 1.0, 0.5, 241);
    p.kernel_spec.type = KernelSpec::Type::Constant;
    p.kernel_spec.c = 2.0;
    p.kernel_spec.horizon = 0.5;
    p.mu = sample_kernel(p.domain, p.kernel_spec);

    // mu^2 > mu wherever mu > 0, i.e. the constant must exceed 1
    for (double v : p.mu.samples())
        if (v > 0.0 && v * v <= v)
            throw_param("semilinear_convolution: kernel square must dominate the kernel "
                        "on its support (constant > 1 required)");

    const KernelTable diff = p.mu.map(&square_minus_self, 0.0);
    const double big_m = diff.difference_mass(); // ||mu^2||_1 - ||mu||_1, per derivation
    const KernelTable gamma = diff.map(&divide_by, big_m);
    const double c_const = p.domain->span() / (2.0 * big_m);

    const double mu0 = 2.0;
    // grid-scale slack so on-node differences that round past the horizon by
    // one ulp still count as support, exactly like the sampled table
    const double horizon = 0.5 + p.domain->geom_eps();
    auto mu_of = [mu0, horizon](double z) { return std::abs(z) <= horizon ? mu0 : 0.0; };

    p.has_integrand = true;
    p.integrand.eval = [mu_of](double, double z, double u, double xi) {
        const double mu = mu_of(z);
        return u * u + u * u * u * u / 4.0 + 2.0 * u * xi * mu + xi * mu * xi * mu;
    };
    p.integrand.du = [mu_of](double, double z, double u, double xi) {
        return 2.0 * u + u * u * u + 2.0 * xi * mu_of(z);
    };
    p.integrand.dxi = [mu_of](double, double z, double u, double xi) {
        const double mu = mu_of(z);
        return 2.0 * u * mu + 2.0 * xi * mu * mu;
    };
    p.integrand.p = 2.0;
    p.integrand.q = 2.0;
    p.integrand.claims_convex = true;

    GridFunction bd(p.domain);
    for (std::size_t i = 0; i < p.domain->node_count(); ++i)
        bd[i] = 0.25 * std::cos(3.141592653589793 * p.domain->node(i) / 3.0);
    p.boundary_data = std::move(bd);

    p.el_residual = [gamma, c_const](const GridFunction& u) {
        GridFunction r = nonlocal_laplacian(u, gamma);
        for (std::size_t i = 0; i < u.size(); ++i)
            r[i] -= c_const * (2.0 * u[i] + u[i] * u[i] * u[i]);
        return r;
    };
    p.verify_tol = 1e-6;
    p.minimize_opts.grad_tol = 2e-9;
    p.minimize_opts.max_iters = 30000;
    return p;
}

} // namespace

std::vector<std::string> preset_names() {
    return {"arctan_semilinear", "illposed", "quasilinear_potential", "double_power",
            "semilinear_convolution"};
}

Preset preset(const std::string& name) {
    if (name == "arctan_semilinear") return build_arctan();
    if (name == "illposed") return build_illposed();
    if (name == "quasilinear_potential") return build_quasilinear();
    if (name == "double_power") return build_double_power();
    if (name == "semilinear_convolution") return build_semilinear_convolution();
    throw_param("unknown preset '" + name + "'");
}

DiagnosticReport verify_preset(const Preset& p, const GridFunction& solution) {
    if (!p.el_residual) throw_config("verify_preset: preset has no residual check");
    if (!solution.domain() || !solution.domain()->same_grid_as(*p.domain))
        throw_param("verify_preset: solution on the wrong grid");
    const GridFunction r = p.el_residual(solution);
    const double rn = linf_norm(r, Region::Free);

    DiagnosticReport rep;
    rep.check = "el_residual";
    rep.tolerance = p.verify_tol;
    rep.worst_margin = rn - p.verify_tol;
    rep.passed = rn <= p.verify_tol;
    rep.trials = 1;
    rep.witness = {{"residual_inf", rn}};
    return rep;
}

std::vector<DiagnosticReport> audit_preset(const Preset& p, int trials,
                                           std::uint64_t seed) {
    std::vector<DiagnosticReport> out;
    if (p.has_integrand && p.integrand.claims_convex)
        out.push_back(check_convexity(p.domain, p.integrand, trials, seed));
    if (p.has_integrand && p.coercivity)
        out.push_back(check_coercivity(p.domain, p.integrand, *p.coercivity, trials,
                                       seed + 1));
    if (p.has_integrand && p.growth_local)
        out.push_back(check_growth_local(p.domain, p.integrand, *p.growth_local, trials,
                                         seed + 2));
    if (p.has_integrand && p.growth_polynomial)
        out.push_back(check_growth_polynomial(p.domain, p.integrand, *p.growth_polynomial,
                                              trials, seed + 3));
    return out;
}

DiagnosticReport check_constant_consistency(const Preset& p) {
    if (p.name != "semilinear_convolution")
        throw_param("constant consistency check only applies to semilinear_convolution");

    const KernelTable mu2 = p.mu.map([](double v, double) { return v * v; }, 0.0);
    const KernelTable diff = p.mu.map(&square_minus_self, 0.0);
    const double mass_of_difference = diff.difference_mass();
    const double difference_of_masses = mu2.difference_mass() - p.mu.difference_mass();
    const KernelTable gamma = diff.map(&divide_by, mass_of_difference);
    const double gamma_mass = gamma.difference_mass();

    const double gap_m = std::abs(mass_of_difference - difference_of_masses);
    const double gap_gamma = std::abs(gamma_mass - 1.0);

    DiagnosticReport rep;
    rep.check = "constant_consistency";
    rep.tolerance = 1e-10;
    rep.worst_margin = std::max(gap_m, gap_gamma);
    rep.passed = rep.worst_margin <= rep.tolerance;
    rep.trials = 1;
    rep.witness = {{"mass_of_difference", mass_of_difference},
                   {"difference_of_masses", difference_of_masses},
                   {"gamma_mass", gamma_mass},
                   {"normalization_gap", gap_m},
                   {"gamma_mass_gap", gap_gamma}};
    return rep;
}

GridFunction truncated_spike(const DomainPtr& d) {
    if (!d) throw_config("truncated_spike: null domain");
    GridFunction h(d);
    const double cap = 1.0 / std::sqrt(d->spacing());
    for (std::size_t i = 0; i < d->node_count(); ++i) {
        const double ax = std::abs(d->node(i));
        h[i] = ax < d->spacing() ? cap : 1.0 / std::sqrt(ax);
    }
    return h;
}

} // namespace nonloc
