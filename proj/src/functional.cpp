#include "nonloc/functional.hpp"

#include "nonloc/error.hpp"
#include "nonloc/parallel.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "json.hpp"

namespace nonloc {

namespace {

void require_integrand(const Integrand& f, const char* who) {
    if (!f.eval) throw_config(std::string(who) + ": integrand has no eval callable");
}

void require_derivatives(const Integrand& f, const char* who) {
    if (!f.du || !f.dxi)
        throw_config(std::string(who) + ": integrand derivatives not supplied");
}

void require_scalar_operand(const GridFunction& u, const char* who) {
    if (!u.domain()) throw_config(std::string(who) + ": function has no domain");
    if (u.components() != 1)
        throw_param(std::string(who) + ": single-component function required");
}

[[noreturn]] void bad_sample(const char* who, std::size_t i, std::size_t j, double x,
                             double y) {
    throw_eval(std::string(who) + ": non-finite integrand sample at (i=" +
               std::to_string(i) + ", j=" + std::to_string(j) + "), x=" +
               std::to_string(x) + ", y=" + std::to_string(y));
}

// Sum per-row contributions serially in index order so the total is
// independent of the thread count.
double reduce_rows(const std::vector<double>& rows) {
    double acc = 0.0;
    for (double v : rows) acc += v;
    return acc;
}

} // namespace

double energy(const GridFunction& u, const Integrand& f) {
    require_scalar_operand(u, "energy");
    require_integrand(f, "energy");
    const Domain& d = *u.domain();
    const std::size_t m = d.node_count();
    const double* x = d.nodes().data();
    const double* w = d.weights().data();

    std::vector<double> rows(m, 0.0);
    parallel_for(m, [&](std::size_t i) {
        const double xi_ = x[i];
        const double ui = u[i];
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double v = f.eval(xi_, x[j] - xi_, ui, u[j] - ui);
            if (!std::isfinite(v)) bad_sample("energy", i, j, xi_, x[j]);
            acc += w[j] * v;
        }
        rows[i] = w[i] * acc;
    });
    return reduce_rows(rows);
}

double gateaux(const GridFunction& u, const GridFunction& phi, const Integrand& f) {
    require_scalar_operand(u, "gateaux");
    require_scalar_operand(phi, "gateaux");
    require_integrand(f, "gateaux");
    require_derivatives(f, "gateaux");
    if (!u.domain()->same_grid_as(*phi.domain()))
        throw_param("gateaux: u and phi live on different grids");
    const Domain& d = *u.domain();
    for (std::size_t i : d.collar_fixed_nodes())
        if (phi[i] != 0.0)
            throw_param("gateaux: variation must vanish on collar-fixed nodes");

    const std::size_t m = d.node_count();
    const double* x = d.nodes().data();
    const double* w = d.weights().data();

    std::vector<double> rows(m, 0.0);
    parallel_for(m, [&](std::size_t i) {
        const double xi_ = x[i];
        const double ui = u[i];
        const double pi = phi[i];
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double z = x[j] - xi_;
            const double hat = u[j] - ui;
            double t = pi * f.du(xi_, z, ui, hat) + (phi[j] - pi) * f.dxi(xi_, z, ui, hat);
            if (!std::isfinite(t)) bad_sample("gateaux", i, j, xi_, x[j]);
            acc += w[j] * t;
        }
        rows[i] = w[i] * acc;
    });
    return reduce_rows(rows);
}

GridFunction weak_residual_vector(const GridFunction& u, const Integrand& f) {
    require_scalar_operand(u, "weak_residual_vector");
    require_integrand(f, "weak_residual_vector");
    require_derivatives(f, "weak_residual_vector");
    const Domain& d = *u.domain();
    const std::size_t m = d.node_count();
    const double* x = d.nodes().data();
    const double* w = d.weights().data();

    GridFunction r(u.domain());
    parallel_for(m, [&](std::size_t i) {
        if (d.node_class(i) == NodeClass::CollarFixed) {
            r[i] = 0.0; // the equation is only asserted on free nodes
            return;
        }
        const double xi_ = x[i];
        const double ui = u[i];
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double z = x[j] - xi_;
            const double hat = u[j] - ui;
            // the mirrored dxi term is what the double-sum rearrangement of
            // the first variation produces; with it, sum_i w_i phi_i r_i
            // reproduces gateaux(u, phi) for every admissible phi
            double t = f.du(xi_, z, ui, hat) - f.dxi(xi_, z, ui, hat) +
                       f.dxi(x[j], -z, u[j], -hat);
            if (!std::isfinite(t)) bad_sample("weak_residual_vector", i, j, xi_, x[j]);
            acc += w[j] * t;
        }
        r[i] = acc;
    });
    return r;
}

GridFunction strong_el_residual(const GridFunction& u, const Integrand& f) {
    return weak_residual_vector(u, f);
}

// ===========================================================================
// sampled hypothesis checks
// ===========================================================================

namespace {

constexpr double kCheckTol = 1e-10;

struct PairSampler {
    const Domain& d;
    std::mt19937_64& rng;
    std::uniform_int_distribution<std::size_t> pick;

    PairSampler(const Domain& dd, std::mt19937_64& r)
        : d(dd), rng(r), pick(0, dd.node_count() - 1) {}

    // random grid pair -> (x, z) with z = y - x
    std::pair<double, double> operator()() {
        const std::size_t i = pick(rng);
        const std::size_t j = pick(rng);
        return {d.node(i), d.node(j) - d.node(i)};
    }
};

} // namespace

std::string DiagnosticReport::to_json_string() const {
    nlohmann::json j;
    j["check"] = check;
    j["passed"] = passed;
    j["worst_margin"] = worst_margin;
    j["tolerance"] = tolerance;
    j["witness"] = witness;
    j["trials"] = trials;
    j["seed"] = seed;
    j["sample_box"] = sample_box;
    return j.dump();
}

DiagnosticReport check_convexity(const DomainPtr& d, const Integrand& f, int trials,
                                 std::uint64_t seed, double sample_box) {
    if (!d) throw_config("check_convexity: null domain");
    require_integrand(f, "check_convexity");
    if (trials < 1) throw_param("check_convexity: trials must be >= 1");

    std::mt19937_64 rng(seed);
    PairSampler xz(*d, rng);
    std::uniform_real_distribution<double> box(-sample_box, sample_box);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    DiagnosticReport rep;
    rep.check = "convexity";
    rep.tolerance = kCheckTol;
    rep.trials = trials;
    rep.seed = seed;
    rep.sample_box = sample_box;
    rep.worst_margin = -std::numeric_limits<double>::infinity();

    for (int n = 0; n < trials; ++n) {
        const auto [x, z] = xz();
        const double u1 = box(rng), xi1 = box(rng);
        const double u2 = box(rng), xi2 = box(rng);
        const double t = unit(rng);
        const double fm = f.eval(x, z, t * u1 + (1.0 - t) * u2, t * xi1 + (1.0 - t) * xi2);
        const double fc = t * f.eval(x, z, u1, xi1) + (1.0 - t) * f.eval(x, z, u2, xi2);
        const double violation = fm - fc;
        if (violation > rep.worst_margin) {
            rep.worst_margin = violation;
            rep.witness = {{"x", x},   {"z", z},   {"u1", u1}, {"xi1", xi1},
                           {"u2", u2}, {"xi2", xi2}, {"t", t}};
        }
    }
    rep.passed = rep.worst_margin <= rep.tolerance;
    return rep;
}

DiagnosticReport check_coercivity(const DomainPtr& d, const Integrand& f,
                                  const CoercivityData& c, int trials, std::uint64_t seed,
                                  double sample_box) {
    if (!d) throw_config("check_coercivity: null domain");
    require_integrand(f, "check_coercivity");
    if (trials < 1) throw_param("check_coercivity: trials must be >= 1");
    if (!(c.q >= 1.0 && c.q < c.p))
        throw_param("check_coercivity: exponents must satisfy 1 <= q < p");
    if (!d->same_grid_as(*c.alpha1.domain()))
        throw_param("check_coercivity: alpha tables on the wrong grid");

    // the declared lower-bound kernel must dominate C0 on the near band
    const std::size_t m = d->node_count();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const double z = d->node(j) - d->node(i);
            if (std::abs(z) <= c.delta + d->geom_eps() && c.alpha1.at(i, j) < c.C0)
                throw_param("check_coercivity: alpha1 falls below C0 inside the delta band");
        }

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, m - 1);
    std::uniform_real_distribution<double> box(-sample_box, sample_box);

    DiagnosticReport rep;
    rep.check = "coercivity";
    rep.tolerance = kCheckTol;
    rep.trials = trials;
    rep.seed = seed;
    rep.sample_box = sample_box;
    rep.worst_margin = -std::numeric_limits<double>::infinity();

    for (int n = 0; n < trials; ++n) {
        const std::size_t i = pick(rng);
        const std::size_t j = pick(rng);
        const double x = d->node(i);
        const double z = d->node(j) - x;
        const double u = box(rng), xi = box(rng);
        const double bound = c.alpha1.at(i, j) * std::pow(std::abs(xi), c.p) +
                             c.alpha2.at(i, j) * std::pow(std::abs(u), c.q) +
                             c.alpha3.at(i, j);
        const double violation = bound - f.eval(x, z, u, xi);
        if (violation > rep.worst_margin) {
            rep.worst_margin = violation;
            rep.witness = {{"x", x}, {"z", z}, {"u", u}, {"xi", xi},
                           {"f", f.eval(x, z, u, xi)}, {"bound", bound}};
        }
    }
    rep.passed = rep.worst_margin <= rep.tolerance;
    return rep;
}

DiagnosticReport check_growth_local(const DomainPtr& d, const Integrand& f,
                                    const GrowthDataLocal& g, int trials,
                                    std::uint64_t seed) {
    if (!d) throw_config("check_growth_local: null domain");
    require_derivatives(f, "check_growth_local");
    if (trials < 1) throw_param("check_growth_local: trials must be >= 1");
    if (g.majorants.empty()) throw_param("check_growth_local: no majorants supplied");

    std::mt19937_64 rng(seed);
    PairSampler xz(*d, rng);

    DiagnosticReport rep;
    rep.check = "growth_local";
    rep.tolerance = kCheckTol;
    rep.trials = trials;
    rep.seed = seed;
    rep.sample_box = 0.0; // boxes come from the majorant radii
    rep.worst_margin = -std::numeric_limits<double>::infinity();

    for (const GrowthMajorant& mj : g.majorants) {
        if (!(mj.R > 0.0) || !mj.a_R)
            throw_param("check_growth_local: majorant needs R > 0 and a callable");
        std::uniform_real_distribution<double> ball(-mj.R, mj.R);
        for (int n = 0; n < trials; ++n) {
            const auto [x, z] = xz();
            const double u = ball(rng), xi = ball(rng);
            const double deriv =
                std::max(std::abs(f.du(x, z, u, xi)), std::abs(f.dxi(x, z, u, xi)));
            const double maj = mj.a_R(x, z);
            const double violation = deriv - maj;
            if (violation > rep.worst_margin) {
                rep.worst_margin = violation;
                rep.witness = {{"R", mj.R}, {"x", x},         {"z", z},
                               {"u", u},   {"xi", xi},        {"deriv", deriv},
                               {"majorant", maj},
                               {"ratio", maj != 0.0 ? deriv / maj : INFINITY}};
            }
        }
    }
    rep.passed = rep.worst_margin <= rep.tolerance;
    return rep;
}

DiagnosticReport check_growth_polynomial(const DomainPtr& d, const Integrand& f,
                                         const GrowthDataPolynomial& g, int trials,
                                         std::uint64_t seed, double sample_box) {
    if (!d) throw_config("check_growth_polynomial: null domain");
    require_derivatives(f, "check_growth_polynomial");
    if (trials < 1) throw_param("check_growth_polynomial: trials must be >= 1");
    if (!g.a || !g.beta) throw_param("check_growth_polynomial: a and beta required");
    if (!(g.p > 1.0)) throw_param("check_growth_polynomial: p must exceed 1");

    std::mt19937_64 rng(seed);
    PairSampler xz(*d, rng);
    std::uniform_real_distribution<double> box(-sample_box, sample_box);

    DiagnosticReport rep;
    rep.check = "growth_polynomial";
    rep.tolerance = kCheckTol;
    rep.trials = trials;
    rep.seed = seed;
    rep.sample_box = sample_box;
    rep.worst_margin = -std::numeric_limits<double>::infinity();

    for (int n = 0; n < trials; ++n) {
        const auto [x, z] = xz();
        const double u = box(rng), xi = box(rng);
        const double deriv =
            std::max(std::abs(f.du(x, z, u, xi)), std::abs(f.dxi(x, z, u, xi)));
        const double bound =
            g.a(x, z) + std::abs(g.beta(x, z)) * (std::pow(std::abs(u), g.p - 1.0) +
                                                  std::pow(std::abs(xi), g.p - 1.0));
        const double violation = deriv - bound;
        if (violation > rep.worst_margin) {
            rep.worst_margin = violation;
            rep.witness = {{"x", x},         {"z", z},     {"u", u},
                           {"xi", xi},       {"deriv", deriv}, {"bound", bound},
                           {"ratio", bound != 0.0 ? deriv / bound : INFINITY}};
        }
    }
    rep.passed = rep.worst_margin <= rep.tolerance;
    return rep;
}

} // namespace nonloc
