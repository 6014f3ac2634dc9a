#include "nonloc/minimize.hpp"

#include "nonloc/error.hpp"

#include <cmath>
#include <random>

namespace nonloc {

const char* to_string(TerminationReason r) {
    switch (r) {
        case TerminationReason::GradientTol: return "gradient_tol";
        case TerminationReason::MaxIters: return "max_iters";
        case TerminationReason::LineSearchFailure: return "line_search_failure";
    }
    return "unknown";
}

GridFunction assemble_gradient(const GridFunction& u, const Integrand& f) {
    GridFunction g = weak_residual_vector(u, f);
    const Domain& d = *u.domain();
    for (std::size_t i = 0; i < d.node_count(); ++i) g[i] *= d.weight(i);
    return g;
}

namespace {

constexpr double kMinStep = 1e-16;

GridFunction build_start(const GridFunction& u0, InitMode mode) {
    const Domain& d = *u0.domain();
    if (mode == InitMode::Given) return u0;
    GridFunction u(u0.domain());
    for (std::size_t i : d.collar_fixed_nodes()) u[i] = u0[i];
    if (mode == InitMode::BoundaryExtend) {
        double mean = 0.0;
        const auto& fixed = d.collar_fixed_nodes();
        if (!fixed.empty()) {
            for (std::size_t i : fixed) mean += u0[i];
            mean /= static_cast<double>(fixed.size());
        }
        for (std::size_t i : d.free_nodes()) u[i] = mean;
    }
    return u;
}

// energy() rejects non-finite samples by throwing; during a line search that
// just means the trial step was too long
bool try_energy(const GridFunction& u, const Integrand& f, double& out) {
    try {
        out = energy(u, f);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Eval) return false;
        throw;
    }
    return std::isfinite(out);
}

} // namespace

MinimizeResult minimize(const Integrand& f, const GridFunction& u0,
                        const MinimizeOptions& opts) {
    if (!u0.domain()) throw_config("minimize: u0 has no domain");
    if (u0.components() != 1) throw_param("minimize: single-component u0 required");
    if (!(opts.grad_tol > 0.0)) throw_param("minimize: grad_tol must be positive");
    if (!(opts.armijo_c > 0.0 && opts.armijo_c < 1.0))
        throw_param("minimize: armijo_c must lie in (0,1)");
    if (!(opts.backtrack > 0.0 && opts.backtrack < 1.0))
        throw_param("minimize: backtrack factor must lie in (0,1)");
    if (!(opts.initial_step > 0.0)) throw_param("minimize: initial step must be positive");

    const Domain& d = *u0.domain();
    GridFunction u = build_start(u0, opts.init);

    MinimizeResult res{GridFunction(u0.domain()), {}, 0.0, 0, false,
                       TerminationReason::MaxIters};

    double e_cur = 0.0;
    if (!try_energy(u, f, e_cur))
        throw_data("minimize: non-finite energy at the initial iterate");
    res.energy_trace.push_back(e_cur);

    const auto& free = d.free_nodes();
    GridFunction g = assemble_gradient(u, f);
    double gn = linf_norm(g);
    double step = opts.initial_step;

    GridFunction trial(u0.domain());

    while (true) {
        if (gn <= opts.grad_tol) {
            res.converged = true;
            res.termination_reason = TerminationReason::GradientTol;
            break;
        }
        if (res.iterations >= opts.max_iters) {
            res.termination_reason = TerminationReason::MaxIters;
            break;
        }

        double gsq = 0.0;
        for (std::size_t i : free) gsq += g[i] * g[i];

        // backtracking line search on u - s*g; collar-fixed entries are
        // copied through untouched so they stay bit-identical to u0
        double s = step;
        bool accepted = false;
        double e_new = 0.0;
        trial = u;
        while (s >= kMinStep) {
            for (std::size_t i : free) trial[i] = u[i] - s * g[i];
            if (try_energy(trial, f, e_new) && e_new <= e_cur - opts.armijo_c * s * gsq) {
                accepted = true;
                break;
            }
            s *= opts.backtrack;
        }
        if (!accepted) {
            res.termination_reason = TerminationReason::LineSearchFailure;
            break;
        }

        u = trial;
        e_cur = e_new;
        res.energy_trace.push_back(e_cur);
        ++res.iterations;
        // let the step recover after backtracking; the gradient scales with
        // the quadrature weights, so a fixed unit step is often far too short
        step = 2.0 * s;

        g = assemble_gradient(u, f);
        gn = linf_norm(g);
    }

    res.grad_inf_norm = gn;
    res.u_star = u;
    return res;
}

DiagnosticReport uniqueness_probe(const Integrand& f, const GridFunction& u0, int n_starts,
                                  std::uint64_t seed, const MinimizeOptions& opts) {
    if (!u0.domain()) throw_config("uniqueness_probe: u0 has no domain");
    if (n_starts < 2) throw_param("uniqueness_probe: n_starts must be >= 2");

    const Domain& d = *u0.domain();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> perturb(-1.0, 1.0);

    MinimizeOptions run_opts = opts;
    run_opts.init = InitMode::Given;

    const GridFunction base = build_start(u0, InitMode::BoundaryExtend);

    std::vector<GridFunction> solutions;
    int non_converged = 0;
    for (int s = 0; s < n_starts; ++s) {
        GridFunction start = base;
        for (std::size_t i : d.free_nodes()) start[i] += perturb(rng);
        MinimizeResult r = minimize(f, start, run_opts);
        if (r.converged)
            solutions.push_back(std::move(r.u_star));
        else
            ++non_converged;
    }

    double max_dist = 0.0;
    for (std::size_t a = 0; a < solutions.size(); ++a)
        for (std::size_t b = a + 1; b < solutions.size(); ++b) {
            double dd = 0.0;
            for (std::size_t i = 0; i < d.node_count(); ++i)
                dd = std::max(dd, std::abs(solutions[a][i] - solutions[b][i]));
            max_dist = std::max(max_dist, dd);
        }

    DiagnosticReport rep;
    rep.check = "uniqueness_probe";
    rep.passed = non_converged == 0;
    rep.worst_margin = max_dist;
    rep.tolerance = 0.0;
    rep.trials = n_starts;
    rep.seed = seed;
    rep.sample_box = 1.0;
    rep.witness = {{"max_pairwise_distance", max_dist},
                   {"non_converged", static_cast<double>(non_converged)},
                   {"converged", static_cast<double>(solutions.size())}};
    return rep;
}

} // namespace nonloc
