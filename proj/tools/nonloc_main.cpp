// Batch command-line surface for the nonloc library: config ingestion, solver
// dispatch, artifact emission.  One command per process; everything the run
// depended on is echoed into summary.json so results are self-describing.

#include "nonloc/config.hpp"
#include "nonloc/error.hpp"
#include "nonloc/functional.hpp"
#include "nonloc/grid.hpp"
#include "nonloc/minimize.hpp"
#include "nonloc/operators.hpp"
#include "nonloc/parallel.hpp"
#include "nonloc/presets.hpp"
#include "nonloc/semilinear.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace nonloc;

namespace {

// ======================================================================
// run context and artifact plumbing
// ======================================================================

struct RunContext {
    RunConfig cfg;
    std::string out_dir = ".";
    std::uint64_t seed = 12345;
    json config_doc = json::object(); // effective, defaults materialized
    bool dir_ready = false;

    // Lazily created so failed validation never leaves stray directories.
    std::string out(const std::string& name) {
        if (!dir_ready) {
            fs::create_directories(out_dir);
            dir_ready = true;
        }
        return (fs::path(out_dir) / name).string();
    }

    bool emits(const std::string& name) const {
        const auto& e = cfg.output.emit;
        return std::find(e.begin(), e.end(), name) != e.end();
    }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw_data("cannot open for writing: " + path);
    out << text;
    if (!out) throw_data("write failed: " + path);
}

std::string hash_hex(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json domain_json(const Domain& d) {
    json gp = json::array();
    for (const Interval& iv : d.free_collar_intervals())
        gp.push_back(json::array({iv.lo, iv.hi}));
    return {{"a", d.a()},
            {"b", d.b()},
            {"collar_width", d.collar_width()},
            {"node_count", d.node_count()},
            {"gamma_prime", gp}};
}

json kernel_json(const KernelSpec& k) {
    switch (k.type) {
        case KernelSpec::Type::Gaussian:
            return {{"type", "gaussian"}, {"sigma", k.sigma},
                    {"truncation_tol", k.truncation_tol}};
        case KernelSpec::Type::Constant:
            return {{"type", "constant"}, {"c", k.c}, {"horizon", k.horizon}};
        case KernelSpec::Type::TableFile:
            return {{"type", "table_file"}, {"file", k.path}};
        case KernelSpec::Type::TwoPointFile:
            return {{"type", "two_point_file"}, {"file", k.path}};
    }
    return {};
}

json report_to_json(const DiagnosticReport& r) { return json::parse(r.to_json_string()); }

/// Emit summary.json (always) and translate pass/fail into the exit code.
int finish(RunContext& ctx, const std::string& command, bool passed,
           const json& key_metrics, std::optional<bool> converged = std::nullopt) {
    ctx.config_doc["output"] = {{"dir", ctx.out_dir}, {"emit", ctx.cfg.output.emit}};
    json summary = {{"command", command},
                    {"passed", passed},
                    {"key_metrics", key_metrics},
                    {"config", ctx.config_doc},
                    {"config_hash", hash_hex(fnv1a64(ctx.config_doc.dump()))}};
    if (converged) summary["converged"] = *converged;
    const std::string text = summary.dump(2) + "\n";
    write_text(ctx.out("summary.json"), text);
    std::cout << text;
    return passed ? 0 : 1;
}

// ======================================================================
// effective solver settings (preset defaults + config overrides)
// ======================================================================

MinimizeOptions effective_min_opts(const Preset& p, const SolverConfig& s) {
    MinimizeOptions o = p.minimize_opts;
    const OptimizerOverrides& ov = s.optimizer;
    if (ov.grad_tol) o.grad_tol = *ov.grad_tol;
    if (ov.max_iters)
        o.max_iters = *ov.max_iters;
    else if (s.max_iters)
        o.max_iters = *s.max_iters;
    if (ov.armijo_c) o.armijo_c = *ov.armijo_c;
    if (ov.backtrack) o.backtrack = *ov.backtrack;
    if (ov.initial_step) o.initial_step = *ov.initial_step;
    // boundary_data carries collar values plus the starting iterate
    o.init = InitMode::Given;
    if (ov.init) o.init = (*ov.init == "zero") ? InitMode::Zero : InitMode::BoundaryExtend;
    return o;
}

const char* init_name(InitMode m) {
    switch (m) {
        case InitMode::Zero: return "zero";
        case InitMode::BoundaryExtend: return "boundary_extend";
        case InitMode::Given: return "given";
    }
    return "given";
}

json min_opts_json(const MinimizeOptions& o, std::uint64_t seed) {
    return {{"optimizer",
             {{"grad_tol", o.grad_tol},
              {"max_iters", o.max_iters},
              {"armijo_c", o.armijo_c},
              {"backtrack", o.backtrack},
              {"initial_step", o.initial_step},
              {"init", init_name(o.init)}}},
            {"seed", seed}};
}

double effective_fp_tol(const Preset& p, const SolverConfig& s) {
    if (s.fixed_point.tol) return *s.fixed_point.tol;
    if (s.tol) return *s.tol;
    return p.fp_tol;
}

std::size_t effective_fp_iters(const Preset& p, const SolverConfig& s) {
    if (s.fixed_point.max_iters) return *s.fixed_point.max_iters;
    if (s.max_iters) return *s.max_iters;
    return p.fp_max_iters;
}

double effective_theta(const SolverConfig& s) {
    return s.fixed_point.theta ? *s.fixed_point.theta : 1.0;
}

void describe_problem(RunContext& ctx, const Preset& p) {
    if (!ctx.config_doc.contains("problem"))
        ctx.config_doc["problem"] = {{"preset_name", p.name}};
    ctx.config_doc["domain"] = domain_json(*p.domain);
    ctx.config_doc["kernel"] = kernel_json(p.kernel_spec);
}

Preset preset_from(const RunContext& ctx, const std::string& flag) {
    const std::string name = !flag.empty() ? flag : ctx.cfg.preset_name;
    if (name.empty())
        throw_config("no preset selected: pass --preset or set problem.preset_name "
                     "in the config");
    return preset(name);
}

// ======================================================================
// preset run bodies (shared by `minimize`, `semilinear`, `preset run`)
// ======================================================================

int run_minimize(RunContext& ctx, const std::string& command, const Preset& p) {
    if (!p.has_integrand)
        throw_param("preset '" + p.name + "' has no energy integrand to minimize");
    const MinimizeOptions opts = effective_min_opts(p, ctx.cfg.solver);
    describe_problem(ctx, p);
    ctx.config_doc["solver"] = min_opts_json(opts, ctx.seed);

    const MinimizeResult res = minimize(p.integrand, p.boundary_data, opts);
    DiagnosticReport ver;
    bool verified = false;
    if (p.el_residual) {
        ver = verify_preset(p, res.u_star);
        verified = ver.passed;
    }

    if (ctx.emits("solution_csv")) write_grid_function_csv(ctx.out("solution.csv"), res.u_star);
    if (ctx.emits("trace_json")) {
        json t = {{"energy_trace", res.energy_trace},
                  {"grad_inf_norm", res.grad_inf_norm},
                  {"iterations", res.iterations}};
        write_text(ctx.out("trace.json"), t.dump(2) + "\n");
    }
    if (ctx.emits("report_json")) {
        json r = {{"run",
                   {{"converged", res.converged},
                    {"iterations", res.iterations},
                    {"grad_inf_norm", res.grad_inf_norm},
                    {"energy", res.energy_trace.back()},
                    {"termination_reason", to_string(res.termination_reason)}}}};
        if (p.el_residual) r["verification"] = report_to_json(ver);
        write_text(ctx.out("report.json"), r.dump(2) + "\n");
    }
    if (ctx.emits("residual_csv") && p.el_residual)
        write_grid_function_csv(ctx.out("residual.csv"), p.el_residual(res.u_star));

    json km = {{"energy", res.energy_trace.back()},
               {"iterations", res.iterations},
               {"grad_inf_norm", res.grad_inf_norm},
               {"termination_reason", to_string(res.termination_reason)}};
    if (p.el_residual) km["residual_inf"] = ver.witness.at("residual_inf");
    const bool ok = res.converged && (!p.el_residual || verified);
    return finish(ctx, command, ok, km, res.converged);
}

int run_fixed_point(RunContext& ctx, const std::string& command, const Preset& p) {
    if (!p.has_semilinear)
        throw_param("preset '" + p.name + "' has no semilinear formulation");
    const double tol = effective_fp_tol(p, ctx.cfg.solver);
    const std::size_t iters = effective_fp_iters(p, ctx.cfg.solver);
    const double theta = effective_theta(ctx.cfg.solver);
    describe_problem(ctx, p);
    ctx.config_doc["solver"] = {
        {"fixed_point", {{"tol", tol}, {"max_iters", iters}, {"theta", theta}}},
        {"seed", ctx.seed}};

    const SolveResult res = solve_fixed_point(p.semilinear, p.boundary_data, tol, iters, theta);
    DiagnosticReport ver;
    bool verified = false;
    if (p.el_residual) {
        ver = verify_preset(p, res.u_star);
        verified = ver.passed;
    }

    if (ctx.emits("solution_csv")) write_grid_function_csv(ctx.out("solution.csv"), res.u_star);
    if (ctx.emits("trace_json")) {
        json t = {{"update_norms", res.update_norms},
                  {"contraction_estimates", res.contraction_estimates}};
        write_text(ctx.out("trace.json"), t.dump(2) + "\n");
    }
    if (ctx.emits("report_json")) {
        json r = {{"run",
                   {{"converged", res.converged},
                    {"iterations", res.iterations},
                    {"residual_inf", res.residual_inf}}}};
        if (p.el_residual) r["verification"] = report_to_json(ver);
        write_text(ctx.out("report.json"), r.dump(2) + "\n");
    }
    if (ctx.emits("residual_csv") && p.el_residual)
        write_grid_function_csv(ctx.out("residual.csv"), p.el_residual(res.u_star));

    json km = {{"residual_inf", res.residual_inf}, {"iterations", res.iterations}};
    if (!res.contraction_estimates.empty())
        km["contraction_last"] = res.contraction_estimates.back();
    if (p.el_residual) km["verify_residual_inf"] = ver.witness.at("residual_inf");
    const bool ok = res.converged && (!p.el_residual || verified);
    return finish(ctx, command, ok, km, res.converged);
}

int run_demo(RunContext& ctx, const std::string& command, const Preset& p, int trials) {
    describe_problem(ctx, p);
    ctx.config_doc["solver"] = {{"seed", ctx.seed}};
    ctx.config_doc["demo"] = {{"trials", trials}, {"ls_iters", p.demo_ls_iters}};

    DomainPtr d = p.domain;
    json grids = json::array();
    std::vector<double> bounds;
    int violations = 0;
    bool young_ok = true;
    for (int g = 0; g < 3; ++g) {
        if (g > 0) d = refine_domain(*d);
        const KernelTable mu = sample_kernel(d, p.kernel_spec);
        const GridFunction h = truncated_spike(d);
        const DiagnosticReport rep = illposed_demo(h, mu, trials, ctx.seed, p.demo_ls_iters);
        bounds.push_back(rep.witness.at("forced_l1_bound"));
        violations += static_cast<int>(rep.witness.at("young_violations"));
        young_ok = young_ok && rep.passed;
        grids.push_back({{"node_count", d->node_count()}, {"report", report_to_json(rep)}});
    }
    json factors = json::array();
    double min_factor = std::numeric_limits<double>::infinity();
    for (std::size_t g = 1; g < bounds.size(); ++g) {
        const double f = bounds[g] / bounds[g - 1];
        factors.push_back(f);
        min_factor = std::min(min_factor, f);
    }

    if (ctx.emits("report_json")) {
        json r = {{"grids", grids},
                  {"forced_l1_bounds", bounds},
                  {"growth_factors", factors}};
        write_text(ctx.out("report.json"), r.dump(2) + "\n");
    }

    // the demo succeeds when the convolution bound held everywhere and the
    // forced mass actually blows up under refinement
    const bool ok = young_ok && min_factor >= 1.3;
    json km = {{"young_violations", violations},
               {"forced_l1_bounds", bounds},
               {"growth_factors", factors},
               {"min_growth_factor", min_factor}};
    return finish(ctx, command, ok, km);
}

int run_preset(RunContext& ctx, const std::string& name, int demo_trials) {
    const Preset p = preset(name);
    switch (p.kind) {
        case PresetKind::Minimize: return run_minimize(ctx, "preset run", p);
        case PresetKind::FixedPoint: return run_fixed_point(ctx, "preset run", p);
        case PresetKind::Demo:
            return run_demo(ctx, "preset run", p,
                            demo_trials > 0 ? demo_trials : p.demo_trials);
    }
    throw_param("preset '" + name + "' has an unknown kind");
}

// ======================================================================
// apply: single-operator file-to-file dispatch
// ======================================================================

struct ApplyArgs {
    std::string op;
    std::string u_path;
    std::string field_path;
    double p_exp = 2.0;
    std::string method = "direct";
    std::optional<double> a, b, collar;
    std::optional<std::size_t> nodes;
    std::string kernel_type;
    std::optional<double> sigma, trunc_tol, c, horizon;
    std::string kernel_file;
};

int cmd_apply(RunContext& ctx, const ApplyArgs& args) {
    RunConfig& cfg = ctx.cfg;
    if (!cfg.preset_name.empty())
        throw_config("apply works on explicit domain/kernel settings, not presets");
    if (args.a) cfg.a = *args.a;
    if (args.b) cfg.b = *args.b;
    if (args.collar) cfg.collar_width = *args.collar;
    if (args.nodes) cfg.node_count = *args.nodes;

    KernelSpec spec = cfg.kernel;
    if (!args.kernel_type.empty()) {
        if (args.kernel_type == "gaussian") spec.type = KernelSpec::Type::Gaussian;
        else if (args.kernel_type == "constant") spec.type = KernelSpec::Type::Constant;
        else if (args.kernel_type == "table_file") spec.type = KernelSpec::Type::TableFile;
        else spec.type = KernelSpec::Type::TwoPointFile;
    }
    if (args.sigma) spec.sigma = *args.sigma;
    if (args.trunc_tol) spec.truncation_tol = *args.trunc_tol;
    if (args.c) spec.c = *args.c;
    if (args.horizon) spec.horizon = *args.horizon;
    if (!args.kernel_file.empty()) spec.path = args.kernel_file;

    const DomainPtr d = domain_from_config(cfg);
    const KernelTable K = sample_kernel(d, spec);
    ctx.config_doc["domain"] = domain_json(*d);
    ctx.config_doc["kernel"] = kernel_json(spec);
    ctx.config_doc["apply"] = {{"operator", args.op}};

    auto need_u = [&]() {
        if (args.u_path.empty()) throw_config("apply " + args.op + ": --u is required");
        return read_grid_function_csv(args.u_path, d);
    };

    std::string out_name;
    double result_inf = 0.0;
    if (args.op == "gradient") {
        const TwoPointField g = nonlocal_gradient(need_u(), K);
        out_name = "gradient.csv";
        write_two_point_csv(ctx.out(out_name), d, g.values(), "g");
        for (double v : g.values()) result_inf = std::max(result_inf, std::abs(v));
    } else {
        GridFunction r;
        if (args.op == "divergence") {
            if (args.field_path.empty())
                throw_config("apply divergence: --field is required");
            std::vector<double> vals = read_two_point_csv(args.field_path, d->node_count());
            r = nonlocal_divergence(TwoPointField(d, std::move(vals)), K);
        } else if (args.op == "laplacian") {
            r = nonlocal_laplacian(need_u(), K);
        } else if (args.op == "p_laplacian") {
            ctx.config_doc["apply"]["p"] = args.p_exp;
            r = nonlocal_p_laplacian(need_u(), K, args.p_exp);
        } else { // convolve
            ctx.config_doc["apply"]["method"] = args.method;
            r = convolve(need_u(), K,
                         args.method == "fft" ? ConvolveMethod::Fft : ConvolveMethod::Direct);
        }
        out_name = args.op + ".csv";
        write_grid_function_csv(ctx.out(out_name), r);
        result_inf = linf_norm(r);
    }

    json km = {{"output", out_name}, {"result_inf", result_inf}};
    return finish(ctx, "apply " + args.op, true, km);
}

// ======================================================================
// residual / check / catalog commands
// ======================================================================

int cmd_residual(RunContext& ctx, const std::string& preset_flag, const std::string& u_path) {
    const Preset p = preset_from(ctx, preset_flag);
    describe_problem(ctx, p);
    const GridFunction u = read_grid_function_csv(u_path, p.domain);
    const DiagnosticReport rep = verify_preset(p, u);

    write_grid_function_csv(ctx.out("residual.csv"), p.el_residual(u));
    if (ctx.emits("report_json"))
        write_text(ctx.out("report.json"), rep.to_json_string() + "\n");

    json km = {{"residual_inf", rep.witness.at("residual_inf")},
               {"tolerance", rep.tolerance}};
    return finish(ctx, "residual", rep.passed, km);
}

int cmd_check(RunContext& ctx, const std::string& which, const std::string& preset_flag,
              int trials) {
    const Preset p = preset_from(ctx, preset_flag);
    if (!p.has_integrand)
        throw_param("preset '" + p.name + "' has no energy integrand to audit");
    describe_problem(ctx, p);
    ctx.config_doc["check"] = {{"which", which}, {"trials", trials}, {"seed", ctx.seed}};

    std::vector<DiagnosticReport> reps;
    if (which == "convexity") {
        reps.push_back(check_convexity(p.domain, p.integrand, trials, ctx.seed));
    } else if (which == "coercivity") {
        if (!p.coercivity)
            throw_param("preset '" + p.name + "' declares no coercivity data");
        reps.push_back(check_coercivity(p.domain, p.integrand, *p.coercivity, trials, ctx.seed));
    } else { // growth
        if (p.growth_local)
            reps.push_back(check_growth_local(p.domain, p.integrand, *p.growth_local,
                                              trials, ctx.seed));
        if (p.growth_polynomial)
            reps.push_back(check_growth_polynomial(p.domain, p.integrand,
                                                   *p.growth_polynomial, trials, ctx.seed));
        if (reps.empty())
            throw_param("preset '" + p.name + "' declares no growth data");
    }

    bool all_ok = true;
    double worst = -std::numeric_limits<double>::infinity();
    json arr = json::array();
    for (const DiagnosticReport& r : reps) {
        all_ok = all_ok && r.passed;
        worst = std::max(worst, r.worst_margin);
        arr.push_back(report_to_json(r));
    }
    if (ctx.emits("report_json"))
        write_text(ctx.out("report.json"), arr.dump(2) + "\n");

    json km = {{"checks", reps.size()}, {"worst_margin", worst}};
    return finish(ctx, "check " + which, all_ok, km);
}

json preset_summary_json(const Preset& p) {
    return {{"name", p.name},
            {"title", p.title},
            {"kind", to_string(p.kind)},
            {"provenance", p.provenance}};
}

int cmd_preset_list(RunContext& ctx) {
    json arr = json::array();
    for (const std::string& name : preset_names())
        arr.push_back(preset_summary_json(preset(name)));
    // the catalog rides inside the summary so stdout stays one document
    return finish(ctx, "preset list", true, {{"count", arr.size()}, {"presets", arr}});
}

int cmd_preset_describe(RunContext& ctx, const std::string& name) {
    const Preset p = preset(name);
    json doc = preset_summary_json(p);
    doc["domain"] = domain_json(*p.domain);
    doc["kernel"] = kernel_json(p.kernel_spec);
    doc["verify_tol"] = p.verify_tol;
    doc["has_integrand"] = p.has_integrand;
    doc["has_semilinear"] = p.has_semilinear;
    doc["declares"] = {{"convexity", p.has_integrand && p.integrand.claims_convex},
                       {"coercivity", static_cast<bool>(p.coercivity)},
                       {"growth_local", static_cast<bool>(p.growth_local)},
                       {"growth_polynomial", static_cast<bool>(p.growth_polynomial)}};
    if (p.kind == PresetKind::FixedPoint)
        doc["fixed_point"] = {{"tol", p.fp_tol}, {"max_iters", p.fp_max_iters}};
    if (p.kind == PresetKind::Minimize)
        doc["optimizer"] = {{"grad_tol", p.minimize_opts.grad_tol},
                            {"max_iters", p.minimize_opts.max_iters}};
    return finish(ctx, "preset describe", true, doc);
}

// ======================================================================
// semilinear from an explicit config (non-preset path)
// ======================================================================

int cmd_semilinear(RunContext& ctx, const std::string& preset_flag) {
    if (!preset_flag.empty() || !ctx.cfg.preset_name.empty())
        return run_fixed_point(ctx, "semilinear", preset_from(ctx, preset_flag));
    if (!ctx.cfg.has_semilinear)
        throw_config("semilinear needs problem.semilinear or a preset");

    const SemilinearConfig& sc = ctx.cfg.semilinear;
    const DomainPtr d = domain_from_config(ctx.cfg);
    const KernelTable mu = sample_kernel(d, ctx.cfg.kernel);

    std::function<double(double, double)> f0, df0;
    if (sc.rhs == "arctan") {
        const double s = sc.scale, c0 = sc.c0;
        f0 = [s, c0](double x, double u) {
            return c0 + s * (std::atan(u) + 1.0) / (x * x + 1.0);
        };
        df0 = [s](double x, double u) {
            return s / ((1.0 + u * u) * (x * x + 1.0));
        };
    } else { // linear
        const double c0 = sc.c0, c1 = sc.c1;
        f0 = [c0, c1](double, double u) { return c0 - c1 * u; };
        df0 = [c1](double, double) { return -c1; };
    }
    const SemilinearProblem prob = make_semilinear_problem(d, mu, f0, df0, sc.m0);

    Preset p; // wrap so the shared runner handles artifacts uniformly
    p.name = "semilinear(" + sc.rhs + ")";
    p.kind = PresetKind::FixedPoint;
    p.domain = d;
    p.kernel_spec = ctx.cfg.kernel;
    p.mu = mu;
    p.has_semilinear = true;
    p.semilinear = prob;
    p.boundary_data = GridFunction(d);
    KernelTable mu_copy = mu;
    p.el_residual = [mu_copy, f0](const GridFunction& u) {
        GridFunction r = nonlocal_laplacian(u, mu_copy);
        const Domain& dd = *u.domain();
        for (std::size_t i = 0; i < dd.node_count(); ++i) r[i] -= f0(dd.node(i), u[i]);
        return r;
    };
    p.verify_tol = effective_fp_tol(p, ctx.cfg.solver) * 10.0;

    ctx.config_doc["problem"] = {{"semilinear",
                                  {{"rhs", sc.rhs},
                                   {"m0", sc.m0},
                                   {"scale", sc.scale},
                                   {"c0", sc.c0},
                                   {"c1", sc.c1}}}};
    return run_fixed_point(ctx, "semilinear", p);
}

int env_threads() {
    const char* env = std::getenv("NONLOC_THREADS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
        throw_config(std::string("NONLOC_THREADS: expected a positive integer, got '") +
                     env + "'");
    return static_cast<int>(v);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonlocal variational problems: operators, solvers, diagnostics"};
    app.require_subcommand(1);
    app.fallthrough(); // allow the global flags after the subcommand too

    std::string config_path, out_flag;
    int threads_flag = 1;
    std::uint64_t seed_flag = 0;
    app.add_option("--config", config_path, "JSON run configuration file");
    app.add_option("--out", out_flag, "output directory (overrides output.dir)");
    CLI::Option* threads_opt =
        app.add_option("--threads", threads_flag,
                       "worker threads (fallback: NONLOC_THREADS, then 1)")
            ->check(CLI::PositiveNumber);
    CLI::Option* seed_opt =
        app.add_option("--seed", seed_flag, "RNG seed (overrides solver.seed)");

    ApplyArgs apply_args;
    CLI::App* apply = app.add_subcommand("apply", "apply one operator to file inputs");
    apply->add_option("operator", apply_args.op, "gradient|divergence|laplacian|p_laplacian|convolve")
        ->required()
        ->check(CLI::IsMember(
            {"gradient", "divergence", "laplacian", "p_laplacian", "convolve"}));
    apply->add_option("--u", apply_args.u_path, "grid-function CSV input");
    apply->add_option("--field", apply_args.field_path, "two-point CSV input (divergence)");
    apply->add_option("--p", apply_args.p_exp, "exponent for p_laplacian");
    apply->add_option("--method", apply_args.method, "convolve path")
        ->check(CLI::IsMember({"direct", "fft"}));
    apply->add_option("--a", apply_args.a, "body left endpoint");
    apply->add_option("--b", apply_args.b, "body right endpoint");
    apply->add_option("--collar", apply_args.collar, "collar width");
    apply->add_option("--nodes", apply_args.nodes, "node count");
    apply->add_option("--kernel", apply_args.kernel_type, "kernel type")
        ->check(CLI::IsMember({"gaussian", "constant", "table_file", "two_point_file"}));
    apply->add_option("--sigma", apply_args.sigma, "gaussian width");
    apply->add_option("--truncation-tol", apply_args.trunc_tol, "gaussian tail budget");
    apply->add_option("--c", apply_args.c, "constant kernel value");
    apply->add_option("--horizon", apply_args.horizon, "constant kernel support radius");
    apply->add_option("--kernel-file", apply_args.kernel_file, "kernel sample file");

    std::string min_preset;
    CLI::App* minimize_cmd = app.add_subcommand("minimize", "descend a preset energy");
    minimize_cmd->add_option("--preset", min_preset, "preset name (else from config)");

    std::string semi_preset;
    CLI::App* semi_cmd =
        app.add_subcommand("semilinear", "fixed-point solve of L_mu[u] = f0(x,u)");
    semi_cmd->add_option("--preset", semi_preset, "preset name (else from config)");

    std::string res_preset, res_u;
    CLI::App* residual_cmd =
        app.add_subcommand("residual", "evaluate a preset's equation residual on a file");
    residual_cmd->add_option("--preset", res_preset, "preset name (else from config)");
    residual_cmd->add_option("--u", res_u, "solution CSV")->required();

    std::string check_which, check_preset;
    int check_trials = 10000;
    CLI::App* check_cmd = app.add_subcommand("check", "sampled hypothesis audits");
    check_cmd->add_option("which", check_which, "convexity|coercivity|growth")
        ->required()
        ->check(CLI::IsMember({"convexity", "coercivity", "growth"}));
    check_cmd->add_option("--preset", check_preset, "preset name (else from config)");
    check_cmd->add_option("--trials", check_trials, "sample count")->check(CLI::PositiveNumber);

    CLI::App* preset_cmd = app.add_subcommand("preset", "catalog operations");
    preset_cmd->require_subcommand(1);
    CLI::App* plist = preset_cmd->add_subcommand("list", "list catalog entries");
    std::string desc_name;
    CLI::App* pdesc = preset_cmd->add_subcommand("describe", "full catalog entry as JSON");
    pdesc->add_option("name", desc_name, "preset name")->required();
    std::string run_name;
    int run_demo_trials = 0;
    CLI::App* prun = preset_cmd->add_subcommand("run", "solve a preset end to end");
    prun->add_option("name", run_name, "preset name")->required();
    prun->add_option("--trials", run_demo_trials, "demo sample count override");

    int demo_trials = 0;
    CLI::App* demo_cmd =
        app.add_subcommand("demo-illposed", "refinement study of the ill-posed equation");
    demo_cmd->add_option("--trials", demo_trials, "convolution-bound sample count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // usage errors share the config exit code
    }

    try {
        RunContext ctx;
        if (!config_path.empty()) ctx.cfg = RunConfig::from_file(config_path);
        set_threads(threads_opt->count() ? threads_flag : env_threads());
        ctx.out_dir = !out_flag.empty() ? out_flag : ctx.cfg.output.dir;
        ctx.seed = seed_opt->count() ? seed_flag : ctx.cfg.solver.seed;

        if (apply->parsed()) return cmd_apply(ctx, apply_args);
        if (minimize_cmd->parsed())
            return run_minimize(ctx, "minimize", preset_from(ctx, min_preset));
        if (semi_cmd->parsed()) return cmd_semilinear(ctx, semi_preset);
        if (residual_cmd->parsed()) return cmd_residual(ctx, res_preset, res_u);
        if (check_cmd->parsed()) return cmd_check(ctx, check_which, check_preset, check_trials);
        if (preset_cmd->parsed()) {
            if (plist->parsed()) return cmd_preset_list(ctx);
            if (pdesc->parsed()) return cmd_preset_describe(ctx, desc_name);
            if (prun->parsed()) return run_preset(ctx, run_name, run_demo_trials);
        }
        if (demo_cmd->parsed()) {
            const Preset p = preset("illposed");
            return run_demo(ctx, "demo-illposed", p,
                            demo_trials > 0 ? demo_trials : p.demo_trials);
        }
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return (e.kind() == ErrorKind::Eval || e.kind() == ErrorKind::Solver) ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
