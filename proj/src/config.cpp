#include "nonloc/config.hpp"

#include "nonloc/error.hpp"

#include "json.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace nonloc {
namespace {

using nlohmann::json;

// Wraps one JSON object; every accessor marks its key as consumed so done()
// can reject leftovers.  path_ is the dotted location for error messages.
class Obj {
public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw_config(path_ + ": expected an object");
    }

    bool has(const char* key) const { return j_.contains(key); }

    double num(const char* key, double fallback) {
        auto v = opt_num(key);
        return v ? *v : fallback;
    }

    std::optional<double> opt_num(const char* key) {
        if (!has(key)) return std::nullopt;
        const json& v = take(key);
        if (!v.is_number()) throw_config(at(key) + ": expected a number");
        return v.get<double>();
    }

    std::optional<std::size_t> opt_index(const char* key) {
        if (!has(key)) return std::nullopt;
        const json& v = take(key);
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw_config(at(key) + ": expected a nonnegative integer");
        return static_cast<std::size_t>(v.get<long long>());
    }

    std::size_t index(const char* key, std::size_t fallback) {
        auto v = opt_index(key);
        return v ? *v : fallback;
    }

    std::uint64_t uint64(const char* key, std::uint64_t fallback) {
        if (!has(key)) return fallback;
        const json& v = take(key);
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw_config(at(key) + ": expected a nonnegative integer");
        return v.get<std::uint64_t>();
    }

    std::string str(const char* key, const std::string& fallback) {
        auto v = opt_str(key);
        return v ? *v : fallback;
    }

    std::optional<std::string> opt_str(const char* key) {
        if (!has(key)) return std::nullopt;
        const json& v = take(key);
        if (!v.is_string()) throw_config(at(key) + ": expected a string");
        return v.get<std::string>();
    }

    std::string required_str(const char* key) {
        auto v = opt_str(key);
        if (!v) throw_config(at(key) + ": required");
        return *v;
    }

    const json* child(const char* key) {
        if (!has(key)) return nullptr;
        return &take(key);
    }

    std::string at(const char* key) const { return path_ + "." + key; }

    void done() const {
        for (const auto& item : j_.items())
            if (!used_.count(item.key()))
                throw_config(path_ + ": unknown key '" + item.key() + "'");
    }

private:
    const json& take(const char* key) {
        used_.insert(key);
        return j_.at(key);
    }

    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

void parse_domain(const json& j, const std::string& path, RunConfig& cfg) {
    Obj o(j, path);
    cfg.has_domain = true;
    cfg.a = o.num("a", cfg.a);
    cfg.b = o.num("b", cfg.b);
    cfg.collar_width = o.num("collar_width", cfg.collar_width);
    cfg.node_count = o.index("node_count", cfg.node_count);
    if (const json* gp = o.child("gamma_prime")) {
        if (!gp->is_array()) throw_config(o.at("gamma_prime") + ": expected an array");
        for (const json& e : *gp) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw_config(o.at("gamma_prime") + ": entries must be [lo, hi] pairs");
            cfg.gamma_prime.push_back(Interval{e[0].get<double>(), e[1].get<double>()});
        }
    }
    o.done();
}

void parse_kernel(const json& j, const std::string& path, RunConfig& cfg) {
    Obj o(j, path);
    cfg.has_kernel = true;
    const std::string type = o.str("type", "gaussian");
    KernelSpec& k = cfg.kernel;
    if (type == "gaussian") {
        k.type = KernelSpec::Type::Gaussian;
        k.sigma = o.num("sigma", k.sigma);
        k.truncation_tol = o.num("truncation_tol", k.truncation_tol);
    } else if (type == "constant") {
        k.type = KernelSpec::Type::Constant;
        k.c = o.num("c", k.c);
        k.horizon = o.num("horizon", k.horizon);
    } else if (type == "table_file") {
        k.type = KernelSpec::Type::TableFile;
        k.path = o.required_str("file");
    } else if (type == "two_point_file") {
        k.type = KernelSpec::Type::TwoPointFile;
        k.path = o.required_str("file");
    } else {
        throw_config(o.at("type") + ": unknown kernel type '" + type + "'");
    }
    o.done();
}

void parse_problem(const json& j, const std::string& path, RunConfig& cfg) {
    Obj o(j, path);
    if (auto name = o.opt_str("preset_name")) cfg.preset_name = *name;
    if (const json* s = o.child("semilinear")) {
        Obj so(*s, path + ".semilinear");
        cfg.has_semilinear = true;
        cfg.semilinear.rhs = so.str("rhs", cfg.semilinear.rhs);
        cfg.semilinear.m0 = so.num("m0", cfg.semilinear.m0);
        cfg.semilinear.scale = so.num("scale", cfg.semilinear.scale);
        cfg.semilinear.c0 = so.num("c0", cfg.semilinear.c0);
        cfg.semilinear.c1 = so.num("c1", cfg.semilinear.c1);
        so.done();
        if (cfg.semilinear.rhs != "arctan" && cfg.semilinear.rhs != "linear")
            throw_config(path + ".semilinear.rhs: unknown right-hand side '" +
                         cfg.semilinear.rhs + "' (expected arctan or linear)");
    }
    o.done();
    if (!cfg.preset_name.empty() && cfg.has_semilinear)
        throw_config(path + ": preset_name and semilinear are mutually exclusive");
}

void parse_solver(const json& j, const std::string& path, RunConfig& cfg) {
    Obj o(j, path);
    SolverConfig& s = cfg.solver;
    s.tol = o.opt_num("tol");
    s.max_iters = o.opt_index("max_iters");
    s.seed = o.uint64("seed", s.seed);
    if (const json* opt = o.child("optimizer")) {
        Obj oo(*opt, path + ".optimizer");
        s.optimizer.grad_tol = oo.opt_num("grad_tol");
        s.optimizer.max_iters = oo.opt_index("max_iters");
        s.optimizer.armijo_c = oo.opt_num("armijo_c");
        s.optimizer.backtrack = oo.opt_num("backtrack");
        s.optimizer.initial_step = oo.opt_num("initial_step");
        s.optimizer.init = oo.opt_str("init");
        oo.done();
        if (s.optimizer.init && *s.optimizer.init != "zero" &&
            *s.optimizer.init != "boundary_extend")
            throw_config(path + ".optimizer.init: expected zero or boundary_extend");
    }
    if (const json* fp = o.child("fixed_point")) {
        Obj fo(*fp, path + ".fixed_point");
        s.fixed_point.tol = fo.opt_num("tol");
        s.fixed_point.max_iters = fo.opt_index("max_iters");
        s.fixed_point.theta = fo.opt_num("theta");
        fo.done();
    }
    o.done();
}

void parse_output(const json& j, const std::string& path, RunConfig& cfg) {
    Obj o(j, path);
    cfg.output.dir = o.str("dir", cfg.output.dir);
    if (const json* emit = o.child("emit")) {
        if (!emit->is_array()) throw_config(path + ".emit: expected an array");
        cfg.output.emit.clear();
        static const std::set<std::string> known = {"solution_csv", "trace_json",
                                                   "report_json", "residual_csv"};
        for (const json& e : *emit) {
            if (!e.is_string()) throw_config(path + ".emit: entries must be strings");
            const std::string name = e.get<std::string>();
            if (!known.count(name))
                throw_config(path + ".emit: unknown artifact '" + name + "'");
            cfg.output.emit.push_back(name);
        }
    }
    o.done();
}

} // namespace

RunConfig RunConfig::from_text(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw_config(origin + ": " + e.what());
    }
    if (!doc.is_object()) throw_config(origin + ": top level must be an object");

    RunConfig cfg;
    Obj root(doc, origin);
    if (const json* d = root.child("domain")) parse_domain(*d, origin + ".domain", cfg);
    if (const json* k = root.child("kernel")) parse_kernel(*k, origin + ".kernel", cfg);
    if (const json* p = root.child("problem")) parse_problem(*p, origin + ".problem", cfg);
    if (const json* s = root.child("solver")) parse_solver(*s, origin + ".solver", cfg);
    if (const json* o = root.child("output")) parse_output(*o, origin + ".output", cfg);
    root.done();

    if (!cfg.preset_name.empty() && (cfg.has_domain || cfg.has_kernel))
        throw_config(origin +
                     ": problem.preset_name supplies its own domain and kernel; "
                     "remove the explicit domain/kernel blocks");
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_config("config file not found: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str(), path);
}

DomainPtr domain_from_config(const RunConfig& cfg) {
    return build_domain(cfg.a, cfg.b, cfg.collar_width, cfg.node_count, cfg.gamma_prime);
}

} // namespace nonloc
