#include "nonloc/grid.hpp"

#include "nonloc/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace nonloc {

namespace {

// 17 significant digits: round-trips IEEE doubles exactly
std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& path, std::size_t lineno) {
    const char* begin = s.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    while (end && *end == ' ') ++end;
    if (end == begin || (end && *end != '\0'))
        throw_data(path + ":" + std::to_string(lineno) + ": not a number: '" + s + "'");
    return v;
}

} // namespace

bool Domain::in_region(std::size_t i, Region r) const {
    const NodeClass c = cls_[i];
    switch (r) {
        case Region::All: return true;
        case Region::Interior: return c == NodeClass::Interior;
        case Region::Collar: return c != NodeClass::Interior;
        case Region::CollarFixed: return c == NodeClass::CollarFixed;
        case Region::CollarFree: return c == NodeClass::CollarFree;
        case Region::Free: return c != NodeClass::CollarFixed;
    }
    return false;
}

bool Domain::same_grid_as(const Domain& o) const {
    if (this == &o) return true;
    return a_ == o.a_ && b_ == o.b_ && collar_ == o.collar_ && x_.size() == o.x_.size();
}

DomainPtr build_domain(double a, double b, double collar_width, std::size_t node_count,
                       const std::vector<Interval>& gamma_prime) {
    if (!(b > a)) throw_config("domain: b must exceed a");
    if (!(collar_width > 0.0)) throw_config("domain: collar_width must be positive");
    if (node_count < 4) throw_config("domain: node_count must be at least 4");
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(collar_width))
        throw_config("domain: non-finite geometry");

    auto dom = std::shared_ptr<Domain>(new Domain());
    Domain& d = *dom;
    d.a_ = a;
    d.b_ = b;
    d.collar_ = collar_width;
    d.span_ = (b - a) + 2.0 * collar_width;
    d.h_ = d.span_ / static_cast<double>(node_count - 1);
    d.eps_ = 1e-12 * d.span_;

    // each closed collar band [a-delta, a] and [b, b+delta] needs >= 2 nodes,
    // i.e. the collar may not be thinner than the spacing
    if (collar_width + d.eps_ < d.h_)
        throw_config("domain: collar thinner than grid spacing (collar_width >= h required)");

    const double x0 = a - collar_width;
    d.x_.resize(node_count);
    d.w_.resize(node_count);
    for (std::size_t i = 0; i < node_count; ++i)
        d.x_[i] = x0 + static_cast<double>(i) * d.h_;
    // composite trapezoid over the full extended grid
    for (std::size_t i = 0; i < node_count; ++i) d.w_[i] = d.h_;
    d.w_.front() = 0.5 * d.h_;
    d.w_.back() = 0.5 * d.h_;
    double wsum = 0.0;
    for (double w : d.w_) wsum += w;
    d.weight_sum_ = wsum;

    // validate the free-collar intervals before classifying
    for (const Interval& iv : gamma_prime) {
        if (!(iv.lo <= iv.hi)) throw_config("domain: free-collar interval with lo > hi");
        const bool left = iv.lo >= a - collar_width - d.eps_ && iv.hi <= a + d.eps_;
        const bool right = iv.lo >= b - d.eps_ && iv.hi <= b + collar_width + d.eps_;
        if (!left && !right)
            throw_config("domain: free-collar interval escapes the collar bands");
    }
    d.gamma_prime_ = gamma_prime;

    d.cls_.resize(node_count);
    for (std::size_t i = 0; i < node_count; ++i) {
        const double x = d.x_[i];
        if (x >= a - d.eps_ && x <= b + d.eps_) {
            d.cls_[i] = NodeClass::Interior;
            continue;
        }
        bool free_collar = false;
        for (const Interval& iv : gamma_prime) {
            if (x >= iv.lo - d.eps_ && x <= iv.hi + d.eps_) {
                free_collar = true;
                break;
            }
        }
        d.cls_[i] = free_collar ? NodeClass::CollarFree : NodeClass::CollarFixed;
    }

    for (std::size_t i = 0; i < node_count; ++i) {
        switch (d.cls_[i]) {
            case NodeClass::Interior: d.interior_.push_back(i); break;
            case NodeClass::CollarFixed: d.collar_fixed_.push_back(i); break;
            case NodeClass::CollarFree: d.collar_free_.push_back(i); break;
        }
        if (d.cls_[i] != NodeClass::CollarFixed) d.free_.push_back(i);
    }

    if (d.interior_.empty()) throw_config("domain: no interior nodes");
    return dom;
}

DomainPtr refine_domain(const Domain& d) {
    return build_domain(d.a(), d.b(), d.collar_width(), 2 * d.node_count() - 1,
                        d.free_collar_intervals());
}

GridFunction::GridFunction(DomainPtr d, std::size_t components)
    : domain_(std::move(d)), components_(components) {
    if (!domain_) throw_config("grid function: null domain");
    if (components_ < 1) throw_config("grid function: components must be >= 1");
    values_.assign(domain_->node_count() * components_, 0.0);
}

GridFunction::GridFunction(DomainPtr d, std::vector<double> values, std::size_t components)
    : domain_(std::move(d)), components_(components), values_(std::move(values)) {
    if (!domain_) throw_config("grid function: null domain");
    if (components_ < 1) throw_config("grid function: components must be >= 1");
    if (values_.size() != domain_->node_count() * components_)
        throw_config("grid function: value count does not match domain");
}

void KernelTable::compute_flags() {
    nonneg_ = true;
    for (double v : samples_)
        if (!(v >= 0.0)) { nonneg_ = false; break; }

    symmetric_ = true;
    if (translation_invariant()) {
        const std::size_t n = samples_.size();
        for (std::size_t k = 0; k < n / 2; ++k)
            if (samples_[k] != samples_[n - 1 - k]) { symmetric_ = false; break; }
    } else {
        for (std::size_t i = 0; i < m_ && symmetric_; ++i)
            for (std::size_t j = i + 1; j < m_; ++j)
                if (samples_[i * m_ + j] != samples_[j * m_ + i]) {
                    symmetric_ = false;
                    break;
                }
    }
}

double KernelTable::difference_mass() const {
    if (!translation_invariant())
        throw_param("kernel: difference_mass needs a translation-invariant kernel");
    const double h = domain_->spacing();
    double s = 0.0;
    for (double v : samples_) s += h * v;
    s -= 0.5 * h * (samples_.front() + samples_.back());
    return s;
}

KernelTable KernelTable::map(double (*fn)(double, double), double arg) const {
    KernelTable out(*this);
    for (double& v : out.samples_) v = fn(v, arg);
    out.compute_flags();
    return out;
}

KernelTable KernelTable::translation_invariant_from_samples(DomainPtr d,
                                                            std::vector<double> samples) {
    if (!d) throw_config("kernel: null domain");
    if (samples.size() != 2 * d->node_count() - 1)
        throw_data("kernel: translation-invariant table needs 2M-1 samples");
    KernelTable k;
    k.kind_ = Kind::TranslationInvariant;
    k.domain_ = std::move(d);
    k.samples_ = std::move(samples);
    k.m_ = k.domain_->node_count();
    k.diff_center_ = k.m_ - 1;
    k.compute_flags();
    return k;
}

KernelTable KernelTable::two_point_from_samples(DomainPtr d, std::vector<double> samples) {
    if (!d) throw_config("kernel: null domain");
    if (samples.size() != d->node_count() * d->node_count())
        throw_data("kernel: two-point table needs MxM samples");
    KernelTable k;
    k.kind_ = Kind::TwoPoint;
    k.domain_ = std::move(d);
    k.samples_ = std::move(samples);
    k.m_ = k.domain_->node_count();
    k.compute_flags();
    return k;
}

KernelTable sample_kernel(const DomainPtr& d, const KernelSpec& spec) {
    if (!d) throw_config("sample_kernel: null domain");
    const std::size_t m = d->node_count();
    const double h = d->spacing();

    switch (spec.type) {
        case KernelSpec::Type::Gaussian: {
            if (!(spec.sigma > 0.0)) throw_config("gaussian kernel: sigma must be positive");
            // tail mass the sampled table cannot represent: outside |z| <= span
            const double tail = std::erfc(d->span() / (spec.sigma * std::sqrt(2.0)));
            if (tail > spec.truncation_tol)
                throw_config("gaussian kernel: truncated tail mass " + fmt17(tail) +
                             " exceeds tolerance; widen the grid or the tolerance");
            std::vector<double> s(2 * m - 1);
            const double norm = 1.0 / (spec.sigma * std::sqrt(8.0 * std::atan(1.0)));
            const double inv2s2 = 1.0 / (2.0 * spec.sigma * spec.sigma);
            const std::size_t c = m - 1;
            for (std::size_t k = 0; k < m; ++k) {
                const double z = static_cast<double>(k) * h;
                const double v = norm * std::exp(-z * z * inv2s2);
                s[c + k] = v;      // mirrored fill keeps the table exactly even
                s[c - k] = v;
            }
            return KernelTable::translation_invariant_from_samples(d, std::move(s));
        }

        case KernelSpec::Type::Constant: {
            if (!(spec.horizon > 0.0)) throw_config("constant kernel: horizon must be positive");
            if (spec.horizon > d->span() + d->geom_eps())
                throw_config("constant kernel: horizon exceeds the grid span");
            if (!std::isfinite(spec.c)) throw_config("constant kernel: non-finite value");
            std::vector<double> s(2 * m - 1, 0.0);
            const std::size_t c = m - 1;
            for (std::size_t k = 0; k < m; ++k) {
                const double z = static_cast<double>(k) * h;
                if (z <= spec.horizon + d->geom_eps()) {
                    s[c + k] = spec.c;
                    s[c - k] = spec.c;
                }
            }
            return KernelTable::translation_invariant_from_samples(d, std::move(s));
        }

        case KernelSpec::Type::TableFile: {
            std::ifstream in(spec.path);
            if (!in) throw_data("kernel table: cannot open " + spec.path);
            std::string line;
            std::size_t lineno = 0;
            if (!std::getline(in, line)) throw_data("kernel table: empty file " + spec.path);
            ++lineno;
            {
                auto hdr = split_csv_line(line);
                if (hdr.size() != 2 || hdr[0] != "z" || hdr[1] != "mu")
                    throw_data("kernel table: expected header 'z,mu' in " + spec.path);
            }
            std::vector<double> zs, vals;
            while (std::getline(in, line)) {
                ++lineno;
                if (line.empty()) continue;
                auto f = split_csv_line(line);
                if (f.size() != 2)
                    throw_data(spec.path + ":" + std::to_string(lineno) + ": expected 2 fields");
                zs.push_back(parse_double(f[0], spec.path, lineno));
                vals.push_back(parse_double(f[1], spec.path, lineno));
            }
            if (zs.size() != 2 * m - 1)
                throw_data("kernel table: " + spec.path + " has " + std::to_string(zs.size()) +
                           " samples, domain needs " + std::to_string(2 * m - 1));
            const double ztol = 1e-9 * d->span();
            for (std::size_t k = 0; k < zs.size(); ++k) {
                const double want =
                    (static_cast<double>(k) - static_cast<double>(m - 1)) * h;
                if (std::abs(zs[k] - want) > ztol)
                    throw_data("kernel table: " + spec.path +
                               " sample grid does not match the domain difference grid");
            }
            return KernelTable::translation_invariant_from_samples(d, std::move(vals));
        }

        case KernelSpec::Type::TwoPointFile: {
            std::string value_name;
            std::vector<double> vals = read_two_point_csv(spec.path, m, &value_name);
            if (value_name != "alpha")
                throw_data("two-point kernel: expected header 'i,j,alpha' in " + spec.path);
            return KernelTable::two_point_from_samples(d, std::move(vals));
        }
    }
    throw_config("sample_kernel: unknown kernel type");
}

namespace {

void require_scalar(const GridFunction& f, const char* who) {
    if (!f.domain()) throw_config(std::string(who) + ": function has no domain");
    if (f.components() != 1)
        throw_param(std::string(who) + ": single-component function required");
}

} // namespace

double integrate(const GridFunction& f, Region region) {
    require_scalar(f, "integrate");
    const Domain& d = *f.domain();
    double acc = 0.0;
    for (std::size_t i = 0; i < d.node_count(); ++i)
        if (d.in_region(i, region)) acc += d.weight(i) * f[i];
    return acc;
}

double lp_norm(const GridFunction& f, double p, Region region) {
    require_scalar(f, "lp_norm");
    if (!(p >= 1.0)) throw_param("lp_norm: p must be >= 1");
    const Domain& d = *f.domain();
    double acc = 0.0;
    if (p == 1.0) {
        for (std::size_t i = 0; i < d.node_count(); ++i)
            if (d.in_region(i, region)) acc += d.weight(i) * std::abs(f[i]);
        return acc;
    }
    if (p == 2.0) {
        for (std::size_t i = 0; i < d.node_count(); ++i)
            if (d.in_region(i, region)) acc += d.weight(i) * f[i] * f[i];
        return std::sqrt(acc);
    }
    for (std::size_t i = 0; i < d.node_count(); ++i)
        if (d.in_region(i, region)) acc += d.weight(i) * std::pow(std::abs(f[i]), p);
    return std::pow(acc, 1.0 / p);
}

double linf_norm(const GridFunction& f, Region region) {
    require_scalar(f, "linf_norm");
    const Domain& d = *f.domain();
    double m = 0.0;
    for (std::size_t i = 0; i < d.node_count(); ++i)
        if (d.in_region(i, region)) m = std::max(m, std::abs(f[i]));
    return m;
}

GridFunction read_grid_function_csv(const std::string& path, const DomainPtr& d) {
    if (!d) throw_config("read_grid_function_csv: null domain");
    std::ifstream in(path);
    if (!in) throw_data("grid function: cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw_data("grid function: empty file " + path);
    ++lineno;
    auto hdr = split_csv_line(line);
    if (hdr.size() < 2 || hdr[0] != "x")
        throw_data("grid function: expected header 'x,u1[,u2,...]' in " + path);
    for (std::size_t c = 1; c < hdr.size(); ++c)
        if (hdr[c] != "u" + std::to_string(c))
            throw_data("grid function: expected header 'x,u1[,u2,...]' in " + path);
    const std::size_t ncomp = hdr.size() - 1;

    const std::size_t m = d->node_count();
    std::vector<double> vals(m * ncomp);
    const double xtol = 1e-9 * d->span();
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (row >= m) throw_data("grid function: " + path + " has more rows than the domain");
        auto f = split_csv_line(line);
        if (f.size() != ncomp + 1)
            throw_data(path + ":" + std::to_string(lineno) + ": wrong field count");
        const double x = parse_double(f[0], path, lineno);
        if (std::abs(x - d->node(row)) > xtol)
            throw_data(path + ":" + std::to_string(lineno) +
                       ": node coordinate does not match the domain");
        for (std::size_t c = 0; c < ncomp; ++c)
            vals[row * ncomp + c] = parse_double(f[c + 1], path, lineno);
        ++row;
    }
    if (row != m)
        throw_data("grid function: " + path + " has " + std::to_string(row) +
                   " rows, domain needs " + std::to_string(m));
    return GridFunction(d, std::move(vals), ncomp);
}

void write_grid_function_csv(const std::string& path, const GridFunction& f) {
    if (!f.domain()) throw_config("write_grid_function_csv: function has no domain");
    std::ofstream out(path);
    if (!out) throw_data("grid function: cannot write " + path);
    out << "x";
    for (std::size_t c = 1; c <= f.components(); ++c) out << ",u" << c;
    out << "\n";
    const Domain& d = *f.domain();
    for (std::size_t i = 0; i < d.node_count(); ++i) {
        out << fmt17(d.node(i));
        for (std::size_t c = 0; c < f.components(); ++c) out << ',' << fmt17(f.at(i, c));
        out << "\n";
    }
    if (!out) throw_data("grid function: write failed for " + path);
}

void write_kernel_csv(const std::string& path, const KernelTable& k) {
    if (!k.translation_invariant())
        throw_param("write_kernel_csv: translation-invariant kernel required");
    std::ofstream out(path);
    if (!out) throw_data("kernel: cannot write " + path);
    out << "z,mu\n";
    const Domain& d = *k.domain();
    const double h = d.spacing();
    const auto m = static_cast<std::ptrdiff_t>(d.node_count());
    for (std::ptrdiff_t kk = -(m - 1); kk <= m - 1; ++kk) {
        out << fmt17(static_cast<double>(kk) * h) << ','
            << fmt17(k.samples()[static_cast<std::size_t>(kk + m - 1)]) << "\n";
    }
    if (!out) throw_data("kernel: write failed for " + path);
}

void write_two_point_csv(const std::string& path, const DomainPtr& d,
                         const std::vector<double>& values, const std::string& value_name) {
    if (!d) throw_config("write_two_point_csv: null domain");
    const std::size_t m = d->node_count();
    if (values.size() != m * m) throw_data("write_two_point_csv: values must be MxM");
    std::ofstream out(path);
    if (!out) throw_data("two-point table: cannot write " + path);
    out << "i,j," << value_name << "\n";
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            out << i << ',' << j << ',' << fmt17(values[i * m + j]) << "\n";
    if (!out) throw_data("two-point table: write failed for " + path);
}

std::vector<double> read_two_point_csv(const std::string& path, std::size_t m,
                                       std::string* value_name) {
    std::ifstream in(path);
    if (!in) throw_data("two-point table: cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw_data("two-point table: empty file " + path);
    ++lineno;
    auto hdr = split_csv_line(line);
    if (hdr.size() != 3 || hdr[0] != "i" || hdr[1] != "j")
        throw_data("two-point table: expected header 'i,j,<name>' in " + path);
    if (value_name) *value_name = hdr[2];

    std::vector<double> vals(m * m, 0.0);
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = split_csv_line(line);
        if (f.size() != 3)
            throw_data(path + ":" + std::to_string(lineno) + ": expected 3 fields");
        const double di = parse_double(f[0], path, lineno);
        const double dj = parse_double(f[1], path, lineno);
        const auto i = static_cast<std::size_t>(di);
        const auto j = static_cast<std::size_t>(dj);
        if (di != static_cast<double>(i) || dj != static_cast<double>(j) || i >= m || j >= m)
            throw_data(path + ":" + std::to_string(lineno) + ": index out of range");
        vals[i * m + j] = parse_double(f[2], path, lineno);
    }
    return vals;
}

} // namespace nonloc
