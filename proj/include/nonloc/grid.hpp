#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace nonloc {

/// Node classification on the extended grid [a - delta, b + delta].
///
/// Interior nodes carry the unknowns; nodes exactly at a or b count as
/// interior. Collar nodes carry volume-constraint data; the ones inside a
/// declared free-collar interval stay unknowns (CollarFree), the rest are
/// pinned (CollarFixed).
enum class NodeClass : std::uint8_t {
    Interior,
    CollarFixed,
    CollarFree,
};

/// Node subsets accepted by integrate() and the norms.
enum class Region : std::uint8_t {
    All,          ///< every node
    Interior,     ///< open-interval body plus its endpoint nodes
    Collar,       ///< fixed + free collar nodes
    CollarFixed,
    CollarFree,
    Free,         ///< interior + free collar (where residuals/unknowns live)
};

/// Closed interval, used for the free-collar declaration.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Uniform 1D grid over [a - delta, b + delta] with composite-trapezoid
/// quadrature weights and per-node classification. Immutable after build;
/// shared by the functions/tables defined on it.
class Domain {
public:
    double a() const { return a_; }
    double b() const { return b_; }
    double collar_width() const { return collar_; }
    std::size_t node_count() const { return x_.size(); }
    double spacing() const { return h_; }
    /// total width b - a + 2*delta
    double span() const { return span_; }

    const std::vector<double>& nodes() const { return x_; }
    const std::vector<double>& weights() const { return w_; }
    double node(std::size_t i) const { return x_[i]; }
    double weight(std::size_t i) const { return w_[i]; }
    /// sum of all quadrature weights (the discrete measure of the grid)
    double weight_sum() const { return weight_sum_; }

    NodeClass node_class(std::size_t i) const { return cls_[i]; }
    bool in_region(std::size_t i, Region r) const;

    const std::vector<std::size_t>& interior_nodes() const { return interior_; }
    const std::vector<std::size_t>& collar_fixed_nodes() const { return collar_fixed_; }
    const std::vector<std::size_t>& collar_free_nodes() const { return collar_free_; }
    /// interior + free collar, ascending
    const std::vector<std::size_t>& free_nodes() const { return free_; }

    const std::vector<Interval>& free_collar_intervals() const { return gamma_prime_; }

    /// tolerance used for node/coordinate comparisons on this grid
    double geom_eps() const { return eps_; }

    /// structural equality (same geometry and classification parameters)
    bool same_grid_as(const Domain& other) const;

private:
    friend std::shared_ptr<const Domain> build_domain(double, double, double, std::size_t,
                                                      const std::vector<Interval>&);
    Domain() = default;

    double a_ = 0.0, b_ = 0.0, collar_ = 0.0, h_ = 0.0, span_ = 0.0;
    double weight_sum_ = 0.0, eps_ = 0.0;
    std::vector<double> x_, w_;
    std::vector<NodeClass> cls_;
    std::vector<std::size_t> interior_, collar_fixed_, collar_free_, free_;
    std::vector<Interval> gamma_prime_;
};

using DomainPtr = std::shared_ptr<const Domain>;

/// Build the uniform grid for body (a,b) with collar width delta > 0 and
/// node_count total nodes. gamma_prime lists closed intervals of the collar
/// that stay free (unknown) instead of carrying fixed data; it may be empty.
///
/// Fails (configuration error) if b <= a, delta <= 0, node_count < 4, a
/// gamma_prime interval is malformed or escapes the collar bands, or a collar
/// band is thinner than the grid spacing (each closed band must contain at
/// least two nodes so the constraint region is resolved).
DomainPtr build_domain(double a, double b, double collar_width, std::size_t node_count,
                       const std::vector<Interval>& gamma_prime = {});

/// Same geometry, finer resolution: node count 2M-1 halves the spacing and
/// keeps every existing node. Used by the refinement diagnostics.
DomainPtr refine_domain(const Domain& d);

/// Values attached to the nodes of a Domain. components >= 1 columns; all of
/// the numerics here operate on single-component functions, the multi-column
/// shape exists for file round-trips.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(DomainPtr d, std::size_t components = 1);
    GridFunction(DomainPtr d, std::vector<double> values, std::size_t components = 1);

    const DomainPtr& domain() const { return domain_; }
    std::size_t size() const { return domain_ ? domain_->node_count() : 0; }
    std::size_t components() const { return components_; }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& at(std::size_t i, std::size_t c) { return values_[i * components_ + c]; }
    double at(std::size_t i, std::size_t c) const { return values_[i * components_ + c]; }

    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }
    const std::vector<double>& values() const { return values_; }

private:
    DomainPtr domain_;
    std::size_t components_ = 1;
    std::vector<double> values_;
};

/// Interaction kernel sampled for a specific Domain. Translation-invariant
/// kernels store 2M-1 samples on the difference grid z_k = k*h,
/// k = -(M-1)..M-1; general two-point kernels store a dense MxM table.
class KernelTable {
public:
    enum class Kind : std::uint8_t { TranslationInvariant, TwoPoint };

    /// An empty table; usable only as a placeholder until assigned.
    KernelTable() = default;

    Kind kind() const { return kind_; }
    bool translation_invariant() const { return kind_ == Kind::TranslationInvariant; }
    const DomainPtr& domain() const { return domain_; }
    const std::vector<double>& samples() const { return samples_; }

    /// kernel value alpha(x_i, y_j)
    double at(std::size_t i, std::size_t j) const {
        return translation_invariant() ? samples_[j + diff_center_ - i]
                                       : samples_[i * m_ + j];
    }
    /// pointer to the stripe {alpha(x_i, y_0), ..., alpha(x_i, y_{M-1})},
    /// contiguous for both kinds
    const double* row(std::size_t i) const {
        return translation_invariant() ? samples_.data() + (diff_center_ - i)
                                       : samples_.data() + i * m_;
    }

    bool nonnegative() const { return nonneg_; }
    bool symmetric() const { return symmetric_; }

    /// translation-invariant only: trapezoid quadrature of the samples over
    /// the difference grid (the discrete kernel mass)
    double difference_mass() const;

    /// elementwise transform (e.g. square, p-th power); flags are recomputed
    KernelTable map(double (*fn)(double, double), double arg) const;

    static KernelTable translation_invariant_from_samples(DomainPtr d,
                                                          std::vector<double> samples);
    static KernelTable two_point_from_samples(DomainPtr d, std::vector<double> samples);

private:
    void compute_flags();

    Kind kind_ = Kind::TranslationInvariant;
    DomainPtr domain_;
    std::vector<double> samples_;
    std::size_t m_ = 0;            // node count
    std::size_t diff_center_ = 0;  // index of z = 0 in the difference grid
    bool nonneg_ = false;
    bool symmetric_ = false;
};

/// What to sample. Exactly one of the alternatives is selected by `type`.
struct KernelSpec {
    enum class Type : std::uint8_t { Gaussian, Constant, TableFile, TwoPointFile };
    Type type = Type::Gaussian;

    // Gaussian: normalized density with standard deviation sigma; fails if the
    // analytic mass outside the difference grid exceeds truncation_tol.
    double sigma = 0.7071067811865476;  // makes mu(z) = exp(-z^2)/sqrt(pi)
    double truncation_tol = 1e-6;

    // Constant: value c on |z| <= horizon, 0 outside.
    double c = 1.0;
    double horizon = 0.5;

    // File-based kinds.
    std::string path;
};

KernelTable sample_kernel(const DomainPtr& d, const KernelSpec& spec);

/// Quadrature of a (single-component) grid function over a node subset.
double integrate(const GridFunction& f, Region region = Region::All);

/// (sum_i w_i |f_i|^p)^(1/p), p >= 1; and max_i |f_i| over the subset.
double lp_norm(const GridFunction& f, double p, Region region = Region::All);
double linf_norm(const GridFunction& f, Region region = Region::All);

// --- CSV interfaces -------------------------------------------------------
// All numeric output uses 17 significant digits so files round-trip the
// doubles exactly and reruns are byte-identical.

/// header "x,u1[,u2,...]"; node coordinates must match the domain
GridFunction read_grid_function_csv(const std::string& path, const DomainPtr& d);
void write_grid_function_csv(const std::string& path, const GridFunction& f);

/// translation-invariant kernel samples, header "z,mu"
void write_kernel_csv(const std::string& path, const KernelTable& k);

/// dense two-point values, header "i,j,<value_name>"
void write_two_point_csv(const std::string& path, const DomainPtr& d,
                         const std::vector<double>& values,
                         const std::string& value_name);
std::vector<double> read_two_point_csv(const std::string& path, std::size_t m,
                                       std::string* value_name = nullptr);

} // namespace nonloc
