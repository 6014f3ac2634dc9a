#pragma once

#include "nonloc/grid.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>

namespace nonloc {

/// Pointwise integrand f(x, z, u, xi) with its partial derivatives.
/// z is the offset y - x, u the value at x, xi the difference u(y) - u(x).
/// Callables must be pure: they are invoked concurrently during assembly.
struct Integrand {
    std::function<double(double, double, double, double)> eval;
    std::function<double(double, double, double, double)> du;
    std::function<double(double, double, double, double)> dxi;
    double p = 2.0;
    double q = 1.0;
    bool claims_convex = false;
    bool claims_coercive = false;
};

/// Tables and exponents for the lower bound
///   f(x,z,u,xi) >= alpha1(x,z)|xi|^p + alpha2(x,z)|u|^q + alpha3(x,z).
struct CoercivityData {
    KernelTable alpha1;
    KernelTable alpha2;
    KernelTable alpha3;
    double p = 2.0;
    double q = 1.0;
    double C0 = 0.0;
    double delta = 0.0;
};

/// Majorant family for the local-boundedness check: on |u|,|xi| <= R the
/// derivative magnitudes must stay below a_R(x,z).
struct GrowthMajorant {
    double R = 1.0;
    std::function<double(double, double)> a_R;
};

struct GrowthDataLocal {
    std::vector<GrowthMajorant> majorants;
};

/// Data for the polynomial growth check:
///   |df| <= a(x,z) + |beta(x,z)| (|u|^{p-1} + |xi|^{p-1}).
struct GrowthDataPolynomial {
    std::function<double(double, double)> a;
    std::function<double(double, double)> beta;
    double p = 2.0;
};

/// Outcome of a sampled hypothesis check.  worst_margin is the largest
/// violation seen (positive = bound broken); the check passes when it stays
/// at or below the stated tolerance.
struct DiagnosticReport {
    std::string check;
    bool passed = false;
    double worst_margin = 0.0;
    double tolerance = 0.0;
    std::map<std::string, double> witness;
    int trials = 0;
    std::uint64_t seed = 0;
    double sample_box = 0.0; // (u, xi) drawn from [-sample_box, sample_box]

    std::string to_json_string() const;
};

/// Double quadrature of f(x_i, x_j - x_i, u_i, u_j - u_i) over the grid.
double energy(const GridFunction& u, const Integrand& f);

/// First variation d/de energy(u + e*phi) at e = 0; phi must vanish on
/// collar-fixed nodes.
double gateaux(const GridFunction& u, const GridFunction& phi, const Integrand& f);

/// Per-node Euler-Lagrange residual r with
///   sum_i w_i phi_i r_i = gateaux(u, phi)
/// for every admissible phi (the quadrature makes the rearrangement exact up
/// to rounding).  Collar-fixed nodes are masked to zero.
GridFunction weak_residual_vector(const GridFunction& u, const Integrand& f);

/// Same field as weak_residual_vector; named for node-by-node assertions of
/// the strong form.
GridFunction strong_el_residual(const GridFunction& u, const Integrand& f);

DiagnosticReport check_convexity(const DomainPtr& d, const Integrand& f, int trials,
                                 std::uint64_t seed, double sample_box = 10.0);

DiagnosticReport check_coercivity(const DomainPtr& d, const Integrand& f,
                                  const CoercivityData& c, int trials, std::uint64_t seed,
                                  double sample_box = 10.0);

DiagnosticReport check_growth_local(const DomainPtr& d, const Integrand& f,
                                    const GrowthDataLocal& g, int trials, std::uint64_t seed);

DiagnosticReport check_growth_polynomial(const DomainPtr& d, const Integrand& f,
                                         const GrowthDataPolynomial& g, int trials,
                                         std::uint64_t seed, double sample_box = 10.0);

} // namespace nonloc
