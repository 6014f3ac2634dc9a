#pragma once

#include "nonloc/grid.hpp"

#include <cstddef>
#include <vector>

namespace nonloc {

/// Dense M x M field of two-point values; entry (i,j) lives at (x_i, y_j).
class TwoPointField {
public:
    TwoPointField(DomainPtr d, std::vector<double> values);
    explicit TwoPointField(DomainPtr d);

    const DomainPtr& domain() const { return domain_; }
    std::size_t rows() const { return m_; }

    double at(std::size_t i, std::size_t j) const { return values_[i * m_ + j]; }
    double& at(std::size_t i, std::size_t j) { return values_[i * m_ + j]; }
    const double* row(std::size_t i) const { return values_.data() + i * m_; }
    double* row(std::size_t i) { return values_.data() + i * m_; }
    const std::vector<double>& values() const { return values_; }

private:
    DomainPtr domain_;
    std::size_t m_ = 0;
    std::vector<double> values_;
};

/// Two-point difference field: (i,j) -> u_j - u_i.
TwoPointField hat(const GridFunction& u);

/// (i,j) -> (u_j - u_i) * alpha(i,j).
TwoPointField nonlocal_gradient(const GridFunction& u, const KernelTable& alpha);

/// i -> sum_j w_j [F(i,j)alpha(i,j) - F(j,i)alpha(j,i)].
GridFunction nonlocal_divergence(const TwoPointField& F, const KernelTable& alpha);

/// i -> 2 sum_j w_j (u_j - u_i) kappa(i,j).  kappa plays the role of a squared
/// interaction kernel; composing gradient and divergence with the same alpha
/// reproduces this with kappa = alpha^2.
GridFunction nonlocal_laplacian(const GridFunction& u, const KernelTable& kappa);

/// i -> 2 sum_j w_j |u_j - u_i|^{p-2}(u_j - u_i) mu(i,j)^p, p > 1.
/// Terms with u_j == u_i contribute zero (the removable limit).
GridFunction nonlocal_p_laplacian(const GridFunction& u, const KernelTable& mu, double p);

enum class ConvolveMethod { Direct, Fft };

/// (u * mu)(x_i) = sum_j w_j u_j mu(x_i - y_j), zero extension off the grid.
/// The direct weighted sum is the reference; the FFT path must agree with it
/// to 1e-10 and exists only as an opt-in.
GridFunction convolve(const GridFunction& u, const KernelTable& mu,
                      ConvolveMethod method = ConvolveMethod::Direct);

bool fft_convolve_available();

/// Elementwise alpha^2, the kernel the composition D[G[u]] acts through.
KernelTable squared_kernel(const KernelTable& alpha);

} // namespace nonloc
