#pragma once

// Shared utilities for the unit suites and the acceptance runner: seeded
// random grid functions, admissible variations, and the dense direct-solve
// oracle used to cross-check the iterative solvers.

#include "nonloc/functional.hpp"
#include "nonloc/grid.hpp"
#include "nonloc/operators.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace testutil {

using namespace nonloc;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64{seed}; }

/// Random values in [-amp, amp] on every node.
inline GridFunction random_grid_function(const DomainPtr& d, std::mt19937_64& gen,
                                         double amp = 1.0) {
    std::uniform_real_distribution<double> dist(-amp, amp);
    GridFunction u(d);
    for (std::size_t i = 0; i < d->node_count(); ++i) u[i] = dist(gen);
    return u;
}

/// Random variation vanishing on the fixed collar (admissible for gateaux).
inline GridFunction random_variation(const DomainPtr& d, std::mt19937_64& gen,
                                     double amp = 1.0) {
    GridFunction phi = random_grid_function(d, gen, amp);
    for (std::size_t i : d->collar_fixed_nodes()) phi[i] = 0.0;
    return phi;
}

inline double linf_diff(const GridFunction& a, const GridFunction& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Gaussian elimination with partial pivoting on a dense row-major system.
inline std::vector<double> solve_dense(std::vector<double> A, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t r = k + 1; r < n; ++r)
            if (std::abs(A[r * n + k]) > std::abs(A[piv * n + k])) piv = r;
        if (piv != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(A[k * n + c], A[piv * n + c]);
            std::swap(b[k], b[piv]);
        }
        const double d = A[k * n + k];
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = A[r * n + k] / d;
            if (f == 0.0) continue;
            for (std::size_t c = k; c < n; ++c) A[r * n + c] -= f * A[k * n + c];
            b[r] -= f * b[k];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t c = r + 1; c < n; ++c) s -= A[r * n + c] * x[c];
        x[r] = s / A[r * n + r];
    }
    return x;
}

/// Direct solve of the linear equation L_kappa[u] = 0 on the free nodes with
/// the collar values of `data` held fixed.  Row i (free):
///   sum_{j free} w_j kappa_ij u_j - m_i u_i = -sum_{j fixed} w_j kappa_ij data_j,
/// where m_i = sum_j w_j kappa_ij.  Completely independent of the descent
/// path: no energies, no line searches, one factorization.
inline GridFunction dense_harmonic_solve(const KernelTable& kappa,
                                         const GridFunction& data) {
    const DomainPtr& d = data.domain();
    const std::vector<std::size_t>& free = d->free_nodes();
    const std::size_t n = free.size();
    const std::size_t m = d->node_count();

    std::vector<std::size_t> col(m, n); // node index -> unknown column
    for (std::size_t c = 0; c < n; ++c) col[free[c]] = c;

    std::vector<double> A(n * n, 0.0), rhs(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t i = free[r];
        double mass_i = 0.0;
        for (std::size_t j = 0; j < m; ++j) mass_i += d->weight(j) * kappa.at(i, j);
        for (std::size_t j = 0; j < m; ++j) {
            const double a_ij = d->weight(j) * kappa.at(i, j);
            if (col[j] < n)
                A[r * n + col[j]] += a_ij;
            else
                rhs[r] -= a_ij * data[j];
        }
        A[r * n + r] -= mass_i;
    }
    std::vector<double> x = solve_dense(std::move(A), std::move(rhs));
    GridFunction u = data;
    for (std::size_t r = 0; r < n; ++r) u[free[r]] = x[r];
    return u;
}

} // namespace testutil
