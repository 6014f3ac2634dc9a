#pragma once

#include <cstddef>
#include <string>

namespace nonloc {

/// Primitive arithmetic kernels behind the O(M^2) inner loops.
///
/// Every routine that matters for throughput reduces or maps dense stripes of
/// doubles: quadrature-weighted dot products for operator rows and convolution
/// rows, axpy accumulation for transpose (column) sums, elementwise products
/// for two-point field assembly. Those primitives are gathered here behind a
/// function-pointer table so a vectorized backend can be swapped in at
/// runtime.
///
/// Reduction order is fixed per backend (the scalar backend is strictly
/// left-to-right; the SIMD backends use a fixed lane split + fixed horizontal
/// combine), so results never depend on thread count or repetition. Backends
/// are equivalence-tested against the scalar reference; agreement is to
/// rounding (~1e-15 relative), not bit-exact, because vector reduction
/// reassociates the sum.
struct KernelBackend {
    const char* name;

    /// sum_i w[i] * a[i]
    double (*wdot)(const double* w, const double* a, std::size_t n);

    /// sum_i w[i] * a[i] * b[i]
    double (*wdot3)(const double* w, const double* a, const double* b, std::size_t n);

    /// sum_i w[i] * (u[i] - c) * k[i]   (nonlocal operator row with center value c)
    double (*wdiffdot)(const double* w, const double* u, const double* k, double c,
                       std::size_t n);

    /// y[i] += a * x[i]
    void (*axpy)(double* y, double a, const double* x, std::size_t n);

    /// out[i] = a[i] * b[i]
    void (*mul)(double* out, const double* a, const double* b, std::size_t n);
};

/// Reference implementation (plain loops, strict left-to-right accumulation).
const KernelBackend& scalar_backend();

/// Backend compiled for this target's vector ISA, or nullptr when the host
/// CPU lacks it (AVX2+FMA on x86-64, NEON on aarch64).
const KernelBackend* simd_backend();

/// The active backend. Defaults to the best available; NONLOC_KERNELS=scalar
/// (or avx2 / neon) overrides. The choice is made once per process.
const KernelBackend& active_backend();

/// Force a backend by name ("scalar", "avx2", "neon", "auto"). Returns false
/// if the request names a backend this host cannot run. Intended for tests.
bool select_backend(const std::string& name);

} // namespace nonloc
