#include "nonloc/kernels.hpp"

namespace nonloc {
namespace {

double s_wdot(const double* w, const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * a[i];
    return acc;
}

double s_wdot3(const double* w, const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * a[i] * b[i];
    return acc;
}

double s_wdiffdot(const double* w, const double* u, const double* k, double c,
                  std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += w[i] * (u[i] - c) * k[i];
    return acc;
}

void s_axpy(double* y, double a, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void s_mul(double* out, const double* a, const double* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

const KernelBackend k_scalar = {"scalar", s_wdot, s_wdot3, s_wdiffdot, s_axpy, s_mul};

} // namespace

const KernelBackend& scalar_backend() { return k_scalar; }

} // namespace nonloc
