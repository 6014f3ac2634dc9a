// NEON backend (aarch64). Advanced SIMD is mandatory on aarch64, so unlike the
// AVX2 table this one needs no CPU-flag gate — only an architecture gate.

#if defined(__aarch64__)

#include "nonloc/kernels.hpp"

#include <arm_neon.h>

namespace nonloc {
namespace {

inline double hsum(float64x2_t v) { return vgetq_lane_f64(v, 0) + vgetq_lane_f64(v, 1); }

double v_wdot(const double* w, const double* a, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        acc = vfmaq_f64(acc, vld1q_f64(w + i), vld1q_f64(a + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += w[i] * a[i];
    return s;
}

double v_wdot3(const double* w, const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t wa = vmulq_f64(vld1q_f64(w + i), vld1q_f64(a + i));
        acc = vfmaq_f64(acc, wa, vld1q_f64(b + i));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += w[i] * a[i] * b[i];
    return s;
}

double v_wdiffdot(const double* w, const double* u, const double* k, double c,
                  std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    float64x2_t cv = vdupq_n_f64(c);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t d = vsubq_f64(vld1q_f64(u + i), cv);
        float64x2_t wd = vmulq_f64(vld1q_f64(w + i), d);
        acc = vfmaq_f64(acc, wd, vld1q_f64(k + i));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += w[i] * (u[i] - c) * k[i];
    return s;
}

void v_axpy(double* y, double a, const double* x, std::size_t n) {
    float64x2_t av = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), av, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

void v_mul(double* out, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

const KernelBackend k_neon = {"neon", v_wdot, v_wdot3, v_wdiffdot, v_axpy, v_mul};

} // namespace

const KernelBackend* neon_backend_impl() { return &k_neon; }

} // namespace nonloc

#endif // aarch64
