// AVX2+FMA backend. This translation unit is the only one compiled with
// -mavx2 -mfma; it must stay unreachable on hosts without those features
// (dispatch checks CPU flags before handing out the table).

#if defined(__x86_64__) || defined(_M_X64)

#include "nonloc/kernels.hpp"

#include <immintrin.h>

namespace nonloc {
namespace {

inline double hsum(__m256d v) {
    // fixed combine order: (lane0 + lane1) + (lane2 + lane3)
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d lo01 = _mm_hadd_pd(lo, lo);
    __m128d hi23 = _mm_hadd_pd(hi, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo01, hi23));
}

double v_wdot(const double* w, const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d wv = _mm256_loadu_pd(w + i);
        __m256d av = _mm256_loadu_pd(a + i);
        acc = _mm256_fmadd_pd(wv, av, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += w[i] * a[i];
    return s;
}

double v_wdot3(const double* w, const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d wv = _mm256_loadu_pd(w + i);
        __m256d av = _mm256_loadu_pd(a + i);
        __m256d bv = _mm256_loadu_pd(b + i);
        acc = _mm256_fmadd_pd(_mm256_mul_pd(wv, av), bv, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += w[i] * a[i] * b[i];
    return s;
}

double v_wdiffdot(const double* w, const double* u, const double* k, double c,
                  std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    __m256d cv = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d wv = _mm256_loadu_pd(w + i);
        __m256d dv = _mm256_sub_pd(_mm256_loadu_pd(u + i), cv);
        __m256d kv = _mm256_loadu_pd(k + i);
        acc = _mm256_fmadd_pd(_mm256_mul_pd(wv, dv), kv, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += w[i] * (u[i] - c) * k[i];
    return s;
}

void v_axpy(double* y, double a, const double* x, std::size_t n) {
    __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d yv = _mm256_loadu_pd(y + i);
        yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yv);
        _mm256_storeu_pd(y + i, yv);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void v_mul(double* out, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i,
                         _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

const KernelBackend k_avx2 = {"avx2", v_wdot, v_wdot3, v_wdiffdot, v_axpy, v_mul};

} // namespace

const KernelBackend* avx2_backend_impl() { return &k_avx2; }

} // namespace nonloc

#endif // x86-64
