#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

#include "crynet/kernels.hpp"

// AVX2 + FMA variants. Reductions use four independent accumulators, so the
// summation order differs from the scalar reference; all elementwise kernels
// keep the scalar operation order per lane and round identically.
namespace crynet::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d s = _mm_add_sd(lo, _mm_unpackhi_pd(lo, lo));
    return _mm_cvtsd_f64(s);
}

double dot_impl(const double* a, const double* b, size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double s = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_impl(double a, const double* x, double* y, size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d y0 = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        __m256d y1 = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4));
        _mm256_storeu_pd(y + i, y0);
        _mm256_storeu_pd(y + i + 4, y1);
    }
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

void scale_impl(double a, double* x, size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
    }
    for (; i < n; ++i) x[i] *= a;
}

double sum_impl(const double* x, size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
        acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
    }
    for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i];
    return s;
}

void relu_forward_impl(const double* x, double* out, size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(out + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
    }
    for (; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward_impl(const double* x, const double* dout, double* din, size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(x + i), zero, _CMP_GT_OQ);
        _mm256_storeu_pd(din + i, _mm256_and_pd(mask, _mm256_loadu_pd(dout + i)));
    }
    for (; i < n; ++i) din[i] = x[i] > 0.0 ? dout[i] : 0.0;
}

// No FMA here: keeps rounding identical to the scalar backend, which makes
// optimizer state bit-comparable across backends.
void rmsprop_update_impl(double* theta, const double* g, double* acc, size_t n,
                         double lr, double rho, double eps) {
    const __m256d rho_v = _mm256_set1_pd(rho);
    const __m256d omr_v = _mm256_set1_pd(1.0 - rho);
    const __m256d lr_v = _mm256_set1_pd(lr);
    const __m256d eps_v = _mm256_set1_pd(eps);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d gv = _mm256_loadu_pd(g + i);
        __m256d av = _mm256_loadu_pd(acc + i);
        __m256d gg = _mm256_mul_pd(gv, gv);
        av = _mm256_add_pd(_mm256_mul_pd(rho_v, av), _mm256_mul_pd(omr_v, gg));
        _mm256_storeu_pd(acc + i, av);
        __m256d step = _mm256_div_pd(_mm256_mul_pd(lr_v, gv),
                                     _mm256_sqrt_pd(_mm256_add_pd(av, eps_v)));
        _mm256_storeu_pd(theta + i, _mm256_sub_pd(_mm256_loadu_pd(theta + i), step));
    }
    const double one_minus_rho = 1.0 - rho;
    for (; i < n; ++i) {
        acc[i] = rho * acc[i] + one_minus_rho * (g[i] * g[i]);
        theta[i] -= lr * g[i] / std::sqrt(acc[i] + eps);
    }
}

std::pair<double, double> minmax_impl(const double* x, size_t n) {
    size_t i = 0;
    double lo, hi;
    if (n >= 4) {
        __m256d lov = _mm256_loadu_pd(x);
        __m256d hiv = lov;
        for (i = 4; i + 4 <= n; i += 4) {
            __m256d v = _mm256_loadu_pd(x + i);
            lov = _mm256_min_pd(lov, v);
            hiv = _mm256_max_pd(hiv, v);
        }
        alignas(32) double tmp[4];
        _mm256_store_pd(tmp, lov);
        lo = std::min(std::min(tmp[0], tmp[1]), std::min(tmp[2], tmp[3]));
        _mm256_store_pd(tmp, hiv);
        hi = std::max(std::max(tmp[0], tmp[1]), std::max(tmp[2], tmp[3]));
    } else {
        lo = hi = x[0];
        i = 1;
    }
    for (; i < n; ++i) {
        if (x[i] < lo) lo = x[i];
        if (x[i] > hi) hi = x[i];
    }
    return {lo, hi};
}

}  // namespace

bool supported() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const Ops ops = {
    "avx2",          dot_impl,           axpy_impl,           scale_impl,
    sum_impl,        relu_forward_impl,  relu_backward_impl,  rmsprop_update_impl,
    minmax_impl,
};

}  // namespace crynet::kernels::avx2

#endif  // x86_64
