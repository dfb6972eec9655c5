#include <cmath>

#include "crynet/kernels.hpp"

// Reference kernels. Plain loops, no explicit vectorization; the AVX2 backend
// is tested against these.
namespace crynet::kernels::scalar {

namespace {

double dot_impl(const double* a, const double* b, size_t n) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_impl(double a, const double* x, double* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_impl(double a, double* x, size_t n) {
    for (size_t i = 0; i < n; ++i) x[i] *= a;
}

double sum_impl(const double* x, size_t n) {
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) s += x[i];
    return s;
}

void relu_forward_impl(const double* x, double* out, size_t n) {
    for (size_t i = 0; i < n; ++i) out[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward_impl(const double* x, const double* dout, double* din, size_t n) {
    for (size_t i = 0; i < n; ++i) din[i] = x[i] > 0.0 ? dout[i] : 0.0;
}

void rmsprop_update_impl(double* theta, const double* g, double* acc, size_t n,
                         double lr, double rho, double eps) {
    const double one_minus_rho = 1.0 - rho;
    for (size_t i = 0; i < n; ++i) {
        acc[i] = rho * acc[i] + one_minus_rho * (g[i] * g[i]);
        theta[i] -= lr * g[i] / std::sqrt(acc[i] + eps);
    }
}

std::pair<double, double> minmax_impl(const double* x, size_t n) {
    double lo = x[0], hi = x[0];
    for (size_t i = 1; i < n; ++i) {
        if (x[i] < lo) lo = x[i];
        if (x[i] > hi) hi = x[i];
    }
    return {lo, hi};
}

}  // namespace

const Ops ops = {
    "scalar",        dot_impl,           axpy_impl,           scale_impl,
    sum_impl,        relu_forward_impl,  relu_backward_impl,  rmsprop_update_impl,
    minmax_impl,
};

}  // namespace crynet::kernels::scalar
