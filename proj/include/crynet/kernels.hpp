#pragma once

#include <cstddef>
#include <utility>

// Hot inner loops of the pipeline. A scalar reference implementation always
// exists; an AVX2+FMA variant is selected at runtime when the CPU supports it.
// Elementwise kernels (axpy excluded) round identically in both backends;
// reductions (dot, sum) may differ in summation order and are
// equivalence-tested against the scalar reference within tolerance.
namespace crynet::kernels {

struct Ops {
    const char* name;

    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, size_t n);
    // y[i] += a * x[i]
    void (*axpy)(double a, const double* x, double* y, size_t n);
    // x[i] *= a
    void (*scale)(double a, double* x, size_t n);
    // sum_i x[i]
    double (*sum)(const double* x, size_t n);
    // out[i] = max(x[i], 0)
    void (*relu_forward)(const double* x, double* out, size_t n);
    // din[i] = x[i] > 0 ? dout[i] : 0
    void (*relu_backward)(const double* x, const double* dout, double* din, size_t n);
    // acc = rho*acc + (1-rho)*g^2 ; theta -= lr * g / sqrt(acc + eps)
    void (*rmsprop_update)(double* theta, const double* g, double* acc, size_t n,
                           double lr, double rho, double eps);
    // (min, max) over x; n >= 1
    std::pair<double, double> (*minmax)(const double* x, size_t n);
};

namespace scalar {
extern const Ops ops;
}
#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
extern const Ops ops;
bool supported();
}
#endif

// Active backend. Chosen once on first use: AVX2 when the CPU has AVX2+FMA,
// scalar otherwise. CRYNET_KERNELS=scalar|avx2 overrides.
const Ops& active();

// Force a backend by name ("scalar", "avx2"); returns false if unavailable.
bool force_backend(const char* name);

inline double dot(const double* a, const double* b, size_t n) { return active().dot(a, b, n); }
inline void axpy(double a, const double* x, double* y, size_t n) { active().axpy(a, x, y, n); }
inline void scale(double a, double* x, size_t n) { active().scale(a, x, n); }
inline double sum(const double* x, size_t n) { return active().sum(x, n); }
inline void relu_forward(const double* x, double* out, size_t n) { active().relu_forward(x, out, n); }
inline void relu_backward(const double* x, const double* dout, double* din, size_t n) {
    active().relu_backward(x, dout, din, n);
}
inline void rmsprop_update(double* theta, const double* g, double* acc, size_t n,
                           double lr, double rho, double eps) {
    active().rmsprop_update(theta, g, acc, n, lr, rho, eps);
}
inline std::pair<double, double> minmax(const double* x, size_t n) { return active().minmax(x, n); }

}  // namespace crynet::kernels
