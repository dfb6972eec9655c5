#include <cmath>

#include "crynet/dsp.hpp"
#include "crynet/error.hpp"

namespace crynet::dsp {

void fft(std::vector<std::complex<double>>& a) {
    const size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) {
        throw ValidationError("fft: size must be a power of two, got " + std::to_string(n));
    }
    // bit-reversal permutation
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        double ang = -2.0 * M_PI / double(len);
        std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = a[i + k];
                std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

}  // namespace crynet::dsp
