#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "crynet/error.hpp"

namespace crynet::nnet {

// Dense value grid, (height, width, channels) with channels contiguous.
// Flat vectors are stored as (1, 1, n). Weight blobs reuse the same storage
// with their own index conventions (documented at the owning layer).
struct Tensor {
    int h = 0, w = 0, c = 0;
    std::vector<double> v;

    Tensor() = default;
    Tensor(int h_, int w_, int c_) : h(h_), w(w_), c(c_), v(size_t(h_) * w_ * c_, 0.0) {}

    static Tensor flat(int n) { return Tensor(1, 1, n); }

    size_t size() const { return v.size(); }
    bool empty() const { return v.empty(); }

    double& at(int y, int x, int ch) { return v[(size_t(y) * w + x) * c + ch]; }
    double at(int y, int x, int ch) const { return v[(size_t(y) * w + x) * c + ch]; }

    double* data() { return v.data(); }
    const double* data() const { return v.data(); }

    // channel vector of pixel (y, x)
    double* px(int y, int x) { return v.data() + (size_t(y) * w + x) * c; }
    const double* px(int y, int x) const { return v.data() + (size_t(y) * w + x) * c; }

    bool same_shape(const Tensor& o) const { return h == o.h && w == o.w && c == o.c; }

    std::string shape_str() const {
        return "(" + std::to_string(h) + "x" + std::to_string(w) + "x" + std::to_string(c) + ")";
    }

    void fill(double x) { std::fill(v.begin(), v.end(), x); }
};

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(what) + ": shape mismatch " + a.shape_str() +
                             " vs " + b.shape_str());
    }
}

}  // namespace crynet::nnet
