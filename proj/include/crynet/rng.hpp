#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace crynet {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// mt19937_64 with hand-rolled distributions. The standard distributions are
// implementation-defined, so every derived value here is spelled out to keep
// streams identical across compilers.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // [0, 1)
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // [0, n), n > 0. Lemire's multiply-shift; bias is rejected away.
    uint64_t uniform_int(uint64_t n) {
        uint64_t x = gen_();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto lo = static_cast<uint64_t>(m);
        if (lo < n) {
            uint64_t t = (0 - n) % n;
            while (lo < t) {
                x = gen_();
                m = static_cast<__uint128_t>(x) * n;
                lo = static_cast<uint64_t>(m);
            }
        }
        return static_cast<uint64_t>(m >> 64);
    }

    // Standard normal via Box-Muller, second value cached.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Deterministic stream derivation for per-item rngs.
    static uint64_t derive(uint64_t base, uint64_t salt) {
        return splitmix64(base ^ splitmix64(salt));
    }
    static uint64_t derive(uint64_t base, std::string_view tag, uint64_t salt) {
        return splitmix64(base ^ fnv1a64(tag) ^ splitmix64(salt));
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace crynet
