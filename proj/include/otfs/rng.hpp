// rng.hpp - Counter-based deterministic RNG for Monte Carlo runs
//
// Each consumer derives its own key from a root seed plus stream tags
// (frame index, SNR index, scheme id, ...), so results are independent of
// worker scheduling and iteration order. The generator is a splitmix64
// finalizer applied to key + counter, which passes standard statistical
// batteries and needs no stored state beyond the counter.

#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include "otfs/types.hpp"

namespace otfs {

namespace detail {
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}
}  // namespace detail

// Fold a stream tag into a key. Chain calls to build hierarchical seeds.
inline uint64_t derive_key(uint64_t key, uint64_t tag) {
    return detail::splitmix64(key ^ (tag + 0x632BE59BD9B4E019ULL));
}

class CounterRng {
public:
    explicit CounterRng(uint64_t key) : key_(key) {}

    uint64_t next_u64() { return detail::splitmix64(key_ + counter_++ * 0xD1B54A32D192ED03ULL); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + uniform() * (b - a); }

    // Integer in [0, n).
    uint64_t below(uint64_t n) { return next_u64() % n; }

    // Standard normal pair via Box-Muller.
    std::pair<double, double> gaussian_pair() {
        double u1 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        return {r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2)};
    }

    double gaussian() { return gaussian_pair().first; }

    // Circularly symmetric complex Gaussian with E|x|^2 == variance.
    Complex cgaussian(double variance) {
        auto [a, b] = gaussian_pair();
        double s = std::sqrt(variance / 2.0);
        return {s * a, s * b};
    }

private:
    uint64_t key_;
    uint64_t counter_ = 0;
};

}  // namespace otfs
