#pragma once

#include <cmath>
#include <cstdint>

// Counter-based pseudorandomness used for codebooks and simulation streams.
// Everything here is deterministic given the seeds, independent of platform
// and thread schedule.

namespace advdist {

// SplitMix64 finalizer (Stafford mix 13); bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Uniform double in [0,1) from the top 53 bits of a word.
inline double u64_to_unit(std::uint64_t v) {
    return double(v >> 11) * 0x1.0p-53;
}

// Small sequential generator with a splittable seed; Gaussian variates by
// Box-Muller with one cached value.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    double next_unit() { return u64_to_unit(next_u64()); }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t bound = ~std::uint64_t(0) - (~std::uint64_t(0) % n);
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= bound);
        return v % n;
    }

    // Standard normal variate (Box-Muller, one value cached).
    double next_gaussian();

private:
    std::uint64_t state_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

inline double SplitMix64::next_gaussian() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    // Box-Muller; u1 shifted away from 0 so the log is finite.
    double u1, u2;
    do {
        u1 = next_unit();
    } while (u1 <= 0.0);
    u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double tau = 6.2831853071795864769;
    cached_ = r * std::sin(tau * u2);
    has_cached_ = true;
    return r * std::cos(tau * u2);
}

// Deterministic per-trial seed stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master ^ mix64(index + 0x5851F42D4C957F2Dull));
}

}  // namespace advdist
