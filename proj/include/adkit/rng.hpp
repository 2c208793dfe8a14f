// rng.hpp
// Splittable deterministic randomness. Every (seed, stream_id) pair names an
// independent sequence, so per-trial streams can be derived up front and the
// results do not depend on scheduling or worker count.

#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include "adkit/linalg.hpp"

namespace adkit {

// SplitMix64 step: golden-ratio increment plus finalizer, so 0 is not a
// fixed point and nearby inputs map far apart.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// SplitMix-style generator with a per-stream odd increment.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : seed_(seed), stream_(stream_id) {
        state_ = mix64(seed + 0x9e3779b97f4a7c15ULL) ^
                 mix64(stream_id * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL);
        gamma_ = mix64(stream_id ^ 0xd1342543de82ef95ULL) | 1ULL;
        // weak-gamma guard: keep enough bit transitions in the increment
        if (std::popcount(gamma_ ^ (gamma_ >> 1)) < 24) gamma_ ^= 0xaaaaaaaaaaaaaaaaULL;
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

    std::uint64_t next_u64() {
        state_ += gamma_;
        return mix64(state_);
    }

    // uniform [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform (0, 1]
    double next_double_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // +1 or -1, equiprobable
    int next_sign() { return (next_u64() >> 63) ? -1 : 1; }

    // uniform over {0, ..., n-1}, unbiased
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("next_below: n must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // standard normal, Box-Muller (pairs cached)
    double next_gaussian() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double r = std::sqrt(-2.0 * std::log(next_double_open()));
        const double phi = 2.0 * std::numbers::pi * next_double();
        cached_ = r * std::sin(phi);
        has_cached_ = true;
        return r * std::cos(phi);
    }

    // real and imaginary parts independent standard normals
    Complex next_complex_gaussian() {
        const double r = std::sqrt(-2.0 * std::log(next_double_open()));
        const double phi = 2.0 * std::numbers::pi * next_double();
        return Complex{r * std::cos(phi), r * std::sin(phi)};
    }

private:
    std::uint64_t state_ = 0;
    std::uint64_t gamma_ = 0;
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

// Unit vector distributed with unitary invariance: independent standard
// complex Gaussian entries, normalized.
inline Vector haar_random_state(int dim, RngStream& rng) {
    if (dim < 1) throw std::invalid_argument("haar_random_state: dim must be positive");
    Vector v(static_cast<std::size_t>(dim));
    while (true) {
        for (Complex& x : v) x = rng.next_complex_gaussian();
        const double n = norm(v);
        if (n > 1e-150) {
            for (Complex& x : v) x /= n;
            return v;
        }
    }
}

inline std::vector<int> rademacher_signs(int dim, RngStream& rng) {
    if (dim < 1) throw std::invalid_argument("rademacher_signs: dim must be positive");
    std::vector<int> s(static_cast<std::size_t>(dim));
    for (int& x : s) x = rng.next_sign();
    return s;
}

// Unit vector with entries +-1/sqrt(dim), signs independent and equiprobable.
inline Vector rademacher_vector(int dim, RngStream& rng) {
    const std::vector<int> signs = rademacher_signs(dim, rng);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    Vector v(static_cast<std::size_t>(dim));
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = Complex{signs[k] * scale, 0.0};
    return v;
}

} // namespace adkit
