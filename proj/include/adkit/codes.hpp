// codes.hpp
// Complex spherical codes: constructions (d=3 SIC, prime-dimension MUB
// unions, the missing-basis family, random Rademacher and Haar sets),
// coherence analysis against the Welch bound, and cap-covering size bounds.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "adkit/linalg.hpp"
#include "adkit/rng.hpp"

namespace adkit {

// Finite set of unit vectors in one complex dimension. Indices are 1-based.
struct SphericalCode {
    int dimension = 0;
    std::vector<Vector> vectors;
    std::string label;

    int size() const { return static_cast<int>(vectors.size()); }

    const Vector& state(int i) const {
        if (i < 1 || i > size()) {
            throw std::out_of_range("SphericalCode::state: index " + std::to_string(i) +
                                    " outside [1, " + std::to_string(size()) + "]");
        }
        return vectors[static_cast<std::size_t>(i - 1)];
    }
};

struct CodeReport {
    int size = 0;
    double coherence = 0.0;            // max_{i != j} |<rho_i|rho_j>|
    double coherence_squared = 0.0;
    double welch_rhs = 0.0;            // (|S| - d) / (d (|S| - 1))
    bool welch_satisfied = false;
    std::pair<int, int> argmax_pair{0, 0};  // 1-based, lexicographically smallest
};

inline bool is_prime(int n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (int f = 3; static_cast<long long>(f) * f <= n; f += 2)
        if (n % f == 0) return false;
    return true;
}

namespace detail {

inline std::vector<Complex> roots_of_unity(int d) {
    std::vector<Complex> roots(static_cast<std::size_t>(d));
    for (int t = 0; t < d; ++t) {
        roots[static_cast<std::size_t>(t)] =
            std::polar(1.0, 2.0 * std::numbers::pi * t / d);
    }
    return roots;
}

} // namespace detail

// The 9-vector equiangular set in d=3: (0, 1, -w^k)/sqrt(2) for w = e^{2 pi i/3},
// k in {0,1,2}, together with its two cyclic coordinate shifts. All distinct
// pairs have squared overlap 1/4.
inline SphericalCode sic3() {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const Complex w1{-0.5, std::sqrt(3.0) / 2.0};
    const Complex roots[3] = {Complex{1.0, 0.0}, w1, std::conj(w1)};

    SphericalCode code;
    code.dimension = 3;
    code.label = "sic3";
    for (int shift = 0; shift < 3; ++shift) {
        for (int k = 0; k < 3; ++k) {
            const Complex base[3] = {Complex{0.0, 0.0}, Complex{inv_sqrt2, 0.0},
                                     -inv_sqrt2 * roots[k]};
            Vector v(3);
            for (int j = 0; j < 3; ++j) v[static_cast<std::size_t>((j + shift) % 3)] = base[j];
            code.vectors.push_back(std::move(v));
        }
    }
    return code;
}

// Union of d+1 mutually unbiased bases for prime d: the computational basis
// plus d quadratic-phase Fourier bases with components w^{a j^2 + k j}/sqrt(d)
// (a indexes the basis, k the vector). d=2 uses the three Pauli eigenbases,
// since the quadratic construction needs the inverse of 2 mod d.
inline SphericalCode mub_union(int d) {
    if (d < 2) throw std::invalid_argument("mub_union: d must be at least 2");
    if (!is_prime(d)) {
        throw std::invalid_argument("mub_union: d must be prime (got " + std::to_string(d) + ")");
    }

    SphericalCode code;
    code.dimension = d;
    code.label = "mub" + std::to_string(d);

    if (d == 2) {
        const double s = 1.0 / std::sqrt(2.0);
        code.vectors = {
            {Complex{1, 0}, Complex{0, 0}}, {Complex{0, 0}, Complex{1, 0}},  // Z
            {Complex{s, 0}, Complex{s, 0}}, {Complex{s, 0}, Complex{-s, 0}}, // X
            {Complex{s, 0}, Complex{0, s}}, {Complex{s, 0}, Complex{0, -s}}, // Y
        };
        return code;
    }

    for (int k = 0; k < d; ++k) {
        Vector e(static_cast<std::size_t>(d));
        e[static_cast<std::size_t>(k)] = 1.0;
        code.vectors.push_back(std::move(e));
    }
    const std::vector<Complex> roots = detail::roots_of_unity(d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (int a = 0; a < d; ++a) {
        for (int k = 0; k < d; ++k) {
            Vector v(static_cast<std::size_t>(d));
            for (int j = 0; j < d; ++j) {
                const long long expo =
                    (static_cast<long long>(a) * j % d * j + static_cast<long long>(k) * j) % d;
                v[static_cast<std::size_t>(j)] = scale * roots[static_cast<std::size_t>(expo)];
            }
            code.vectors.push_back(std::move(v));
        }
    }
    return code;
}

// d vectors rho_i = (sum_{k != i} e_k)/sqrt(d-1); every pair overlaps at
// exactly (d-2)/(d-1), and <rho_i|e_i> = 0 by construction.
inline SphericalCode missing_basis_family(int d) {
    if (d < 2) throw std::invalid_argument("missing_basis_family: d must be at least 2");
    SphericalCode code;
    code.dimension = d;
    code.label = "missing-basis" + std::to_string(d);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d - 1));
    for (int i = 0; i < d; ++i) {
        Vector v(static_cast<std::size_t>(d), Complex{scale, 0.0});
        v[static_cast<std::size_t>(i)] = Complex{0.0, 0.0};
        code.vectors.push_back(std::move(v));
    }
    return code;
}

// Greedy rejection sampler for sign-vector codes: accumulate Rademacher
// vectors, rejecting any candidate whose overlap modulus against an accepted
// vector exceeds delta. Overlaps of sign vectors are rationals s/d, so the
// comparison is done on the integer sign sum. Stops at target_size or
// max_attempts (default 1000 * target_size); the result may be undersized.
inline SphericalCode random_rademacher_code(int d, int target_size, double delta,
                                            RngStream& rng, long max_attempts = 0) {
    if (d < 1) throw std::invalid_argument("random_rademacher_code: d must be positive");
    if (target_size < 1) {
        throw std::invalid_argument("random_rademacher_code: target_size must be positive");
    }
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::invalid_argument("random_rademacher_code: delta must lie in (0, 1)");
    }
    if (max_attempts <= 0) max_attempts = 1000L * target_size;

    std::vector<std::vector<int>> accepted;
    const double bound = delta * d;  // |sum of sign products| <= delta * d
    for (long attempt = 0; attempt < max_attempts && static_cast<int>(accepted.size()) < target_size;
         ++attempt) {
        std::vector<int> cand = rademacher_signs(d, rng);
        bool ok = true;
        for (const std::vector<int>& prev : accepted) {
            long dot = 0;
            for (int k = 0; k < d; ++k) dot += cand[static_cast<std::size_t>(k)] * prev[static_cast<std::size_t>(k)];
            if (static_cast<double>(std::labs(dot)) > bound) {
                ok = false;
                break;
            }
        }
        if (ok) accepted.push_back(std::move(cand));
    }

    SphericalCode code;
    code.dimension = d;
    code.label = "rademacher d=" + std::to_string(d) + " delta=" + std::to_string(delta);
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (const std::vector<int>& signs : accepted) {
        Vector v(static_cast<std::size_t>(d));
        for (int k = 0; k < d; ++k) v[static_cast<std::size_t>(k)] = Complex{signs[static_cast<std::size_t>(k)] * scale, 0.0};
        code.vectors.push_back(std::move(v));
    }
    return code;
}

// n independent Haar-random unit vectors.
inline SphericalCode haar_random_set(int d, int n, RngStream& rng) {
    if (d < 1 || n < 1) throw std::invalid_argument("haar_random_set: d and n must be positive");
    SphericalCode code;
    code.dimension = d;
    code.label = "haar d=" + std::to_string(d) + " n=" + std::to_string(n);
    code.vectors.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) code.vectors.push_back(haar_random_state(d, rng));
    return code;
}

// Coherence by exhaustive pair scan, with the Welch right-hand side
// (|S| - d)/(d (|S| - 1)). Ties in the argmax pair resolve to the
// lexicographically smallest index pair.
inline CodeReport analyze(const SphericalCode& code) {
    const int n = code.size();
    if (n < 2) throw std::invalid_argument("analyze: code must contain at least 2 vectors");

    CodeReport r;
    r.size = n;
    r.argmax_pair = {1, 2};
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double ov = std::abs(inner_product(code.vectors[static_cast<std::size_t>(i)],
                                                     code.vectors[static_cast<std::size_t>(j)]));
            if (ov > r.coherence) {
                r.coherence = ov;
                r.argmax_pair = {i + 1, j + 1};
            }
        }
    }
    r.coherence_squared = r.coherence * r.coherence;
    r.welch_rhs = static_cast<double>(n - code.dimension) /
                  (static_cast<double>(code.dimension) * (n - 1));
    r.welch_satisfied = r.coherence_squared >= r.welch_rhs - 1e-12;
    return r;
}

// ceil((4/3)^(d-1)): the cap-covering lower bound on the achievable size of a
// delta = 1/2 code. Exact integer arithmetic where 4^(d-1) fits in 128 bits,
// extended precision beyond that.
inline std::uint64_t cap_bound_size(int d) {
    if (d < 1) throw std::invalid_argument("cap_bound_size: d must be positive");
    const int n = d - 1;
    if (n == 0) return 1;
    if (n <= 63) {
        unsigned __int128 p4 = static_cast<unsigned __int128>(1) << (2 * n);
        unsigned __int128 p3 = 1;
        for (int k = 0; k < n; ++k) p3 *= 3;
        return static_cast<std::uint64_t>((p4 + p3 - 1) / p3);
    }
    const long double v = std::ceil(std::pow(4.0L / 3.0L, static_cast<long double>(n)));
    if (v > 9.2e18L) throw std::overflow_error("cap_bound_size: result exceeds 64 bits");
    return static_cast<std::uint64_t>(v);
}

// V^d / V^d_theta = sin(theta)^{-(2d-2)}: ratio of the full-sphere volume to
// a spherical cap of opening angle theta in d complex dimensions.
inline double cap_volume_ratio(int d, double theta) {
    if (d < 1) throw std::invalid_argument("cap_volume_ratio: d must be positive");
    if (!(theta > 0.0 && theta <= std::numbers::pi / 2.0 + 1e-15)) {
        throw std::invalid_argument("cap_volume_ratio: theta must lie in (0, pi/2]");
    }
    return std::pow(std::sin(theta), -2.0 * (d - 1));
}

} // namespace adkit
