// protocols.hpp
// The relation task on a spherical code and its protocols: the zero-error
// quantum one-way protocol (send the state, measure with an excluding POVM),
// the two-round classical protocol built on dyadic interval blocks, and the
// bounded-error one-way classical protocol over random balanced partitions.
// Plus the one-way lower-bound calculators and the multiplicative-error
// support check.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "adkit/antidist.hpp"
#include "adkit/codes.hpp"
#include "adkit/linalg.hpp"
#include "adkit/rng.hpp"

namespace adkit {

// smallest b >= 0 with 2^b >= x
inline int ceil_log2(long x) {
    if (x < 1) throw std::invalid_argument("ceil_log2: argument must be positive");
    int b = 0;
    while ((1L << b) < x) ++b;
    return b;
}

inline bool is_power_of_two(long x) { return x >= 1 && (x & (x - 1)) == 0; }

// Alice holds an index i in [size]; Bob holds three distinct indices. Bob must
// output one of his indices that differs from Alice's. The triple is stored
// sorted ascending.
struct RelationInstance {
    int size = 0;
    int alice_input = 0;
    std::array<int, 3> bob_triple{0, 0, 0};

    static RelationInstance make(int size, int alice_input, std::array<int, 3> triple) {
        std::sort(triple.begin(), triple.end());
        if (size < 3) throw std::invalid_argument("RelationInstance: need |S| >= 3");
        if (alice_input < 1 || alice_input > size) {
            throw std::invalid_argument("RelationInstance: Alice's index out of range");
        }
        for (int t : triple) {
            if (t < 1 || t > size) {
                throw std::invalid_argument("RelationInstance: triple index out of range");
            }
        }
        if (triple[0] == triple[1] || triple[1] == triple[2]) {
            throw std::invalid_argument("RelationInstance: triple indices must be distinct");
        }
        return RelationInstance{size, alice_input, triple};
    }

    bool triple_contains(int z) const {
        return z == bob_triple[0] || z == bob_triple[1] || z == bob_triple[2];
    }
};

inline bool relation_holds(const RelationInstance& inst, int z) {
    if (z < 1 || z > inst.size) throw std::invalid_argument("relation_holds: output out of range");
    return inst.triple_contains(z) && z != inst.alice_input;
}

enum class ProtocolKind { quantum_one_way, classical_two_way, classical_bounded_error };

inline const char* to_string(ProtocolKind k) {
    switch (k) {
        case ProtocolKind::quantum_one_way: return "quantum_one_way";
        case ProtocolKind::classical_two_way: return "classical_two_way";
        case ProtocolKind::classical_bounded_error: return "classical_bounded_error";
    }
    return "quantum_one_way";
}

struct Message {
    std::string sender;  // "alice" or "bob"
    long payload = 0;
    int bits = 0;  // qubits for the quantum message
};

struct Transcript {
    ProtocolKind protocol = ProtocolKind::quantum_one_way;
    RelationInstance inputs;
    std::vector<Message> messages;
    int output = 0;
    int total_bits = 0;
    bool relation_satisfied = false;
};

// ---------------------------------------------------------------------------
// Quantum one-way protocol
// ---------------------------------------------------------------------------

// Born distribution of Bob's output: p(z) = <rho_i|Pi_z|rho_i> for the POVM
// excluding Bob's triple, elements labeled by the sorted triple.
inline std::map<int, double> quantum_one_way_exact(const SphericalCode& code,
                                                   const RelationInstance& inst,
                                                   const Povm& triple_povm) {
    if (code.size() != inst.size) {
        throw std::invalid_argument("quantum_one_way_exact: instance does not match code size");
    }
    if (triple_povm.outcomes() != 3 || triple_povm.dim != code.dimension) {
        throw std::invalid_argument("quantum_one_way_exact: POVM shape mismatch");
    }
    const Vector& sent = code.state(inst.alice_input);
    std::map<int, double> dist;
    for (int t = 0; t < 3; ++t) {
        dist[inst.bob_triple[static_cast<std::size_t>(t)]] =
            expectation(triple_povm.elements[static_cast<std::size_t>(t)], sent);
    }
    return dist;
}

inline std::map<int, double> quantum_one_way_exact(const SphericalCode& code,
                                                   const RelationInstance& inst,
                                                   const SdpOptions& opts = {}) {
    const std::array<Vector, 3> states{code.state(inst.bob_triple[0]),
                                       code.state(inst.bob_triple[1]),
                                       code.state(inst.bob_triple[2])};
    return quantum_one_way_exact(code, inst, antidistinguishing_povm(states, opts));
}

inline Transcript quantum_one_way_sample(const SphericalCode& code, const RelationInstance& inst,
                                         RngStream& rng, const Povm& triple_povm) {
    std::map<int, double> dist = quantum_one_way_exact(code, inst, triple_povm);
    double total = 0.0;
    for (auto& [z, p] : dist) {
        p = std::max(p, 0.0);
        total += p;
    }
    if (total <= 0.0) throw std::runtime_error("quantum_one_way_sample: degenerate distribution");

    const double ticket = rng.next_double() * total;
    double acc = 0.0;
    int output = dist.rbegin()->first;
    for (const auto& [z, p] : dist) {
        acc += p;
        if (ticket < acc) {
            output = z;
            break;
        }
    }

    Transcript t;
    t.protocol = ProtocolKind::quantum_one_way;
    t.inputs = inst;
    const int qubits = ceil_log2(code.dimension);
    t.messages.push_back({"alice", inst.alice_input, qubits});
    t.output = output;
    t.total_bits = qubits;
    t.relation_satisfied = relation_holds(inst, output);
    return t;
}

inline Transcript quantum_one_way_sample(const SphericalCode& code, const RelationInstance& inst,
                                         RngStream& rng, const SdpOptions& opts = {}) {
    const std::array<Vector, 3> states{code.state(inst.bob_triple[0]),
                                       code.state(inst.bob_triple[1]),
                                       code.state(inst.bob_triple[2])};
    return quantum_one_way_sample(code, inst, rng, antidistinguishing_povm(states, opts));
}

struct QuantumSweepSummary {
    long instances = 0;
    long violating_instances = 0;  // i in the triple but p(i) above tolerance
    double max_self_probability = 0.0;
    int qubits = 0;
};

// Exact Born statistics over every (i, {j,k,m}) input pair of the code. One
// excluding POVM is computed per triple and reused across Alice's inputs.
inline QuantumSweepSummary quantum_exhaustive_sweep(const SphericalCode& code,
                                                    const SdpOptions& opts = {}) {
    const int n = code.size();
    QuantumSweepSummary s;
    s.qubits = ceil_log2(code.dimension);
    for (int j = 1; j <= n; ++j) {
        for (int k = j + 1; k <= n; ++k) {
            for (int m = k + 1; m <= n; ++m) {
                const std::array<Vector, 3> states{code.state(j), code.state(k), code.state(m)};
                const Povm povm = antidistinguishing_povm(states, opts);
                for (int i = 1; i <= n; ++i) {
                    const RelationInstance inst = RelationInstance::make(n, i, {j, k, m});
                    const std::map<int, double> dist = quantum_one_way_exact(code, inst, povm);
                    ++s.instances;
                    if (inst.triple_contains(i)) {
                        const double p_self = dist.at(i);
                        s.max_self_probability = std::max(s.max_self_probability, p_self);
                        if (p_self > opts.verdict_tol) ++s.violating_instances;
                    }
                }
            }
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Two-way classical protocol (|S| a power of two)
// ---------------------------------------------------------------------------

namespace detail {
// 0-based dyadic block index of x at scale r: blocks are (s 2^r, (s+1) 2^r].
inline long block_at_scale(int x, int r) { return (static_cast<long>(x) - 1) >> r; }
} // namespace detail

// Bob's first message: the largest r <= log2(|S|) such that, for some s >= 0,
// either j,k lie in block s and m in block s+1, or j lies in block s and k,m
// in block s+1 (blocks of width 2^r, sorted j < k < m).
inline int two_way_round1(std::array<int, 3> bob_triple, int size) {
    if (!is_power_of_two(size)) {
        throw std::invalid_argument("two_way_round1: |S| must be a power of two");
    }
    std::sort(bob_triple.begin(), bob_triple.end());
    const int q = ceil_log2(size);
    for (int r = q; r >= 0; --r) {
        const long bj = detail::block_at_scale(bob_triple[0], r);
        const long bk = detail::block_at_scale(bob_triple[1], r);
        const long bm = detail::block_at_scale(bob_triple[2], r);
        if ((bj == bk && bm == bj + 1) || (bk == bm && bk == bj + 1)) return r;
    }
    throw std::logic_error("two_way_round1: no splitting scale found");
}

// Alice's reply: the parity of ceil(i / 2^r).
inline int two_way_round2(int alice_input, int r) {
    if (alice_input < 1) throw std::invalid_argument("two_way_round2: index must be positive");
    if (r < 0) throw std::invalid_argument("two_way_round2: scale must be non-negative");
    const long block = ((static_cast<long>(alice_input) - 1) >> r) + 1;  // = ceil(i / 2^r)
    return static_cast<int>(block & 1);
}

// Full two-round run. Bob outputs the smallest element of his triple whose
// block parity at scale r differs from Alice's parity bit; by the choice of r
// the triple spans two consecutive blocks, so such an element always exists.
inline Transcript two_way_protocol(const RelationInstance& inst) {
    if (!is_power_of_two(inst.size)) {
        throw std::invalid_argument("two_way_protocol: |S| must be a power of two");
    }
    const int q = ceil_log2(inst.size);
    const int r = two_way_round1(inst.bob_triple, inst.size);
    const int p = two_way_round2(inst.alice_input, r);

    int output = 0;
    for (int z : inst.bob_triple) {
        if (two_way_round2(z, r) != p) {
            output = z;
            break;
        }
    }
    if (output == 0) throw std::logic_error("two_way_protocol: no safe output exists");

    Transcript t;
    t.protocol = ProtocolKind::classical_two_way;
    t.inputs = inst;
    const int r_bits = ceil_log2(q);
    t.messages.push_back({"bob", r, r_bits});
    t.messages.push_back({"alice", p, 1});
    t.output = output;
    t.total_bits = r_bits + 1;
    t.relation_satisfied = relation_holds(inst, output);
    return t;
}

struct TwoWaySweepSummary {
    long instances = 0;
    long errors = 0;
    int total_bits = 0;
};

// Every (i, {j,k,m}) input pair for the given size.
inline TwoWaySweepSummary two_way_exhaustive_sweep(int size) {
    TwoWaySweepSummary s;
    for (int j = 1; j <= size; ++j)
        for (int k = j + 1; k <= size; ++k)
            for (int m = k + 1; m <= size; ++m)
                for (int i = 1; i <= size; ++i) {
                    const Transcript t =
                        two_way_protocol(RelationInstance::make(size, i, {j, k, m}));
                    ++s.instances;
                    if (!t.relation_satisfied) ++s.errors;
                    s.total_bits = std::max(s.total_bits, t.total_bits);
                }
    return s;
}

// ---------------------------------------------------------------------------
// Bounded-error one-way classical protocol
// ---------------------------------------------------------------------------

// Partition of [size] into num_blocks labels 1..K.
struct Partition {
    int num_blocks = 0;
    std::vector<int> block_of;  // block_of[i-1] = label of index i

    int block(int i) const { return block_of[static_cast<std::size_t>(i - 1)]; }
};

// Balanced random partition: a uniformly random permutation cut into K
// near-equal consecutive blocks.
inline Partition random_balanced_partition(int size, int num_blocks, RngStream& rng) {
    if (num_blocks < 1 || num_blocks > size) {
        throw std::invalid_argument("random_balanced_partition: need 1 <= K <= |S|");
    }
    std::vector<int> perm(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) perm[static_cast<std::size_t>(i)] = i + 1;
    for (int i = size - 1; i > 0; --i) {
        const auto j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i) + 1));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }

    Partition part;
    part.num_blocks = num_blocks;
    part.block_of.assign(static_cast<std::size_t>(size), 0);
    const int base = size / num_blocks;
    const int extra = size % num_blocks;  // first `extra` blocks get one more
    int pos = 0;
    for (int b = 1; b <= num_blocks; ++b) {
        const int width = base + (b <= extra ? 1 : 0);
        for (int k = 0; k < width; ++k) {
            part.block_of[static_cast<std::size_t>(perm[static_cast<std::size_t>(pos++)] - 1)] = b;
        }
    }
    return part;
}

// One round against a fixed shared partition: Alice sends her block label,
// Bob picks uniformly among triple elements outside that block, falling back
// to a uniform triple element when the whole triple shares Alice's block.
inline Transcript bounded_error_with_partition(const RelationInstance& inst,
                                               const Partition& partition, RngStream& rng) {
    if (static_cast<int>(partition.block_of.size()) != inst.size) {
        throw std::invalid_argument("bounded_error_with_partition: partition size mismatch");
    }
    const int label = partition.block(inst.alice_input);
    std::vector<int> outside;
    for (int z : inst.bob_triple) {
        if (partition.block(z) != label) outside.push_back(z);
    }
    int output;
    if (!outside.empty()) {
        output = outside[rng.next_below(outside.size())];
    } else {
        output = inst.bob_triple[static_cast<std::size_t>(rng.next_below(3))];
    }

    Transcript t;
    t.protocol = ProtocolKind::classical_bounded_error;
    t.inputs = inst;
    const int bits = ceil_log2(partition.num_blocks);
    t.messages.push_back({"alice", label, bits});
    t.output = output;
    t.total_bits = bits;
    t.relation_satisfied = relation_holds(inst, output);
    return t;
}

inline Transcript bounded_error_one_way(const RelationInstance& inst, int num_blocks,
                                        RngStream& rng) {
    if (num_blocks < 2) throw std::invalid_argument("bounded_error_one_way: need K >= 2");
    const Partition part = random_balanced_partition(inst.size, num_blocks, rng);
    return bounded_error_with_partition(inst, part, rng);
}

// ---------------------------------------------------------------------------
// Bounds and the multiplicative-error support law
// ---------------------------------------------------------------------------

// ceil(log2 |S| - 1): any zero-error one-way classical protocol needs a
// distinct message per two indices.
inline int one_way_lower_bound_bits(long size) {
    if (size < 2) throw std::invalid_argument("one_way_lower_bound_bits: need |S| >= 2");
    int b = 0;
    while ((1L << (b + 1)) < size) ++b;
    return b;
}

// ceil(log2(4/3) (d-1) - 1), clamped at 0.
inline int cap_lower_bound_bits(int d) {
    if (d < 1) throw std::invalid_argument("cap_lower_bound_bits: d must be positive");
    const long double bits = std::ceil(std::log2(4.0L / 3.0L) * (d - 1) - 1.0L);
    return bits > 0.0L ? static_cast<int>(bits) : 0;
}

// True iff |simulated(z) - exact(z)| <= eps * exact(z) for every outcome; in
// particular a zero-probability outcome must stay exactly zero, no matter
// how large eps is. Positive outcomes are compared with a relative slack of
// a few ulps; the zero-support test admits no slack at all.
inline bool multiplicative_support_check(std::span<const double> exact,
                                         std::span<const double> simulated, double eps) {
    if (exact.size() != simulated.size() || exact.empty()) {
        throw std::invalid_argument("multiplicative_support_check: outcome sets differ");
    }
    if (eps < 0.0) throw std::invalid_argument("multiplicative_support_check: eps must be >= 0");
    double sum_exact = 0.0, sum_sim = 0.0;
    for (std::size_t z = 0; z < exact.size(); ++z) {
        if (exact[z] < 0.0 || simulated[z] < 0.0) {
            throw std::invalid_argument("multiplicative_support_check: negative probability");
        }
        sum_exact += exact[z];
        sum_sim += simulated[z];
    }
    if (std::abs(sum_exact - 1.0) > 1e-8 || std::abs(sum_sim - 1.0) > 1e-8) {
        throw std::invalid_argument("multiplicative_support_check: distributions must sum to 1");
    }
    for (std::size_t z = 0; z < exact.size(); ++z) {
        if (exact[z] == 0.0) {
            if (simulated[z] != 0.0) return false;
        } else {
            const double bound = eps * exact[z];
            if (std::abs(simulated[z] - exact[z]) > bound + 4e-16 * (1.0 + bound)) return false;
        }
    }
    return true;
}

} // namespace adkit
