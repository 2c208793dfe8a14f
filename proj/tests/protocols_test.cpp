#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "adkit/codes.hpp"
#include "adkit/protocols.hpp"
#include "adkit/rng.hpp"
#include "test_support.hpp"

using namespace adkit;

namespace {

// All triples {j<k<m} of [size].
std::vector<std::array<int, 3>> all_triples(int size) {
    std::vector<std::array<int, 3>> out;
    for (int j = 1; j <= size; ++j)
        for (int k = j + 1; k <= size; ++k)
            for (int m = k + 1; m <= size; ++m) out.push_back({j, k, m});
    return out;
}

} // namespace

TEST(Relation, HoldsExactlyWhenOutputAvoidsAlice) {
    const RelationInstance inst = RelationInstance::make(8, 1, {2, 3, 4});
    EXPECT_TRUE(relation_holds(inst, 2));
    EXPECT_FALSE(relation_holds(inst, 1));
    EXPECT_FALSE(relation_holds(inst, 5));

    const RelationInstance clash = RelationInstance::make(8, 2, {2, 3, 4});
    EXPECT_FALSE(relation_holds(clash, 2));
    EXPECT_TRUE(relation_holds(clash, 3));
}

TEST(Relation, ValidatesInstanceAndOutput) {
    EXPECT_THROW(RelationInstance::make(8, 0, {1, 2, 3}), std::invalid_argument);
    EXPECT_THROW(RelationInstance::make(8, 9, {1, 2, 3}), std::invalid_argument);
    EXPECT_THROW(RelationInstance::make(8, 1, {2, 2, 3}), std::invalid_argument);
    EXPECT_THROW(RelationInstance::make(8, 1, {0, 2, 3}), std::invalid_argument);
    const RelationInstance inst = RelationInstance::make(8, 1, {2, 3, 4});
    EXPECT_THROW(relation_holds(inst, 0), std::invalid_argument);
    EXPECT_THROW(relation_holds(inst, 9), std::invalid_argument);
}

TEST(TwoWayRound1, HandTracedExamples) {
    EXPECT_EQ(two_way_round1({1, 2, 3}, 8), 1);
    EXPECT_EQ(two_way_round1({1, 5, 8}, 8), 2);
    EXPECT_EQ(two_way_round1({4, 5, 6}, 8), 2);
}

TEST(TwoWayRound1, EverySizeEightTripleHasAScale) {
    for (const auto& t : all_triples(8)) {
        const int r = two_way_round1(t, 8);
        EXPECT_GE(r, 0);
        EXPECT_LE(r, 2);
        // verify the two-consecutive-blocks structure directly
        const auto block = [&](int x) { return (x - 1) >> r; };
        const bool case_low = block(t[0]) == block(t[1]) && block(t[2]) == block(t[0]) + 1;
        const bool case_high = block(t[1]) == block(t[2]) && block(t[1]) == block(t[0]) + 1;
        EXPECT_TRUE(case_low || case_high) << t[0] << "," << t[1] << "," << t[2] << " r=" << r;
    }
}

TEST(TwoWayRound1, RejectsNonPowerOfTwo) {
    EXPECT_THROW(two_way_round1({1, 2, 3}, 9), std::invalid_argument);
}

TEST(TwoWayRound2, ParityOfScaledCeiling) {
    EXPECT_EQ(two_way_round2(5, 1), 1);  // ceil(5/2) = 3
    EXPECT_EQ(two_way_round2(1, 0), 1);  // ceil(1/1) = 1
    EXPECT_EQ(two_way_round2(8, 2), 0);  // ceil(8/4) = 2
}

TEST(TwoWayProtocol, HandTracedRun) {
    const RelationInstance inst = RelationInstance::make(8, 5, {1, 2, 3});
    const Transcript t = two_way_protocol(inst);
    ASSERT_EQ(t.messages.size(), 2u);
    EXPECT_EQ(t.messages[0].sender, "bob");
    EXPECT_EQ(t.messages[0].payload, 1);  // r
    EXPECT_EQ(t.messages[1].sender, "alice");
    EXPECT_EQ(t.messages[1].payload, 1);  // parity of ceil(5/2)
    EXPECT_EQ(t.output, 3);
    EXPECT_EQ(t.total_bits, 3);
    EXPECT_TRUE(t.relation_satisfied);
}

TEST(TwoWayProtocol, RejectsNonPowerOfTwo) {
    EXPECT_THROW(two_way_protocol(RelationInstance::make(9, 1, {2, 3, 4})),
                 std::invalid_argument);
}

TEST(TwoWayProtocol, ExhaustiveSizesEightAndSixteen) {
    const TwoWaySweepSummary s8 = two_way_exhaustive_sweep(8);
    EXPECT_EQ(s8.instances, 56L * 8);
    EXPECT_EQ(s8.errors, 0);
    EXPECT_EQ(s8.total_bits, 3);

    const TwoWaySweepSummary s16 = two_way_exhaustive_sweep(16);
    EXPECT_EQ(s16.instances, 560L * 16);
    EXPECT_EQ(s16.errors, 0);
    EXPECT_EQ(s16.total_bits, 3);
}

// Each conversation (r, p) carves out a combinatorial rectangle of inputs; no
// Bob input compatible with r may have its whole triple inside Alice's side.
TEST(TwoWayProtocol, ConversationRectanglesNeverTrapATriple) {
    const int size = 8;
    for (int r = 0; r <= 2; ++r) {
        for (int p = 0; p <= 1; ++p) {
            for (const auto& t : all_triples(size)) {
                if (two_way_round1(t, size) != r) continue;  // not in Y_r
                bool escapes = false;
                for (int z : t) escapes = escapes || (two_way_round2(z, r) != p);
                EXPECT_TRUE(escapes) << "r=" << r << " p=" << p;
            }
        }
    }
}

// Pigeonhole falsifier: with fewer than ceil(|S|/2) messages some message
// class contains three indices, and that triple defeats every output rule.
TEST(OneWayLowerBound, FewMessagesAlwaysFailSomewhere) {
    for (int size : {4, 5, 6}) {
        const int alphabet = (size + 1) / 2 - 1;
        ASSERT_GE(alphabet, 1);
        long functions = 1;
        for (int i = 0; i < size; ++i) functions *= alphabet;
        for (long code = 0; code < functions; ++code) {
            // decode message function [size] -> [alphabet]
            std::vector<int> msg(static_cast<std::size_t>(size));
            long rem = code;
            for (int i = 0; i < size; ++i) {
                msg[static_cast<std::size_t>(i)] = static_cast<int>(rem % alphabet);
                rem /= alphabet;
            }
            // find a class with three members
            std::array<int, 3> triple{0, 0, 0};
            bool found = false;
            for (int lambda = 0; lambda < alphabet && !found; ++lambda) {
                std::vector<int> members;
                for (int i = 1; i <= size; ++i) {
                    if (msg[static_cast<std::size_t>(i - 1)] == lambda) members.push_back(i);
                }
                if (members.size() >= 3) {
                    triple = {members[0], members[1], members[2]};
                    found = true;
                }
            }
            ASSERT_TRUE(found);  // pigeonhole: 2 * alphabet < size
            // every candidate output z collides with the consistent input i = z
            for (int z : triple) {
                const RelationInstance inst = RelationInstance::make(size, z, triple);
                EXPECT_FALSE(relation_holds(inst, z));
            }
        }
    }
}

TEST(BoundedError, SingletonBlocksNeverErr) {
    RngStream rng(5, 0);
    const RelationInstance inst = RelationInstance::make(12, 3, {3, 5, 7});
    for (int trial = 0; trial < 200; ++trial) {
        const Transcript t = bounded_error_one_way(inst, 12, rng);
        EXPECT_TRUE(t.relation_satisfied);
    }
}

TEST(BoundedError, AliceOutsideTripleAlwaysSatisfied) {
    RngStream rng(6, 0);
    const RelationInstance inst = RelationInstance::make(16, 9, {1, 2, 3});
    for (int trial = 0; trial < 200; ++trial) {
        EXPECT_TRUE(bounded_error_one_way(inst, 4, rng).relation_satisfied);
    }
}

TEST(BoundedError, MessageCostIsLogOfBlockCount) {
    RngStream rng(7, 0);
    const RelationInstance inst = RelationInstance::make(64, 1, {1, 2, 3});
    EXPECT_EQ(bounded_error_one_way(inst, 4, rng).total_bits, 2);
    EXPECT_EQ(bounded_error_one_way(inst, 5, rng).total_bits, 3);
}

TEST(BoundedError, BalancedPartitionShape) {
    RngStream rng(8, 0);
    const Partition part = random_balanced_partition(10, 4, rng);
    std::map<int, int> sizes;
    for (int label : part.block_of) {
        EXPECT_GE(label, 1);
        EXPECT_LE(label, 4);
        ++sizes[label];
    }
    ASSERT_EQ(sizes.size(), 4u);
    for (const auto& [label, count] : sizes) {
        EXPECT_GE(count, 2);
        EXPECT_LE(count, 3);
    }
}

// When some triple element leaves Alice's block, Bob's answer is certain to
// satisfy the relation; an error needs the whole triple inside her block.
TEST(BoundedError, ErrorsOnlyWhenTripleSharesAliceBlock) {
    RngStream rng(9, 0);
    const RelationInstance inst = RelationInstance::make(20, 2, {2, 3, 4});
    for (int trial = 0; trial < 500; ++trial) {
        const Partition part = random_balanced_partition(20, 4, rng);
        const Transcript t = bounded_error_with_partition(inst, part, rng);
        const int alice_block = part.block(2);
        const bool trapped = part.block(2) == alice_block && part.block(3) == alice_block &&
                             part.block(4) == alice_block;
        if (!t.relation_satisfied) {
            EXPECT_TRUE(trapped);
            EXPECT_EQ(t.output, inst.alice_input);
        }
        if (!trapped) {
            EXPECT_TRUE(t.relation_satisfied);
        }
    }
}

TEST(BoundedError, WorstCaseErrorNearInverseBlockCountSquared) {
    RngStream rng(10, 0);
    const RelationInstance inst = RelationInstance::make(64, 1, {1, 2, 3});
    const int trials = 20000;
    int errors = 0;
    for (int t = 0; t < trials; ++t) {
        if (!bounded_error_one_way(inst, 4, rng).relation_satisfied) ++errors;
    }
    const double rate = static_cast<double>(errors) / trials;
    const double sigma = std::sqrt((1.0 / 16) * (15.0 / 16) / trials);
    EXPECT_LE(rate, 1.0 / 16 + 3 * sigma);
    EXPECT_GT(errors, 0);  // the cluster input really is error-prone
}

TEST(BoundedError, ValidatesBlockCount) {
    RngStream rng(11, 0);
    const RelationInstance inst = RelationInstance::make(8, 1, {1, 2, 3});
    EXPECT_THROW(bounded_error_one_way(inst, 1, rng), std::invalid_argument);
    EXPECT_THROW(bounded_error_one_way(inst, 9, rng), std::invalid_argument);
}

TEST(LowerBounds, OneWayBitValues) {
    EXPECT_EQ(one_way_lower_bound_bits(9), 3);   // at least a 5-valued message
    EXPECT_EQ(one_way_lower_bound_bits(20), 4);  // at least a 10-valued message
    EXPECT_EQ(one_way_lower_bound_bits(2), 0);
    EXPECT_THROW(one_way_lower_bound_bits(1), std::invalid_argument);
}

TEST(LowerBounds, OneWayMonotone) {
    int prev = 0;
    for (long n = 2; n <= 300; ++n) {
        const int b = one_way_lower_bound_bits(n);
        EXPECT_GE(b, prev);
        prev = b;
    }
}

TEST(LowerBounds, CapBitValues) {
    EXPECT_EQ(cap_lower_bound_bits(1), 0);
    EXPECT_EQ(cap_lower_bound_bits(100), 41);
}

TEST(LowerBounds, CapAndSizeBoundsInterlock) {
    for (int d = 2; d <= 64; ++d) {
        const auto size = cap_bound_size(d);
        if (size < 2) continue;
        EXPECT_GE(one_way_lower_bound_bits(static_cast<long>(size)),
                  cap_lower_bound_bits(d) - 1)
            << "d=" << d;
    }
}

TEST(MultiplicativeSupportCheck, ExactMatchAlwaysPasses) {
    const std::vector<double> p{0.25, 0.75};
    EXPECT_TRUE(multiplicative_support_check(p, p, 0.0));
    EXPECT_TRUE(multiplicative_support_check(p, p, 1e6));
}

TEST(MultiplicativeSupportCheck, SupportViolationFailsForAnyEps) {
    const std::vector<double> exact{0.0, 1.0};
    const std::vector<double> simulated{0.01, 0.99};
    EXPECT_FALSE(multiplicative_support_check(exact, simulated, 1e6));
}

TEST(MultiplicativeSupportCheck, WithinBandPasses) {
    const std::vector<double> exact{0.5, 0.5};
    const std::vector<double> simulated{0.55, 0.45};
    EXPECT_TRUE(multiplicative_support_check(exact, simulated, 0.1));
    EXPECT_FALSE(multiplicative_support_check(exact, simulated, 0.05));
}

TEST(MultiplicativeSupportCheck, RejectsMalformedDistributions) {
    const std::vector<double> p{0.5, 0.5};
    const std::vector<double> short_p{1.0};
    const std::vector<double> unnormalized{0.5, 0.6};
    const std::vector<double> negative{-0.1, 1.1};
    EXPECT_THROW(multiplicative_support_check(p, short_p, 0.1), std::invalid_argument);
    EXPECT_THROW(multiplicative_support_check(p, unnormalized, 0.1), std::invalid_argument);
    EXPECT_THROW(multiplicative_support_check(negative, p, 0.1), std::invalid_argument);
    EXPECT_THROW(multiplicative_support_check(p, p, -1.0), std::invalid_argument);
}

TEST(QuantumOneWay, SicSelfOutcomeIsSuppressed) {
    const SphericalCode code = sic3();
    const RelationInstance inst = RelationInstance::make(9, 2, {2, 5, 7});
    const std::map<int, double> dist = quantum_one_way_exact(code, inst);
    EXPECT_LE(dist.at(2), 1e-6);
    double total = 0.0;
    for (const auto& [z, p] : dist) {
        EXPECT_GE(p, -1e-9);
        total += p;
    }
    EXPECT_NEAR(total, 1.0, 1e-8);
}

TEST(QuantumOneWay, OutsideTripleStillNormalized) {
    const SphericalCode code = sic3();
    const RelationInstance inst = RelationInstance::make(9, 1, {2, 5, 7});
    const std::map<int, double> dist = quantum_one_way_exact(code, inst);
    double total = 0.0;
    for (const auto& [z, p] : dist) total += p;
    EXPECT_NEAR(total, 1.0, 1e-8);
    // any output satisfies the relation when Alice is outside the triple
    for (const auto& [z, p] : dist) EXPECT_TRUE(relation_holds(inst, z));
}

// A triple drawn from the d=4 missing-basis family has pairwise overlaps 2/3,
// and is provably not antidistinguishable even though the full 4-state family
// is: the dual certificate below is a machine-checkable witness. The
// basis-projector measurement restricted to labels {1,2,3} leaks probability
// 1/3 onto outcome 1, and the protocol refuses the instance outright.
TEST(QuantumOneWay, MissingBasisTripleIsRefused) {
    const SphericalCode code = missing_basis_family(4);
    const std::array<Vector, 3> states{code.state(1), code.state(2), code.state(3)};

    Povm restricted;
    restricted.dim = 4;
    restricted.elements = {Matrix::identity(4) -
                               Matrix::outer(test_support::basis_vector(4, 1)) -
                               Matrix::outer(test_support::basis_vector(4, 2)),
                           Matrix::outer(test_support::basis_vector(4, 1)),
                           Matrix::outer(test_support::basis_vector(4, 2))};
    EXPECT_NEAR(expectation(restricted.elements[0], states[0]), 1.0 / 3.0, 1e-12);

    const ExclusionResult res = exclusion_sdp(states);
    EXPECT_EQ(res.status, ExclusionStatus::not_antidistinguishable);
    ASSERT_TRUE(res.dual_certificate.has_value());
    const DualCheck dual = check_dual_certificate(states, *res.dual_certificate);
    EXPECT_GE(dual.trace, 1e-6);
    EXPECT_LE(dual.max_violation, 1e-8);

    const RelationInstance inst = RelationInstance::make(4, 1, {1, 2, 3});
    EXPECT_THROW(quantum_one_way_exact(code, inst), std::invalid_argument);
}

TEST(QuantumOneWay, SampleCostsMatchDimension) {
    RngStream rng(12, 0);
    const SphericalCode sic = sic3();
    const Transcript t3 =
        quantum_one_way_sample(sic, RelationInstance::make(9, 1, {2, 5, 7}), rng);
    EXPECT_EQ(t3.total_bits, 2);  // 2 qubits for d=3

    const SphericalCode mub = mub_union(5);
    const Transcript t5 =
        quantum_one_way_sample(mub, RelationInstance::make(30, 1, {2, 8, 14}), rng);
    EXPECT_EQ(t5.total_bits, 3);  // 3 qubits for d=5
}

// Zero-error on the MUB-union code too: sampled triples, all three choices of
// Alice inside the triple.
TEST(QuantumOneWay, MubUnionSelfOutcomesSuppressed) {
    const SphericalCode code = mub_union(5);
    RngStream rng(77, 0);
    for (int trial = 0; trial < 30; ++trial) {
        int j = 1 + static_cast<int>(rng.next_below(30));
        int k, m;
        do { k = 1 + static_cast<int>(rng.next_below(30)); } while (k == j);
        do { m = 1 + static_cast<int>(rng.next_below(30)); } while (m == j || m == k);
        const std::array<int, 3> triple{j, k, m};
        const RelationInstance base = RelationInstance::make(30, 1, triple);
        const std::array<Vector, 3> povm_states{code.state(base.bob_triple[0]),
                                                code.state(base.bob_triple[1]),
                                                code.state(base.bob_triple[2])};
        const Povm povm = antidistinguishing_povm(povm_states);
        for (int i : base.bob_triple) {
            const RelationInstance inst = RelationInstance::make(30, i, triple);
            const std::map<int, double> dist = quantum_one_way_exact(code, inst, povm);
            EXPECT_LE(dist.at(i), 1e-6) << "triple (" << j << "," << k << "," << m << ") i=" << i;
        }
    }
}

TEST(QuantumOneWay, SampledRunsNeverViolateRelation) {
    RngStream rng(13, 0);
    const SphericalCode code = sic3();
    int runs = 0;
    for (int trial = 0; trial < 40; ++trial) {
        int i = 1 + static_cast<int>(rng.next_below(9));
        int j, k;
        do { j = 1 + static_cast<int>(rng.next_below(9)); } while (j == i);
        do { k = 1 + static_cast<int>(rng.next_below(9)); } while (k == i || k == j);
        const RelationInstance inst = RelationInstance::make(9, i, {i, j, k});
        const std::array<Vector, 3> states{code.state(inst.bob_triple[0]),
                                           code.state(inst.bob_triple[1]),
                                           code.state(inst.bob_triple[2])};
        const Povm povm = antidistinguishing_povm(states);
        for (int rep = 0; rep < 250; ++rep) {
            EXPECT_TRUE(quantum_one_way_sample(code, inst, rng, povm).relation_satisfied);
            ++runs;
        }
    }
    EXPECT_EQ(runs, 10000);
}

TEST(QuantumOneWay, RequiresAntidistinguishableTriple) {
    SphericalCode code;
    code.dimension = 2;
    code.vectors = {Vector{1.0, 0.0}, Vector{1.0, 0.0}, Vector{0.0, 1.0},
                    normalized(Vector{1.0, 1.0})};
    // triple (1, 2, 4): two identical states plus a diagonal one; overlaps are
    // too large for exclusion
    const RelationInstance inst = RelationInstance::make(4, 1, {1, 2, 4});
    EXPECT_THROW(quantum_one_way_exact(code, inst), std::invalid_argument);
}

TEST(CeilLog2, SmallTable) {
    EXPECT_EQ(ceil_log2(1), 0);
    EXPECT_EQ(ceil_log2(2), 1);
    EXPECT_EQ(ceil_log2(3), 2);
    EXPECT_EQ(ceil_log2(4), 2);
    EXPECT_EQ(ceil_log2(5), 3);
    EXPECT_THROW(ceil_log2(0), std::invalid_argument);
}
