#include <gtest/gtest.h>

#include <random>

#include "gammaops/operators.hpp"
#include "gammaops/orbits.hpp"
#include "oracles.hpp"

using namespace gammaops;

namespace {

Lattice make(const std::vector<std::int64_t>& moduli, const std::vector<std::vector<std::int64_t>>& gens) {
    FiniteAbelianGroup G(moduli);
    std::vector<GroupElement> g;
    for (const auto& c : gens) g.push_back(G.element(c));
    return subgroup_from_generators(G, g);
}

struct Case {
    std::vector<std::int64_t> moduli;
    std::vector<std::vector<std::int64_t>> lattice;
    std::vector<IntMatrix> G;
};

const std::vector<Case> kCases = {
    {{8}, {{2}}, {{{3}}}},
    {{12}, {{3}}, {{{5}}, {{7}}}},
    {{2, 4}, {{0, 2}}, {{{1, 0}, {0, 3}}, {{1, 1}, {0, 1}}}},
    {{4, 4}, {{2, 0}, {0, 2}}, {{{0, 1}, {1, 0}}, {{1, 1}, {0, 1}}}},
    {{5}, {}, {{{2}}}},
    {{9}, {{3}}, {{{2}}}},
};

std::vector<Automorphism> autos(const FiniteAbelianGroup& G, const std::vector<IntMatrix>& ms) {
    std::vector<Automorphism> out;
    for (const auto& m : ms) out.emplace_back(G, m);
    return out;
}

// Commutation with every T_k (k in Lambda) and, optionally, every R_g (g in <G>) on the domain.
double oracle_defect(const OperatorMatrix& U, const Case& c, bool with_dilations) {
    oracle::Group O(c.moduli);
    std::vector<cmat> maps = oracle::all_shifts(O, oracle::subgroup(O, c.lattice));
    if (with_dilations) {
        FiniteAbelianGroup G(c.moduli);
        for (const auto& g : generated_group(G, autos(G, c.G))) maps.push_back(oracle::dilation_matrix(O, g.matrix()));
    }
    const cmat Q = U.domain_basis();
    return oracle::commutator_defect(U.entries, Q, maps) / std::max(1.0, (U.entries * Q).norm());
}

}  // namespace

TEST(ShiftPreserving, FixedExamples) {
    const Lattice lat = make({8}, {{2}});
    const FiniteAbelianGroup& G = lat.parent();
    EXPECT_TRUE(is_shift_preserving(OperatorMatrix::identity(G), lat));
    for (const auto& k : lat.elements()) {
        EXPECT_TRUE(is_shift_preserving(OperatorMatrix{G, shift_matrix(G, k), std::nullopt}, lat));
    }
    cmat mult = cmat::Zero(8, 8);
    for (int i = 0; i < 8; ++i) mult(i, i) = static_cast<double>(i);
    EXPECT_FALSE(is_shift_preserving(OperatorMatrix{G, mult, std::nullopt}, lat));
    // 2-periodic multiplier commutes with shifts by even k
    for (int i = 0; i < 8; ++i) mult(i, i) = static_cast<double>(i % 2) + 1.0;
    EXPECT_TRUE(is_shift_preserving(OperatorMatrix{G, mult, std::nullopt}, lat));

    const Subspace line = Subspace::spanned_by({Signal::delta(G, G.element({1}))});
    EXPECT_THROW(is_shift_preserving(OperatorMatrix{G, cmat::Identity(8, 8), line}, lat), PreconditionError);
}

TEST(Extraction, IdentityAndShift) {
    const Lattice lat = make({8}, {{2}});
    const FiniteAbelianGroup& G = lat.parent();
    const RangeFunction J = random_range_function(lat, 2);
    const Subspace V = space_from_range_function(J);

    const RangeOperator Rid = extract_range_operator(OperatorMatrix{G, cmat::Identity(8, 8), V}, V, lat);
    for (std::size_t w = 0; w < lat.fiber_count(); ++w) EXPECT_LE((Rid.mats[w] - J.projection(w)).norm(), 1e-9);

    const GroupElement k0 = G.element({2});
    const RangeOperator Rk = extract_range_operator(OperatorMatrix{G, shift_matrix(G, k0), V}, V, lat);
    for (std::size_t w = 0; w < lat.fiber_count(); ++w) {
        const cplx phase = std::conj(pairing(G, lat.transversal()[w], k0));
        EXPECT_LE((Rk.mats[w] - phase * J.projection(w)).norm(), 1e-9);
    }
}

TEST(Extraction, FiberwiseIdentityAndRoundTrip) {
    std::mt19937_64 rng(51);
    for (const auto& c : kCases) {
        const Lattice lat = make(c.moduli, c.lattice);
        oracle::Group O(c.moduli);
        const auto perp = oracle::annihilator(O, oracle::subgroup(O, c.lattice));
        const auto m = static_cast<Eigen::Index>(lat.fiber_length());
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const RangeFunction J = random_range_function(lat, seed);
            const RangeOperator R = random_range_operator(J, seed + 100);
            const OperatorMatrix U = synthesize_operator(R);
            EXPECT_LE(oracle_defect(U, c, false), 1e-8);

            const Subspace V = space_from_range_function(J);
            const RangeOperator back = extract_range_operator(U, V, lat);
            for (std::size_t w = 0; w < lat.fiber_count(); ++w) {
                EXPECT_LE(((back.mats[w] - R.mats[w]) * J.spaces[w]).norm(), 1e-9);
            }
            // T(U phi)(omega) = R(omega) T phi(omega) on random phi in V
            const cvec phi = V.basis() * random_vector(V.dim(), rng);
            const cvec lhs = oracle::fiberize(O, perp, U.entries * phi);
            const cvec rhs = oracle::fiberize(O, perp, phi);
            for (std::size_t w = 0; w < lat.fiber_count(); ++w) {
                const auto at = static_cast<Eigen::Index>(w) * m;
                EXPECT_LE((lhs.segment(at, m) - back.mats[w] * rhs.segment(at, m)).norm(), 1e-9);
            }
            // synthesize(extract(U)) = U on V
            const OperatorMatrix again = synthesize_operator(back);
            EXPECT_LE(((again.entries - U.entries) * V.basis()).norm(), 1e-8 * std::max(1.0, U.entries.norm()));
        }
    }
}

TEST(Extraction, Uniqueness) {
    const Lattice lat = make({12}, {{3}});
    const RangeFunction J = random_range_function(lat, 4);
    const Subspace V = space_from_range_function(J);
    const OperatorMatrix U = synthesize_operator(random_range_operator(J, 8));
    // Same operator on V, different outside V.
    std::mt19937_64 rng(9);
    const cmat P = V.basis() * V.basis().adjoint();
    const cmat noise = random_matrix(12, 12, rng) * (cmat::Identity(12, 12) - P);
    const RangeOperator a = extract_range_operator(U, V, lat);
    const RangeOperator b = extract_range_operator(OperatorMatrix{U.group, U.entries + noise, V}, V, lat);
    for (std::size_t w = 0; w < lat.fiber_count(); ++w) EXPECT_LE((a.mats[w] - b.mats[w]).norm(), 1e-9);
}

TEST(Extraction, RejectsNonShiftPreserving) {
    std::mt19937_64 rng(53);
    for (const auto& c : kCases) {
        const Lattice lat = make(c.moduli, c.lattice);
        const FiniteAbelianGroup& G = lat.parent();
        const auto n = G.order();
        for (int t = 0; t < 5; ++t) {
            const OperatorMatrix U{G, random_matrix(n, n, rng), std::nullopt};
            const bool commutes = oracle_defect(U, c, false) <= 1e-9;
            bool threw = false;
            try {
                extract_range_operator(U, Subspace::whole(G), lat);
            } catch (const NotShiftPreservingError&) {
                threw = true;
            }
            EXPECT_EQ(threw, !commutes);
        }
    }
    const Lattice lat = make({8}, {{2}});
    const Subspace line = Subspace::spanned_by({Signal::delta(lat.parent(), lat.parent().element({1}))});
    EXPECT_THROW(extract_range_operator(OperatorMatrix::identity(lat.parent()), line, lat), PreconditionError);
}

TEST(Synthesis, FixedExamples) {
    const Lattice lat = make({8}, {{2}});
    const RangeFunction full = RangeFunction::full(lat);
    RangeOperator ident{lat, full, std::vector<cmat>(4, cmat::Identity(2, 2))};
    EXPECT_LE((synthesize_operator(ident).entries - cmat::Identity(8, 8)).norm(), 1e-12);
    RangeOperator zero{lat, full, std::vector<cmat>(4, cmat::Zero(2, 2))};
    EXPECT_LE(synthesize_operator(zero).entries.norm(), 1e-12);
}

TEST(InducedOperator, FixedExamples) {
    const Lattice lat = make({8}, {{2}});
    const FiniteAbelianGroup& G = lat.parent();
    const Automorphism g(G, {{3}});
    EXPECT_TRUE(induced_operator_check(OperatorMatrix::identity(G), lat, g));
    EXPECT_TRUE(induced_operator_check(OperatorMatrix{G, dilation_matrix(g), std::nullopt}, lat, g));
    const Lattice bad = make({2, 4}, {{1, 0}});
    EXPECT_THROW(induced_operator_check(OperatorMatrix::identity(bad.parent()), bad,
                                        Automorphism(bad.parent(), {{1, 0}, {2, 1}})),
                 GroupError);
}

TEST(InducedOperator, AgreesWithDirectCommutator) {
    std::mt19937_64 rng(57);
    for (const auto& c : kCases) {
        const Lattice lat = make(c.moduli, c.lattice);
        const FiniteAbelianGroup& G = lat.parent();
        oracle::Group O(c.moduli);
        const auto gs = autos(G, c.G);
        const auto n = G.order();
        std::vector<OperatorMatrix> ops;
        for (std::uint64_t s = 0; s < 4; ++s) ops.push_back(gamma_operator_generator(lat, gs, s));
        ops.push_back(OperatorMatrix{G, random_matrix(n, n, rng), std::nullopt});
        ops.push_back(synthesize_operator(random_range_operator(RangeFunction::full(lat), 3)));
        ops.push_back(OperatorMatrix{G, dilation_matrix(gs[0]), std::nullopt});
        for (const auto& U : ops) {
            for (const auto& g : gs) {
                const cmat D = oracle::dilation_matrix(O, g.matrix());
                const cmat Q = U.domain_basis();
                const double direct = ((U.entries * D - D * U.entries) * Q).norm() / std::max(1.0, (U.entries * Q).norm());
                const double induced = induced_commutator_residual(U, lat, g);
                EXPECT_EQ(direct < 1e-9, induced < 1e-9);
                EXPECT_EQ(induced_operator_check(U, lat, g), direct < 1e-9);
                EXPECT_FALSE(direct >= 1e-9 && direct < 1e-6);
            }
        }
    }
}

TEST(RangeConditionMain, FixedExamples) {
    const Lattice lat = make({8}, {{2}});
    const FiniteAbelianGroup& G = lat.parent();
    const RangeFunction full = RangeFunction::full(lat);
    const RangeOperator scalar{lat, full, std::vector<cmat>(4, cplx(2.5, -1.0) * cmat::Identity(2, 2))};
    for (const auto& g : automorphism_group_units(G, lat)) EXPECT_TRUE(range_condition_main(scalar, g));
    const RangeOperator generic = random_range_operator(full, 7);
    EXPECT_TRUE(range_condition_main(generic, Automorphism::identity(G)));
}

TEST(GammaPreservingEquivalence, PositivesNegativesAndOracle) {
    for (const auto& c : kCases) {
        const Lattice lat = make(c.moduli, c.lattice);
        const FiniteAbelianGroup& G = lat.parent();
        const auto gs = autos(G, c.G);
        for (std::uint64_t seed = 0; seed < 6; ++seed) {
            const RangeFunction J = gamma_range_function_generator(lat, gs, seed);
            const Subspace V = space_from_range_function(J);
            const RangeOperator R = gamma_range_operator(lat, gs, J, seed);
            const OperatorMatrix U = synthesize_operator(R);
            EXPECT_LE(oracle_defect(U, c, true), 1e-9);
            const EquivalenceReport pos = theorem_main_equivalence(U, V, lat, gs);
            EXPECT_TRUE(pos.gamma_preserving);
            EXPECT_TRUE(pos.characterization);
            EXPECT_TRUE(pos.equivalent);
            for (const auto& g : gs) EXPECT_TRUE(range_condition_main(R, g));

            std::vector<OperatorMatrix> others = {synthesize_operator(random_range_operator(J, seed + 50))};
            if (const auto w = sensitive_fiber(R, gs)) others.push_back(synthesize_operator(perturb_range_operator(R, *w, 0, 1e-3)));
            for (const auto& W : others) {
                const bool truth = oracle_defect(OperatorMatrix{G, W.entries, V}, c, true) <= 1e-9;
                const EquivalenceReport rep = theorem_main_equivalence(W, V, lat, gs);
                EXPECT_EQ(rep.gamma_preserving, truth);
                EXPECT_TRUE(rep.equivalent);
                EXPECT_EQ(is_gamma_preserving(OperatorMatrix{G, W.entries, V}, lat, gs), truth);
            }
        }
    }
}

TEST(GammaPreservingEquivalence, IdentityAndPreconditions) {
    const Lattice lat = make({8}, {{2}});
    const FiniteAbelianGroup& G = lat.parent();
    const auto gs = autos(G, {{{3}}});
    const EquivalenceReport rep = theorem_main_equivalence(OperatorMatrix::identity(G), Subspace::whole(G), lat, gs);
    EXPECT_TRUE(rep.shift_preserving && rep.gamma_preserving && rep.characterization && rep.equivalent);

    // A shift-invariant space that is not invariant under x -> 3x.
    const RangeFunction J = random_range_function(lat, 1);
    const Subspace V = space_from_range_function(J);
    if (!range_condition_gamma(J, gs)) {
        EXPECT_THROW(theorem_main_equivalence(OperatorMatrix::identity(G), V, lat, gs), PreconditionError);
        EXPECT_THROW(is_gamma_preserving(OperatorMatrix{G, cmat::Identity(8, 8), V}, lat, gs), PreconditionError);
    }
    const Lattice bad = make({2, 4}, {{1, 0}});
    EXPECT_THROW(is_gamma_preserving(OperatorMatrix::identity(bad.parent()), bad,
                                     autos(bad.parent(), {{{1, 0}, {2, 1}}})),
                 GroupError);
}

TEST(GammaPreservingEquivalence, PerturbationFlipsMainCondition) {
    const Lattice lat = make({8}, {{2}});
    const auto gs = autos(lat.parent(), {{{3}}});
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const RangeOperator R = gamma_range_operator(lat, gs, RangeFunction::full(lat), seed);
        EXPECT_TRUE(range_condition_main(R, gs[0]));
        const auto w = sensitive_fiber(R, gs);
        ASSERT_TRUE(w.has_value());
        EXPECT_FALSE(range_condition_main(perturb_range_operator(R, *w, 0, 1e-3), gs[0]));
    }
}

TEST(Generator, DeterministicAndGammaPreserving) {
    const Lattice lat = make({4, 4}, {{2, 0}, {0, 2}});
    const auto gs = autos(lat.parent(), {{{0, 1}, {1, 0}}, {{1, 1}, {0, 1}}});
    const OperatorMatrix a = gamma_operator_generator(lat, gs, 12);
    const OperatorMatrix b = gamma_operator_generator(lat, gs, 12);
    EXPECT_EQ(a.entries, b.entries);
    EXPECT_TRUE(is_gamma_preserving(a, lat, gs, Coverage::all_elements));
    const auto id = std::vector<Automorphism>{Automorphism::identity(lat.parent())};
    EXPECT_TRUE(is_shift_preserving(gamma_operator_generator(lat, id, 3), lat, Coverage::all_elements));
}

TEST(Norms, OperatorNormMatchesFiberNorms) {
    for (const auto& c : kCases) {
        const Lattice lat = make(c.moduli, c.lattice);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const RangeFunction J = random_range_function(lat, seed);
            const OperatorMatrix U = synthesize_operator(random_range_operator(J, seed));
            const Subspace V = space_from_range_function(J);
            const RangeOperator R = extract_range_operator(U, V, lat);
            const auto norms = R.fiber_norms();
            const double fiber_max = norms.empty() ? 0.0 : *std::max_element(norms.begin(), norms.end());
            // largest singular value of U restricted to V, through the oracle-free Eigen SVD
            const cmat UQ = U.entries * V.basis();
            const double direct = UQ.size() ? Eigen::JacobiSVD<cmat>(UQ).singularValues()[0] : 0.0;
            EXPECT_NEAR(direct, fiber_max, 1e-8);
            EXPECT_NEAR(U.norm_on_domain(), fiber_max, 1e-8);
        }
    }
}

TEST(ShiftDilation, FixedInstances) {
    EXPECT_TRUE(shift_dilation_suite(make({2}, {}), 3, 0).preserving_operators_pass);
    const DilationSuiteReport z8 = shift_dilation_suite(make({8}, {{2}}), 5, 0);
    EXPECT_EQ(z8.automorphisms, 4u);
    EXPECT_TRUE(z8.invariant_spaces_pass && z8.preserving_operators_pass);
    const DilationSuiteReport z5 = shift_dilation_suite(make({5}, {}), 5, 0);
    EXPECT_TRUE(z5.invariant_spaces_pass && z5.preserving_operators_pass);
}
