#include <gtest/gtest.h>

#include <random>

#include "gammaops/invariant_spaces.hpp"
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

std::vector<oracle::Coords> coords_of(const std::vector<GroupElement>& xs) {
    std::vector<oracle::Coords> out;
    for (const auto& x : xs) out.push_back(x.coords);
    return out;
}

struct Case {
    std::vector<std::int64_t> moduli;
    std::vector<std::vector<std::int64_t>> lattice;
    std::vector<IntMatrix> G;
};

const std::vector<Case> kCases = {
    {{8}, {{2}}, {{{3}}, {{5}}}},
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

// Brute-force shift invariance over every k in the lattice.
bool oracle_shift_invariant(const Subspace& V, const Case& c) {
    oracle::Group O(c.moduli);
    const auto shifts = oracle::all_shifts(O, oracle::subgroup(O, c.lattice));
    return oracle::invariance_defect(V.basis(), shifts) <= 1e-8;
}

// Brute-force Gamma invariance: every shift and every dilation in the generated group.
bool oracle_gamma_invariant(const Subspace& V, const Case& c) {
    oracle::Group O(c.moduli);
    std::vector<cmat> maps = oracle::all_shifts(O, oracle::subgroup(O, c.lattice));
    FiniteAbelianGroup G(c.moduli);
    for (const auto& g : generated_group(G, autos(G, c.G))) maps.push_back(oracle::dilation_matrix(O, g.matrix()));
    return oracle::invariance_defect(V.basis(), maps) <= 1e-8;
}

std::vector<Signal> random_signals(const FiniteAbelianGroup& G, std::size_t count, std::mt19937_64& rng) {
    std::vector<Signal> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(random_signal(G, rng));
    return out;
}

}  // namespace

TEST(Subspace, BasicsAndEquality) {
    FiniteAbelianGroup Z8({8});
    EXPECT_EQ(Subspace::whole(Z8).dim(), 8u);
    EXPECT_EQ(Subspace::zero(Z8).dim(), 0u);
    std::mt19937_64 rng(1);
    const cmat A = random_matrix(8, 3, rng);
    const cmat M = A * random_matrix(3, 3, rng);
    const Subspace S = Subspace::spanned_by(Z8, A);
    EXPECT_EQ(S.dim(), 3u);
    EXPECT_TRUE(S == Subspace::spanned_by(Z8, M));
    EXPECT_FALSE(S == Subspace::spanned_by(Z8, random_matrix(8, 3, rng)));
    cmat dependent(8, 4);
    dependent << A, A.col(0) + A.col(1);
    EXPECT_EQ(Subspace::spanned_by(Z8, dependent).dim(), 3u);
    EXPECT_THROW(Subspace::from_orthonormal(Z8, A), std::invalid_argument);
}

TEST(RangeFunction, FixedExamples) {
    const Lattice lat = make({8}, {{2}});
    const FiniteAbelianGroup& G = lat.parent();
    const RangeFunction J = range_function_from_generators({Signal::delta(G, G.zero())}, lat);
    for (const auto& [omega, d] : dimension_function(J)) EXPECT_EQ(d, 1u);
    const Subspace V = space_from_range_function(J);
    EXPECT_EQ(V.dim(), 4u);

    const RangeFunction Z = range_function_from_generators({Signal::zeros(G), Signal::zeros(G)}, lat);
    for (const auto& [omega, d] : dimension_function(Z)) EXPECT_EQ(d, 0u);
    EXPECT_EQ(space_from_range_function(Z).dim(), 0u);

    const RangeFunction F = range_function_from_generators({Signal::delta(G, G.zero()), Signal::delta(G, G.element({1}))}, lat);
    for (const auto& [omega, d] : dimension_function(F)) EXPECT_EQ(d, 2u);
    EXPECT_EQ(space_from_range_function(RangeFunction::full(lat)).dim(), 8u);
    EXPECT_EQ(space_from_range_function(RangeFunction::zero(lat)).dim(), 0u);
    for (const auto& [omega, d] : dimension_function(RangeFunction::full(lat))) EXPECT_EQ(d, 2u);
}

TEST(RangeFunction, DimensionAdditivityAndRoundTrip) {
    for (const auto& c : kCases) {
        const Lattice lat = make(c.moduli, c.lattice);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const RangeFunction J = random_range_function(lat, seed);
            const Subspace V = space_from_range_function(J);
            std::size_t total = 0;
            for (const auto& [omega, d] : dimension_function(J)) total += d;
            EXPECT_EQ(V.dim(), total);
            EXPECT_TRUE(same_range_function(range_function_of(V, lat), J));
            std::vector<Signal> basis;
            for (std::size_t i = 0; i < V.dim(); ++i) basis.push_back(V.basis_signal(i));
            if (!basis.empty()) { EXPECT_TRUE(same_range_function(range_function_from_generators(basis, lat), J)); }
        }
    }
}

TEST(ShiftInvariance, FixedExamples) {
    const Lattice lat = make({8}, {{2}});
    const FiniteAbelianGroup& G = lat.parent();
    EXPECT_TRUE(is_shift_invariant(Subspace::zero(G), lat));
    EXPECT_TRUE(is_shift_invariant(Subspace::whole(G), lat));
    EXPECT_FALSE(is_shift_invariant(Subspace::spanned_by({Signal::delta(G, G.element({1}))}), lat));
}

TEST(ShiftInvariance, AgreesWithOracle) {
    std::mt19937_64 rng(41);
    for (const auto& c : kCases) {
        const Lattice lat = make(c.moduli, c.lattice);
        const FiniteAbelianGroup& G = lat.parent();
        for (int t = 0; t < 10; ++t) {
            const auto gens = random_signals(G, 1 + t % 3, rng);
            const Subspace V = space_from_range_function(range_function_from_generators(gens, lat));
            EXPECT_TRUE(oracle_shift_invariant(V, c));
            EXPECT_TRUE(is_shift_invariant(V, lat));
            EXPECT_TRUE(is_shift_invariant(V, lat, Coverage::all_elements));

            const Subspace W = Subspace::spanned_by(gens);
            const bool oracle_says = oracle_shift_invariant(W, c);
            EXPECT_EQ(is_shift_invariant(W, lat), oracle_says);
            // A space equals its rebuilt version exactly when it is shift invariant.
            const Subspace rebuilt = space_from_range_function(range_function_from_generators(gens, lat));
            EXPECT_EQ(rebuilt == W, oracle_says);
        }
    }
}

TEST(GammaInvariance, FixedExamples) {
    const Lattice lat = make({8}, {{2}});
    const FiniteAbelianGroup& G = lat.parent();
    const std::vector<Automorphism> id{Automorphism::identity(G)};
    std::mt19937_64 rng(43);
    const Subspace V = space_from_range_function(range_function_from_generators({random_signal(G, rng)}, lat));
    EXPECT_EQ(is_gamma_invariant(V, lat, id), is_shift_invariant(V, lat));
    EXPECT_TRUE(is_gamma_invariant(Subspace::whole(G), lat, autos(G, {{{3}}, {{5}}})));
    EXPECT_TRUE(range_condition_gamma(RangeFunction::full(lat), autos(G, {{{3}}, {{5}}})));
    EXPECT_TRUE(range_condition_gamma(random_range_function(lat, 9), id));

    const Lattice bad = make({2, 4}, {{1, 0}});
    EXPECT_THROW(is_gamma_invariant(Subspace::whole(bad.parent()), bad, autos(bad.parent(), {{{1, 0}, {2, 1}}})),
                 GroupError);
    EXPECT_THROW(range_condition_gamma(RangeFunction::full(bad), autos(bad.parent(), {{{1, 0}, {2, 1}}})), GroupError);
}

TEST(GammaInvariance, CharacterizationAgreesWithOracle) {
    for (const auto& c : kCases) {
        const Lattice lat = make(c.moduli, c.lattice);
        const auto G = autos(lat.parent(), c.G);
        for (std::uint64_t seed = 0; seed < 8; ++seed) {
            for (const RangeFunction& J : {gamma_range_function_generator(lat, G, seed), random_range_function(lat, seed)}) {
                const Subspace V = space_from_range_function(J);
                const bool truth = oracle_gamma_invariant(V, c);
                EXPECT_EQ(is_gamma_invariant(V, lat, G), truth);
                EXPECT_EQ(is_gamma_invariant(V, lat, G, Coverage::all_elements), truth);
                EXPECT_EQ(is_shift_invariant(V, lat) && range_condition_gamma(J, G), truth);
            }
            EXPECT_TRUE(range_condition_gamma(gamma_range_function_generator(lat, G, seed), G, Coverage::all_elements));
        }
    }
}

TEST(GammaInvariance, GeneratorIsDeterministic) {
    const Lattice lat = make({9}, {{3}});
    const auto G = autos(lat.parent(), {{{2}}});
    const RangeFunction a = gamma_range_function_generator(lat, G, 5);
    const RangeFunction b = gamma_range_function_generator(lat, G, 5);
    ASSERT_EQ(a.spaces.size(), b.spaces.size());
    for (std::size_t w = 0; w < a.spaces.size(); ++w) EXPECT_EQ(a.spaces[w], b.spaces[w]);
}

TEST(RangeFunction, EvaluationOffTransversal) {
    const Lattice lat = make({8}, {{2}});
    oracle::Group O({8});
    const auto perp = coords_of(lat.annihilator());
    const RangeFunction J = random_range_function(lat, 3);
    // basis_at(omega + kappa) spans the fibers of V at omega + kappa, computed directly from the DFT.
    const Subspace V = space_from_range_function(J);
    for (const auto& xi : lat.parent().elements(Side::dual)) {
        cmat direct(static_cast<Eigen::Index>(perp.size()), static_cast<Eigen::Index>(V.dim()));
        for (std::size_t i = 0; i < V.dim(); ++i) {
            const cvec hat = oracle::dft(O, V.basis().col(static_cast<Eigen::Index>(i)));
            for (std::size_t s = 0; s < perp.size(); ++s) {
                direct(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(i)) = hat[O.index(O.add(xi.coords, perp[s]))];
            }
        }
        const cmat Q = J.basis_at(xi);
        EXPECT_LE(projection_residual(Q, direct), 1e-8);
        EXPECT_EQ(Q.cols(), orthonormal_basis(direct, 1e-8).cols());
    }
}
