#include "gammaops/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gammaops/orbits.hpp"

namespace gammaops {

namespace {

double spectral_norm(const cmat& M) {
    if (M.size() == 0) return 0.0;
    Eigen::JacobiSVD<cmat> svd(M);
    return svd.singularValues()[0];
}

// Relative residual of U A - A U on the span of Q, after checking A Q stays in span(Q).
double commutator_on(const cmat& U, const cmat& A, const cmat& Q, const char* what) {
    if (Q.cols() == 0) return 0.0;
    const cmat AQ = A * Q;
    if (projection_residual(Q, AQ) > Tolerances{}.pipeline) {
        throw PreconditionError(std::string("operator domain is not invariant under ") + what);
    }
    const cmat UQ = U * Q;
    return (U * AQ - A * UQ).norm() / std::max(1.0, UQ.norm());
}

std::vector<Automorphism> covered(const FiniteAbelianGroup& group, const std::vector<Automorphism>& G, Coverage c) {
    return c == Coverage::generators ? G : generated_group(group, G);
}

}  // namespace

// ---------------------------------------------------------------------------

OperatorMatrix OperatorMatrix::identity(const FiniteAbelianGroup& group) {
    return OperatorMatrix{group, cmat::Identity(group.order(), group.order()), std::nullopt};
}

cmat OperatorMatrix::domain_basis() const {
    return domain ? domain->basis() : cmat::Identity(group.order(), group.order());
}

double OperatorMatrix::norm_on_domain() const {
    return spectral_norm(entries * domain_basis());
}

cmat RangeOperator::at(const GroupElement& xi) const {
    const auto r = lattice.reduce(xi);
    const cmat tau = translation_matrix(lattice, r.kappa);
    return tau * mats[r.omega_pos] * tau.transpose();
}

std::vector<double> RangeOperator::fiber_norms() const {
    std::vector<double> out;
    for (std::size_t w = 0; w < mats.size(); ++w) out.push_back(spectral_norm(mats[w] * domain.spaces[w]));
    return out;
}

// ---------------------------------------------------------------------------

double shift_commutator_residual(const OperatorMatrix& U, const Lattice& lat, Coverage coverage) {
    if (!(U.group == lat.parent())) throw GroupError("operator and lattice live on different groups");
    const cmat Q = U.domain_basis();
    const auto& ks = coverage == Coverage::generators ? lat.generators() : lat.elements();
    double worst = 0.0;
    for (const auto& k : ks) {
        worst = std::max(worst, commutator_on(U.entries, shift_matrix(U.group, k), Q, "lattice shifts"));
    }
    return worst;
}

double dilation_commutator_residual(const OperatorMatrix& U, const std::vector<Automorphism>& G, Coverage coverage) {
    const cmat Q = U.domain_basis();
    double worst = 0.0;
    for (const auto& g : covered(U.group, G, coverage)) {
        worst = std::max(worst, commutator_on(U.entries, dilation_matrix(g), Q, "dilations"));
    }
    return worst;
}

double induced_commutator_residual(const OperatorMatrix& U, const Lattice& lat, const Automorphism& g) {
    require_preserved(g, lat);
    const cmat T = fiberization_matrix(lat);
    const cmat induced = T * U.entries * T.adjoint();
    return commutator_on(induced, pi_matrix(g, lat), T * U.domain_basis(), "Pi(g)");
}

bool is_shift_preserving(const OperatorMatrix& U, const Lattice& lat, Coverage coverage, const Tolerances& tol) {
    return shift_commutator_residual(U, lat, coverage) <= tol.identity;
}

bool induced_operator_check(const OperatorMatrix& U, const Lattice& lat, const Automorphism& g, const Tolerances& tol) {
    return induced_commutator_residual(U, lat, g) <= tol.identity;
}

bool is_gamma_preserving(const OperatorMatrix& U, const Lattice& lat, const std::vector<Automorphism>& G,
                         Coverage coverage, const Tolerances& tol) {
    require_preserved(G, lat);
    if (U.domain && !is_gamma_invariant(*U.domain, lat, G, coverage, tol)) {
        throw PreconditionError("operator domain is not Gamma-invariant");
    }
    return is_shift_preserving(U, lat, coverage, tol) && dilation_commutator_residual(U, G, coverage) <= tol.identity;
}

// ---------------------------------------------------------------------------

RangeOperator extract_range_operator(const OperatorMatrix& U, const Subspace& V, const Lattice& lat,
                                     const Tolerances& tol) {
    if (!(U.group == lat.parent()) || !(V.group() == lat.parent())) {
        throw GroupError("operator, subspace and lattice must share a group");
    }
    if (!is_shift_invariant(V, lat, Coverage::generators, tol)) {
        throw PreconditionError("range operator extraction needs a shift-invariant domain");
    }
    const cmat T = fiberization_matrix(lat);
    const cmat fibersV = T * V.basis();
    const cmat fibersUV = T * (U.entries * V.basis());
    const auto m = static_cast<Eigen::Index>(lat.fiber_length());
    const Eigen::Index d = V.basis().cols();
    if (d == 0) {
        RangeOperator Rop = {lat, RangeFunction::zero(lat), {}};
        Rop.mats.assign(lat.fiber_count(), cmat::Zero(m, m));
        return Rop;
    }

    std::vector<Eigen::JacobiSVD<cmat>> svds;
    double leading = 0.0;
    for (std::size_t w = 0; w < lat.fiber_count(); ++w) {
        const cmat B = fibersV.middleRows(static_cast<Eigen::Index>(w) * m, m);
        svds.emplace_back(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
        leading = std::max(leading, svds.back().singularValues()[0]);
    }
    const double cutoff = tol.rank * leading;

    RangeOperator Rop{lat, RangeFunction{lat, {}}, {}};
    double residual_sq = 0.0;
    double rhs_sq = 0.0;
    for (std::size_t w = 0; w < lat.fiber_count(); ++w) {
        const auto& svd = svds[w];
        const auto& sv = svd.singularValues();
        Eigen::Index rank = 0;
        while (rank < sv.size() && sv[rank] > cutoff) ++rank;
        const cmat Ur = svd.matrixU().leftCols(rank);
        const cmat Vr = svd.matrixV().leftCols(rank);
        const Eigen::VectorXd inv = sv.head(rank).cwiseInverse();

        const cmat B = fibersV.middleRows(static_cast<Eigen::Index>(w) * m, m);
        const cmat C = fibersUV.middleRows(static_cast<Eigen::Index>(w) * m, m);
        // R = C B^+, which vanishes on the complement of span(B) = J(omega).
        const cmat R = C * Vr * inv.asDiagonal() * Ur.adjoint();
        residual_sq += (R * B - C).squaredNorm();
        rhs_sq += C.squaredNorm();
        Rop.domain.spaces.push_back(Ur);
        Rop.mats.push_back(R);
    }
    const double residual = std::sqrt(residual_sq);
    if (residual > tol.pipeline * std::sqrt(rhs_sq)) {
        throw NotShiftPreservingError(rhs_sq > 0 ? residual / std::sqrt(rhs_sq) : residual);
    }
    return Rop;
}

OperatorMatrix synthesize_operator(const RangeOperator& Rop) {
    const Lattice& lat = Rop.lattice;
    const std::size_t n = lat.parent().order();
    const auto m = static_cast<Eigen::Index>(lat.fiber_length());
    cmat blocks = cmat::Zero(n, n);
    for (std::size_t w = 0; w < lat.fiber_count(); ++w) {
        blocks.block(static_cast<Eigen::Index>(w) * m, static_cast<Eigen::Index>(w) * m, m, m) = Rop.mats[w];
    }
    const cmat T = fiberization_matrix(lat);
    OperatorMatrix U{lat.parent(), T.adjoint() * blocks * T, std::nullopt};
    Subspace V = space_from_range_function(Rop.domain);
    if (V.dim() < n) U.domain = std::move(V);
    return U;
}

std::vector<double> main_condition_residuals(const RangeOperator& Rop, const Automorphism& g, const Tolerances& tol) {
    const Lattice& lat = Rop.lattice;
    require_preserved(g, lat);
    if (!range_condition_gamma(Rop.domain, {g}, Coverage::generators, tol)) {
        throw PreconditionError("domain range function is not invariant under the automorphism");
    }
    double scale = 1.0;
    for (const auto& M : Rop.mats) scale = std::max(scale, M.norm());

    const cmat r = r_matrix(g, lat);
    std::vector<double> out;
    for (std::size_t w = 0; w < lat.fiber_count(); ++w) {
        const GroupElement moved = g.dual_apply(lat.transversal()[w]);
        // r_{g^{-1}} = r_g^{-1} = r_g^T for the permutation r_g.
        const cmat rhs = r.transpose() * Rop.mats[w] * r;
        const cmat Q = Rop.domain.basis_at(moved);
        out.push_back(Q.cols() == 0 ? 0.0 : ((Rop.at(moved) - rhs) * Q).norm() / scale);
    }
    return out;
}

bool range_condition_main(const RangeOperator& Rop, const Automorphism& g, const Tolerances& tol) {
    const auto res = main_condition_residuals(Rop, g, tol);
    return std::all_of(res.begin(), res.end(), [&](double r) { return r <= tol.identity; });
}

EquivalenceReport theorem_main_equivalence(const OperatorMatrix& U, const Subspace& V, const Lattice& lat,
                                       const std::vector<Automorphism>& G, Coverage coverage, const Tolerances& tol) {
    require_preserved(G, lat);
    if (!is_gamma_invariant(V, lat, G, coverage, tol)) {
        throw PreconditionError("operator domain is not Gamma-invariant");
    }
    OperatorMatrix restricted{U.group, U.entries, V};
    EquivalenceReport report;
    report.shift_residual = shift_commutator_residual(restricted, lat, coverage);
    report.dilation_residual = dilation_commutator_residual(restricted, G, coverage);
    report.shift_preserving = report.shift_residual <= tol.identity;
    report.gamma_preserving = report.shift_preserving && report.dilation_residual <= tol.identity;

    {
        try {
            RangeOperator Rop = extract_range_operator(restricted, V, lat, tol);
            for (const auto& g : covered(lat.parent(), G, coverage)) {
                const auto res = main_condition_residuals(Rop, g, tol);
                const double worst = res.empty() ? 0.0 : *std::max_element(res.begin(), res.end());
                report.max_main_residual = std::max(report.max_main_residual, worst);
                report.main_condition.push_back(worst <= tol.identity);
            }
            report.range_operator = std::move(Rop);
        } catch (const std::exception& e) {
            report.extraction_error = e.what();
            report.main_condition.clear();
        }
    }
    report.characterization = report.shift_preserving && report.extraction_error.empty() &&
                              std::all_of(report.main_condition.begin(), report.main_condition.end(),
                                          [](bool b) { return b; });
    report.equivalent = report.gamma_preserving == report.characterization;
    return report;
}

// ---------------------------------------------------------------------------

RangeOperator gamma_range_operator(const Lattice& lat, const std::vector<Automorphism>& G, const RangeFunction& J,
                                   std::uint64_t seed) {
    if (!range_condition_gamma(J, G)) throw PreconditionError("domain range function is not Gamma-invariant");
    const OrbitStructure orbits(lat, G);
    std::mt19937_64 rng(seed);
    const std::size_t m = lat.fiber_length();
    RangeOperator Rop{lat, J, std::vector<cmat>(lat.fiber_count(), cmat::Zero(m, m))};
    std::vector<bool> assigned(lat.fiber_count(), false);

    for (const std::size_t rep : orbits.representatives()) {
        const cmat M = random_matrix(m, m, rng) * J.projection(rep);
        cmat averaged = cmat::Zero(m, m);
        std::size_t stabilizer = 0;
        for (const auto& h : orbits.group()) {
            const Transport t = transport(h, lat, rep);
            if (t.target != rep) continue;
            averaged += t.unitary.adjoint() * M * t.unitary;
            ++stabilizer;
        }
        averaged /= static_cast<double>(stabilizer);

        for (const auto& h : orbits.group()) {
            const Transport t = transport(h, lat, rep);
            if (assigned[t.target]) continue;
            Rop.mats[t.target] = t.unitary.adjoint() * averaged * t.unitary;
            assigned[t.target] = true;
        }
    }
    return Rop;
}

RangeOperator random_range_operator(const RangeFunction& J, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t m = J.lattice.fiber_length();
    RangeOperator Rop{J.lattice, J, {}};
    for (std::size_t w = 0; w < J.lattice.fiber_count(); ++w) {
        Rop.mats.push_back(random_matrix(m, m, rng) * J.projection(w));
    }
    return Rop;
}

OperatorMatrix gamma_operator_generator(const Lattice& lat, const std::vector<Automorphism>& G, std::uint64_t seed) {
    return gamma_operator_generator(lat, G, RangeFunction::full(lat), seed);
}

OperatorMatrix gamma_operator_generator(const Lattice& lat, const std::vector<Automorphism>& G,
                                        const RangeFunction& J, std::uint64_t seed) {
    return synthesize_operator(gamma_range_operator(lat, G, J, seed));
}

RangeOperator perturb_range_operator(RangeOperator Rop, std::size_t omega_pos, std::size_t row, double magnitude) {
    const cmat& Q = Rop.domain.spaces.at(omega_pos);
    if (Q.cols() == 0) return Rop;
    Rop.mats[omega_pos].row(static_cast<Eigen::Index>(row % Rop.lattice.fiber_length())) +=
        magnitude * Q.col(0).adjoint();
    return Rop;
}

std::optional<std::size_t> sensitive_fiber(const RangeOperator& Rop, const std::vector<Automorphism>& G) {
    const OrbitStructure orbits(Rop.lattice, G);
    std::optional<std::size_t> fallback;
    for (std::size_t w = 0; w < Rop.mats.size(); ++w) {
        if (Rop.domain.spaces[w].cols() == 0) continue;
        if (orbits.orbit_size(orbits.orbit_of(w)) > 1) return w;
        if (!fallback) fallback = w;
    }
    return fallback;
}

// ---------------------------------------------------------------------------

DilationSuiteReport shift_dilation_suite(const Lattice& lat, std::size_t n_seeds, std::uint64_t seed,
                                     const Tolerances& tol) {
    const std::vector<Automorphism> G = automorphism_group_units(lat.parent(), lat);
    DilationSuiteReport report;
    report.automorphisms = G.size();
    bool spaces_ok = true;
    bool operators_ok = true;

    auto space_case = [&](const RangeFunction& J, bool expect_invariant) {
        const Subspace V = space_from_range_function(J);
        const bool invariant = is_gamma_invariant(V, lat, G, Coverage::generators, tol);
        const bool fiberwise = is_shift_invariant(V, lat, Coverage::generators, tol) &&
                               range_condition_gamma(range_function_of(V, lat), G, Coverage::generators, tol);
        ++report.space_cases;
        if (invariant != fiberwise || (expect_invariant && !invariant)) {
            ++report.space_disagreements;
            spaces_ok = false;
        }
    };
    auto operator_case = [&](const RangeOperator& Rop, const Subspace& V, bool expect_preserving) {
        const OperatorMatrix U = synthesize_operator(Rop);
        const EquivalenceReport t = theorem_main_equivalence(U, V, lat, G, Coverage::generators, tol);
        ++report.operator_cases;
        if (!t.equivalent || (expect_preserving && !t.gamma_preserving)) {
            ++report.operator_disagreements;
            operators_ok = false;
        }
    };

    for (std::size_t i = 0; i < n_seeds; ++i) {
        const std::uint64_t s = seed + 7919 * i;
        const RangeFunction Jpos = gamma_range_function_generator(lat, G, s);
        space_case(Jpos, true);
        space_case(random_range_function(lat, s + 1), false);

        const Subspace Vpos = space_from_range_function(Jpos);
        const RangeOperator Rpos = gamma_range_operator(lat, G, Jpos, s + 2);
        operator_case(Rpos, Vpos, true);
        operator_case(random_range_operator(Jpos, s + 3), Vpos, false);
        if (const auto w = sensitive_fiber(Rpos, G)) {
            operator_case(perturb_range_operator(Rpos, *w, i, 1e-3), Vpos, false);
        }
    }
    report.invariant_spaces_pass = spaces_ok;
    report.preserving_operators_pass = operators_ok;
    return report;
}

}  // namespace gammaops
