#include "gammaops/invariant_spaces.hpp"

#include <algorithm>
#include <random>

#include "gammaops/orbits.hpp"

namespace gammaops {

namespace {

double leading_singular_value(const cmat& M) {
    if (M.size() == 0) return 0.0;
    Eigen::JacobiSVD<cmat> svd(M);
    return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

std::vector<Automorphism> covered(const FiniteAbelianGroup& group, const std::vector<Automorphism>& G, Coverage c) {
    return c == Coverage::generators ? G : generated_group(group, G);
}

}  // namespace

cmat orthonormal_basis(const cmat& vectors, double cutoff) {
    if (vectors.cols() == 0 || vectors.rows() == 0) return cmat(vectors.rows(), 0);
    Eigen::JacobiSVD<cmat> svd(vectors, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv[rank] > cutoff) ++rank;
    return svd.matrixU().leftCols(rank);
}

double projection_residual(const cmat& Q, const cmat& vectors) {
    if (vectors.cols() == 0) return 0.0;
    const cmat residual = vectors - Q * (Q.adjoint() * vectors);
    return residual.colwise().norm().maxCoeff();
}

bool same_subspace(const cmat& A, const cmat& B, double tol) {
    if (A.cols() != B.cols() || A.rows() != B.rows()) return false;
    return projection_residual(B, A) <= tol && projection_residual(A, B) <= tol;
}

// ---------------------------------------------------------------------------

Subspace Subspace::spanned_by(const FiniteAbelianGroup& group, const cmat& vectors, double rank_tol) {
    if (static_cast<std::size_t>(vectors.rows()) != group.order()) {
        throw std::invalid_argument("spanning vectors must have one entry per group element");
    }
    return Subspace(group, orthonormal_basis(vectors, rank_tol * leading_singular_value(vectors)));
}

Subspace Subspace::spanned_by(const std::vector<Signal>& signals, double rank_tol) {
    if (signals.empty()) throw std::invalid_argument("spanned_by needs at least one signal");
    cmat M(signals.front().values.size(), static_cast<Eigen::Index>(signals.size()));
    for (std::size_t i = 0; i < signals.size(); ++i) {
        if (!(signals[i].group == signals.front().group)) throw GroupError("signals live on different groups");
        M.col(static_cast<Eigen::Index>(i)) = signals[i].values;
    }
    return spanned_by(signals.front().group, M, rank_tol);
}

Subspace Subspace::from_orthonormal(const FiniteAbelianGroup& group, cmat basis) {
    if (static_cast<std::size_t>(basis.rows()) != group.order()) {
        throw std::invalid_argument("basis vectors must have one entry per group element");
    }
    const cmat gram = basis.adjoint() * basis;
    if (gram.size() > 0 && (gram - cmat::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() > 1e-10) {
        throw std::invalid_argument("basis is not orthonormal");
    }
    return Subspace(group, std::move(basis));
}

Subspace Subspace::whole(const FiniteAbelianGroup& group) {
    return Subspace(group, cmat::Identity(group.order(), group.order()));
}

Subspace Subspace::zero(const FiniteAbelianGroup& group) {
    return Subspace(group, cmat(group.order(), 0));
}

Signal Subspace::basis_signal(std::size_t i) const {
    return Signal{group_, basis_.col(static_cast<Eigen::Index>(i)), Side::primal};
}

double Subspace::residual(const cvec& v) const {
    return projection_residual(basis_, v);
}

bool operator==(const Subspace& a, const Subspace& b) {
    return a.group() == b.group() && same_subspace(a.basis(), b.basis());
}

// ---------------------------------------------------------------------------

RangeFunction RangeFunction::full(const Lattice& lattice) {
    const auto m = lattice.fiber_length();
    return RangeFunction{lattice, std::vector<cmat>(lattice.fiber_count(), cmat::Identity(m, m))};
}

RangeFunction RangeFunction::zero(const Lattice& lattice) {
    return RangeFunction{lattice, std::vector<cmat>(lattice.fiber_count(), cmat(lattice.fiber_length(), 0))};
}

cmat RangeFunction::basis_at(const GroupElement& xi) const {
    const auto r = lattice.reduce(xi);
    return translation_matrix(lattice, r.kappa) * spaces[r.omega_pos];
}

cmat RangeFunction::projection(std::size_t pos) const {
    return spaces[pos] * spaces[pos].adjoint();
}

RangeFunction range_function_from_generators(const std::vector<Signal>& generators, const Lattice& lat,
                                             double rank_tol) {
    if (generators.empty()) throw std::invalid_argument("range function needs at least one generator");
    std::vector<FiberedSignal> fibered;
    fibered.reserve(generators.size());
    for (const auto& g : generators) fibered.push_back(fiberize(g, lat));

    const auto m = static_cast<Eigen::Index>(lat.fiber_length());
    std::vector<cmat> blocks(lat.fiber_count(), cmat(m, static_cast<Eigen::Index>(generators.size())));
    double leading = 0.0;
    for (std::size_t w = 0; w < lat.fiber_count(); ++w) {
        for (std::size_t i = 0; i < fibered.size(); ++i) blocks[w].col(static_cast<Eigen::Index>(i)) = fibered[i].fibers[w];
        leading = std::max(leading, leading_singular_value(blocks[w]));
    }
    // One cutoff for every fiber, so numerically zero fibers get rank zero.
    RangeFunction J{lat, {}};
    for (const auto& block : blocks) J.spaces.push_back(orthonormal_basis(block, rank_tol * leading));
    return J;
}

RangeFunction range_function_of(const Subspace& V, const Lattice& lat, double rank_tol) {
    if (V.dim() == 0) return RangeFunction::zero(lat);
    std::vector<Signal> basis;
    for (std::size_t i = 0; i < V.dim(); ++i) basis.push_back(V.basis_signal(i));
    return range_function_from_generators(basis, lat, rank_tol);
}

Subspace space_from_range_function(const RangeFunction& J) {
    const Lattice& lat = J.lattice;
    const auto m = static_cast<Eigen::Index>(lat.fiber_length());
    Eigen::Index total = 0;
    for (const auto& s : J.spaces) total += s.cols();
    cmat fibered = cmat::Zero(static_cast<Eigen::Index>(lat.parent().order()), total);
    Eigen::Index col = 0;
    for (std::size_t w = 0; w < J.spaces.size(); ++w) {
        fibered.block(static_cast<Eigen::Index>(w) * m, col, m, J.spaces[w].cols()) = J.spaces[w];
        col += J.spaces[w].cols();
    }
    return Subspace::from_orthonormal(lat.parent(), fiberization_matrix(lat).adjoint() * fibered);
}

bool same_range_function(const RangeFunction& a, const RangeFunction& b, double tol) {
    if (!(a.lattice == b.lattice) || a.spaces.size() != b.spaces.size()) return false;
    for (std::size_t w = 0; w < a.spaces.size(); ++w) {
        if (!same_subspace(a.spaces[w], b.spaces[w], tol)) return false;
    }
    return true;
}

double shift_invariance_residual(const Subspace& V, const Lattice& lat, Coverage coverage) {
    if (!(V.group() == lat.parent())) throw GroupError("subspace and lattice live on different groups");
    const auto& ks = coverage == Coverage::generators ? lat.generators() : lat.elements();
    double worst = 0.0;
    for (const auto& k : ks) {
        worst = std::max(worst, projection_residual(V.basis(), shift_matrix(V.group(), k) * V.basis()));
    }
    return worst;
}

bool is_shift_invariant(const Subspace& V, const Lattice& lat, Coverage coverage, const Tolerances& tol) {
    return shift_invariance_residual(V, lat, coverage) <= tol.pipeline;
}

double dilation_invariance_residual(const Subspace& V, const std::vector<Automorphism>& G, Coverage coverage) {
    double worst = 0.0;
    for (const auto& g : covered(V.group(), G, coverage)) {
        worst = std::max(worst, projection_residual(V.basis(), dilation_matrix(g) * V.basis()));
    }
    return worst;
}

bool is_gamma_invariant(const Subspace& V, const Lattice& lat, const std::vector<Automorphism>& G,
                        Coverage coverage, const Tolerances& tol) {
    require_preserved(G, lat);
    return is_shift_invariant(V, lat, coverage, tol) && dilation_invariance_residual(V, G, coverage) <= tol.pipeline;
}

bool range_condition_gamma(const RangeFunction& J, const std::vector<Automorphism>& G, Coverage coverage,
                           const Tolerances& tol) {
    const Lattice& lat = J.lattice;
    require_preserved(G, lat);
    for (const auto& g : covered(lat.parent(), G, coverage)) {
        const cmat r = r_matrix(g, lat);
        for (std::size_t w = 0; w < lat.fiber_count(); ++w) {
            const cmat moved = r * J.basis_at(g.dual_apply(lat.transversal()[w]));
            if (!same_subspace(J.spaces[w], moved, tol.pipeline)) return false;
        }
    }
    return true;
}

std::vector<std::pair<GroupElement, std::size_t>> dimension_function(const RangeFunction& J) {
    std::vector<std::pair<GroupElement, std::size_t>> out;
    for (std::size_t w = 0; w < J.spaces.size(); ++w) {
        out.emplace_back(J.lattice.transversal()[w], static_cast<std::size_t>(J.spaces[w].cols()));
    }
    return out;
}

RangeFunction gamma_range_function_generator(const Lattice& lat, const std::vector<Automorphism>& G,
                                             std::uint64_t seed) {
    const OrbitStructure orbits(lat, G);
    std::mt19937_64 rng(seed);
    const std::size_t m = lat.fiber_length();
    RangeFunction J = RangeFunction::zero(lat);
    std::vector<bool> assigned(lat.fiber_count(), false);

    for (const std::size_t rep : orbits.representatives()) {
        std::uniform_int_distribution<std::size_t> dim(0, m);
        const cmat seedvecs = random_matrix(m, dim(rng), rng);

        // Close the seed span under the stabilizer of rep.
        std::vector<cmat> images;
        for (const auto& h : orbits.group()) {
            const Transport t = transport(h, lat, rep);
            if (t.target == rep) images.push_back(t.unitary * seedvecs);
        }
        cmat stacked(m, static_cast<Eigen::Index>(images.size()) * seedvecs.cols());
        for (std::size_t i = 0; i < images.size(); ++i) {
            stacked.middleCols(static_cast<Eigen::Index>(i) * seedvecs.cols(), seedvecs.cols()) = images[i];
        }
        const cmat base = orthonormal_basis(stacked, Tolerances{}.rank * leading_singular_value(stacked));

        for (const auto& h : orbits.group()) {
            const Transport t = transport(h, lat, rep);
            if (assigned[t.target]) continue;
            J.spaces[t.target] = t.unitary.adjoint() * base;
            assigned[t.target] = true;
        }
    }
    return J;
}

RangeFunction random_range_function(const Lattice& lat, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::size_t m = lat.fiber_length();
    std::uniform_int_distribution<std::size_t> dim(0, m);
    RangeFunction J{lat, {}};
    for (std::size_t w = 0; w < lat.fiber_count(); ++w) {
        const cmat vecs = random_matrix(m, dim(rng), rng);
        J.spaces.push_back(orthonormal_basis(vecs, Tolerances{}.rank * leading_singular_value(vecs)));
    }
    return J;
}

}  // namespace gammaops
