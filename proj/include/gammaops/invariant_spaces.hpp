/**
 * @file invariant_spaces.hpp
 * @brief Subspaces of L^2(R), range functions, and the shift-invariance and
 *        Gamma-invariance tests on both sides of the fiberization map.
 */

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "gammaops/fiberize.hpp"

namespace gammaops {

/// Orthonormal basis of the column span of `vectors`; singular values at or
/// below `cutoff` are treated as zero. Deterministic (Jacobi SVD).
cmat orthonormal_basis(const cmat& vectors, double cutoff);

/// Largest residual ||v - Q Q^* v|| over the columns v of `vectors`.
double projection_residual(const cmat& Q, const cmat& vectors);

/// Equality of span(A) and span(B) for orthonormal A, B: equal dimension and
/// mutual projection residuals at most tol.
bool same_subspace(const cmat& A, const cmat& B, double tol = Tolerances{}.pipeline);

class Subspace {
public:
    /// Span of the columns of `vectors` (|R| rows), orthonormalized with a
    /// cutoff relative to the largest singular value.
    static Subspace spanned_by(const FiniteAbelianGroup& group, const cmat& vectors,
                               double rank_tol = Tolerances{}.rank);
    static Subspace spanned_by(const std::vector<Signal>& signals, double rank_tol = Tolerances{}.rank);
    /// Wraps a basis that is already orthonormal (checked to 1e-10).
    static Subspace from_orthonormal(const FiniteAbelianGroup& group, cmat basis);
    static Subspace whole(const FiniteAbelianGroup& group);
    static Subspace zero(const FiniteAbelianGroup& group);

    const FiniteAbelianGroup& group() const noexcept { return group_; }
    /// |R| x dim matrix with orthonormal columns.
    const cmat& basis() const noexcept { return basis_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(basis_.cols()); }
    Signal basis_signal(std::size_t i) const;

    double residual(const cvec& v) const;
    bool contains(const cvec& v, double tol = Tolerances{}.pipeline) const { return residual(v) <= tol; }

private:
    Subspace(FiniteAbelianGroup group, cmat basis) : group_(std::move(group)), basis_(std::move(basis)) {}

    FiniteAbelianGroup group_;
    cmat basis_;
};

bool operator==(const Subspace& a, const Subspace& b);

/**
 * omega -> J(omega), a subspace of l^2(Lambda^perp) for every omega in
 * Omega, stored as an orthonormal basis (|Lambda^perp| x dim J(omega)).
 */
struct RangeFunction {
    Lattice lattice;
    std::vector<cmat> spaces;

    static RangeFunction full(const Lattice& lattice);
    static RangeFunction zero(const Lattice& lattice);

    /// Basis of J at an arbitrary dual point xi = omega + kappa, i.e. tau_kappa J(omega).
    cmat basis_at(const GroupElement& xi) const;
    /// Orthogonal projection onto J(omega) for omega = transversal()[pos].
    cmat projection(std::size_t pos) const;
};

RangeFunction range_function_from_generators(const std::vector<Signal>& generators, const Lattice& lat,
                                             double rank_tol = Tolerances{}.rank);

/// Range function of a subspace: the fibers of its basis, orthonormalized.
RangeFunction range_function_of(const Subspace& V, const Lattice& lat, double rank_tol = Tolerances{}.rank);

/// The subspace {f : fiberize(f)(omega) in J(omega) for all omega}.
Subspace space_from_range_function(const RangeFunction& J);

bool same_range_function(const RangeFunction& a, const RangeFunction& b, double tol = Tolerances{}.pipeline);

/// Worst residual of T_k b outside V over basis vectors b and the covered k.
double shift_invariance_residual(const Subspace& V, const Lattice& lat, Coverage coverage = Coverage::generators);
bool is_shift_invariant(const Subspace& V, const Lattice& lat, Coverage coverage = Coverage::generators,
                        const Tolerances& tol = {});

/// Worst residual of R_g b outside V over basis vectors b and the covered g.
double dilation_invariance_residual(const Subspace& V, const std::vector<Automorphism>& G,
                                    Coverage coverage = Coverage::generators);
bool is_gamma_invariant(const Subspace& V, const Lattice& lat, const std::vector<Automorphism>& G,
                        Coverage coverage = Coverage::generators, const Tolerances& tol = {});

/// J(omega) = r_g J(g* omega) for every omega and every covered g.
bool range_condition_gamma(const RangeFunction& J, const std::vector<Automorphism>& G,
                           Coverage coverage = Coverage::generators, const Tolerances& tol = {});

std::vector<std::pair<GroupElement, std::size_t>> dimension_function(const RangeFunction& J);

/// Seeded range function satisfying range_condition_gamma for G: random
/// subspaces on one omega per orbit, closed under the stabilizer and carried
/// along the orbit.
RangeFunction gamma_range_function_generator(const Lattice& lat, const std::vector<Automorphism>& G,
                                             std::uint64_t seed);

/// Seeded range function with independent random subspaces at every omega.
RangeFunction random_range_function(const Lattice& lat, std::uint64_t seed);

}  // namespace gammaops
