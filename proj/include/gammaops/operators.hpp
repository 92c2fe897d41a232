/**
 * @file operators.hpp
 * @brief Shift-preserving and Gamma-preserving operators, their range
 *        operators, and the fiberwise characterization of commutation with
 *        the representation (k, g) -> T_k R_g.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gammaops/invariant_spaces.hpp"

namespace gammaops {

/// A |R| x |R| matrix; when `domain` is set it is only ever applied to
/// vectors of that subspace.
struct OperatorMatrix {
    FiniteAbelianGroup group;
    cmat entries;
    std::optional<Subspace> domain;

    static OperatorMatrix identity(const FiniteAbelianGroup& group);

    /// Orthonormal basis of the domain (the identity when unrestricted).
    cmat domain_basis() const;
    /// Largest singular value of U restricted to its domain.
    double norm_on_domain() const;
};

/**
 * omega -> R(omega) on l^2(Lambda^perp). Each matrix acts as zero on the
 * orthogonal complement of the domain fiber J(omega).
 */
struct RangeOperator {
    Lattice lattice;
    RangeFunction domain;
    std::vector<cmat> mats;

    /// R at an arbitrary dual point xi = omega + kappa: tau_kappa R(omega) tau_kappa^{-1}.
    cmat at(const GroupElement& xi) const;
    /// Norm of R(omega) on J(omega), per omega in Omega order.
    std::vector<double> fiber_norms() const;
};

/// Range-operator extraction found no consistent fiberwise solution.
class NotShiftPreservingError : public std::runtime_error {
public:
    NotShiftPreservingError(double relative_residual)
        : std::runtime_error("operator is not shift preserving: fiberwise system inconsistent (relative residual " +
                             std::to_string(relative_residual) + ")"),
          residual_(relative_residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/**
 * Relative commutator residuals ||(U A - A U) Q||_F / max(1, ||U Q||_F) with
 * Q the domain basis. Each throws PreconditionError when A does not map the
 * domain into itself.
 */
double shift_commutator_residual(const OperatorMatrix& U, const Lattice& lat, Coverage coverage = Coverage::generators);
double dilation_commutator_residual(const OperatorMatrix& U, const std::vector<Automorphism>& G,
                                    Coverage coverage = Coverage::generators);
/// Same measure for U' = T U T^{-1} against Pi(g), both on the fibered side.
double induced_commutator_residual(const OperatorMatrix& U, const Lattice& lat, const Automorphism& g);

bool is_shift_preserving(const OperatorMatrix& U, const Lattice& lat, Coverage coverage = Coverage::generators,
                         const Tolerances& tol = {});
bool induced_operator_check(const OperatorMatrix& U, const Lattice& lat, const Automorphism& g,
                            const Tolerances& tol = {});
/// Requires every g to preserve the lattice and the domain to be Gamma-invariant.
bool is_gamma_preserving(const OperatorMatrix& U, const Lattice& lat, const std::vector<Automorphism>& G,
                         Coverage coverage = Coverage::generators, const Tolerances& tol = {});

/// Solves R(omega) T phi(omega) = T(U phi)(omega) fiber by fiber over a basis of V.
/// Throws PreconditionError if V is not shift invariant and
/// NotShiftPreservingError if the system is inconsistent.
RangeOperator extract_range_operator(const OperatorMatrix& U, const Subspace& V, const Lattice& lat,
                                     const Tolerances& tol = {});

/// T^{-1} o (R(omega))_omega o T, with domain space_from_range_function(J).
OperatorMatrix synthesize_operator(const RangeOperator& Rop);

/// ||(R(g* omega) - r_{g^{-1}} R(omega) r_g) Q|| per omega, Q a basis of J(g* omega),
/// relative to max(1, max_omega ||R(omega)||_F).
std::vector<double> main_condition_residuals(const RangeOperator& Rop, const Automorphism& g,
                                             const Tolerances& tol = {});
/// R(g* omega) = r_{g^{-1}} R(omega) r_g on J(g* omega) for every omega.
/// Throws PreconditionError if J does not satisfy range_condition_gamma for g.
bool range_condition_main(const RangeOperator& Rop, const Automorphism& g, const Tolerances& tol = {});

struct EquivalenceReport {
    bool shift_preserving = false;
    bool gamma_preserving = false;
    std::vector<bool> main_condition;  ///< per covered automorphism; empty when extraction fails
    bool characterization = false;     ///< shift_preserving && every main_condition
    bool equivalent = false;           ///< gamma_preserving == characterization
    double shift_residual = 0.0;
    double dilation_residual = 0.0;
    double max_main_residual = 0.0;
    std::optional<RangeOperator> range_operator;
    std::string extraction_error;
};

/// Evaluates both sides of the characterization of Gamma-preserving operators
/// on U restricted to V. Throws PreconditionError if V is not Gamma-invariant.
EquivalenceReport theorem_main_equivalence(const OperatorMatrix& U, const Subspace& V, const Lattice& lat,
                                       const std::vector<Automorphism>& G, Coverage coverage = Coverage::generators,
                                       const Tolerances& tol = {});

/// Seeded range operator on J satisfying the covariance condition for every
/// element of <G>: random matrices on one omega per orbit, averaged over the
/// stabilizer, carried along the orbit. J must satisfy range_condition_gamma.
RangeOperator gamma_range_operator(const Lattice& lat, const std::vector<Automorphism>& G, const RangeFunction& J,
                                   std::uint64_t seed);
/// Seeded range operator on J with independent random matrices per omega.
RangeOperator random_range_operator(const RangeFunction& J, std::uint64_t seed);

OperatorMatrix gamma_operator_generator(const Lattice& lat, const std::vector<Automorphism>& G, std::uint64_t seed);
OperatorMatrix gamma_operator_generator(const Lattice& lat, const std::vector<Automorphism>& G,
                                        const RangeFunction& J, std::uint64_t seed);

struct DilationSuiteReport {
    std::size_t automorphisms = 0;
    std::size_t space_cases = 0;
    std::size_t space_disagreements = 0;
    std::size_t operator_cases = 0;
    std::size_t operator_disagreements = 0;
    bool invariant_spaces_pass = false;     ///< shift-dilation invariant spaces
    bool preserving_operators_pass = false;  ///< shift-dilation preserving operators
};

/// Runs the invariant-space and preserving-operator characterizations with
/// G = all diagonal unit automorphisms preserving lat, over n_seeds instances.
DilationSuiteReport shift_dilation_suite(const Lattice& lat, std::size_t n_seeds, std::uint64_t seed,
                                     const Tolerances& tol = {});

/// Adds `magnitude` * e_i q^* to R(omega) for a unit vector q in J(omega).
RangeOperator perturb_range_operator(RangeOperator Rop, std::size_t omega_pos, std::size_t row, double magnitude);

/// Fiber to perturb in negative tests: the first omega with J(omega) != 0 lying in an orbit of length > 1, else
/// the first omega with J(omega) != 0. Empty when J is zero.
std::optional<std::size_t> sensitive_fiber(const RangeOperator& Rop, const std::vector<Automorphism>& G);

}  // namespace gammaops
