/**
 * @file suites.hpp
 * @brief Seeded property suites over a fixed roster of groups. These back the
 *        `selftest` subcommand and the acceptance test binary.
 */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "gammaops/operators.hpp"

namespace gammaops {

inline constexpr const char* kToolVersion = "1.0.0";

struct Instance {
    std::string name;
    Lattice lattice;
    std::vector<Automorphism> automorphisms;  ///< generating set of G
};

/// Z_2 (trivial lattice), Z_8, Z_12, Z_2 x Z_4, Z_4 x Z_4, Z_5, Z_9, keeping
/// groups of order <= size_cap.
std::vector<Instance> roster(std::size_t size_cap);
Instance make_instance(std::string name, std::vector<std::int64_t> moduli,
                       const std::vector<std::vector<std::int64_t>>& lattice_generators,
                       const std::vector<IntMatrix>& automorphisms);

struct SuiteResult {
    std::string suite;
    std::string instance;
    std::size_t cases = 0;
    std::size_t failures = 0;
    double max_residual = 0.0;
    std::string note;

    bool passed() const { return failures == 0; }
};

struct SuiteOptions {
    std::uint64_t seed = 0;
    Coverage coverage = Coverage::generators;
    Tolerances tol{};
};

/// ||T f|| = ||f|| and T^{-1} T f = f on random signals.
SuiteResult suite_fiberization_unitarity(const Instance& inst, std::size_t signals, const SuiteOptions& opt);
/// Fourier images of T_k (all k in Lambda) and R_g (all diagonal units preserving Lambda).
SuiteResult suite_fourier_identities(const Instance& inst, std::size_t signals, const SuiteOptions& opt);
/// T(T_k R_g f)(omega) = conj(<omega,k>) r_g Tf(g* omega), all k in Lambda, all g in <G>.
SuiteResult suite_covariance(const Instance& inst, std::size_t signals, const SuiteOptions& opt);
/// Pi(g) by the fiberwise formula vs T R_g T^{-1}; representation laws of r, Pi and Gamma.
SuiteResult suite_pi_action(const Instance& inst, std::size_t signals, const SuiteOptions& opt);
/// Shift invariance <=> equality with the space rebuilt from the range function.
SuiteResult suite_shift_invariant_spaces(const Instance& inst, std::size_t trials, const SuiteOptions& opt);
/// Gamma invariance <=> shift invariance and J(omega) = r_g J(g* omega).
SuiteResult suite_gamma_invariant_spaces(const Instance& inst, std::size_t trials, const SuiteOptions& opt);
/// Range operator extraction: round trips, the fiberwise identity, uniqueness,
/// and inconsistency detection on non-shift-preserving operators.
SuiteResult suite_range_operators(const Instance& inst, std::size_t trials, const SuiteOptions& opt);
/// Gamma-preserving <=> shift-preserving and the range-operator covariance
/// condition, over 4 * trials operators (positives, perturbed, generic, shift-only).
SuiteResult suite_gamma_preserving(const Instance& inst, std::size_t trials, const SuiteOptions& opt);
/// [U, R_g] and [U', Pi(g)] agree: both below `identity` or both at least 1e-6.
SuiteResult suite_induced_operator(const Instance& inst, std::size_t trials, const SuiteOptions& opt);
/// ||U on V|| = max_omega ||R(omega) on J(omega)||.
SuiteResult suite_norm_correspondence(const Instance& inst, std::size_t trials, const SuiteOptions& opt);
/// Both shift-dilation characterizations with G = diagonal units preserving Lambda.
SuiteResult suite_shift_dilation(const Instance& inst, std::size_t seeds, const SuiteOptions& opt);

/// Lower edge of the band that separates "commutes" from "does not commute".
inline constexpr double kNonCommutingFloor = 1e-6;

struct SelftestRun {
    nlohmann::json payload;  ///< deterministic for fixed seed and options
    nlohmann::json timings;  ///< wall-clock seconds per suite
    bool all_passed = false;
};

SelftestRun run_selftest(std::uint64_t seed, std::size_t size_cap, const SuiteOptions& opt);

}  // namespace gammaops
