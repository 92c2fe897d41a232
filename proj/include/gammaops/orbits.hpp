/**
 * @file orbits.hpp
 * @brief Orbits of the group generated by G acting on Omega through the dual
 *        action, and the fiber transport unitaries along them.
 *
 * For h in <G> and omega in Omega write h* omega = omega' + kappa. Then
 *
 *   (Pi(h) F)(omega) = W F(omega'),    W = r_h tau_kappa,
 *
 * which is what transport() returns. A Gamma-invariant range function obeys
 * J(omega') = W^* J(omega), and the range operator of a Gamma-preserving
 * operator obeys R(omega') = W^* R(omega) W on J(omega').
 */

#pragma once

#include <random>
#include <vector>

#include "gammaops/fiberize.hpp"

namespace gammaops {

struct Transport {
    std::size_t target = 0;  ///< position of omega' in Omega
    cmat unitary;            ///< W = r_h tau_kappa
};

Transport transport(const Automorphism& h, const Lattice& lat, std::size_t omega_pos);

class OrbitStructure {
public:
    OrbitStructure(const Lattice& lat, const std::vector<Automorphism>& G);

    const std::vector<Automorphism>& group() const noexcept { return group_; }
    /// First omega (in Omega order) of each orbit.
    const std::vector<std::size_t>& representatives() const noexcept { return reps_; }
    std::size_t orbit_of(std::size_t omega_pos) const { return orbit_of_[omega_pos]; }
    std::size_t orbit_size(std::size_t orbit) const;

private:
    std::vector<Automorphism> group_;
    std::vector<std::size_t> reps_;
    std::vector<std::size_t> orbit_of_;
};

/// Complex matrix with independent standard normal real and imaginary parts.
cmat random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng);
cvec random_vector(std::size_t n, std::mt19937_64& rng);
Signal random_signal(const FiniteAbelianGroup& group, std::mt19937_64& rng);
FiberedSignal random_fibered_signal(const Lattice& lat, std::mt19937_64& rng);

}  // namespace gammaops
