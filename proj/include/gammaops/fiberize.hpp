/**
 * @file fiberize.hpp
 * @brief Signals on R, the unitary DFT, shifts, dilations and the
 *        fiberization map onto Omega-indexed families of Lambda^perp vectors.
 *
 * Sign convention (used everywhere phases matter):
 *
 *   dft(f)(xi) = |R|^{-1/2} sum_x f(x) conj(<xi, x>)
 *
 * so that
 *
 *   dft(shift(f, k))(xi)  = conj(<xi, k>) dft(f)(xi)
 *   dft(dilate(f, g))(xi) = dft(f)(g* xi)
 *   fiberize(shift(dilate(f, g), k))(omega)
 *       = conj(<omega, k>) r_g fiberize(f)(g* omega)      for k in Lambda.
 *
 * A fibered signal F is stored on Omega only. Its value at an arbitrary dual
 * point xi = omega + kappa (omega in Omega, kappa in Lambda^perp) is the
 * translated fiber s -> F(omega)(s + kappa); see fiber_at().
 */

#pragma once

#include <vector>

#include "gammaops/group.hpp"
#include "gammaops/types.hpp"

namespace gammaops {

struct Signal {
    FiniteAbelianGroup group;
    cvec values;
    /// primal for functions on R, dual for Fourier images.
    Side side = Side::primal;

    static Signal zeros(const FiniteAbelianGroup& group, Side side = Side::primal);
    static Signal delta(const FiniteAbelianGroup& group, const GroupElement& at);

    cplx operator()(const GroupElement& x) const { return values[group.index_of(x)]; }
    double norm() const { return values.norm(); }
};

struct FiberedSignal {
    Lattice lattice;
    /// One vector of length |Lambda^perp| per omega, in Omega order.
    std::vector<cvec> fibers;

    static FiberedSignal zeros(const Lattice& lattice);

    double norm() const;
    /// Concatenation of the fibers in Omega order (length |R|).
    cvec flatten() const;
    static FiberedSignal unflatten(const Lattice& lattice, const cvec& flat);
};

Signal dft(const Signal& f);
Signal idft(const Signal& fhat);

Signal shift(const Signal& f, const GroupElement& k);
Signal dilate(const Signal& f, const Automorphism& g);

FiberedSignal fiberize(const Signal& f, const Lattice& lat);
/// Inverse of fiberize. Throws std::invalid_argument on malformed fibers.
Signal defiberize(const FiberedSignal& F);

/// The fiber of F at an arbitrary dual point.
cvec fiber_at(const FiberedSignal& F, const GroupElement& xi);

/// (tau_kappa a)(s) = a(s + kappa), the intra-fiber translation.
cvec translate_fiber(const Lattice& lat, const cvec& a, const GroupElement& kappa);
cmat translation_matrix(const Lattice& lat, const GroupElement& kappa);

/// (r_g a)(s) = a(g* s). Throws GroupError if g does not preserve the lattice.
cvec r_action(const Automorphism& g, const Lattice& lat, const cvec& a);
cmat r_matrix(const Automorphism& g, const Lattice& lat);

/// (Pi(g) F)(omega) = r_g F(g* omega).
FiberedSignal pi_action(const Automorphism& g, const Lattice& lat, const FiberedSignal& F);

/// Checks fiberize(T_k R_g f)(omega) = conj(<omega, k>) r_g fiberize(f)(g* omega)
/// at every omega. Requires k in Lambda and g preserving the lattice.
bool covariance_check(const Signal& f, const GroupElement& k, const Automorphism& g,
                      const Lattice& lat, double tol = Tolerances{}.transform);
double covariance_residual(const Signal& f, const GroupElement& k, const Automorphism& g,
                           const Lattice& lat);

// Dense matrices of the same maps, acting on value vectors in enumeration
// order (fibered signals flattened in Omega order).
cmat dft_matrix(const FiniteAbelianGroup& group);
cmat shift_matrix(const FiniteAbelianGroup& group, const GroupElement& k);
cmat dilation_matrix(const Automorphism& g);
cmat fiberization_matrix(const Lattice& lat);
cmat pi_matrix(const Automorphism& g, const Lattice& lat);

}  // namespace gammaops
