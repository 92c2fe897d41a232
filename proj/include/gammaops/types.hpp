#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace gammaops {

using cplx = std::complex<double>;
using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;

/**
 * Numerical tolerances used by every check in the library.
 *
 *  - transform: unitary transform identities (DFT, fiberization, Pi(g))
 *  - identity:  single-stage operator identities (commutators, the range
 *               operator covariance condition)
 *  - pipeline:  multi-stage pipelines (subspace membership and equality,
 *               range-operator extraction, round trips)
 *  - rank:      singular values below rank * (largest singular value) are zero
 */
struct Tolerances {
    double transform = 1e-10;
    double identity = 1e-9;
    double pipeline = 1e-8;
    double rank = 1e-10;
};

/// Which elements invariance and commutation checks iterate over.
enum class Coverage {
    generators,    ///< generators of Lambda and of G (enough by the homomorphism property)
    all_elements,  ///< every element of Lambda and of the group generated by G
};

/// A check was asked of inputs that do not satisfy its hypotheses.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace gammaops
