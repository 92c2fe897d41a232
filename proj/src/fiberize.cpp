#include "gammaops/fiberize.hpp"

#include <cmath>
#include <numbers>

namespace gammaops {

namespace {

void require_side(const Signal& f, Side side, const char* what) {
    if (f.side != side) throw std::invalid_argument(std::string(what) + ": signal is on the wrong side of the duality");
    if (static_cast<std::size_t>(f.values.size()) != f.group.order()) {
        throw std::invalid_argument(std::string(what) + ": signal length does not match the group order");
    }
}

void require_same_group(const FiniteAbelianGroup& a, const FiniteAbelianGroup& b) {
    if (!(a == b)) throw GroupError("objects live on different groups");
}

// Table of unit roots exp(2 pi i m / L) for the group's phase denominator.
std::vector<cplx> unit_roots(const FiniteAbelianGroup& group) {
    const std::int64_t L = group.phase_denominator();
    std::vector<cplx> roots(static_cast<std::size_t>(L));
    for (std::int64_t m = 0; m < L; ++m) {
        roots[m] = m == 0 ? cplx{1.0, 0.0}
                          : std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(L));
    }
    return roots;
}

}  // namespace

// ---------------------------------------------------------------------------

Signal Signal::zeros(const FiniteAbelianGroup& group, Side side) {
    return Signal{group, cvec::Zero(static_cast<Eigen::Index>(group.order())), side};
}

Signal Signal::delta(const FiniteAbelianGroup& group, const GroupElement& at) {
    Signal s = zeros(group, at.side);
    s.values[group.index_of(at)] = 1.0;
    return s;
}

FiberedSignal FiberedSignal::zeros(const Lattice& lattice) {
    return FiberedSignal{lattice, std::vector<cvec>(lattice.fiber_count(),
                                                    cvec::Zero(static_cast<Eigen::Index>(lattice.fiber_length())))};
}

double FiberedSignal::norm() const {
    double sq = 0.0;
    for (const auto& v : fibers) sq += v.squaredNorm();
    return std::sqrt(sq);
}

cvec FiberedSignal::flatten() const {
    const auto m = static_cast<Eigen::Index>(lattice.fiber_length());
    cvec flat(static_cast<Eigen::Index>(fibers.size()) * m);
    for (std::size_t w = 0; w < fibers.size(); ++w) flat.segment(static_cast<Eigen::Index>(w) * m, m) = fibers[w];
    return flat;
}

FiberedSignal FiberedSignal::unflatten(const Lattice& lattice, const cvec& flat) {
    const auto m = static_cast<Eigen::Index>(lattice.fiber_length());
    if (flat.size() != static_cast<Eigen::Index>(lattice.fiber_count()) * m) {
        throw std::invalid_argument("flattened fibered signal has the wrong length");
    }
    FiberedSignal F{lattice, {}};
    for (std::size_t w = 0; w < lattice.fiber_count(); ++w) F.fibers.emplace_back(flat.segment(static_cast<Eigen::Index>(w) * m, m));
    return F;
}

// ---------------------------------------------------------------------------

cmat dft_matrix(const FiniteAbelianGroup& group) {
    const std::size_t n = group.order();
    const auto roots = unit_roots(group);
    const std::int64_t L = group.phase_denominator();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    const auto primal = group.elements(Side::primal);
    const auto dual = group.elements(Side::dual);
    cmat M(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            // conj(<xi, x>) = exp(-2 pi i phase / L)
            const std::int64_t phase = group.pairing_phase(dual[i], primal[j]);
            M(i, j) = scale * roots[(L - phase) % L];
        }
    }
    return M;
}

Signal dft(const Signal& f) {
    require_side(f, Side::primal, "dft");
    return Signal{f.group, dft_matrix(f.group) * f.values, Side::dual};
}

Signal idft(const Signal& fhat) {
    require_side(fhat, Side::dual, "idft");
    return Signal{fhat.group, dft_matrix(fhat.group).adjoint() * fhat.values, Side::primal};
}

Signal shift(const Signal& f, const GroupElement& k) {
    require_side(f, Side::primal, "shift");
    f.group.check(k, Side::primal);
    Signal out = Signal::zeros(f.group);
    for (std::size_t i = 0; i < f.group.order(); ++i) {
        const GroupElement x = f.group.at(i);
        out.values[i] = f.values[f.group.index_of(f.group.subtract(x, k))];
    }
    return out;
}

Signal dilate(const Signal& f, const Automorphism& g) {
    require_side(f, Side::primal, "dilate");
    require_same_group(f.group, g.parent());
    Signal out = Signal::zeros(f.group);
    for (std::size_t i = 0; i < f.group.order(); ++i) out.values[i] = f.values[g.apply_inverse_index(i)];
    return out;
}

FiberedSignal fiberize(const Signal& f, const Lattice& lat) {
    require_same_group(f.group, lat.parent());
    const Signal fhat = dft(f);
    const auto& group = lat.parent();
    FiberedSignal F = FiberedSignal::zeros(lat);
    for (std::size_t w = 0; w < lat.fiber_count(); ++w) {
        for (std::size_t s = 0; s < lat.fiber_length(); ++s) {
            F.fibers[w][s] = fhat.values[group.index_of(group.add(lat.transversal()[w], lat.annihilator()[s]))];
        }
    }
    return F;
}

Signal defiberize(const FiberedSignal& F) {
    const Lattice& lat = F.lattice;
    if (F.fibers.size() != lat.fiber_count()) {
        throw std::invalid_argument("fibered signal has " + std::to_string(F.fibers.size()) + " fibers, expected " +
                                    std::to_string(lat.fiber_count()));
    }
    for (std::size_t w = 0; w < F.fibers.size(); ++w) {
        if (static_cast<std::size_t>(F.fibers[w].size()) != lat.fiber_length()) {
            throw std::invalid_argument("fiber " + std::to_string(w) + " has length " +
                                        std::to_string(F.fibers[w].size()) + ", expected " +
                                        std::to_string(lat.fiber_length()));
        }
    }
    const auto& group = lat.parent();
    Signal fhat = Signal::zeros(group, Side::dual);
    for (std::size_t i = 0; i < group.order(); ++i) {
        const auto r = lat.reduce(group.at(i, Side::dual));
        fhat.values[i] = F.fibers[r.omega_pos][r.kappa_pos];
    }
    return idft(fhat);
}

cvec translate_fiber(const Lattice& lat, const cvec& a, const GroupElement& kappa) {
    const auto& group = lat.parent();
    cvec out(a.size());
    for (std::size_t s = 0; s < lat.fiber_length(); ++s) {
        out[s] = a[lat.annihilator_pos(group.add(lat.annihilator()[s], kappa))];
    }
    return out;
}

cmat translation_matrix(const Lattice& lat, const GroupElement& kappa) {
    const auto m = lat.fiber_length();
    cmat P = cmat::Zero(m, m);
    for (std::size_t s = 0; s < m; ++s) {
        P(s, lat.annihilator_pos(lat.parent().add(lat.annihilator()[s], kappa))) = 1.0;
    }
    return P;
}

cvec fiber_at(const FiberedSignal& F, const GroupElement& xi) {
    const auto r = F.lattice.reduce(xi);
    return translate_fiber(F.lattice, F.fibers[r.omega_pos], r.kappa);
}

cmat r_matrix(const Automorphism& g, const Lattice& lat) {
    require_preserved(g, lat);
    const auto m = lat.fiber_length();
    cmat P = cmat::Zero(m, m);
    for (std::size_t s = 0; s < m; ++s) {
        P(s, lat.annihilator_pos(g.dual_apply(lat.annihilator()[s]))) = 1.0;
    }
    return P;
}

cvec r_action(const Automorphism& g, const Lattice& lat, const cvec& a) {
    require_preserved(g, lat);
    if (static_cast<std::size_t>(a.size()) != lat.fiber_length()) {
        throw std::invalid_argument("fiber vector has the wrong length");
    }
    cvec out(a.size());
    for (std::size_t s = 0; s < lat.fiber_length(); ++s) {
        out[s] = a[lat.annihilator_pos(g.dual_apply(lat.annihilator()[s]))];
    }
    return out;
}

FiberedSignal pi_action(const Automorphism& g, const Lattice& lat, const FiberedSignal& F) {
    require_preserved(g, lat);
    if (!(F.lattice == lat)) throw GroupError("fibered signal belongs to a different lattice");
    FiberedSignal out = FiberedSignal::zeros(lat);
    for (std::size_t w = 0; w < lat.fiber_count(); ++w) {
        out.fibers[w] = r_action(g, lat, fiber_at(F, g.dual_apply(lat.transversal()[w])));
    }
    return out;
}

double covariance_residual(const Signal& f, const GroupElement& k, const Automorphism& g, const Lattice& lat) {
    if (!lat.contains(k)) throw PreconditionError("covariance identity needs k in the lattice");
    require_preserved(g, lat);
    const FiberedSignal lhs = fiberize(shift(dilate(f, g), k), lat);
    const FiberedSignal Tf = fiberize(f, lat);
    double worst = 0.0;
    for (std::size_t w = 0; w < lat.fiber_count(); ++w) {
        const GroupElement& omega = lat.transversal()[w];
        const cvec rhs = std::conj(pairing(lat.parent(), omega, k)) * r_action(g, lat, fiber_at(Tf, g.dual_apply(omega)));
        worst = std::max(worst, (lhs.fibers[w] - rhs).cwiseAbs().maxCoeff());
    }
    return worst;
}

bool covariance_check(const Signal& f, const GroupElement& k, const Automorphism& g, const Lattice& lat, double tol) {
    return covariance_residual(f, k, g, lat) <= tol;
}

cmat shift_matrix(const FiniteAbelianGroup& group, const GroupElement& k) {
    const std::size_t n = group.order();
    cmat M = cmat::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) M(i, group.index_of(group.subtract(group.at(i), k))) = 1.0;
    return M;
}

cmat dilation_matrix(const Automorphism& g) {
    const std::size_t n = g.parent().order();
    cmat M = cmat::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) M(i, g.apply_inverse_index(i)) = 1.0;
    return M;
}

cmat fiberization_matrix(const Lattice& lat) {
    const auto& group = lat.parent();
    const std::size_t n = group.order();
    const cmat D = dft_matrix(group);
    // Row (omega, s) of T is row (omega + s) of the DFT.
    cmat T(n, n);
    const auto m = lat.fiber_length();
    for (std::size_t w = 0; w < lat.fiber_count(); ++w) {
        for (std::size_t s = 0; s < m; ++s) {
            T.row(w * m + s) = D.row(group.index_of(group.add(lat.transversal()[w], lat.annihilator()[s])));
        }
    }
    return T;
}

cmat pi_matrix(const Automorphism& g, const Lattice& lat) {
    const std::size_t n = lat.parent().order();
    cmat M(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        cvec e = cvec::Zero(n);
        e[j] = 1.0;
        M.col(j) = pi_action(g, lat, FiberedSignal::unflatten(lat, e)).flatten();
    }
    return M;
}

}  // namespace gammaops
