#include "gammaops/group.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>
#include <sstream>

namespace gammaops {

namespace {

std::int64_t mod(std::int64_t a, std::int64_t n) {
    const std::int64_t r = a % n;
    return r < 0 ? r + n : r;
}

}  // namespace

// ---------------------------------------------------------------------------
// FiniteAbelianGroup

FiniteAbelianGroup::FiniteAbelianGroup(std::vector<std::int64_t> moduli)
    : moduli_(std::move(moduli)) {
    if (moduli_.empty()) throw GroupError("group needs at least one modulus");
    for (auto n : moduli_) {
        if (n < 1) throw GroupError("moduli must be >= 1, got " + std::to_string(n));
    }
    strides_.assign(moduli_.size(), 1);
    for (std::size_t i = moduli_.size(); i-- > 0;) {
        strides_[i] = order_;
        order_ *= static_cast<std::size_t>(moduli_[i]);
        lcm_ = std::lcm(lcm_, moduli_[i]);
    }
}

GroupElement FiniteAbelianGroup::element(std::span<const std::int64_t> coords, Side side) const {
    if (coords.size() != rank()) {
        throw GroupError("element has " + std::to_string(coords.size()) +
                         " coordinates, group rank is " + std::to_string(rank()));
    }
    GroupElement x{std::vector<std::int64_t>(coords.begin(), coords.end()), side};
    for (std::size_t i = 0; i < rank(); ++i) x.coords[i] = mod(x.coords[i], moduli_[i]);
    return x;
}

GroupElement FiniteAbelianGroup::zero(Side side) const {
    return GroupElement{std::vector<std::int64_t>(rank(), 0), side};
}

GroupElement FiniteAbelianGroup::at(std::size_t index, Side side) const {
    if (index >= order_) throw GroupError("element index out of range");
    GroupElement x{std::vector<std::int64_t>(rank()), side};
    for (std::size_t i = 0; i < rank(); ++i) {
        x.coords[i] = static_cast<std::int64_t>(index / strides_[i]);
        index %= strides_[i];
    }
    return x;
}

std::size_t FiniteAbelianGroup::index_of(const GroupElement& x) const {
    check(x, x.side);
    std::size_t index = 0;
    for (std::size_t i = 0; i < rank(); ++i) index += static_cast<std::size_t>(x.coords[i]) * strides_[i];
    return index;
}

std::vector<GroupElement> FiniteAbelianGroup::elements(Side side) const {
    std::vector<GroupElement> out;
    out.reserve(order_);
    for (std::size_t i = 0; i < order_; ++i) out.push_back(at(i, side));
    return out;
}

GroupElement FiniteAbelianGroup::add(const GroupElement& a, const GroupElement& b) const {
    check(a, a.side);
    check(b, a.side);
    GroupElement out = a;
    for (std::size_t i = 0; i < rank(); ++i) out.coords[i] = mod(a.coords[i] + b.coords[i], moduli_[i]);
    return out;
}

GroupElement FiniteAbelianGroup::subtract(const GroupElement& a, const GroupElement& b) const {
    return add(a, negate(b));
}

GroupElement FiniteAbelianGroup::negate(const GroupElement& a) const {
    check(a, a.side);
    GroupElement out = a;
    for (std::size_t i = 0; i < rank(); ++i) out.coords[i] = mod(-a.coords[i], moduli_[i]);
    return out;
}

void FiniteAbelianGroup::check(const GroupElement& x, Side side) const {
    if (x.side != side) throw GroupError("element " + to_string(x) + " is on the wrong side of the duality");
    if (x.coords.size() != rank()) throw GroupError("element " + to_string(x) + " does not belong to this group");
    for (std::size_t i = 0; i < rank(); ++i) {
        if (x.coords[i] < 0 || x.coords[i] >= moduli_[i]) {
            throw GroupError("element " + to_string(x) + " is not reduced");
        }
    }
}

std::int64_t FiniteAbelianGroup::pairing_phase(const GroupElement& xi, const GroupElement& x) const {
    check(xi, Side::dual);
    check(x, Side::primal);
    std::int64_t phase = 0;
    for (std::size_t i = 0; i < rank(); ++i) {
        const std::int64_t term = mod(xi.coords[i] * x.coords[i], moduli_[i]) * (lcm_ / moduli_[i]);
        phase = mod(phase + term, lcm_);
    }
    return phase;
}

std::complex<double> pairing(const FiniteAbelianGroup& group, const GroupElement& xi, const GroupElement& x) {
    const auto phase = group.pairing_phase(xi, x);
    if (phase == 0) return {1.0, 0.0};
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(phase) /
                         static_cast<double>(group.phase_denominator());
    return std::polar(1.0, angle);
}

// ---------------------------------------------------------------------------
// Lattice

Lattice Lattice::from_generators(const FiniteAbelianGroup& parent, std::vector<GroupElement> generators) {
    Lattice lat(parent);
    const std::size_t n = parent.order();
    for (auto& g : generators) {
        parent.check(g, Side::primal);
    }
    lat.generators_ = std::move(generators);

    lat.member_.assign(n, false);
    std::deque<GroupElement> queue{parent.zero()};
    lat.member_[0] = true;
    while (!queue.empty()) {
        const GroupElement x = queue.front();
        queue.pop_front();
        for (const auto& g : lat.generators_) {
            GroupElement y = parent.add(x, g);
            const std::size_t iy = parent.index_of(y);
            if (!lat.member_[iy]) {
                lat.member_[iy] = true;
                queue.push_back(std::move(y));
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (lat.member_[i]) lat.elements_.push_back(parent.at(i));
    }

    // Annihilator by exhaustive scan of the dual; checking the generators suffices.
    lat.annihilator_pos_.assign(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        GroupElement xi = parent.at(i, Side::dual);
        const bool trivial = std::all_of(lat.generators_.begin(), lat.generators_.end(),
                                         [&](const GroupElement& k) { return parent.pairing_phase(xi, k) == 0; });
        if (trivial) {
            lat.annihilator_pos_[i] = static_cast<std::ptrdiff_t>(lat.annihilator_.size());
            lat.annihilator_.push_back(std::move(xi));
        }
    }

    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    lat.omega_pos_.assign(n, unset);
    lat.kappa_pos_.assign(n, unset);
    for (std::size_t i = 0; i < n; ++i) {
        if (lat.omega_pos_[i] != unset) continue;
        const GroupElement omega = parent.at(i, Side::dual);
        const std::size_t pos = lat.transversal_.size();
        lat.transversal_.push_back(omega);
        for (std::size_t k = 0; k < lat.annihilator_.size(); ++k) {
            const std::size_t j = parent.index_of(parent.add(omega, lat.annihilator_[k]));
            lat.omega_pos_[j] = pos;
            lat.kappa_pos_[j] = k;
        }
    }
    return lat;
}

bool Lattice::contains(const GroupElement& x) const {
    return member_[parent_.index_of(x)];
}

bool Lattice::annihilates(const GroupElement& xi) const {
    parent_.check(xi, Side::dual);
    return annihilator_pos_[parent_.index_of(xi)] >= 0;
}

Lattice::Reduction Lattice::reduce(const GroupElement& xi) const {
    parent_.check(xi, Side::dual);
    const std::size_t i = parent_.index_of(xi);
    Reduction r{transversal_[omega_pos_[i]], annihilator_[kappa_pos_[i]], omega_pos_[i], kappa_pos_[i]};
    return r;
}

std::size_t Lattice::annihilator_pos(const GroupElement& kappa) const {
    parent_.check(kappa, Side::dual);
    const auto pos = annihilator_pos_[parent_.index_of(kappa)];
    if (pos < 0) throw GroupError(to_string(kappa) + " is not in the annihilator");
    return static_cast<std::size_t>(pos);
}

Lattice subgroup_from_generators(const FiniteAbelianGroup& parent, std::vector<GroupElement> generators) {
    return Lattice::from_generators(parent, std::move(generators));
}

Lattice::Reduction reduce_to_transversal(const Lattice& lat, const GroupElement& xi) {
    return lat.reduce(xi);
}

// ---------------------------------------------------------------------------
// Automorphism

Automorphism::Automorphism(FiniteAbelianGroup parent, IntMatrix matrix)
    : Automorphism(std::move(parent), std::move(matrix), false) {}

Automorphism::Automorphism(FiniteAbelianGroup parent, IntMatrix matrix, bool validated)
    : parent_(std::move(parent)), matrix_(std::move(matrix)) {
    const std::size_t d = parent_.rank();
    const auto& N = parent_.moduli();
    if (!validated) {
        if (matrix_.size() != d) {
            throw GroupError("automorphism matrix has " + std::to_string(matrix_.size()) +
                             " rows, expected " + std::to_string(d));
        }
        for (std::size_t i = 0; i < d; ++i) {
            if (matrix_[i].size() != d) {
                throw GroupError("automorphism matrix row " + std::to_string(i) + " has " +
                                 std::to_string(matrix_[i].size()) + " entries, expected " + std::to_string(d));
            }
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            matrix_[i][j] = mod(matrix_[i][j], N[i]);
            if (mod(matrix_[i][j] * N[j], N[i]) != 0) {
                throw GroupError("automorphism matrix entry (" + std::to_string(i) + "," + std::to_string(j) +
                                 ") is not well defined: A_ij * N_j must vanish mod N_i");
            }
        }
    }
    build_tables();
}

Automorphism Automorphism::identity(const FiniteAbelianGroup& parent) {
    const std::size_t d = parent.rank();
    IntMatrix m(d, std::vector<std::int64_t>(d, 0));
    for (std::size_t i = 0; i < d; ++i) m[i][i] = 1;
    return Automorphism(parent, std::move(m), true);
}

void Automorphism::build_tables() {
    const std::size_t n = parent_.order();
    const std::size_t d = parent_.rank();
    const auto& N = parent_.moduli();
    constexpr std::size_t unset = static_cast<std::size_t>(-1);

    forward_.assign(n, 0);
    backward_.assign(n, unset);
    std::vector<std::int64_t> y(d);
    for (std::size_t ix = 0; ix < n; ++ix) {
        const GroupElement x = parent_.at(ix);
        for (std::size_t i = 0; i < d; ++i) {
            std::int64_t acc = 0;
            for (std::size_t j = 0; j < d; ++j) acc = mod(acc + matrix_[i][j] * x.coords[j], N[i]);
            y[i] = acc;
        }
        const std::size_t iy = parent_.index_of(parent_.element(y));
        if (backward_[iy] != unset) {
            throw GroupError("automorphism matrix is not injective: " + to_string(parent_.at(backward_[iy])) +
                             " and " + to_string(x) + " have the same image");
        }
        forward_[ix] = iy;
        backward_[iy] = ix;
    }

    // Column j of the inverse matrix is g^{-1}(e_j).
    inverse_.assign(d, std::vector<std::int64_t>(d, 0));
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<std::int64_t> e(d, 0);
        e[j] = 1;
        const GroupElement pre = parent_.at(backward_[parent_.index_of(parent_.element(e))]);
        for (std::size_t i = 0; i < d; ++i) inverse_[i][j] = pre.coords[i];
    }

    // (g* xi)_j = sum_i xi_i * A_ij * N_j / N_i  (mod N_j).
    dual_.assign(n, 0);
    for (std::size_t ixi = 0; ixi < n; ++ixi) {
        const GroupElement xi = parent_.at(ixi, Side::dual);
        for (std::size_t j = 0; j < d; ++j) {
            std::int64_t acc = 0;
            for (std::size_t i = 0; i < d; ++i) {
                const std::int64_t coeff = (matrix_[i][j] * N[j]) / N[i];
                acc = mod(acc + mod(xi.coords[i] * mod(coeff, N[j]), N[j]), N[j]);
            }
            y[j] = acc;
        }
        dual_[ixi] = parent_.index_of(parent_.element(y, Side::dual));
    }
}

GroupElement Automorphism::apply(const GroupElement& x) const {
    return parent_.at(forward_[parent_.index_of(x)]);
}

GroupElement Automorphism::apply_inverse(const GroupElement& x) const {
    return parent_.at(backward_[parent_.index_of(x)]);
}

GroupElement Automorphism::dual_apply(const GroupElement& xi) const {
    parent_.check(xi, Side::dual);
    return parent_.at(dual_[parent_.index_of(xi)], Side::dual);
}

Automorphism Automorphism::compose(const Automorphism& other) const {
    if (!(parent_ == other.parent_)) throw GroupError("cannot compose automorphisms of different groups");
    const std::size_t d = parent_.rank();
    IntMatrix m(d, std::vector<std::int64_t>(d, 0));
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            std::int64_t acc = 0;
            for (std::size_t l = 0; l < d; ++l) acc = mod(acc + matrix_[i][l] * other.matrix_[l][j], parent_.moduli()[i]);
            m[i][j] = acc;
        }
    }
    return Automorphism(parent_, std::move(m), true);
}

Automorphism Automorphism::inverse() const {
    return Automorphism(parent_, inverse_, true);
}

bool Automorphism::is_identity() const {
    return *this == identity(parent_);
}

GroupElement dual_action(const Automorphism& g, const GroupElement& xi) {
    return g.dual_apply(xi);
}

bool preserves_lattice(const Automorphism& g, const Lattice& lat) {
    if (!(g.parent() == lat.parent())) throw GroupError("automorphism and lattice live on different groups");
    return std::all_of(lat.elements().begin(), lat.elements().end(),
                       [&](const GroupElement& k) { return lat.contains(g.apply(k)); });
}

bool preserves_annihilator(const Automorphism& g, const Lattice& lat) {
    if (!(g.parent() == lat.parent())) throw GroupError("automorphism and lattice live on different groups");
    return std::all_of(lat.annihilator().begin(), lat.annihilator().end(),
                       [&](const GroupElement& s) { return lat.annihilates(g.dual_apply(s)); });
}

std::vector<Automorphism> automorphism_group_units(const FiniteAbelianGroup& parent, const Lattice& lat) {
    const std::size_t d = parent.rank();
    const auto& N = parent.moduli();
    std::vector<std::vector<std::int64_t>> units(d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::int64_t u = 0; u < N[i]; ++u) {
            if (std::gcd(u, N[i]) == 1) units[i].push_back(u);
        }
    }
    // Put u = 1 first in every coordinate so the identity leads.
    for (auto& list : units) {
        std::stable_partition(list.begin(), list.end(), [](std::int64_t u) { return u == 1; });
    }

    std::vector<Automorphism> out;
    std::vector<std::size_t> pick(d, 0);
    while (true) {
        IntMatrix m(d, std::vector<std::int64_t>(d, 0));
        for (std::size_t i = 0; i < d; ++i) m[i][i] = units[i][pick[i]];
        Automorphism g(parent, std::move(m));
        if (preserves_lattice(g, lat)) out.push_back(std::move(g));

        std::size_t i = d;
        while (i > 0) {
            --i;
            if (++pick[i] < units[i].size()) break;
            pick[i] = 0;
            if (i == 0) return out;
        }
    }
}

std::vector<Automorphism> generated_group(const FiniteAbelianGroup& parent, const std::vector<Automorphism>& generators) {
    std::vector<Automorphism> group{Automorphism::identity(parent)};
    for (std::size_t head = 0; head < group.size(); ++head) {
        for (const auto& g : generators) {
            Automorphism h = g.compose(group[head]);
            if (std::find(group.begin(), group.end(), h) == group.end()) group.push_back(std::move(h));
        }
    }
    return group;
}

void require_preserved(const Automorphism& g, const Lattice& lat) {
    if (!preserves_lattice(g, lat)) throw GroupError("automorphism does not preserve the lattice");
}

void require_preserved(const std::vector<Automorphism>& G, const Lattice& lat) {
    for (std::size_t i = 0; i < G.size(); ++i) {
        if (!preserves_lattice(G[i], lat)) {
            throw GroupError("automorphism " + std::to_string(i) + " does not preserve the lattice");
        }
    }
}

std::string to_string(const GroupElement& x) {
    std::ostringstream os;
    os << (x.side == Side::dual ? "xi(" : "(");
    for (std::size_t i = 0; i < x.coords.size(); ++i) {
        if (i) os << ",";
        os << x.coords[i];
    }
    os << ")";
    return os.str();
}

}  // namespace gammaops
