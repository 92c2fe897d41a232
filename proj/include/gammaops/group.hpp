/**
 * @file group.hpp
 * @brief Finite abelian groups, their duals, subgroups and automorphisms.
 *
 * A group R = Z_{N_1} x ... x Z_{N_d} is described by its moduli. The dual
 * group is identified with the same moduli, with the character pairing
 *
 *   <xi, x> = exp(2 pi i * sum_i xi_i x_i / N_i).
 *
 * Elements are enumerated lexicographically (first coordinate most
 * significant). Every index-based table in the library uses that order.
 */

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gammaops {

/// Which side of the duality an element lives on.
enum class Side { primal, dual };

struct GroupElement {
    std::vector<std::int64_t> coords;
    Side side = Side::primal;

    friend bool operator==(const GroupElement&, const GroupElement&) = default;
};

/// Raised when group data (moduli, elements, matrices) is inconsistent.
class GroupError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class FiniteAbelianGroup {
public:
    explicit FiniteAbelianGroup(std::vector<std::int64_t> moduli);

    const std::vector<std::int64_t>& moduli() const noexcept { return moduli_; }
    std::size_t rank() const noexcept { return moduli_.size(); }
    std::size_t order() const noexcept { return order_; }

    /// Element with the given coordinates, reduced modulo the moduli.
    GroupElement element(std::span<const std::int64_t> coords,
                         Side side = Side::primal) const;
    GroupElement element(std::initializer_list<std::int64_t> coords,
                         Side side = Side::primal) const {
        return element(std::span<const std::int64_t>(coords.begin(), coords.size()), side);
    }
    GroupElement zero(Side side = Side::primal) const;
    GroupElement at(std::size_t index, Side side = Side::primal) const;
    std::size_t index_of(const GroupElement& x) const;
    std::vector<GroupElement> elements(Side side = Side::primal) const;

    GroupElement add(const GroupElement& a, const GroupElement& b) const;
    GroupElement subtract(const GroupElement& a, const GroupElement& b) const;
    GroupElement negate(const GroupElement& a) const;

    /// Throws GroupError unless x is a reduced element of this group on `side`.
    void check(const GroupElement& x, Side side) const;

    /// Phase of <xi, x> as a numerator over phase_denominator(), in [0, L).
    std::int64_t pairing_phase(const GroupElement& xi, const GroupElement& x) const;
    std::int64_t phase_denominator() const noexcept { return lcm_; }

    friend bool operator==(const FiniteAbelianGroup& a, const FiniteAbelianGroup& b) {
        return a.moduli_ == b.moduli_;
    }

private:
    std::vector<std::int64_t> moduli_;
    std::vector<std::size_t> strides_;
    std::size_t order_ = 1;
    std::int64_t lcm_ = 1;
};

/// The character <xi, x>. Throws GroupError on side or group mismatch.
std::complex<double> pairing(const FiniteAbelianGroup& group,
                             const GroupElement& xi,
                             const GroupElement& x);

/**
 * A subgroup Lambda of R, together with its annihilator Lambda^perp in the
 * dual and a transversal Omega of dual / Lambda^perp.
 *
 * Omega holds the lexicographically smallest member of each coset, cosets
 * ordered by that member. Lambda^perp is sorted, and fiber coordinates are
 * indexed by position in it.
 */
class Lattice {
public:
    struct Reduction {
        GroupElement omega;
        GroupElement kappa;
        std::size_t omega_pos = 0;
        std::size_t kappa_pos = 0;
    };

    static Lattice from_generators(const FiniteAbelianGroup& parent,
                                   std::vector<GroupElement> generators);

    const FiniteAbelianGroup& parent() const noexcept { return parent_; }
    const std::vector<GroupElement>& generators() const noexcept { return generators_; }
    const std::vector<GroupElement>& elements() const noexcept { return elements_; }
    const std::vector<GroupElement>& annihilator() const noexcept { return annihilator_; }
    const std::vector<GroupElement>& transversal() const noexcept { return transversal_; }

    bool contains(const GroupElement& x) const;
    bool annihilates(const GroupElement& xi) const;

    /// Unique decomposition xi = omega + kappa with omega in Omega, kappa in Lambda^perp.
    Reduction reduce(const GroupElement& xi) const;

    /// Position of kappa within the sorted annihilator; throws if kappa is not in it.
    std::size_t annihilator_pos(const GroupElement& kappa) const;

    std::size_t fiber_count() const noexcept { return transversal_.size(); }
    std::size_t fiber_length() const noexcept { return annihilator_.size(); }

    friend bool operator==(const Lattice& a, const Lattice& b) {
        return a.parent_ == b.parent_ && a.elements_ == b.elements_;
    }

private:
    explicit Lattice(FiniteAbelianGroup parent) : parent_(std::move(parent)) {}

    FiniteAbelianGroup parent_;
    std::vector<GroupElement> generators_;
    std::vector<GroupElement> elements_;
    std::vector<GroupElement> annihilator_;
    std::vector<GroupElement> transversal_;
    std::vector<bool> member_;
    // Indexed by dual element index.
    std::vector<std::size_t> omega_pos_;
    std::vector<std::size_t> kappa_pos_;
    std::vector<std::ptrdiff_t> annihilator_pos_;
};

Lattice subgroup_from_generators(const FiniteAbelianGroup& parent,
                                 std::vector<GroupElement> generators);

Lattice::Reduction reduce_to_transversal(const Lattice& lat, const GroupElement& xi);

using IntMatrix = std::vector<std::vector<std::int64_t>>;

/**
 * An automorphism x -> A x of R given by an integer matrix, rows reduced
 * modulo the corresponding moduli. Construction checks that A is well
 * defined (A_ij N_j = 0 mod N_i) and bijective; the inverse matrix is
 * recovered from the inverse map's values on the unit vectors.
 */
class Automorphism {
public:
    Automorphism(FiniteAbelianGroup parent, IntMatrix matrix);
    static Automorphism identity(const FiniteAbelianGroup& parent);

    const FiniteAbelianGroup& parent() const noexcept { return parent_; }
    const IntMatrix& matrix() const noexcept { return matrix_; }
    const IntMatrix& inverse_matrix() const noexcept { return inverse_; }

    GroupElement apply(const GroupElement& x) const;
    GroupElement apply_inverse(const GroupElement& x) const;
    /// g* xi, defined by <g* xi, x> = <xi, g x>.
    GroupElement dual_apply(const GroupElement& xi) const;

    std::size_t apply_index(std::size_t x) const { return forward_[x]; }
    std::size_t apply_inverse_index(std::size_t x) const { return backward_[x]; }
    std::size_t dual_apply_index(std::size_t xi) const { return dual_[xi]; }

    /// this o other, i.e. x -> this(other(x)).
    Automorphism compose(const Automorphism& other) const;
    Automorphism inverse() const;
    bool is_identity() const;

    friend bool operator==(const Automorphism& a, const Automorphism& b) {
        return a.parent_ == b.parent_ && a.matrix_ == b.matrix_;
    }

private:
    Automorphism(FiniteAbelianGroup parent, IntMatrix matrix, bool validated);
    void build_tables();

    FiniteAbelianGroup parent_;
    IntMatrix matrix_;
    IntMatrix inverse_;
    std::vector<std::size_t> forward_;
    std::vector<std::size_t> backward_;
    std::vector<std::size_t> dual_;
};

GroupElement dual_action(const Automorphism& g, const GroupElement& xi);

/// gLambda = Lambda as sets.
bool preserves_lattice(const Automorphism& g, const Lattice& lat);

/// g* Lambda^perp = Lambda^perp as sets.
bool preserves_annihilator(const Automorphism& g, const Lattice& lat);

/// Diagonal unit automorphisms x_i -> u_i x_i preserving lat, identity first.
std::vector<Automorphism> automorphism_group_units(const FiniteAbelianGroup& parent,
                                                   const Lattice& lat);

/// Closure of `generators` under composition; the identity comes first.
std::vector<Automorphism> generated_group(const FiniteAbelianGroup& parent,
                                          const std::vector<Automorphism>& generators);

/// Throws GroupError naming the offending automorphism if any fails to preserve lat.
void require_preserved(const std::vector<Automorphism>& G, const Lattice& lat);
void require_preserved(const Automorphism& g, const Lattice& lat);

std::string to_string(const GroupElement& x);

}  // namespace gammaops
