#include "gammaops/orbits.hpp"

#include <algorithm>

namespace gammaops {

Transport transport(const Automorphism& h, const Lattice& lat, std::size_t omega_pos) {
    const auto r = lat.reduce(h.dual_apply(lat.transversal()[omega_pos]));
    return Transport{r.omega_pos, r_matrix(h, lat) * translation_matrix(lat, r.kappa)};
}

OrbitStructure::OrbitStructure(const Lattice& lat, const std::vector<Automorphism>& G)
    : group_(generated_group(lat.parent(), G)) {
    require_preserved(G, lat);
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    orbit_of_.assign(lat.fiber_count(), unset);
    for (std::size_t w = 0; w < lat.fiber_count(); ++w) {
        if (orbit_of_[w] != unset) continue;
        const std::size_t id = reps_.size();
        reps_.push_back(w);
        for (const auto& h : group_) {
            orbit_of_[lat.reduce(h.dual_apply(lat.transversal()[w])).omega_pos] = id;
        }
    }
}

std::size_t OrbitStructure::orbit_size(std::size_t orbit) const {
    return static_cast<std::size_t>(std::count(orbit_of_.begin(), orbit_of_.end(), orbit));
}

cmat random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    cmat M(rows, cols);
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
        for (Eigen::Index i = 0; i < M.rows(); ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            M(i, j) = cplx{re, im};
        }
    }
    return M;
}

cvec random_vector(std::size_t n, std::mt19937_64& rng) {
    return random_matrix(n, 1, rng).col(0);
}

Signal random_signal(const FiniteAbelianGroup& group, std::mt19937_64& rng) {
    return Signal{group, random_vector(group.order(), rng), Side::primal};
}

FiberedSignal random_fibered_signal(const Lattice& lat, std::mt19937_64& rng) {
    return FiberedSignal::unflatten(lat, random_vector(lat.parent().order(), rng));
}

}  // namespace gammaops
