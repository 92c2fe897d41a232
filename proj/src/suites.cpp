#include "gammaops/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "gammaops/orbits.hpp"

namespace gammaops {

namespace {

// FNV-1a, so seeds do not depend on the standard library's std::hash.
std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t derive_seed(const SuiteOptions& opt, const Instance& inst, const char* suite) {
    return opt.seed * 0x9E3779B97F4A7C15ULL ^ fnv1a(inst.name) ^ (fnv1a(suite) << 1);
}

double max_abs(const cvec& v) {
    return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
}

double max_abs(const cmat& m) {
    return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

std::vector<Automorphism> full_group(const Instance& inst) {
    return generated_group(inst.lattice.parent(), inst.automorphisms);
}

struct SampledOperator {
    std::string kind;
    OperatorMatrix U;
    Subspace V;
};

// Four kinds per trial: Gamma-preserving by construction, the same with one
// range-operator entry moved by 1e-3, a dense random matrix, and a random
// shift-preserving operator on a Gamma-invariant domain.
std::vector<SampledOperator> operator_population(const Instance& inst, std::size_t trials, std::uint64_t seed) {
    const Lattice& lat = inst.lattice;
    const auto& G = inst.automorphisms;
    const FiniteAbelianGroup& group = lat.parent();
    std::mt19937_64 rng(seed);
    std::vector<SampledOperator> out;
    for (std::size_t i = 0; i < trials; ++i) {
        const std::uint64_t s = seed + 104729 * (i + 1);
        const RangeFunction J = gamma_range_function_generator(lat, G, s);
        const Subspace V = space_from_range_function(J);

        const RangeOperator positive = gamma_range_operator(lat, G, J, s + 1);
        out.push_back({"gamma_preserving", synthesize_operator(positive), V});

        const RangeOperator full = gamma_range_operator(lat, G, RangeFunction::full(lat), s + 2);
        const std::size_t site = sensitive_fiber(full, G).value_or(0);
        OperatorMatrix perturbed = synthesize_operator(perturb_range_operator(full, site, i, 1e-3));
        out.push_back({"perturbed", std::move(perturbed), Subspace::whole(group)});

        out.push_back({"generic", OperatorMatrix{group, random_matrix(group.order(), group.order(), rng), std::nullopt},
                       Subspace::whole(group)});

        out.push_back({"shift_preserving", synthesize_operator(random_range_operator(J, s + 3)), V});
    }
    for (auto& op : out) op.U.domain = op.V;
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

Instance make_instance(std::string name, std::vector<std::int64_t> moduli,
                       const std::vector<std::vector<std::int64_t>>& lattice_generators,
                       const std::vector<IntMatrix>& automorphisms) {
    const FiniteAbelianGroup group(std::move(moduli));
    std::vector<GroupElement> gens;
    for (const auto& g : lattice_generators) gens.push_back(group.element(g));
    Lattice lat = subgroup_from_generators(group, std::move(gens));
    std::vector<Automorphism> G;
    for (const auto& m : automorphisms) G.emplace_back(group, m);
    require_preserved(G, lat);
    return Instance{std::move(name), std::move(lat), std::move(G)};
}

std::vector<Instance> roster(std::size_t size_cap) {
    std::vector<Instance> all;
    all.push_back(make_instance("Z2", {2}, {}, {{{1}}}));
    all.push_back(make_instance("Z8", {8}, {{2}}, {{{3}}, {{5}}}));
    all.push_back(make_instance("Z12", {12}, {{3}}, {{{5}}, {{7}}}));
    all.push_back(make_instance("Z2xZ4", {2, 4}, {{0, 2}},
                                {{{1, 0}, {0, 3}}, {{1, 1}, {0, 1}}, {{1, 0}, {2, 1}}}));
    all.push_back(make_instance("Z4xZ4", {4, 4}, {{2, 0}, {0, 2}},
                                {{{3, 0}, {0, 1}}, {{0, 1}, {1, 0}}, {{1, 1}, {0, 1}}}));
    all.push_back(make_instance("Z5", {5}, {}, {{{2}}}));
    all.push_back(make_instance("Z9", {9}, {{3}}, {{{2}}}));
    std::vector<Instance> out;
    for (auto& inst : all) {
        if (inst.lattice.parent().order() <= size_cap) out.push_back(std::move(inst));
    }
    return out;
}

// ---------------------------------------------------------------------------

SuiteResult suite_fiberization_unitarity(const Instance& inst, std::size_t signals, const SuiteOptions& opt) {
    SuiteResult r{"fiberization_unitarity", inst.name, 0, 0, 0.0, {}};
    std::mt19937_64 rng(derive_seed(opt, inst, "unitarity"));
    for (std::size_t i = 0; i < signals; ++i) {
        const Signal f = random_signal(inst.lattice.parent(), rng);
        const FiberedSignal F = fiberize(f, inst.lattice);
        const double norm_gap = std::abs(F.norm() - f.norm());
        const double inverse_gap = max_abs(cvec(defiberize(F).values - f.values));
        const double res = std::max(norm_gap, inverse_gap);
        r.max_residual = std::max(r.max_residual, res);
        ++r.cases;
        if (res > opt.tol.transform) ++r.failures;
    }
    return r;
}

SuiteResult suite_fourier_identities(const Instance& inst, std::size_t signals, const SuiteOptions& opt) {
    SuiteResult r{"fourier_identities", inst.name, 0, 0, 0.0, {}};
    const Lattice& lat = inst.lattice;
    const FiniteAbelianGroup& group = lat.parent();
    const auto units = automorphism_group_units(group, lat);
    std::mt19937_64 rng(derive_seed(opt, inst, "fourier"));
    for (std::size_t i = 0; i < signals; ++i) {
        const Signal f = random_signal(group, rng);
        const Signal fhat = dft(f);
        for (const auto& k : lat.elements()) {
            const Signal lhs = dft(shift(f, k));
            double res = 0.0;
            for (std::size_t j = 0; j < group.order(); ++j) {
                const GroupElement xi = group.at(j, Side::dual);
                res = std::max(res, std::abs(lhs.values[j] - std::conj(pairing(group, xi, k)) * fhat.values[j]));
            }
            r.max_residual = std::max(r.max_residual, res);
            ++r.cases;
            if (res > opt.tol.transform) ++r.failures;
        }
        for (const auto& g : units) {
            const Signal lhs = dft(dilate(f, g));
            double res = 0.0;
            for (std::size_t j = 0; j < group.order(); ++j) {
                res = std::max(res, std::abs(lhs.values[j] - fhat.values[g.dual_apply_index(j)]));
            }
            r.max_residual = std::max(r.max_residual, res);
            ++r.cases;
            if (res > opt.tol.transform) ++r.failures;
        }
    }
    r.note = std::to_string(units.size()) + " unit automorphisms";
    return r;
}

SuiteResult suite_covariance(const Instance& inst, std::size_t signals, const SuiteOptions& opt) {
    SuiteResult r{"covariance", inst.name, 0, 0, 0.0, {}};
    const auto H = full_group(inst);
    std::mt19937_64 rng(derive_seed(opt, inst, "covariance"));
    for (std::size_t i = 0; i < signals; ++i) {
        const Signal f = random_signal(inst.lattice.parent(), rng);
        for (const auto& k : inst.lattice.elements()) {
            for (const auto& g : H) {
                const double res = covariance_residual(f, k, g, inst.lattice);
                r.max_residual = std::max(r.max_residual, res);
                ++r.cases;
                if (res > opt.tol.transform) ++r.failures;
            }
        }
    }
    return r;
}

SuiteResult suite_pi_action(const Instance& inst, std::size_t signals, const SuiteOptions& opt) {
    SuiteResult r{"pi_action", inst.name, 0, 0, 0.0, {}};
    const Lattice& lat = inst.lattice;
    const FiniteAbelianGroup& group = lat.parent();
    const auto H = full_group(inst);
    std::mt19937_64 rng(derive_seed(opt, inst, "pi"));
    auto record = [&](double res) {
        r.max_residual = std::max(r.max_residual, res);
        ++r.cases;
        if (res > opt.tol.transform) ++r.failures;
    };

    for (std::size_t i = 0; i < signals; ++i) {
        const FiberedSignal F = random_fibered_signal(lat, rng);
        for (const auto& g : H) {
            const cvec direct = pi_action(g, lat, F).flatten();
            const cvec conjugated = fiberize(dilate(defiberize(F), g), lat).flatten();
            record(max_abs(cvec(direct - conjugated)));
        }
    }

    // Representation laws on generators and on all 2- and 3-fold products.
    std::vector<Automorphism> gens = inst.automorphisms;
    gens.insert(gens.begin(), Automorphism::identity(group));
    for (const auto& a : gens) {
        for (const auto& b : gens) {
            const Automorphism ab = a.compose(b);
            record(max_abs(cmat(r_matrix(a, lat) * r_matrix(b, lat) - r_matrix(ab, lat))));
            record(max_abs(cmat(pi_matrix(a, lat) * pi_matrix(b, lat) - pi_matrix(ab, lat))));
            for (const auto& c : gens) {
                const Automorphism abc = ab.compose(c);
                record(max_abs(cmat(r_matrix(a, lat) * r_matrix(b, lat) * r_matrix(c, lat) - r_matrix(abc, lat))));
                record(max_abs(
                    cmat(pi_matrix(a, lat) * pi_matrix(b, lat) * pi_matrix(c, lat) - pi_matrix(abc, lat))));
            }
        }
    }

    // (k, g)(k', g') = (k + g k', g g') realized by T_k R_g.
    std::vector<GroupElement> ks = lat.generators();
    ks.insert(ks.begin(), group.zero());
    for (const auto& k : ks) {
        for (const auto& k2 : ks) {
            for (const auto& g : gens) {
                for (const auto& g2 : gens) {
                    const cmat lhs = shift_matrix(group, k) * dilation_matrix(g) * shift_matrix(group, k2) *
                                     dilation_matrix(g2);
                    const cmat rhs = shift_matrix(group, group.add(k, g.apply(k2))) * dilation_matrix(g.compose(g2));
                    record(max_abs(cmat(lhs - rhs)));
                }
            }
        }
    }
    return r;
}

SuiteResult suite_shift_invariant_spaces(const Instance& inst, std::size_t trials, const SuiteOptions& opt) {
    SuiteResult r{"shift_invariant_spaces", inst.name, 0, 0, 0.0, {}};
    const Lattice& lat = inst.lattice;
    const FiniteAbelianGroup& group = lat.parent();
    const std::size_t n = group.order();
    std::mt19937_64 rng(derive_seed(opt, inst, "prop11"));
    std::size_t non_invariant = 0;

    for (std::size_t i = 0; i < trials; ++i) {
        // Spaces generated by random signals: invariant, contain the generators, round trip J.
        const std::size_t count = 1 + rng() % 3;
        std::vector<Signal> gens;
        for (std::size_t j = 0; j < count; ++j) gens.push_back(random_signal(group, rng));
        const RangeFunction J = range_function_from_generators(gens, lat, opt.tol.rank);
        const Subspace V = space_from_range_function(J);
        const double si = shift_invariance_residual(V, lat, opt.coverage);
        double contains = 0.0;
        for (const auto& g : gens) contains = std::max(contains, V.residual(g.values) / g.norm());
        const bool round_trip = same_range_function(range_function_of(V, lat, opt.tol.rank), J, opt.tol.pipeline);
        r.max_residual = std::max({r.max_residual, si, contains});
        ++r.cases;
        if (si > opt.tol.pipeline || contains > opt.tol.pipeline || !round_trip) ++r.failures;

        // Random subspaces: invariant exactly when rebuilding from the range function is the identity.
        const std::size_t dim = n > 1 ? 1 + rng() % (n - 1) : 1;
        const Subspace W = Subspace::spanned_by(group, random_matrix(n, dim, rng), opt.tol.rank);
        const bool invariant = is_shift_invariant(W, lat, opt.coverage, opt.tol);
        const bool rebuilt = same_subspace(W.basis(),
                                           space_from_range_function(range_function_of(W, lat, opt.tol.rank)).basis(),
                                           opt.tol.pipeline);
        if (!invariant) ++non_invariant;
        ++r.cases;
        if (invariant != rebuilt) ++r.failures;
    }
    r.note = std::to_string(non_invariant) + " random subspaces failed the shift oracle";
    return r;
}

SuiteResult suite_gamma_invariant_spaces(const Instance& inst, std::size_t trials, const SuiteOptions& opt) {
    SuiteResult r{"gamma_invariant_spaces", inst.name, 0, 0, 0.0, {}};
    const Lattice& lat = inst.lattice;
    const auto& G = inst.automorphisms;
    const std::uint64_t seed = derive_seed(opt, inst, "prop14");
    std::size_t negatives = 0;

    auto run = [&](const Subspace& V, bool expect) {
        const bool lhs = is_gamma_invariant(V, lat, G, opt.coverage, opt.tol);
        const bool rhs = is_shift_invariant(V, lat, opt.coverage, opt.tol) &&
                         range_condition_gamma(range_function_of(V, lat, opt.tol.rank), G, opt.coverage, opt.tol);
        r.max_residual = std::max(r.max_residual, lhs ? dilation_invariance_residual(V, G, opt.coverage) : 0.0);
        if (!lhs) ++negatives;
        ++r.cases;
        if (lhs != rhs || (expect && !lhs)) ++r.failures;
    };

    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < trials; ++i) {
        run(space_from_range_function(gamma_range_function_generator(lat, G, seed + 2 * i)), true);
        run(space_from_range_function(random_range_function(lat, seed + 2 * i + 1)), false);
    }
    r.note = std::to_string(negatives) + " cases not Gamma-invariant";
    return r;
}

SuiteResult suite_range_operators(const Instance& inst, std::size_t trials, const SuiteOptions& opt) {
    SuiteResult r{"range_operators", inst.name, 0, 0, 0.0, {}};
    const Lattice& lat = inst.lattice;
    const FiniteAbelianGroup& group = lat.parent();
    const std::size_t n = group.order();
    const std::uint64_t seed = derive_seed(opt, inst, "prop12");
    std::mt19937_64 rng(seed);
    std::size_t rejected = 0;

    for (std::size_t i = 0; i < trials; ++i) {
        // Synthesized shift-preserving operators.
        const RangeFunction J = random_range_function(lat, seed + 3 * i);
        const RangeOperator Rin = random_range_operator(J, seed + 3 * i + 1);
        OperatorMatrix U = synthesize_operator(Rin);
        const Subspace V = space_from_range_function(J);
        U.domain = V;
        ++r.cases;
        try {
            const RangeOperator Rext = extract_range_operator(U, V, lat, opt.tol);
            const cmat Q = V.basis();
            const double round_trip = Q.cols() ? (synthesize_operator(Rext).entries * Q - U.entries * Q)
                                                     .colwise().norm().maxCoeff()
                                               : 0.0;
            double fiberwise = 0.0;
            for (std::size_t j = 0; j < V.dim(); ++j) {
                const Signal phi = V.basis_signal(j);
                const FiberedSignal lhs = fiberize(Signal{group, U.entries * phi.values}, lat);
                const FiberedSignal Tphi = fiberize(phi, lat);
                for (std::size_t w = 0; w < lat.fiber_count(); ++w) {
                    fiberwise = std::max(fiberwise, max_abs(cvec(lhs.fibers[w] - Rext.mats[w] * Tphi.fibers[w])));
                }
            }
            double unique = 0.0;
            for (std::size_t w = 0; w < lat.fiber_count(); ++w) {
                unique = std::max(unique, max_abs(cmat((Rext.mats[w] - Rin.mats[w]) * J.spaces[w])));
            }
            r.max_residual = std::max({r.max_residual, round_trip, fiberwise, unique});
            if (round_trip > opt.tol.pipeline || fiberwise > opt.tol.identity || unique > opt.tol.identity) {
                ++r.failures;
            }
        } catch (const std::exception&) {
            ++r.failures;
        }

        // Dense random operators: extraction fails exactly when the commutator oracle says so.
        const OperatorMatrix D{group, random_matrix(n, n, rng), std::nullopt};
        const bool preserving = is_shift_preserving(D, lat, opt.coverage, opt.tol);
        bool threw = false;
        try {
            extract_range_operator(D, Subspace::whole(group), lat, opt.tol);
        } catch (const NotShiftPreservingError&) {
            threw = true;
        }
        if (threw) ++rejected;
        ++r.cases;
        if (threw == preserving) ++r.failures;
    }
    r.note = std::to_string(rejected) + " dense operators rejected as not shift preserving";
    return r;
}

SuiteResult suite_gamma_preserving(const Instance& inst, std::size_t trials, const SuiteOptions& opt) {
    SuiteResult r{"gamma_preserving", inst.name, 0, 0, 0.0, {}};
    std::size_t negatives = 0;
    for (const auto& op : operator_population(inst, trials, derive_seed(opt, inst, "equivalence"))) {
        const EquivalenceReport t =
            theorem_main_equivalence(op.U, op.V, inst.lattice, inst.automorphisms, opt.coverage, opt.tol);
        ++r.cases;
        if (!t.gamma_preserving) ++negatives;
        if (op.kind == "gamma_preserving") {
            r.max_residual = std::max({r.max_residual, t.dilation_residual, t.max_main_residual});
        }
        if (!t.equivalent || (op.kind == "gamma_preserving" && !t.gamma_preserving)) ++r.failures;
    }
    r.note = std::to_string(negatives) + " operators not Gamma-preserving";
    return r;
}

SuiteResult suite_induced_operator(const Instance& inst, std::size_t trials, const SuiteOptions& opt) {
    SuiteResult r{"induced_operator", inst.name, 0, 0, 0.0, {}};
    const auto gs = opt.coverage == Coverage::generators ? inst.automorphisms : full_group(inst);
    std::size_t gap = 0;
    for (const auto& op : operator_population(inst, trials, derive_seed(opt, inst, "equivalence"))) {
        for (const auto& g : gs) {
            const double direct = dilation_commutator_residual(op.U, {g});
            const double induced = induced_commutator_residual(op.U, inst.lattice, g);
            const bool both_small = direct < opt.tol.identity && induced < opt.tol.identity;
            const bool both_large = direct >= kNonCommutingFloor && induced >= kNonCommutingFloor;
            if (both_small) r.max_residual = std::max({r.max_residual, direct, induced});
            ++r.cases;
            if (!both_small && !both_large) {
                ++r.failures;
                ++gap;
            }
        }
    }
    if (gap) r.note = std::to_string(gap) + " cases in the gap band";
    return r;
}

SuiteResult suite_norm_correspondence(const Instance& inst, std::size_t trials, const SuiteOptions& opt) {
    SuiteResult r{"norm_correspondence", inst.name, 0, 0, 0.0, {}};
    const Lattice& lat = inst.lattice;
    const std::uint64_t seed = derive_seed(opt, inst, "norm");
    auto check = [&](const OperatorMatrix& U, const Subspace& V) {
        ++r.cases;
        try {
            const RangeOperator R = extract_range_operator(U, V, lat, opt.tol);
            const auto norms = R.fiber_norms();
            const double fiber_max = norms.empty() ? 0.0 : *std::max_element(norms.begin(), norms.end());
            OperatorMatrix restricted = U;
            restricted.domain = V;
            const double res = std::abs(restricted.norm_on_domain() - fiber_max);
            r.max_residual = std::max(r.max_residual, res);
            if (res > opt.tol.pipeline) ++r.failures;
        } catch (const std::exception&) {
            ++r.failures;
        }
    };
    for (std::size_t i = 0; i < trials; ++i) {
        const RangeFunction J = random_range_function(lat, seed + 2 * i);
        check(synthesize_operator(random_range_operator(J, seed + 2 * i + 1)), space_from_range_function(J));
    }
    for (const auto& op : operator_population(inst, trials, derive_seed(opt, inst, "equivalence"))) {
        if (op.kind != "generic") check(op.U, op.V);
    }
    return r;
}

SuiteResult suite_shift_dilation(const Instance& inst, std::size_t seeds, const SuiteOptions& opt) {
    SuiteResult r{"shift_dilation", inst.name, 0, 0, 0.0, {}};
    const DilationSuiteReport c = shift_dilation_suite(inst.lattice, seeds, derive_seed(opt, inst, "dilation"), opt.tol);
    r.cases = c.space_cases + c.operator_cases;
    r.failures = c.space_disagreements + c.operator_disagreements;
    r.note = std::to_string(c.automorphisms) + " unit automorphisms; spaces " +
             (c.invariant_spaces_pass ? "pass" : "fail") + ", operators " +
             (c.preserving_operators_pass ? "pass" : "fail");
    return r;
}

// ---------------------------------------------------------------------------

SelftestRun run_selftest(std::uint64_t seed, std::size_t size_cap, const SuiteOptions& base) {
    using clock = std::chrono::steady_clock;
    SuiteOptions opt = base;
    opt.seed = seed;

    SelftestRun run;
    nlohmann::json instances = nlohmann::json::array();
    nlohmann::json suites = nlohmann::json::array();
    nlohmann::json timings = nlohmann::json::array();
    bool all = true;

    using SuiteFn = SuiteResult (*)(const Instance&, std::size_t, const SuiteOptions&);
    const std::vector<std::pair<SuiteFn, std::size_t>> plan = {
        {suite_fiberization_unitarity, 100}, {suite_fourier_identities, 20}, {suite_covariance, 5},
        {suite_pi_action, 50},               {suite_shift_invariant_spaces, 50}, {suite_gamma_invariant_spaces, 50},
        {suite_range_operators, 50},         {suite_gamma_preserving, 50},   {suite_induced_operator, 50},
        {suite_norm_correspondence, 50},     {suite_shift_dilation, 50},
    };

    for (const auto& inst : roster(size_cap)) {
        const Lattice& lat = inst.lattice;
        instances.push_back({{"name", inst.name},
                             {"moduli", lat.parent().moduli()},
                             {"lattice_order", lat.elements().size()},
                             {"annihilator_order", lat.annihilator().size()},
                             {"fibers", lat.fiber_count()},
                             {"automorphisms", inst.automorphisms.size()}});
        for (const auto& [fn, count] : plan) {
            const auto start = clock::now();
            const SuiteResult res = fn(inst, count, opt);
            const double seconds = std::chrono::duration<double>(clock::now() - start).count();
            all = all && res.passed();
            suites.push_back({{"suite", res.suite},
                              {"instance", res.instance},
                              {"passed", res.passed()},
                              {"cases", res.cases},
                              {"failures", res.failures},
                              {"max_residual", res.max_residual},
                              {"note", res.note}});
            timings.push_back({{"suite", res.suite}, {"instance", res.instance}, {"seconds", seconds}});
        }
    }

    run.payload = {{"tool", "gammaops"},
                   {"version", kToolVersion},
                   {"seed", seed},
                   {"size_cap", size_cap},
                   {"coverage", opt.coverage == Coverage::generators ? "generators" : "all_elements"},
                   {"tolerances",
                    {{"transform", opt.tol.transform},
                     {"identity", opt.tol.identity},
                     {"pipeline", opt.tol.pipeline},
                     {"rank", opt.tol.rank}}},
                   {"instances", instances},
                   {"suites", suites},
                   {"all_passed", all}};
    run.timings = timings;
    run.all_passed = all;
    return run;
}

}  // namespace gammaops
