#include "gammaops/json_io.hpp"

#include <fstream>

namespace gammaops {

using nlohmann::json;

namespace {

std::string at(const std::string& path, std::size_t i) {
    return path + "[" + std::to_string(i) + "]";
}

std::int64_t integer_at(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw SpecError(path, "expected an integer");
    return j.get<std::int64_t>();
}

std::vector<std::int64_t> integer_list(const json& j, const std::string& path) {
    if (!j.is_array()) throw SpecError(path, "expected an array of integers");
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(integer_at(j[i], at(path, i)));
    return out;
}

cplx complex_from_json(const json& j, const std::string& path) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    throw SpecError(path, "expected a complex number [re, im]");
}

}  // namespace

InstanceSpec parse_instance_spec(const json& doc) {
    if (!doc.is_object()) throw SpecError("$", "instance spec must be a JSON object");
    InstanceSpec spec;

    if (!doc.contains("moduli")) throw SpecError("moduli", "missing");
    spec.moduli = integer_list(doc["moduli"], "moduli");
    if (spec.moduli.empty()) throw SpecError("moduli", "must be nonempty");
    for (std::size_t i = 0; i < spec.moduli.size(); ++i) {
        if (spec.moduli[i] < 1) throw SpecError(at("moduli", i), "moduli must be positive");
    }
    const std::size_t d = spec.moduli.size();
    std::size_t order = 1;
    for (auto n : spec.moduli) order *= static_cast<std::size_t>(n);

    if (doc.contains("lattice_generators")) {
        const json& gens = doc["lattice_generators"];
        if (!gens.is_array()) throw SpecError("lattice_generators", "expected an array of coordinate arrays");
        for (std::size_t i = 0; i < gens.size(); ++i) {
            auto coords = integer_list(gens[i], at("lattice_generators", i));
            if (coords.size() != d) {
                throw SpecError(at("lattice_generators", i), "expected " + std::to_string(d) + " coordinates");
            }
            spec.lattice_generators.push_back(std::move(coords));
        }
    }

    if (doc.contains("automorphisms")) {
        const json& autos = doc["automorphisms"];
        if (!autos.is_array()) throw SpecError("automorphisms", "expected an array of integer matrices");
        for (std::size_t i = 0; i < autos.size(); ++i) {
            const std::string path = at("automorphisms", i);
            if (!autos[i].is_array() || autos[i].size() != d) {
                throw SpecError(path, "expected a " + std::to_string(d) + "x" + std::to_string(d) + " integer matrix");
            }
            IntMatrix m;
            for (std::size_t r = 0; r < d; ++r) {
                auto row = integer_list(autos[i][r], at(path, r));
                if (row.size() != d) {
                    throw SpecError(path, "expected a " + std::to_string(d) + "x" + std::to_string(d) + " integer matrix");
                }
                m.push_back(std::move(row));
            }
            spec.automorphisms.push_back(std::move(m));
        }
    }

    if (doc.contains("operator")) spec.op = matrix_from_json(doc["operator"], "operator", order, order);

    if (doc.contains("generators")) {
        const json& gens = doc["generators"];
        if (!gens.is_array()) throw SpecError("generators", "expected an array of signals");
        for (std::size_t i = 0; i < gens.size(); ++i) {
            spec.generators.push_back(vector_from_json(gens[i], at("generators", i), order));
        }
    }

    if (doc.contains("signal")) spec.signal = vector_from_json(doc["signal"], "signal", order);

    if (doc.contains("seed")) {
        const auto seed = integer_at(doc["seed"], "seed");
        if (seed < 0) throw SpecError("seed", "must be non-negative");
        spec.seed = static_cast<std::uint64_t>(seed);
    }
    if (doc.contains("mode")) {
        const json& mode = doc["mode"];
        if (mode == "fast") {
            spec.mode = Coverage::generators;
        } else if (mode == "slow") {
            spec.mode = Coverage::all_elements;
        } else {
            throw SpecError("mode", "expected \"fast\" or \"slow\"");
        }
    }
    return spec;
}

InstanceSpec load_instance_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("$", "cannot open spec file " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw SpecError("$", std::string("invalid JSON: ") + e.what());
    }
    return parse_instance_spec(doc);
}

Instance build_instance(const InstanceSpec& spec) {
    const FiniteAbelianGroup group(spec.moduli);
    std::vector<GroupElement> gens;
    for (const auto& g : spec.lattice_generators) gens.push_back(group.element(g));
    Lattice lat = subgroup_from_generators(group, std::move(gens));
    std::vector<Automorphism> G;
    for (std::size_t i = 0; i < spec.automorphisms.size(); ++i) {
        try {
            G.emplace_back(group, spec.automorphisms[i]);
        } catch (const GroupError& e) {
            throw SpecError(at("automorphisms", i), e.what());
        }
    }
    return Instance{"spec", std::move(lat), std::move(G)};
}

void require_lattice_preserved(const Instance& inst) {
    for (std::size_t i = 0; i < inst.automorphisms.size(); ++i) {
        if (!preserves_lattice(inst.automorphisms[i], inst.lattice)) {
            throw SpecError(at("automorphisms", i), "automorphism does not preserve the lattice");
        }
    }
}

// ---------------------------------------------------------------------------

json complex_to_json(cplx z) {
    return json::array({z.real(), z.imag()});
}

json vector_to_json(const cvec& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v[i]));
    return out;
}

json matrix_to_json(const cmat& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_to_json(m.row(i).transpose()));
    return out;
}

cvec vector_from_json(const json& j, const std::string& path, std::size_t expected_length) {
    if (!j.is_array() || j.size() != expected_length) {
        throw SpecError(path, "expected " + std::to_string(expected_length) + " complex entries");
    }
    cvec v(static_cast<Eigen::Index>(expected_length));
    for (std::size_t i = 0; i < expected_length; ++i) v[static_cast<Eigen::Index>(i)] = complex_from_json(j[i], at(path, i));
    return v;
}

cmat matrix_from_json(const json& j, const std::string& path, std::size_t rows, std::size_t cols) {
    if (!j.is_array() || j.size() != rows) {
        throw SpecError(path, "expected a " + std::to_string(rows) + "x" + std::to_string(cols) + " complex matrix");
    }
    cmat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) m.row(static_cast<Eigen::Index>(r)) = vector_from_json(j[r], at(path, r), cols).transpose();
    return m;
}

json element_to_json(const GroupElement& x) {
    return x.coords;
}

json elements_to_json(const std::vector<GroupElement>& xs) {
    json out = json::array();
    for (const auto& x : xs) out.push_back(element_to_json(x));
    return out;
}

json lattice_report(const Instance& inst) {
    const Lattice& lat = inst.lattice;
    json preserves = json::array();
    for (const auto& g : inst.automorphisms) preserves.push_back(preserves_lattice(g, lat));
    return {{"moduli", lat.parent().moduli()},
            {"order", lat.parent().order()},
            {"lattice", elements_to_json(lat.elements())},
            {"annihilator", elements_to_json(lat.annihilator())},
            {"transversal", elements_to_json(lat.transversal())},
            {"lattice_order", lat.elements().size()},
            {"annihilator_order", lat.annihilator().size()},
            {"transversal_size", lat.transversal().size()},
            {"preserves_lattice", preserves}};
}

json fibered_signal_to_json(const FiberedSignal& F) {
    json out = json::array();
    for (std::size_t w = 0; w < F.fibers.size(); ++w) {
        out.push_back({{"omega", element_to_json(F.lattice.transversal()[w])}, {"fiber", vector_to_json(F.fibers[w])}});
    }
    return out;
}

json range_function_to_json(const RangeFunction& J) {
    json fibers = json::array();
    for (std::size_t w = 0; w < J.spaces.size(); ++w) {
        json basis = json::array();
        for (Eigen::Index c = 0; c < J.spaces[w].cols(); ++c) basis.push_back(vector_to_json(J.spaces[w].col(c)));
        fibers.push_back({{"omega", element_to_json(J.lattice.transversal()[w])},
                          {"dim", J.spaces[w].cols()},
                          {"basis", basis}});
    }
    json dims = json::array();
    for (const auto& [omega, dim] : dimension_function(J)) dims.push_back(dim);
    return {{"dimensions", dims}, {"fibers", fibers}};
}

json subspace_to_json(const Subspace& V) {
    json basis = json::array();
    for (std::size_t i = 0; i < V.dim(); ++i) basis.push_back(vector_to_json(V.basis_signal(i).values));
    return {{"dim", V.dim()}, {"basis", basis}};
}

json equivalence_report_to_json(const EquivalenceReport& report, const Lattice& lat, const std::vector<Automorphism>& covered) {
    json per_g = json::object();
    for (std::size_t i = 0; i < report.main_condition.size(); ++i) per_g["g" + std::to_string(i)] = report.main_condition[i];

    json per_omega = json::array();
    if (report.range_operator) {
        const RangeOperator& R = *report.range_operator;
        const auto norms = R.fiber_norms();
        std::vector<std::vector<double>> residuals;
        for (const auto& g : covered) residuals.push_back(main_condition_residuals(R, g));
        for (std::size_t w = 0; w < lat.fiber_count(); ++w) {
            json res = json::array();
            for (const auto& r : residuals) res.push_back(r[w]);
            per_omega.push_back({{"omega", element_to_json(lat.transversal()[w])},
                                 {"dim", R.domain.spaces[w].cols()},
                                 {"norm", norms[w]},
                                 {"main_residuals", res}});
        }
    }
    json out = {{"shift_preserving", report.shift_preserving},
                {"gamma_preserving", report.gamma_preserving},
                {"range_condition_main", per_g},
                {"characterization", report.characterization},
                {"equivalence_holds", report.equivalent},
                {"shift_residual", report.shift_residual},
                {"dilation_residual", report.dilation_residual},
                {"max_residual", std::max({report.shift_residual, report.dilation_residual, report.max_main_residual})},
                {"per_omega", per_omega}};
    if (!report.extraction_error.empty()) out["extraction_error"] = report.extraction_error;
    return out;
}

}  // namespace gammaops
