/**
 * @file json_io.hpp
 * @brief JSON instance specs and reports.
 *
 * Instance spec:
 *
 *   { "moduli": [8], "lattice_generators": [[2]], "automorphisms": [ [[3]] ],
 *     "operator": [[ [re,im], ... ], ...],      optional, |R| x |R|
 *     "generators": [ [[re,im], ...], ... ],   optional signals spanning V
 *     "signal": [[re,im], ...],                optional
 *     "seed": 0, "mode": "fast" | "slow" }
 *
 * Complex numbers are [re, im] pairs (a bare number is read as real).
 * Matrices are row-major. Signals are listed in group enumeration order.
 */

#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "gammaops/suites.hpp"

namespace gammaops {

/// Invalid input; `path` names the offending field, e.g. "automorphisms[0]".
class SpecError : public std::invalid_argument {
public:
    SpecError(std::string path, const std::string& message)
        : std::invalid_argument(path + ": " + message), path_(std::move(path)), message_(message) {}
    const std::string& path() const noexcept { return path_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string path_;
    std::string message_;
};

struct InstanceSpec {
    std::vector<std::int64_t> moduli;
    std::vector<std::vector<std::int64_t>> lattice_generators;
    std::vector<IntMatrix> automorphisms;
    std::optional<cmat> op;
    std::vector<cvec> generators;
    std::optional<cvec> signal;
    std::uint64_t seed = 0;
    Coverage mode = Coverage::generators;
};

InstanceSpec parse_instance_spec(const nlohmann::json& doc);
InstanceSpec load_instance_spec(const std::string& path);

/// Group, lattice and automorphisms of a spec. Automorphisms are validated as
/// automorphisms but not required to preserve the lattice.
Instance build_instance(const InstanceSpec& spec);
/// Throws SpecError at "automorphisms[i]" for the first automorphism not preserving the lattice.
void require_lattice_preserved(const Instance& inst);

nlohmann::json complex_to_json(cplx z);
nlohmann::json vector_to_json(const cvec& v);
nlohmann::json matrix_to_json(const cmat& m);
cvec vector_from_json(const nlohmann::json& j, const std::string& path, std::size_t expected_length);
cmat matrix_from_json(const nlohmann::json& j, const std::string& path, std::size_t expected_rows,
                      std::size_t expected_cols);

nlohmann::json element_to_json(const GroupElement& x);
nlohmann::json elements_to_json(const std::vector<GroupElement>& xs);

/// Lambda, Lambda^perp, Omega and per-automorphism preservation flags.
nlohmann::json lattice_report(const Instance& inst);
/// One { "omega": coords, "fiber": [[re,im], ...] } record per omega, in Omega order.
nlohmann::json fibered_signal_to_json(const FiberedSignal& F);
/// Per-omega dimension and basis vectors.
nlohmann::json range_function_to_json(const RangeFunction& J);
nlohmann::json subspace_to_json(const Subspace& V);
/// { "shift_preserving", "gamma_preserving", "range_condition_main": {"g0": bool, ...},
///   "max_residual", "per_omega": [...], "equivalence_holds", ... }
nlohmann::json equivalence_report_to_json(const EquivalenceReport& report, const Lattice& lat,
                                      const std::vector<Automorphism>& covered);

}  // namespace gammaops
