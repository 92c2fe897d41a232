// gammaops: lattice, fiberization, range-function and operator analyses on
// finite abelian groups. Exit status 0 = pass, 1 = invalid input, 2 = failed check.

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "gammaops/json_io.hpp"

using nlohmann::json;
using namespace gammaops;

namespace {

enum Exit { kPass = 0, kInvalid = 1, kFailed = 2 };

struct Options {
    std::string spec_path;
    bool json_out = false;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    bool slow = false;
    std::optional<double> tol;
    std::size_t size_cap = 64;
};

Tolerances tolerances(const Options& o) {
    Tolerances t;
    if (o.tol) {
        t.identity = *o.tol;
        t.pipeline = 10.0 * *o.tol;
    }
    return t;
}

json tolerances_json(const Tolerances& t) {
    return {{"transform", t.transform}, {"identity", t.identity}, {"pipeline", t.pipeline}, {"rank", t.rank}};
}

json instance_echo(const InstanceSpec& s) {
    json autos = json::array();
    for (const auto& m : s.automorphisms) autos.push_back(m);
    return {{"moduli", s.moduli},
            {"lattice_generators", s.lattice_generators},
            {"automorphisms", autos},
            {"has_operator", s.op.has_value()},
            {"generators", s.generators.size()},
            {"has_signal", s.signal.has_value()},
            {"seed", s.seed},
            {"mode", s.mode == Coverage::generators ? "fast" : "slow"}};
}

// What a subcommand hands back: the result body, a verdict and summary lines.
struct Outcome {
    json result;
    bool passed = true;
    std::vector<std::string> summary;
};

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string fmt(double x) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(2) << x;
    return os.str();
}

void emit(const Options& o, const std::string& command, const json& body, const Outcome& out, double seconds) {
    json report = body;
    report["tool"] = "gammaops";
    report["version"] = kToolVersion;
    report["command"] = command;
    report["passed"] = out.passed;
    report["timings"] = {{"seconds", seconds}};

    if (!o.out_path.empty()) {
        std::ofstream f(o.out_path);
        f << report.dump(2) << '\n';
    }
    if (o.json_out) {
        std::cout << report.dump(2) << '\n';
        return;
    }
    for (const auto& line : out.summary) std::cout << line << '\n';
    std::cout << (out.passed ? "PASS" : "FAIL") << '\n';
}

// Shift-invariant space generated by the spec's generator signals, or all of L^2(R).
Subspace domain_of(const InstanceSpec& spec, const Lattice& lat) {
    if (spec.generators.empty()) return Subspace::whole(lat.parent());
    std::vector<Signal> gens;
    for (const auto& g : spec.generators) gens.push_back(Signal{lat.parent(), g, Side::primal});
    return space_from_range_function(range_function_from_generators(gens, lat));
}

Outcome run_lattice(const InstanceSpec&, const Instance& inst, const Options&) {
    Outcome out;
    out.result = lattice_report(inst);
    const Lattice& lat = inst.lattice;
    out.summary.push_back("|R| = " + std::to_string(lat.parent().order()) + ", |Lambda| = " +
                          std::to_string(lat.elements().size()) + ", |Lambda^perp| = " +
                          std::to_string(lat.annihilator().size()) + ", |Omega| = " +
                          std::to_string(lat.transversal().size()));
    for (std::size_t i = 0; i < inst.automorphisms.size(); ++i) {
        out.summary.push_back("automorphisms[" + std::to_string(i) + "] preserves Lambda: " +
                              yes_no(preserves_lattice(inst.automorphisms[i], lat)));
    }
    return out;
}

Outcome run_analyze(const InstanceSpec& spec, const Instance& inst, const Options& o) {
    if (!spec.op) throw SpecError("operator", "missing");
    require_lattice_preserved(inst);
    const Lattice& lat = inst.lattice;
    const Tolerances tol = tolerances(o);
    const Subspace V = domain_of(spec, lat);

    OperatorMatrix U{lat.parent(), *spec.op, std::nullopt};
    if (V.dim() < lat.parent().order()) U.domain = V;

    EquivalenceReport rep;
    try {
        rep = theorem_main_equivalence(U, V, lat, inst.automorphisms, spec.mode, tol);
    } catch (const PreconditionError& e) {
        throw SpecError("generators", e.what());
    }

    Outcome out;
    out.result = equivalence_report_to_json(rep, lat, inst.automorphisms);
    out.result["domain_dim"] = V.dim();
    out.passed = rep.equivalent;
    out.summary.push_back("domain dim " + std::to_string(V.dim()) + " of " + std::to_string(lat.parent().order()));
    out.summary.push_back("shift preserving: " + yes_no(rep.shift_preserving) + " (residual " + fmt(rep.shift_residual) + ")");
    if (!rep.extraction_error.empty()) out.summary.push_back("range operator: " + rep.extraction_error);
    for (std::size_t i = 0; i < rep.main_condition.size(); ++i) {
        out.summary.push_back("range condition for automorphisms[" + std::to_string(i) + "]: " + yes_no(rep.main_condition[i]));
    }
    out.summary.push_back("gamma preserving: " + yes_no(rep.gamma_preserving) + " (residual " + fmt(rep.dilation_residual) + ")");
    out.summary.push_back("equivalence holds: " + yes_no(rep.equivalent));
    return out;
}

Outcome run_fiberize(const InstanceSpec& spec, const Instance& inst, const Options& o) {
    if (!spec.signal) throw SpecError("signal", "missing");
    const Lattice& lat = inst.lattice;
    const Tolerances tol = tolerances(o);
    const Signal f{lat.parent(), *spec.signal, Side::primal};
    const FiberedSignal F = fiberize(f, lat);
    const Signal back = defiberize(F);

    const double norm_gap = std::abs(F.norm() - f.norm());
    const double roundtrip = (back.values - f.values).norm();
    Outcome out;
    out.result = {{"fibers", fibered_signal_to_json(F)},
                  {"signal_norm", f.norm()},
                  {"fibered_norm", F.norm()},
                  {"norm_gap", norm_gap},
                  {"roundtrip_residual", roundtrip}};
    out.passed = norm_gap <= tol.transform * std::max(1.0, f.norm()) && roundtrip <= tol.transform * std::max(1.0, f.norm());
    out.summary.push_back(std::to_string(F.fibers.size()) + " fibers of length " + std::to_string(lat.fiber_length()));
    out.summary.push_back("norm gap " + fmt(norm_gap) + ", round trip residual " + fmt(roundtrip));
    return out;
}

Outcome run_range_function(const InstanceSpec& spec, const Instance& inst, const Options& o) {
    if (spec.generators.empty()) throw SpecError("generators", "missing");
    require_lattice_preserved(inst);
    const Lattice& lat = inst.lattice;
    const Tolerances tol = tolerances(o);
    std::vector<Signal> gens;
    for (const auto& g : spec.generators) gens.push_back(Signal{lat.parent(), g, Side::primal});

    const RangeFunction J = range_function_from_generators(gens, lat);
    const Subspace V = space_from_range_function(J);
    const Subspace span = Subspace::spanned_by(gens);
    const bool shift_inv = is_shift_invariant(V, lat, spec.mode, tol);
    const bool generators_span_v = span == V;
    const bool cond = range_condition_gamma(J, inst.automorphisms, spec.mode, tol);
    const bool gamma_inv = is_gamma_invariant(V, lat, inst.automorphisms, spec.mode, tol);

    Outcome out;
    out.result = {{"range_function", range_function_to_json(J)},
                  {"space_dim", V.dim()},
                  {"span_dim", span.dim()},
                  {"span_is_shift_invariant", generators_span_v},
                  {"shift_invariant", shift_inv},
                  {"range_condition_gamma", cond},
                  {"gamma_invariant", gamma_inv},
                  {"equivalence_holds", gamma_inv == (shift_inv && cond)}};
    out.passed = shift_inv && gamma_inv == (shift_inv && cond);
    std::string dims;
    for (const auto& [omega, d] : dimension_function(J)) dims += (dims.empty() ? "" : " ") + std::to_string(d);
    out.summary.push_back("dim J(omega): " + dims);
    out.summary.push_back("generated space dim " + std::to_string(V.dim()) + ", span of generators dim " +
                          std::to_string(span.dim()));
    out.summary.push_back("J(omega) = r_g J(g* omega): " + yes_no(cond) + ", gamma invariant: " + yes_no(gamma_inv));
    return out;
}

Outcome run_synthesize(const InstanceSpec& spec, const Instance& inst, const Options& o) {
    require_lattice_preserved(inst);
    const Lattice& lat = inst.lattice;
    const Tolerances tol = tolerances(o);
    const std::uint64_t seed = o.seed.value_or(spec.seed);

    RangeFunction J = RangeFunction::full(lat);
    if (!spec.generators.empty()) {
        std::vector<Signal> gens;
        for (const auto& g : spec.generators) gens.push_back(Signal{lat.parent(), g, Side::primal});
        J = range_function_from_generators(gens, lat);
        if (!range_condition_gamma(J, inst.automorphisms, Coverage::all_elements, tol)) {
            throw SpecError("generators", "generated space is not invariant under the automorphisms");
        }
    } else {
        J = gamma_range_function_generator(lat, inst.automorphisms, seed);
    }
    const RangeOperator R = gamma_range_operator(lat, inst.automorphisms, J, seed);
    const OperatorMatrix U = synthesize_operator(R);
    const Subspace V = space_from_range_function(J);
    const EquivalenceReport rep = theorem_main_equivalence(U, V, lat, inst.automorphisms, spec.mode, tol);

    Outcome out;
    out.result = {{"seed", seed},
                  {"range_function", range_function_to_json(J)},
                  {"operator", matrix_to_json(U.entries)},
                  {"domain_dim", V.dim()},
                  {"analysis", equivalence_report_to_json(rep, lat, inst.automorphisms)}};
    out.passed = rep.equivalent && rep.gamma_preserving;
    out.summary.push_back("synthesized operator on a domain of dim " + std::to_string(V.dim()));
    out.summary.push_back("shift preserving: " + yes_no(rep.shift_preserving) + ", gamma preserving: " +
                          yes_no(rep.gamma_preserving) + ", equivalence holds: " + yes_no(rep.equivalent));
    return out;
}

int run_selftest(const Options& o) {
    if (o.size_cap < 2) {
        std::cerr << "error: size-cap: must be at least 2\n";
        return kInvalid;
    }
    SuiteOptions opt;
    opt.coverage = o.slow ? Coverage::all_elements : Coverage::generators;
    opt.tol = tolerances(o);
    const SelftestRun run = gammaops::run_selftest(o.seed.value_or(0), o.size_cap, opt);

    json report = run.payload;
    report["command"] = "selftest";
    report["timings"] = run.timings;
    if (!o.out_path.empty()) {
        std::ofstream f(o.out_path);
        f << report.dump(2) << '\n';
    }
    if (o.json_out) {
        std::cout << report.dump(2) << '\n';
    } else {
        std::vector<std::string> names;
        std::map<std::string, std::map<std::string, bool>> cell;
        for (const auto& inst : run.payload["instances"]) names.push_back(inst["name"]);
        std::vector<std::string> suites;
        for (const auto& s : run.payload["suites"]) {
            const std::string name = s["suite"];
            if (cell.find(name) == cell.end()) suites.push_back(name);
            cell[name][s["instance"]] = s["passed"];
        }
        std::cout << std::left << std::setw(28) << "suite";
        for (const auto& n : names) std::cout << std::setw(8) << n;
        std::cout << '\n';
        for (const auto& s : suites) {
            std::cout << std::setw(28) << s;
            for (const auto& n : names) std::cout << std::setw(8) << (cell[s][n] ? "pass" : "FAIL");
            std::cout << '\n';
        }
        std::cout << (run.all_passed ? "PASS" : "FAIL") << '\n';
    }
    return run.all_passed ? kPass : kFailed;
}

void report_error(const Options& o, const std::string& path, const std::string& message) {
    if (o.json_out) {
        std::cout << json{{"tool", "gammaops"}, {"version", kToolVersion}, {"error", {{"path", path}, {"message", message}}}}
                         .dump(2)
                  << '\n';
    }
    std::cerr << "error: " << path << ": " << message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gamma-invariant spaces and Gamma-preserving operators on finite abelian groups"};
    app.require_subcommand(1);
    app.fallthrough();

    Options o;
    std::uint64_t seed = 0;
    double tol = 0.0;
    app.add_option("--spec", o.spec_path, "instance spec (JSON)");
    app.add_flag("--json", o.json_out, "print the JSON report to standard output");
    app.add_option("--out", o.out_path, "write the JSON report to this path");
    auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides the spec)");
    app.add_flag("--slow", o.slow, "check commutation against every group element");
    auto* tol_opt = app.add_option("--tol", tol, "identity tolerance; pipeline tolerance is 10x")->check(CLI::PositiveNumber);

    using Runner = Outcome (*)(const InstanceSpec&, const Instance&, const Options&);
    const std::vector<std::tuple<std::string, std::string, Runner>> commands = {
        {"lattice", "Lambda, Lambda^perp, Omega and automorphism checks", run_lattice},
        {"analyze-operator", "test an operator for the shift and Gamma characterizations", run_analyze},
        {"fiberize", "fiberize the spec's signal", run_fiberize},
        {"range-function", "range function of the space generated by the spec's generators", run_range_function},
        {"synthesize", "build a seeded Gamma-preserving operator", run_synthesize},
    };
    for (const auto& [name, help, fn] : commands) app.add_subcommand(name, help);
    auto* selftest = app.add_subcommand("selftest", "run all property suites over the built-in roster");
    selftest->add_option("--size-cap", o.size_cap, "largest group order to include");

    CLI11_PARSE(app, argc, argv);
    if (*seed_opt) o.seed = seed;
    if (*tol_opt) o.tol = tol;

    if (selftest->parsed()) return run_selftest(o);

    for (const auto& [name, help, fn] : commands) {
        if (!app.got_subcommand(name)) continue;
        if (o.spec_path.empty()) {
            report_error(o, "--spec", "required");
            return kInvalid;
        }
        try {
            const auto start = std::chrono::steady_clock::now();
            InstanceSpec spec = load_instance_spec(o.spec_path);
            if (o.slow) spec.mode = Coverage::all_elements;
            if (o.seed) spec.seed = *o.seed;
            const Instance inst = build_instance(spec);
            const Outcome out = fn(spec, inst, o);
            const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            const json body = {{"instance", instance_echo(spec)},
                               {"tolerances", tolerances_json(tolerances(o))},
                               {"result", out.result}};
            emit(o, name, body, out, seconds);
            return out.passed ? kPass : kFailed;
        } catch (const SpecError& e) {
            report_error(o, e.path(), e.message());
            return kInvalid;
        } catch (const std::invalid_argument& e) {
            report_error(o, "$", e.what());
            return kInvalid;
        }
    }
    return kInvalid;
}
