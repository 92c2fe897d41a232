#include <gtest/gtest.h>

#include "gammaops/json_io.hpp"

using namespace gammaops;
using nlohmann::json;

namespace {

std::string error_path(const json& doc) {
    try {
        build_instance(parse_instance_spec(doc));
    } catch (const SpecError& e) {
        return e.path();
    }
    return "";
}

}  // namespace

TEST(Spec, ParsesDefaults) {
    const InstanceSpec s = parse_instance_spec(json::parse(R"({"moduli": [8], "lattice_generators": [[2]]})"));
    EXPECT_EQ(s.moduli, (std::vector<std::int64_t>{8}));
    EXPECT_EQ(s.seed, 0u);
    EXPECT_EQ(s.mode, Coverage::generators);
    EXPECT_FALSE(s.op.has_value());
    const Instance inst = build_instance(s);
    EXPECT_EQ(inst.lattice.elements().size(), 4u);
    EXPECT_EQ(inst.lattice.annihilator().size(), 2u);
    EXPECT_EQ(inst.lattice.transversal().size(), 4u);
}

TEST(Spec, ComplexEntries) {
    const InstanceSpec s = parse_instance_spec(json::parse(R"({"moduli": [2], "signal": [[1, 2], 3.5], "mode": "slow", "seed": 4})"));
    ASSERT_TRUE(s.signal.has_value());
    EXPECT_EQ((*s.signal)[0], cplx(1, 2));
    EXPECT_EQ((*s.signal)[1], cplx(3.5, 0));
    EXPECT_EQ(s.mode, Coverage::all_elements);
    EXPECT_EQ(s.seed, 4u);
}

TEST(Spec, ErrorPaths) {
    EXPECT_EQ(error_path(json::parse(R"({"lattice_generators": []})")), "moduli");
    EXPECT_EQ(error_path(json::parse(R"({"moduli": []})")), "moduli");
    EXPECT_EQ(error_path(json::parse(R"({"moduli": [8, 0]})")), "moduli[1]");
    EXPECT_EQ(error_path(json::parse(R"({"moduli": [8], "lattice_generators": [[1, 2]]})")), "lattice_generators[0]");
    EXPECT_EQ(error_path(json::parse(R"({"moduli": [8], "automorphisms": [[[3, 1]]]})")), "automorphisms[0]");
    EXPECT_EQ(error_path(json::parse(R"({"moduli": [8], "automorphisms": [[[3]], [[2]]]})")), "automorphisms[1]");
    EXPECT_EQ(error_path(json::parse(R"({"moduli": [8], "automorphisms": "x"})")), "automorphisms");
    EXPECT_EQ(error_path(json::parse(R"({"moduli": [2], "operator": [[1, 0], [0]]})")), "operator[1]");
    EXPECT_EQ(error_path(json::parse(R"({"moduli": [2], "operator": [[1, 0], [0, "a"]]})")), "operator[1][1]");
    EXPECT_EQ(error_path(json::parse(R"({"moduli": [2], "generators": [[1, 0], [1]]})")), "generators[1]");
    EXPECT_EQ(error_path(json::parse(R"({"moduli": [2], "signal": [1, 2, 3]})")), "signal");
    EXPECT_EQ(error_path(json::parse(R"({"moduli": [2], "seed": -1})")), "seed");
    EXPECT_EQ(error_path(json::parse(R"({"moduli": [2], "mode": "quick"})")), "mode");
    EXPECT_EQ(error_path(json::parse(R"([1, 2])")), "$");
}

TEST(Spec, LatticePreservation) {
    const Instance inst = build_instance(parse_instance_spec(
        json::parse(R"({"moduli": [2, 4], "lattice_generators": [[1, 0]], "automorphisms": [[[1, 0], [0, 3]], [[1, 0], [2, 1]]]})")));
    const json rep = lattice_report(inst);
    EXPECT_EQ(rep["preserves_lattice"], json::parse("[true, false]"));
    try {
        require_lattice_preserved(inst);
        FAIL();
    } catch (const SpecError& e) {
        EXPECT_EQ(e.path(), "automorphisms[1]");
    }
}

TEST(Reports, TrivialLattice) {
    const Instance inst = build_instance(parse_instance_spec(json::parse(R"({"moduli": [2], "lattice_generators": []})")));
    const json rep = lattice_report(inst);
    EXPECT_EQ(rep["lattice"], json::parse("[[0]]"));
    EXPECT_EQ(rep["annihilator"], json::parse("[[0], [1]]"));
    EXPECT_EQ(rep["transversal"], json::parse("[[0]]"));
}

TEST(Reports, MatrixRoundTrip) {
    cmat m(2, 2);
    m << cplx(1, 2), cplx(0, -1), cplx(3, 0), cplx(-0.5, 0.25);
    EXPECT_EQ(matrix_from_json(matrix_to_json(m), "m", 2, 2), m);
    const FiberedSignal F = FiberedSignal::zeros(build_instance(parse_instance_spec(json::parse(R"({"moduli": [8], "lattice_generators": [[2]]})"))).lattice);
    const json j = fibered_signal_to_json(F);
    ASSERT_EQ(j.size(), 4u);
    EXPECT_EQ(j[3]["omega"], json::parse("[3]"));
    EXPECT_EQ(j[3]["fiber"].size(), 2u);
}
