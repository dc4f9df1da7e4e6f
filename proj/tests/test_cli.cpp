#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

using namespace cauchyhull;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "cauchyhull");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(CAUCHYHULL_DATA_DIR) + "/" + name; }

std::string out_path(const std::string& name) {
    const std::filesystem::path dir = CAUCHYHULL_CLI_OUT_DIR;
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

}  // namespace

TEST(Cli, DelaunaySummary) {
    const Result r = run_cli({"delaunay", "--surface", data("tetrahedron.json")});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "4 cells, 0 flips\n");
}

TEST(Cli, HullDocument) {
    const Result r = run_cli({"hull", "--rep", data("torus_rep.json"), "--dec", data("torus_dec.json"), "--ball-radius",
                              "3", "--max-radius", "10", "--json", "--out", out_path("torus_hull.json")});
    ASSERT_EQ(r.code, 0) << r.err;
    const DocumentEnvelope doc = parse_document(r.out);
    EXPECT_EQ(doc.kind, PayloadKind::Hull);
    EXPECT_EQ(doc.payload["fundamental"].size(), 2u);
    EXPECT_EQ(doc.provenance["parameters"]["ball_radius"], 3);
    EXPECT_EQ(dump_document(read_document(out_path("torus_hull.json"))), r.out);
}

TEST(Cli, NotStabilizedExitCode) {
    const Result r = run_cli({"hull", "--rep", data("torus_rep.json"), "--dec", data("torus_dec.json"), "--max-radius", "1"});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("NotStabilized"), std::string::npos);
    EXPECT_TRUE(r.out.empty());

    const Result budget =
        run_cli({"hull", "--rep", data("torus_rep.json"), "--dec", data("torus_dec.json"), "--max-points", "100"});
    EXPECT_EQ(budget.code, 3);
    EXPECT_NE(budget.err.find("exceeds 100 orbit points"), std::string::npos);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run_cli({}).code, 2);
    EXPECT_EQ(run_cli({"teleport"}).code, 2);
    EXPECT_EQ(run_cli({"hull", "--rep", data("torus_rep.json"), "--bogus"}).code, 2);
    EXPECT_EQ(run_cli({"hull"}).code, 2);
    EXPECT_EQ(run_cli({"delaunay", "--surface", data("missing.json")}).code, 2);
    EXPECT_EQ(run_cli({"hull", "--rep", data("torus_rep.json"), "--ball-radius", "x"}).code, 2);
    EXPECT_EQ(run_cli({"export-obj", "--rep", data("torus_rep.json")}).code, 2);
    EXPECT_EQ(run_cli({"orbit", "--rep", data("torus_rep.json"), "--point", "1", "2"}).code, 2);
    EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST(Cli, DomainErrors) {
    // A decoration document given where a surface is expected.
    Result r = run_cli({"delaunay", "--surface", data("torus_dec.json")});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("SchemaError"), std::string::npos);
    // Decoration of the wrong size for the representation.
    r = run_cli({"hull", "--rep", data("gamma2_rep.json"), "--dec", data("torus_dec.json")});
    EXPECT_EQ(r.code, 1);
}

TEST(Cli, Deterministic) {
    const std::vector<std::vector<std::string>> runs = {
        {"classify", "--rep", data("gamma2_rep.json"), "--json"},
        {"admissible", "--rep", data("torus_rep.json"), "--json"},
        {"orbit", "--rep", data("torus_rep.json"), "--ball-radius", "3", "--point", "5", "0", "0", "--json"},
        {"hull", "--rep", data("gamma2_rep.json"), "--dec", data("gamma2_dec.json"), "--json"},
        {"delaunay", "--surface", data("pillowcase.json"), "--json"},
        {"suspend", "--surface", data("tetrahedron.json"), "--json"},
        {"roundtrip", "--surface", data("pillowcase.json"), "--json"},
    };
    for (const auto& args : runs) {
        const Result a = run_cli(args);
        const Result b = run_cli(args);
        ASSERT_EQ(a.code, 0) << args[0] << ": " << a.err;
        EXPECT_EQ(a.out, b.out) << args[0];
        EXPECT_NO_THROW(parse_document(a.out)) << args[0];
    }
}

TEST(Cli, SummariesAndDocuments) {
    Result r = run_cli({"classify", "--rep", data("torus_rep.json")});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("a1: Hyperbolic"), std::string::npos);
    EXPECT_NE(r.out.find("peripheral 1: Parabolic"), std::string::npos);

    r = run_cli({"admissible", "--rep", data("gamma2_rep.json")});
    EXPECT_EQ(r.out.rfind("AdmissibleNecessaryConditions", 0), 0u);

    r = run_cli({"suspend", "--surface", data("tetrahedron.json"), "--out", out_path("tetra_suspended.json")});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(read_document(out_path("tetra_suspended.json")).kind, PayloadKind::SuspendedSpacetime);

    r = run_cli({"roundtrip", "--surface", data("square_torus.json"), "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const json payload = parse_document(r.out).payload;
    EXPECT_TRUE(payload["matched"].get<bool>());
    EXPECT_LT(payload["max_relative_error"].get<double>(), 1e-6);
}

TEST(Cli, ExportObj) {
    const std::string path = out_path("gamma2.obj");
    const Result r = run_cli({"export-obj", "--rep", data("gamma2_rep.json"), "--dec", data("gamma2_dec.json"), "--out", path});
    ASSERT_EQ(r.code, 0) << r.err;
    const Result h = run_cli({"hull", "--rep", data("gamma2_rep.json"), "--dec", data("gamma2_dec.json"), "--json"});
    const std::size_t faces = parse_document(h.out).payload["facets"].size();
    EXPECT_NE(r.out.find(std::to_string(faces) + " faces"), std::string::npos);
    EXPECT_EQ(run_cli({"export-obj", "--rep", data("gamma2_rep.json"), "--out", "/nonexistent/x.obj"}).code, 1);
}
