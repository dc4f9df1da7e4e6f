#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "cauchyhull/fixtures.hpp"
#include "cauchyhull/io.hpp"

using namespace cauchyhull;

namespace {

DocumentEnvelope round_trip(const DocumentEnvelope& doc) { return parse_document(dump_document(doc)); }

void expect_same(const AffineRepresentation& a, const AffineRepresentation& b) {
    EXPECT_EQ(a.presentation.kind, b.presentation.kind);
    EXPECT_EQ(a.presentation.genus, b.presentation.genus);
    EXPECT_EQ(a.presentation.punctures, b.presentation.punctures);
    EXPECT_EQ(a.presentation.generators, b.presentation.generators);
    EXPECT_EQ(a.presentation.peripherals, b.presentation.peripherals);
    EXPECT_EQ(a.presentation.relation, b.presentation.relation);
    ASSERT_EQ(a.images.size(), b.images.size());
    for (std::size_t i = 0; i < a.images.size(); ++i) {
        EXPECT_TRUE(a.images[i].linear.m == b.images[i].linear.m);
        EXPECT_TRUE(a.images[i].translation == b.images[i].translation);
    }
}

template <class F>
DocumentError capture(F&& f) {
    try {
        f();
    } catch (const DocumentError& e) {
        return e;
    }
    ADD_FAILURE() << "no DocumentError thrown";
    return DocumentError(ErrorCode::IoError, "none");
}

std::string rep_text() { return dump_document(make_document(PayloadKind::Representation, to_json(fixtures::punctured_torus()))); }

std::filesystem::path temp_file(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST(Documents, RepresentationRoundTrip) {
    for (const auto& rep : {fixtures::punctured_torus(), fixtures::gamma2()}) {
        const DocumentEnvelope doc = round_trip(make_document(PayloadKind::Representation, to_json(rep)));
        EXPECT_EQ(doc.kind, PayloadKind::Representation);
        expect_same(rep, representation_from_json(doc.payload));
    }
}

TEST(Documents, AffineAndFreeBasisRoundTrip) {
    auto affine = fixtures::punctured_torus();
    affine.images[0].translation = MinkVec(0.25, -1.0 / 3.0, 1e-17);
    expect_same(affine, representation_from_json(round_trip(make_document(PayloadKind::Representation, to_json(affine))).payload));

    const auto free = susp_surface(fixtures::square_torus()).representation;
    ASSERT_EQ(free.presentation.kind, GroupPresentation::Kind::FreeBasis);
    expect_same(free, representation_from_json(to_json(free)));
}

TEST(Documents, DecorationAndSurfaceRoundTrip) {
    const Decoration d = fixtures::gamma2_decoration(1.0, 2.0, 0.5);
    const Decoration back = decoration_from_json(round_trip(make_document(PayloadKind::Decoration, to_json(d))).payload);
    ASSERT_EQ(back.points.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(back.points[i] == d.points[i]);

    for (const ConeSurface& s : {fixtures::tetrahedron(), fixtures::pillowcase(), fixtures::square_torus()}) {
        const ConeSurface t = cone_surface_from_json(round_trip(make_document(PayloadKind::ConeSurface, to_json(s))).payload);
        EXPECT_EQ(t.vertex_count, s.vertex_count);
        EXPECT_EQ(t.gluing, s.gluing);
        ASSERT_EQ(t.triangles.size(), s.triangles.size());
        for (std::size_t i = 0; i < s.triangles.size(); ++i) {
            EXPECT_EQ(t.triangles[i].vertices, s.triangles[i].vertices);
            EXPECT_EQ(t.triangles[i].lengths, s.triangles[i].lengths);
        }
    }
}

TEST(Documents, DumpIsStable) {
    const std::string once = rep_text();
    EXPECT_EQ(dump_document(parse_document(once)), once);
}

TEST(Documents, ProvenanceRecorded) {
    const DocumentEnvelope doc = parse_document(dump_document(
        make_document(PayloadKind::Report, json{{"x", 1}}, json{{"ball_radius", 4}})));
    EXPECT_EQ(doc.provenance["tool"], kToolVersion);
    EXPECT_EQ(doc.provenance["parameters"]["ball_radius"], 4);
}

TEST(Documents, ParseErrorHasLocation) {
    const DocumentError e = capture([] { parse_document("{\n  \"format\": \"cauchyhull\",\n  \"version\": ]\n}"); });
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 14u);
    EXPECT_NE(std::string(e.what()).find("line 3, column 14"), std::string::npos);

    const std::string full = rep_text();
    EXPECT_EQ(capture([&] { parse_document(full.substr(0, full.size() / 2)); }).code(), ErrorCode::ParseError);
}

TEST(Documents, SchemaErrorNamesPointer) {
    json j = json::parse(rep_text());
    j["payload"]["generators"][1]["linear"][0][0] = 5.0;
    const DocumentError bad_gen = capture([&] { parse_document(j.dump()); });
    EXPECT_EQ(bad_gen.code(), ErrorCode::SchemaError);
    EXPECT_EQ(bad_gen.pointer(), "/payload/generators/1/linear");
    EXPECT_NE(std::string(bad_gen.what()).find("b1"), std::string::npos);

    json k = json::parse(rep_text());
    k["payload"]["generators"][2].erase("linear");
    EXPECT_EQ(capture([&] { parse_document(k.dump()); }).pointer(), "/payload/generators/2/linear");

    json m = json::parse(rep_text());
    m["payload"]["generators"][0]["translation"][1] = "x";
    EXPECT_EQ(capture([&] { parse_document(m.dump()); }).pointer(), "/payload/generators/0/translation/1");

    json n = json::parse(rep_text());
    n["kind"] = "teapot";
    EXPECT_EQ(capture([&] { parse_document(n.dump()); }).pointer(), "/kind");
}

TEST(Documents, SchemaErrorInSurface) {
    json j = to_json(make_document(PayloadKind::ConeSurface, to_json(fixtures::tetrahedron())));
    j["payload"]["gluing"][0] = 7;
    const DocumentError e = capture([&] { parse_document(j.dump()); });
    EXPECT_EQ(e.code(), ErrorCode::SchemaError);

    json d = to_json(make_document(PayloadKind::Decoration, to_json(fixtures::punctured_torus_decoration())));
    d["payload"]["points"][0] = json::array({1.0, 0.0, 0.5});
    EXPECT_EQ(capture([&] { parse_document(d.dump()); }).pointer(), "/payload/points/0");
}

TEST(Documents, VersionError) {
    json j = json::parse(rep_text());
    j["version"] = "2.0";
    EXPECT_EQ(capture([&] { parse_document(j.dump()); }).code(), ErrorCode::VersionError);
    j["version"] = "1.3";
    EXPECT_NO_THROW(parse_document(j.dump()));
    j["format"] = "other";
    EXPECT_EQ(capture([&] { parse_document(j.dump()); }).code(), ErrorCode::VersionError);
}

TEST(Documents, FilesAndKinds) {
    const auto path = temp_file("cauchyhull_io_rep.json");
    write_document(make_document(PayloadKind::Representation, to_json(fixtures::gamma2())), path.string());
    EXPECT_EQ(read_document(path.string()).kind, PayloadKind::Representation);
    EXPECT_EQ(capture([&] { read_document_of(path.string(), PayloadKind::Decoration); }).pointer(), "/kind");
    std::filesystem::remove(path);
    try {
        read_document("/nonexistent/dir/x.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IoError);
    }
}

TEST(Documents, ShippedFixturesLoad) {
    const std::filesystem::path dir = CAUCHYHULL_DATA_DIR;
    std::size_t seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        EXPECT_NO_THROW(read_document(entry.path().string())) << entry.path();
        ++seen;
    }
    EXPECT_GE(seen, 7u);
}

TEST(Documents, DerivedPayloadsValidate) {
    const auto rep = fixtures::punctured_torus();
    const HullSurface h = stabilize_hull(rep, fixtures::punctured_torus_decoration(), 2, 8);
    const json hj = to_json(h, rep.presentation);
    EXPECT_EQ(hj["facets"].size(), h.facets.size());
    EXPECT_EQ(hj["fundamental"].size(), h.fundamental.size());
    EXPECT_NO_THROW(round_trip(make_document(PayloadKind::Hull, hj)));

    const SuspendedSpacetime st = susp_surface(fixtures::tetrahedron());
    const DocumentEnvelope sd = round_trip(make_document(PayloadKind::SuspendedSpacetime, to_json(st)));
    expect_same(st.representation, representation_from_json(sd.payload["representation"]));
    const AffineRepresentation gluing = representation_from_json(sd.payload["gluing_representation"]);
    expect_same(st.gluing_representation, gluing);
    EXPECT_EQ(sd.payload["cells"].size(), st.cells.size());
    for (const json& g : sd.payload["gluings"]) {
        const Word w = parse_word(gluing.presentation, g["word"].get<std::string>());
        EXPECT_EQ(w.size(), g["tree"].get<bool>() ? 0u : 1u);
    }

    const json cj = to_json(delaunay(fixtures::pillowcase()));
    EXPECT_EQ(cj["cells"].size(), 2u);
    EXPECT_EQ(cj["cells"][0]["opposite"].size(), 4u);
}

TEST(Obj, FacetComplex) {
    const auto rep = fixtures::punctured_torus();
    const HullSurface h = stabilize_hull(rep, fixtures::punctured_torus_decoration(), 2, 8);
    std::set<std::size_t> used;
    for (const auto& f : h.facets) used.insert(f.vertices.begin(), f.vertices.end());

    std::istringstream in(obj_text(h));
    std::string line;
    std::vector<std::array<double, 3>> verts;
    std::vector<std::vector<std::size_t>> faces;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "v") {
            std::array<double, 3> v{};
            ls >> v[0] >> v[1] >> v[2];
            verts.push_back(v);
        } else if (tag == "f") {
            std::vector<std::size_t> f;
            for (std::size_t k; ls >> k;) f.push_back(k);
            faces.push_back(f);
        }
    }
    ASSERT_EQ(verts.size(), used.size());
    ASSERT_EQ(faces.size(), h.facets.size());
    std::size_t i = 0;
    for (std::size_t v : used) {
        const MinkVec& p = h.orbit.point(v);
        EXPECT_EQ(verts[i][0], p.x);
        EXPECT_EQ(verts[i][1], p.t);
        EXPECT_EQ(verts[i][2], p.y);
        ++i;
    }
    const std::vector<std::size_t> order(used.begin(), used.end());
    for (std::size_t f = 0; f < faces.size(); ++f) {
        ASSERT_EQ(faces[f].size(), h.facets[f].vertices.size());
        for (std::size_t k = 0; k < faces[f].size(); ++k) {
            ASSERT_GE(faces[f][k], 1u);
            EXPECT_EQ(order[faces[f][k] - 1], h.facets[f].vertices[k]);
        }
        // Past-facing: the OBJ normal (a cross b in (x, t, y)) has negative t part.
        const auto& a = verts[faces[f][0] - 1];
        const auto& b = verts[faces[f][1] - 1];
        const auto& c = verts[faces[f][2] - 1];
        const double ux = b[0] - a[0], uy = b[2] - a[2], vx = c[0] - a[0], vy = c[2] - a[2];
        const double up = uy * vx - ux * vy;
        EXPECT_LT(up, 0.0) << "facet " << f;
    }
}

TEST(Obj, WriteFailureIsIoError) {
    const auto rep = fixtures::gamma2();
    const HullSurface h = stabilize_hull(rep, fixtures::gamma2_decoration(), 2, 8);
    try {
        write_obj(h, "/nonexistent/dir/out.obj");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IoError);
    }
    const auto path = temp_file("cauchyhull_io.obj");
    write_obj(h, path.string());
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    EXPECT_EQ(buf.str(), obj_text(h));
    std::filesystem::remove(path);
}

TEST(Obj, SingleFacet) {
    OrbitPointSet o;
    for (int k = 0; k < 3; ++k) {
        const double a = 2.0 * std::numbers::pi * k / 3.0;
        o.entries.push_back({{}, MinkVec(1.0, std::cos(a), std::sin(a)), static_cast<std::size_t>(k)});
    }
    const std::string text = obj_text(ep_surface(o));
    std::size_t v = 0, f = 0;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        v += line.rfind("v ", 0) == 0;
        f += line.rfind("f ", 0) == 0;
    }
    EXPECT_EQ(v, 3u);
    EXPECT_EQ(f, 1u);
}
