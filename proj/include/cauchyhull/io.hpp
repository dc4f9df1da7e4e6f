#pragma once

// JSON documents (a versioned envelope around one payload) and OBJ export.

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cauchyhull/decoration.hpp"
#include "cauchyhull/error.hpp"
#include "cauchyhull/flatsurf.hpp"
#include "cauchyhull/holonomy.hpp"
#include "cauchyhull/hull.hpp"
#include "cauchyhull/minkowski.hpp"
#include "cauchyhull/suspension.hpp"

namespace cauchyhull {

using json = nlohmann::json;

inline constexpr const char* kFormatName = "cauchyhull";
inline constexpr const char* kFormatVersion = "1.0";
inline constexpr const char* kToolVersion = "cauchyhull 1.0.0";
/// Generators read from documents must satisfy m^T J m = J to this level.
inline constexpr double kDocumentIsometryTolerance = 1e-6;

enum class PayloadKind { Representation, Decoration, ConeSurface, Hull, SuspendedSpacetime, Report };

inline const char* to_string(PayloadKind k) {
    switch (k) {
        case PayloadKind::Representation: return "representation";
        case PayloadKind::Decoration: return "decoration";
        case PayloadKind::ConeSurface: return "cone_surface";
        case PayloadKind::Hull: return "hull";
        case PayloadKind::SuspendedSpacetime: return "suspended_spacetime";
        case PayloadKind::Report: return "report";
    }
    return "?";
}

inline std::optional<PayloadKind> payload_kind(const std::string& s) {
    for (PayloadKind k : {PayloadKind::Representation, PayloadKind::Decoration, PayloadKind::ConeSurface,
                          PayloadKind::Hull, PayloadKind::SuspendedSpacetime, PayloadKind::Report}) {
        if (s == to_string(k)) return k;
    }
    return std::nullopt;
}

/// Error with the location it refers to: line and column for ParseError, a
/// JSON pointer for SchemaError.
class DocumentError : public Error {
public:
    DocumentError(ErrorCode code, const std::string& what, std::size_t line = 0, std::size_t column = 0,
                  std::string pointer = {})
        : Error(code, what), line_(line), column_(column), pointer_(std::move(pointer)) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string pointer_;
};

struct DocumentEnvelope {
    std::string version = kFormatVersion;
    PayloadKind kind = PayloadKind::Report;
    json payload = json::object();
    json provenance = json::object();
};

namespace detail {

[[noreturn]] inline void schema_error(const std::string& pointer, const std::string& msg) {
    throw DocumentError(ErrorCode::SchemaError, (pointer.empty() ? "/" : pointer) + ": " + msg, 0, 0,
                        pointer.empty() ? "/" : pointer);
}

inline const json& member(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) schema_error(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) schema_error(path + "/" + key, "missing required member");
    return *it;
}

inline double number(const json& j, const std::string& path) {
    if (!j.is_number()) schema_error(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) schema_error(path, "expected a finite number");
    return v;
}

inline std::size_t index(const json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() < 0) schema_error(path, "expected a non-negative integer");
    return j.get<std::size_t>();
}

inline const json& array(const json& j, const std::string& path, std::optional<std::size_t> size = std::nullopt) {
    if (!j.is_array()) schema_error(path, "expected an array");
    if (size && j.size() != *size) schema_error(path, "expected " + std::to_string(*size) + " entries");
    return j;
}

inline std::string text(const json& j, const std::string& path) {
    if (!j.is_string()) schema_error(path, "expected a string");
    return j.get<std::string>();
}

inline MinkVec vec3(const json& j, const std::string& path) {
    array(j, path, 3);
    return {number(j[0], path + "/0"), number(j[1], path + "/1"), number(j[2], path + "/2")};
}

inline Eigen::Matrix3d mat3(const json& j, const std::string& path) {
    array(j, path, 3);
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r) {
        const std::string row = path + "/" + std::to_string(r);
        array(j[r], row, 3);
        for (int c = 0; c < 3; ++c) m(r, c) = number(j[r][c], row + "/" + std::to_string(c));
    }
    return m;
}

inline Word word(const GroupPresentation& p, const json& j, const std::string& path) {
    try {
        return parse_word(p, text(j, path));
    } catch (const DocumentError&) {
        throw;
    } catch (const Error& e) {
        schema_error(path, e.what());
    }
}

inline std::pair<std::size_t, std::size_t> line_column(const std::string& s, std::size_t byte) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < byte && i < s.size(); ++i) {
        if (s[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

}  // namespace detail

inline json to_json(const MinkVec& v) { return json::array({v.t, v.x, v.y}); }

inline json to_json(const Eigen::Matrix3d& m) {
    json out = json::array();
    for (int r = 0; r < 3; ++r) out.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
    return out;
}

inline json to_json(const AffineRepresentation& rep) {
    const auto& p = rep.presentation;
    json out;
    out["presentation"] = p.kind == GroupPresentation::Kind::MarkedSurface ? "marked_surface" : "free_basis";
    out["genus"] = p.genus;
    out["punctures"] = p.punctures;
    json gens = json::array();
    for (std::size_t i = 0; i < rep.images.size(); ++i) {
        gens.push_back({{"name", p.generators[i]},
                        {"linear", to_json(rep.images[i].linear.m)},
                        {"translation", to_json(rep.images[i].translation)}});
    }
    out["generators"] = gens;
    json peri = json::array();
    for (const Word& w : p.peripherals) peri.push_back(format_word(p, w));
    out["peripherals"] = peri;
    out["relation"] = p.relation ? json(format_word(p, *p.relation)) : json(nullptr);
    return out;
}

inline AffineRepresentation representation_from_json(const json& j, const std::string& path = "") {
    using namespace detail;
    const std::string kind = text(member(j, "presentation", path), path + "/presentation");
    const json& gens = array(member(j, "generators", path), path + "/generators");
    const std::string gpath = path + "/generators";
    const int genus = static_cast<int>(index(member(j, "genus", path), path + "/genus"));
    const int punctures = static_cast<int>(index(member(j, "punctures", path), path + "/punctures"));
    AffineRepresentation rep;
    if (kind == "marked_surface") {
        try {
            rep.presentation = GroupPresentation::marked_surface(genus, punctures);
        } catch (const Error& e) {
            schema_error(path + "/genus", e.what());
        }
        if (gens.size() != rep.presentation.size()) {
            schema_error(gpath, "expected " + std::to_string(rep.presentation.size()) + " generators");
        }
    } else if (kind == "free_basis") {
        rep.presentation = GroupPresentation::free_basis(gens.size(), genus, {});
        rep.presentation.punctures = punctures;
    } else {
        schema_error(path + "/presentation", "expected \"marked_surface\" or \"free_basis\"");
    }
    for (std::size_t i = 0; i < gens.size(); ++i) {
        const std::string gp = gpath + "/" + std::to_string(i);
        const std::string name = text(member(gens[i], "name", gp), gp + "/name");
        if (name != rep.presentation.generators[i]) {
            schema_error(gp + "/name", "expected generator '" + rep.presentation.generators[i] + "'");
        }
        const Eigen::Matrix3d m = mat3(member(gens[i], "linear", gp), gp + "/linear");
        const LinearIsometry lin(m);
        const auto& jm = minkowski_gram();
        const double residual = (m.transpose() * jm * m - jm).cwiseAbs().maxCoeff();
        if (residual > kDocumentIsometryTolerance || !(m.determinant() > 0.0) || !(m(0, 0) > 0.0)) {
            schema_error(gp + "/linear", "generator " + name + " is not in SO_0(1,2) (residual " +
                                             std::to_string(residual) + ")");
        }
        MinkVec tr;
        if (gens[i].contains("translation")) tr = vec3(gens[i]["translation"], gp + "/translation");
        rep.images.emplace_back(lin, tr);
    }
    if (kind == "free_basis") {
        const json& peri = array(member(j, "peripherals", path), path + "/peripherals");
        if (peri.size() != static_cast<std::size_t>(punctures)) {
            schema_error(path + "/peripherals", "expected one word per puncture");
        }
        for (std::size_t k = 0; k < peri.size(); ++k) {
            rep.presentation.peripherals.push_back(
                word(rep.presentation, peri[k], path + "/peripherals/" + std::to_string(k)));
        }
        if (j.contains("relation") && !j["relation"].is_null()) {
            rep.presentation.relation = word(rep.presentation, j["relation"], path + "/relation");
        }
    }
    return rep;
}

inline json to_json(const Decoration& d) {
    json pts = json::array();
    for (const auto& p : d.points) pts.push_back(to_json(p));
    return {{"points", pts}};
}

inline Decoration decoration_from_json(const json& j, const std::string& path = "") {
    using namespace detail;
    const json& pts = array(member(j, "points", path), path + "/points");
    Decoration d;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::string p = path + "/points/" + std::to_string(i);
        const MinkVec v = vec3(pts[i], p);
        if (!is_future_lightlike(v, 1e-8)) schema_error(p, "decoration point is not future lightlike");
        d.points.push_back(v);
    }
    return d;
}

inline json to_json(const ConeSurface& s) {
    json tris = json::array();
    for (const auto& t : s.triangles) {
        tris.push_back({{"vertices", t.vertices}, {"lengths", json::array({t.lengths[0], t.lengths[1], t.lengths[2]})}});
    }
    json gluing = json::array();
    for (std::size_t g : s.gluing) gluing.push_back(g == kNoDart ? json(nullptr) : json(g));
    return {{"vertex_count", s.vertex_count}, {"triangles", tris}, {"gluing", gluing}};
}

inline ConeSurface cone_surface_from_json(const json& j, const std::string& path = "") {
    using namespace detail;
    ConeSurface s;
    s.vertex_count = index(member(j, "vertex_count", path), path + "/vertex_count");
    const json& tris = array(member(j, "triangles", path), path + "/triangles");
    for (std::size_t i = 0; i < tris.size(); ++i) {
        const std::string p = path + "/triangles/" + std::to_string(i);
        const json& v = array(member(tris[i], "vertices", p), p + "/vertices", 3);
        const json& l = array(member(tris[i], "lengths", p), p + "/lengths", 3);
        Triangle t;
        for (std::size_t k = 0; k < 3; ++k) {
            t.vertices[k] = index(v[k], p + "/vertices/" + std::to_string(k));
            if (t.vertices[k] >= s.vertex_count) schema_error(p + "/vertices/" + std::to_string(k), "vertex id out of range");
            t.lengths[k] = number(l[k], p + "/lengths/" + std::to_string(k));
        }
        s.triangles.push_back(t);
    }
    const json& g = array(member(j, "gluing", path), path + "/gluing", s.dart_count());
    for (std::size_t d = 0; d < g.size(); ++d) {
        const std::string p = path + "/gluing/" + std::to_string(d);
        if (g[d].is_null()) {
            s.gluing.push_back(kNoDart);
        } else {
            const std::size_t v = index(g[d], p);
            if (v >= s.dart_count()) schema_error(p, "dart out of range");
            s.gluing.push_back(v);
        }
    }
    try {
        validate(s);
    } catch (const Error& e) {
        schema_error(path.empty() ? "/" : path, e.what());
    }
    return s;
}

inline json to_json(const Cellulation& c) {
    json cells = json::array();
    for (const Cell& cell : c.cells) {
        json pts = json::array();
        for (const Vec2& p : cell.points) pts.push_back(json::array({p.x, p.y}));
        json opp = json::array();
        for (std::size_t k = 0; k < cell.size(); ++k) {
            const std::size_t i = static_cast<std::size_t>(&cell - c.cells.data());
            const auto o = c.opposite(i, k);
            opp.push_back(o ? json::array({o->cell, o->side}) : json(nullptr));
        }
        cells.push_back({{"vertices", cell.vertices},
                         {"lengths", cell.lengths},
                         {"points", pts},
                         {"circumradius", cell.circumradius},
                         {"opposite", opp}});
    }
    return {{"cells", cells}, {"flips", c.flips}, {"triangulation", to_json(c.triangulation)}};
}

inline json to_json(const HullSurface& h, const GroupPresentation& p) {
    json orbit = json::array();
    for (const auto& e : h.orbit.entries) {
        orbit.push_back({{"word", format_word(p, e.word)}, {"puncture", e.puncture}, {"point", to_json(e.point)}});
    }
    json facets = json::array();
    for (const auto& f : h.facets) facets.push_back({{"vertices", f.vertices}, {"u", to_json(f.u)}, {"c", f.c}});
    json fund = json::array();
    for (const auto& f : h.fundamental) {
        json words = json::array(), pts = json::array();
        for (const Word& w : f.words) words.push_back(format_word(p, w));
        for (const MinkVec& v : f.points) pts.push_back(to_json(v));
        fund.push_back({{"facet", f.facet},
                        {"words", words},
                        {"punctures", f.punctures},
                        {"points", pts},
                        {"u", to_json(f.u)},
                        {"c", f.c}});
    }
    json pairings = json::array();
    for (const auto& q : h.pairings) {
        pairings.push_back({{"facet", q.facet},
                            {"side", q.side},
                            {"other", q.other},
                            {"other_side", q.other_side},
                            {"word", format_word(p, q.word)}});
    }
    return {{"stabilized_at", h.stabilized_at},
            {"orbit_radius", h.orbit.radius},
            {"orbit", orbit},
            {"facets", facets},
            {"fundamental", fund},
            {"pairings", pairings}};
}

inline json to_json(const SuspendedSpacetime& st) {
    const auto& p = st.representation.presentation;
    json cells = json::array();
    for (std::size_t i = 0; i < st.cells.size(); ++i) {
        const auto& c = st.cells[i];
        json verts = json::array();
        for (const MinkVec& v : c.vertices) verts.push_back(to_json(v));
        cells.push_back({{"surface_vertices", st.cellulation.cells[i].vertices},
                         {"circumradius", c.source.circumradius},
                         {"inscribed", verts},
                         {"placement", to_json(st.placements[i].m)}});
    }
    json gluings = json::array();
    for (const auto& g : st.gluings) {
        gluings.push_back({{"cell", g.cell},
                           {"side", g.side},
                           {"other", g.other},
                           {"other_side", g.other_side},
                           {"tree", g.tree},
                           {"word", format_word(st.gluing_representation.presentation, g.word)}});
    }
    return {{"representation", to_json(st.representation)},
            {"gluing_representation", to_json(st.gluing_representation)},
            {"decoration", to_json(st.decoration)},
            {"root_cell", st.root_cell},
            {"puncture_vertex", st.puncture_vertex},
            {"relation_residual", st.relation_residual},
            {"peripheral_words", [&] {
                 json w = json::array();
                 for (const Word& x : p.peripherals) w.push_back(format_word(p, x));
                 return w;
             }()},
            {"cells", cells},
            {"gluings", gluings}};
}

namespace detail {

inline void validate_payload(PayloadKind kind, const json& payload) {
    const std::string path = "/payload";
    switch (kind) {
        case PayloadKind::Representation: representation_from_json(payload, path); break;
        case PayloadKind::Decoration: decoration_from_json(payload, path); break;
        case PayloadKind::ConeSurface: cone_surface_from_json(payload, path); break;
        case PayloadKind::Hull:
            for (const char* key : {"orbit", "facets", "fundamental", "pairings"}) array(member(payload, key, path), path + "/" + key);
            break;
        case PayloadKind::SuspendedSpacetime:
            representation_from_json(member(payload, "representation", path), path + "/representation");
            decoration_from_json(member(payload, "decoration", path), path + "/decoration");
            array(member(payload, "cells", path), path + "/cells");
            break;
        case PayloadKind::Report:
            if (!payload.is_object()) schema_error(path, "expected an object");
            break;
    }
}

}  // namespace detail

inline json to_json(const DocumentEnvelope& doc) {
    return {{"format", kFormatName},
            {"version", doc.version},
            {"kind", to_string(doc.kind)},
            {"provenance", doc.provenance},
            {"payload", doc.payload}};
}

inline DocumentEnvelope make_document(PayloadKind kind, json payload, json parameters = json::object()) {
    DocumentEnvelope doc;
    doc.kind = kind;
    doc.payload = std::move(payload);
    doc.provenance = {{"tool", kToolVersion}, {"parameters", std::move(parameters)}};
    return doc;
}

/// Parses and validates a document held in memory.
inline DocumentEnvelope parse_document(const std::string& content) {
    json j;
    try {
        j = json::parse(content);
    } catch (const json::parse_error& e) {
        const auto [line, column] = detail::line_column(content, e.byte == 0 ? 0 : e.byte - 1);
        throw DocumentError(ErrorCode::ParseError,
                            "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + e.what(),
                            line, column);
    }
    using namespace detail;
    if (!j.is_object()) schema_error("", "document must be an object");
    const std::string format = text(member(j, "format", ""), "/format");
    if (format != kFormatName) {
        throw DocumentError(ErrorCode::VersionError, "unknown format '" + format + "'", 0, 0, "/format");
    }
    const std::string version = text(member(j, "version", ""), "/version");
    if (version.substr(0, version.find('.')) != "1") {
        throw DocumentError(ErrorCode::VersionError, "unsupported version '" + version + "'", 0, 0, "/version");
    }
    const std::string kind = text(member(j, "kind", ""), "/kind");
    const auto k = payload_kind(kind);
    if (!k) schema_error("/kind", "unknown payload kind '" + kind + "'");
    DocumentEnvelope doc;
    doc.version = version;
    doc.kind = *k;
    doc.payload = member(j, "payload", "");
    doc.provenance = j.contains("provenance") ? j["provenance"] : json::object();
    detail::validate_payload(doc.kind, doc.payload);
    return doc;
}

inline DocumentEnvelope read_document(std::istream& in) {
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_document(buffer.str());
}

inline DocumentEnvelope read_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    return read_document(in);
}

inline std::string dump_document(const DocumentEnvelope& doc) { return to_json(doc).dump(2) + "\n"; }

inline void write_document(const DocumentEnvelope& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    out << dump_document(doc);
    if (!out) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

/// Reads a document and checks its payload kind.
inline DocumentEnvelope read_document_of(const std::string& path, PayloadKind expected) {
    DocumentEnvelope doc = read_document(path);
    if (doc.kind != expected) {
        detail::schema_error("/kind", std::string("expected a ") + to_string(expected) + " document, got " +
                                          to_string(doc.kind));
    }
    return doc;
}

/// OBJ text of the facet complex. Orbit points used by a facet become "v"
/// lines in increasing orbit index, mapped (t, x, y) -> (x, t, y) so time is
/// the OBJ up axis; coordinates printed with %.17g. Faces follow the hull's
/// facet order with 1-based indices, each listed counter-clockwise in the
/// (x, y) plane, i.e. with normals pointing to the past in OBJ's
/// right-handed frame.
inline std::string obj_text(const HullSurface& h) {
    std::set<std::size_t> used;
    for (const auto& f : h.facets) used.insert(f.vertices.begin(), f.vertices.end());
    std::map<std::size_t, std::size_t> id;
    std::string out = "# cauchyhull facet complex: v = (x, t, y)\n";
    char buf[128];
    for (std::size_t v : used) {
        id[v] = id.size() + 1;
        const MinkVec& p = h.orbit.point(v);
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", p.x, p.t, p.y);
        out += buf;
    }
    for (const auto& f : h.facets) {
        out += "f";
        for (std::size_t v : f.vertices) out += " " + std::to_string(id[v]);
        out += "\n";
    }
    return out;
}

inline void write_obj(const HullSurface& h, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    out << obj_text(h);
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

}  // namespace cauchyhull
