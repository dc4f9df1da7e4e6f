#pragma once

// Command-line driver. run() is the whole program; main() only forwards argv.

#include <algorithm>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cauchyhull/decoration.hpp"
#include "cauchyhull/flatsurf.hpp"
#include "cauchyhull/holonomy.hpp"
#include "cauchyhull/hull.hpp"
#include "cauchyhull/io.hpp"
#include "cauchyhull/suspension.hpp"

namespace cauchyhull::cli {

enum ExitCode : int { kOk = 0, kDomainError = 1, kUsageError = 2, kNotStabilized = 3 };

struct Flags {
    std::string rep;
    std::string dec;
    std::string surface;
    std::string out;
    std::optional<double> tol;
    int ball_radius = 3;
    int max_radius = 10;
    std::size_t max_points = kDefaultMaxOrbitPoints;
    unsigned seed = 0;
    std::vector<double> point;
    bool json = false;
};

namespace detail {

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline AffineRepresentation load_rep(const Flags& f) {
    return representation_from_json(read_document_of(f.rep, PayloadKind::Representation).payload, "/payload");
}

inline Decoration load_dec(const Flags& f, const AffineRepresentation& rep) {
    if (f.dec.empty()) return default_decoration(rep);
    return decoration_from_json(read_document_of(f.dec, PayloadKind::Decoration).payload, "/payload");
}

inline ConeSurface load_surface(const Flags& f) {
    return cone_surface_from_json(read_document_of(f.surface, PayloadKind::ConeSurface).payload, "/payload");
}

inline json parameters(const Flags& f, const std::string& command) {
    json p{{"command", command}};
    if (!f.rep.empty()) p["rep"] = f.rep;
    if (!f.dec.empty()) p["dec"] = f.dec;
    if (!f.surface.empty()) p["surface"] = f.surface;
    if (f.tol) p["tol"] = *f.tol;
    p["ball_radius"] = f.ball_radius;
    p["max_radius"] = f.max_radius;
    p["max_points"] = f.max_points;
    p["seed"] = f.seed;
    return p;
}

inline std::string class_name(const CausalClass& c) {
    return std::string(to_string(c.linear)) + "/" + std::string(to_string(c.affine));
}

/// Writes the document to --out if given; prints it with --json, the
/// summary otherwise.
inline void emit(const Flags& f, const DocumentEnvelope& doc, const std::string& summary, std::ostream& out) {
    if (!f.out.empty()) write_document(doc, f.out);
    if (f.json) {
        out << dump_document(doc);
    } else {
        out << summary << "\n";
    }
}

inline HullSurface build_hull(const Flags& f, const AffineRepresentation& rep, const Decoration& d) {
    const int r0 = std::min(f.ball_radius, f.max_radius);
    HullSurfaceOptions opts;
    opts.max_orbit_points = f.max_points;
    return stabilize_hull(rep, d, r0, f.max_radius, opts);
}

inline int classify_cmd(const Flags& f, std::ostream& out) {
    const AffineRepresentation rep = load_rep(f);
    const double tol = f.tol.value_or(kFormTolerance);
    const auto& p = rep.presentation;
    json gens = json::array(), peri = json::array();
    std::string summary;
    for (std::size_t i = 0; i < rep.images.size(); ++i) {
        const CausalClass c = classify(rep.images[i], tol);
        gens.push_back({{"name", p.generators[i]},
                        {"linear", to_string(c.linear)},
                        {"affine", to_string(c.affine)},
                        {"trace", rep.images[i].linear.trace()}});
        summary += p.generators[i] + ": " + class_name(c) + "\n";
    }
    for (std::size_t j = 0; j < p.peripherals.size(); ++j) {
        const CausalClass c = classify(peripheral(rep, j), tol);
        peri.push_back({{"word", format_word(p, p.peripherals[j])},
                        {"linear", to_string(c.linear)},
                        {"affine", to_string(c.affine)}});
        summary += "peripheral " + std::to_string(j + 1) + ": " + class_name(c) + "\n";
    }
    summary.pop_back();
    emit(f, make_document(PayloadKind::Report, {{"generators", gens}, {"peripherals", peri}}, parameters(f, "classify")),
         summary, out);
    return kOk;
}

inline int admissible_cmd(const Flags& f, std::ostream& out) {
    const AffineRepresentation rep = load_rep(f);
    const AdmissibilityReport r = check_admissible(rep, f.tol.value_or(kFormTolerance));
    json payload{{"verdict", to_string(r.verdict)},
                 {"relation_residual", r.relation_residual},
                 {"relation_ok", r.relation_ok},
                 {"tangency_ok", r.tangency_ok},
                 {"failures", r.failures},
                 {"discreteness_checked", r.discreteness_checked},
                 {"caveat", r.caveat}};
    std::string summary = std::string(to_string(r.verdict)) + " (relation residual " + fmt(r.relation_residual) + ")";
    for (const auto& why : r.failures) summary += "\n  " + why;
    emit(f, make_document(PayloadKind::Report, payload, parameters(f, "admissible")), summary, out);
    return kOk;
}

inline int orbit_cmd(const Flags& f, std::ostream& out) {
    const AffineRepresentation rep = load_rep(f);
    const Decoration d = load_dec(f, rep);
    const OrbitPointSet o = orbit_ball(rep, d, f.ball_radius);
    json points = json::array();
    for (const auto& e : o.entries) {
        points.push_back({{"word", format_word(rep.presentation, e.word)}, {"puncture", e.puncture}, {"point", to_json(e.point)}});
    }
    json payload{{"radius", o.radius}, {"size", o.size()}, {"points", points}};
    std::string summary = std::to_string(o.size()) + " orbit points within word length " + std::to_string(f.ball_radius);
    if (!f.point.empty()) {
        if (f.point.size() != 3) throw CLI::ValidationError("--point", "expects three numbers t x y");
        const MinkVec q(f.point[0], f.point[1], f.point[2]);
        const std::size_t n = count_orbit_in_past(o, q);
        payload["in_past"] = n;
        summary += ", " + std::to_string(n) + " in the past of the query point";
    }
    emit(f, make_document(PayloadKind::Report, payload, parameters(f, "orbit")), summary, out);
    return kOk;
}

inline int hull_cmd(const Flags& f, std::ostream& out) {
    const AffineRepresentation rep = load_rep(f);
    const HullSurface h = build_hull(f, rep, load_dec(f, rep));
    const std::string summary = "stabilized at R = " + std::to_string(h.stabilized_at) + ": " +
                                std::to_string(h.facets.size()) + " facets, " + std::to_string(h.fundamental.size()) +
                                " fundamental, " + std::to_string(h.pairings.size()) + " side pairings";
    emit(f, make_document(PayloadKind::Hull, to_json(h, rep.presentation), parameters(f, "hull")), summary, out);
    return kOk;
}

inline int export_obj_cmd(const Flags& f, std::ostream& out) {
    if (f.out.empty()) throw CLI::RequiredError("--out");
    const AffineRepresentation rep = load_rep(f);
    const HullSurface h = build_hull(f, rep, load_dec(f, rep));
    write_obj(h, f.out);
    std::size_t used = 0;
    {
        std::vector<char> seen(h.orbit.size(), 0);
        for (const auto& fc : h.facets) {
            for (std::size_t v : fc.vertices) used += !seen[v]++;
        }
    }
    if (f.json) {
        out << dump_document(make_document(PayloadKind::Report,
                                           {{"path", f.out}, {"vertices", used}, {"faces", h.facets.size()}},
                                           parameters(f, "export-obj")));
    } else {
        out << "wrote " << f.out << ": " << used << " vertices, " << h.facets.size() << " faces\n";
    }
    return kOk;
}

inline int delaunay_cmd(const Flags& f, std::ostream& out) {
    DelaunayOptions opts;
    opts.tol = f.tol.value_or(kCocyclicTolerance);
    opts.seed = f.seed;
    const Cellulation c = delaunay(load_surface(f), opts);
    const std::string summary = std::to_string(c.cells.size()) + " cells, " + std::to_string(c.flips) + " flips";
    emit(f, make_document(PayloadKind::Report, to_json(c), parameters(f, "delaunay")), summary, out);
    return kOk;
}

inline int suspend_cmd(const Flags& f, std::ostream& out) {
    DelaunayOptions opts;
    opts.tol = f.tol.value_or(kCocyclicTolerance);
    opts.seed = f.seed;
    const SuspendedSpacetime st = susp_surface(load_surface(f), opts);
    const auto& p = st.representation.presentation;
    const std::string summary =
        std::to_string(st.cells.size()) + " cells, genus " + std::to_string(p.genus) + ", " +
        std::to_string(p.punctures) + " punctures, " + std::to_string(p.size()) + " generators, relation residual " +
        fmt(st.relation_residual);
    emit(f, make_document(PayloadKind::SuspendedSpacetime, to_json(st), parameters(f, "suspend")), summary, out);
    return kOk;
}

inline int roundtrip_cmd(const Flags& f, std::ostream& out) {
    RoundTripOptions opts;
    opts.r0 = std::min(f.ball_radius, f.max_radius);
    opts.r_max = f.max_radius;
    opts.max_orbit_points = f.max_points;
    opts.tol = f.tol.value_or(opts.tol);
    const RoundTripReport r = penner_roundtrip(load_surface(f), opts);
    json payload{{"matched", r.match.matched},
                 {"mirrored", r.match.mirrored},
                 {"max_relative_error", r.match.max_relative_error},
                 {"stabilized_at", r.stabilized_at},
                 {"fundamental_facets", r.fundamental_facets},
                 {"expected", to_json(r.expected)},
                 {"recovered", to_json(r.recovered)}};
    const std::string summary = "matched " + std::to_string(r.recovered.cells.size()) + " cells, max relative error " +
                                fmt(r.match.max_relative_error) + ", stabilized at R = " +
                                std::to_string(r.stabilized_at);
    emit(f, make_document(PayloadKind::Report, payload, parameters(f, "roundtrip")), summary, out);
    return kOk;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Convex polyhedral Cauchy surfaces of flat spacetimes with BTZ lines", "cauchyhull"};
    app.require_subcommand(1);
    Flags f;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--tol", f.tol, "numerical tolerance of the operation");
        sub->add_option("--out", f.out, "write the output document to this path");
        sub->add_flag("--json", f.json, "print the output document instead of a summary");
    };
    auto rep_input = [&](CLI::App* sub, bool with_dec) {
        sub->add_option("--rep", f.rep, "representation document")->required()->check(CLI::ExistingFile);
        if (with_dec) sub->add_option("--dec", f.dec, "decoration document (default: unit points)")->check(CLI::ExistingFile);
    };
    auto radii = [&](CLI::App* sub) {
        sub->add_option("--ball-radius", f.ball_radius, "initial word-ball radius")->check(CLI::NonNegativeNumber);
        sub->add_option("--max-radius", f.max_radius, "largest word-ball radius tried")->check(CLI::NonNegativeNumber);
        sub->add_option("--max-points", f.max_points, "give up when the word ball exceeds this many orbit points (0: no limit)");
    };
    auto surface_input = [&](CLI::App* sub) {
        sub->add_option("--surface", f.surface, "cone surface document")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", f.seed, "0: deterministic flip order; otherwise random flip order");
    };

    using Handler = std::function<int(const Flags&, std::ostream&)>;
    std::vector<std::pair<CLI::App*, Handler>> commands;

    CLI::App* classify_app = app.add_subcommand("classify", "classify generators and peripherals");
    rep_input(classify_app, false);
    common(classify_app);
    commands.emplace_back(classify_app, detail::classify_cmd);

    CLI::App* admissible_app = app.add_subcommand("admissible", "check the admissibility conditions");
    rep_input(admissible_app, false);
    common(admissible_app);
    commands.emplace_back(admissible_app, detail::admissible_cmd);

    CLI::App* orbit_app = app.add_subcommand("orbit", "enumerate the decoration orbit in a word ball");
    rep_input(orbit_app, true);
    orbit_app->add_option("--ball-radius", f.ball_radius, "word-ball radius")->check(CLI::NonNegativeNumber);
    orbit_app->add_option("--point", f.point, "count orbit points in the past of t x y")->expected(3);
    common(orbit_app);
    commands.emplace_back(orbit_app, detail::orbit_cmd);

    CLI::App* hull_app = app.add_subcommand("hull", "stabilized convex hull of the orbit");
    rep_input(hull_app, true);
    radii(hull_app);
    common(hull_app);
    commands.emplace_back(hull_app, detail::hull_cmd);

    CLI::App* obj_app = app.add_subcommand("export-obj", "write the hull facet complex as OBJ to --out");
    rep_input(obj_app, true);
    radii(obj_app);
    common(obj_app);
    commands.emplace_back(obj_app, detail::export_obj_cmd);

    CLI::App* delaunay_app = app.add_subcommand("delaunay", "canonical Delaunay cellulation of a cone surface");
    surface_input(delaunay_app);
    common(delaunay_app);
    commands.emplace_back(delaunay_app, detail::delaunay_cmd);

    CLI::App* suspend_app = app.add_subcommand("suspend", "assemble the spacetime suspended over a cone surface");
    surface_input(suspend_app);
    common(suspend_app);
    commands.emplace_back(suspend_app, detail::suspend_cmd);

    CLI::App* roundtrip_app = app.add_subcommand("roundtrip", "suspend, take the hull, and compare cellulations");
    surface_input(roundtrip_app);
    radii(roundtrip_app);
    common(roundtrip_app);
    commands.emplace_back(roundtrip_app, detail::roundtrip_cmd);

    try {
        app.parse(argc, argv);
        for (const auto& [sub, handler] : commands) {
            if (sub->parsed()) return handler(f, out);
        }
        return kUsageError;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsageError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::NotStabilized ? kNotStabilized : kDomainError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kDomainError;
    }
}

}  // namespace cauchyhull::cli
