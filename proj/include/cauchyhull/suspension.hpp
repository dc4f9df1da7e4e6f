#pragma once

// Suspension of Delaunay cells into the light cone, their gluing by wedge
// alignment, the induced holonomy and decoration, and the round trip back
// through the hull construction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "cauchyhull/decoration.hpp"
#include "cauchyhull/error.hpp"
#include "cauchyhull/flatsurf.hpp"
#include "cauchyhull/holonomy.hpp"
#include "cauchyhull/hull.hpp"
#include "cauchyhull/minkowski.hpp"

namespace cauchyhull {

/// Convex polygon with counter-clockwise vertices on a circle.
struct CocyclicPolygon {
    std::vector<Vec2> points;
    Vec2 center;
    double circumradius = 0.0;

    static CocyclicPolygon from_cell(const Cell& c) { return {c.points, c.center, c.circumradius}; }

    /// Regular n-gon with the given side length.
    static CocyclicPolygon regular(std::size_t n, double side) {
        CocyclicPolygon p;
        p.circumradius = side / (2.0 * std::sin(std::numbers::pi / static_cast<double>(n)));
        for (std::size_t k = 0; k < n; ++k) {
            const double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
            p.points.push_back({p.circumradius * std::cos(a), p.circumradius * std::sin(a)});
        }
        return p;
    }
};

struct SuspendedCell {
    CocyclicPolygon source;
    std::vector<double> angles;
    /// r (1, cos theta_k, sin theta_k): on the light cone, in the plane t = r.
    std::vector<MinkVec> vertices;

    std::size_t size() const { return vertices.size(); }
};

inline SuspendedCell inscribe_cocyclic(const CocyclicPolygon& cell, double tol = kCocyclicTolerance) {
    const double r = cell.circumradius;
    if (cell.points.size() < 3 || !(r > 0.0)) throw Error(ErrorCode::NotCocyclic, "cell needs 3 vertices and r > 0");
    SuspendedCell out;
    out.source = cell;
    for (const Vec2& p : cell.points) {
        const Vec2 d = p - cell.center;
        if (std::abs(norm(d) - r) > tol * r * 10.0) {
            throw Error(ErrorCode::NotCocyclic,
                        "vertex at distance " + std::to_string(norm(d)) + " from the center, radius " + std::to_string(r));
        }
        const double theta = std::atan2(d.y, d.x);
        out.angles.push_back(theta);
        out.vertices.push_back(r * MinkVec(1.0, std::cos(theta), std::sin(theta)));
    }
    return out;
}

/// q(i(x)) = |x - center|^2 - r^2 for a point of the cell; negative inside
/// the circumcircle. Throws OnOrOutsideCircumcircle otherwise.
inline double susp_metric_coefficient(const CocyclicPolygon& cell, Vec2 x, double tol = 1e-12) {
    const double d = distance(x, cell.center);
    const double r = cell.circumradius;
    const double value = d * d - r * r;
    if (value >= -tol * r * r) {
        throw Error(ErrorCode::OnOrOutsideCircumcircle, "point is not strictly inside the circumcircle");
    }
    return value;
}

/// Isometry taking side i of c1 (vertices i, i+1) onto side j of c2
/// reversed, so the two suspended cells lie on opposite sides of it.
inline LinearIsometry glue_cells(const SuspendedCell& c1, std::size_t i, const SuspendedCell& c2, std::size_t j) {
    const MinkVec& a1 = c1.vertices[i];
    const MinkVec& b1 = c1.vertices[(i + 1) % c1.size()];
    const MinkVec& a2 = c2.vertices[j];
    const MinkVec& b2 = c2.vertices[(j + 1) % c2.size()];
    const double l1 = spacelike_length(a1, b1), l2 = spacelike_length(a2, b2);
    if (std::abs(l1 - l2) > kGlueTolerance * std::max(l1, l2)) {
        throw Error(ErrorCode::PairingMismatch, "side lengths " + std::to_string(l1) + " and " + std::to_string(l2));
    }
    return align_wedge(a1, b1, a2, b2, 1e-8);
}

/// Gluing of two cell sides in the assembled complex: rho(word) carries the
/// placed cell `other` across side `other_side` onto the neighbour of the
/// placed cell `cell` across `side`.
struct CellGluing {
    std::size_t cell = 0;
    std::size_t side = 0;
    std::size_t other = 0;
    std::size_t other_side = 0;
    bool tree = false;
    Word word;
};

struct SuspendedSpacetime {
    AffineRepresentation representation;
    /// Free basis of the non-tree gluings, with the peripherals as words in
    /// it. Same group as `representation`; its word balls are much rounder.
    AffineRepresentation gluing_representation;
    Decoration decoration;
    std::vector<SuspendedCell> cells;
    /// Placement of each cell in the developed fundamental polygon.
    std::vector<LinearIsometry> placements;
    /// Cell placed by the identity.
    std::size_t root_cell = 0;
    std::vector<CellGluing> gluings;
    /// Surface vertex id of the cusp of decoration point j.
    std::vector<std::size_t> puncture_vertex;
    Cellulation cellulation;
    double relation_residual = 0.0;
};

namespace detail {

struct BoundarySide {
    std::size_t cell;
    std::size_t side;
};

}  // namespace detail

/// Suspends every Delaunay cell, develops them along a spanning tree of the
/// dual graph and reads the holonomy off the remaining gluings. For genus 0
/// the peripherals, ordered by first occurrence along the developed polygon,
/// give the marked presentation c_1 ... c_s = 1; otherwise a free basis with
/// peripheral words is returned.
inline SuspendedSpacetime susp_surface(const ConeSurface& s, const DelaunayOptions& opts = {}) {
    SuspendedSpacetime out;
    out.cellulation = delaunay(s, opts);
    const Cellulation& cel = out.cellulation;
    if (!cel.triangulation.closed()) throw Error(ErrorCode::InvalidSurface, "surface has boundary");
    const std::size_t nc = cel.cells.size();
    for (const Cell& c : cel.cells) out.cells.push_back(inscribe_cocyclic(CocyclicPolygon::from_cell(c)));

    // Breadth-first spanning tree of the dual graph rooted at a center cell,
    // which keeps the placements short.
    auto eccentricity = [&](std::size_t root) {
        std::vector<std::size_t> depth(nc, nc + 1);
        std::queue<std::size_t> q;
        q.push(root);
        depth[root] = 0;
        std::size_t worst = 0;
        while (!q.empty()) {
            const std::size_t a = q.front();
            q.pop();
            worst = std::max(worst, depth[a]);
            for (std::size_t i = 0; i < cel.cells[a].size(); ++i) {
                const auto o = cel.opposite(a, i);
                if (o && depth[o->cell] > nc) {
                    depth[o->cell] = depth[a] + 1;
                    q.push(o->cell);
                }
            }
        }
        return worst;
    };
    std::size_t root = 0;
    for (std::size_t c = 1, best = eccentricity(0); c < nc; ++c) {
        const std::size_t e = eccentricity(c);
        if (e < best) {
            best = e;
            root = c;
        }
    }
    out.root_cell = root;
    out.placements.assign(nc, LinearIsometry::identity());
    std::vector<char> placed(nc, 0);
    std::vector<std::vector<char>> tree_side(nc);
    for (std::size_t c = 0; c < nc; ++c) tree_side[c].assign(cel.cells[c].size(), 0);
    std::queue<std::size_t> queue;
    queue.push(root);
    placed[root] = 1;
    while (!queue.empty()) {
        const std::size_t a = queue.front();
        queue.pop();
        for (std::size_t i = 0; i < cel.cells[a].size(); ++i) {
            const auto o = cel.opposite(a, i);
            if (!o || placed[o->cell]) continue;
            const std::size_t b = o->cell, j = o->side;
            out.placements[b] = out.placements[a] * glue_cells(out.cells[b], j, out.cells[a], i);
            placed[b] = 1;
            tree_side[a][i] = tree_side[b][j] = 1;
            queue.push(b);
        }
    }

    // Generators from the non-tree gluings, one per glued pair.
    std::vector<std::vector<std::optional<Letter>>> side_letter(nc);
    for (std::size_t c = 0; c < nc; ++c) side_letter[c].assign(cel.cells[c].size(), std::nullopt);
    std::vector<AffineIsometry> images;
    // x = M_a gamma M_b^-1, kept factored so words can be evaluated locally.
    struct Factored {
        std::size_t a, b;
        LinearIsometry gamma;
    };
    std::vector<Factored> factors;
    for (std::size_t a = 0; a < nc; ++a) {
        for (std::size_t i = 0; i < cel.cells[a].size(); ++i) {
            const auto o = cel.opposite(a, i);
            if (!o) continue;
            const std::size_t b = o->cell, j = o->side;
            if (tree_side[a][i]) {
                if (a < b || (a == b && i < j)) out.gluings.push_back({a, i, b, j, true, {}});
                continue;
            }
            if (side_letter[a][i]) continue;
            const LinearIsometry gamma = glue_cells(out.cells[b], j, out.cells[a], i);
            const std::size_t g = images.size();
            images.emplace_back(out.placements[a] * gamma * out.placements[b].inverse());
            factors.push_back({a, b, gamma});
            side_letter[a][i] = Letter{g, false};
            side_letter[b][j] = Letter{g, true};
            out.gluings.push_back({a, i, b, j, false, Word{{g, false}}});
        }
    }

    // Boundary of the developed polygon, counter-clockwise: walk cell sides,
    // stepping through tree sides into the neighbouring cell.
    std::vector<detail::BoundarySide> boundary;
    std::size_t start_cell = 0, start_side = 0;
    bool found = false;
    for (std::size_t c = 0; c < nc && !found; ++c) {
        for (std::size_t i = 0; i < cel.cells[c].size() && !found; ++i) {
            if (!tree_side[c][i]) {
                start_cell = c;
                start_side = i;
                found = true;
            }
        }
    }
    if (!found) throw Error(ErrorCode::InvalidSurface, "dual graph has no cycle");
    {
        std::size_t c = start_cell, i = start_side;
        std::size_t guard = 0, total = 0;
        for (const Cell& cell : cel.cells) total += cell.size();
        do {
            boundary.push_back({c, i});
            // Next side around the polygon: advance within the cell, crossing
            // tree sides into the neighbour at the shared vertex.
            i = (i + 1) % cel.cells[c].size();
            while (tree_side[c][i]) {
                const auto o = cel.opposite(c, i);
                c = o->cell;
                i = (o->side + 1) % cel.cells[c].size();
            }
            if (++guard > 2 * total) throw Error(ErrorCode::InvalidSurface, "boundary walk did not close");
        } while (c != start_cell || i != start_side);
    }
    const std::size_t n = boundary.size();
    auto index_of = [&](std::size_t c, std::size_t i) {
        for (std::size_t k = 0; k < n; ++k) {
            if (boundary[k].cell == c && boundary[k].side == i) return k;
        }
        throw Error(ErrorCode::InvalidSurface, "side missing from the polygon boundary");
    };
    std::vector<std::size_t> sigma(n);
    std::vector<Letter> letter(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto o = cel.opposite(boundary[k].cell, boundary[k].side);
        sigma[k] = index_of(o->cell, o->side);
        letter[k] = *side_letter[boundary[k].cell][boundary[k].side];
    }

    // Corner k is the vertex at the end of boundary side k. Going around it
    // crosses side k and lands on corner sigma(k) - 1 of the neighbour.
    std::vector<char> visited(n, 0);
    std::vector<Word> peripherals;
    std::vector<MinkVec> points;
    for (std::size_t k = 0; k < n; ++k) {
        if (visited[k]) continue;
        Word w;
        std::size_t x = k;
        do {
            visited[x] = 1;
            w.push_back(letter[x]);
            x = (sigma[x] + n - 1) % n;
        } while (x != k);
        const auto& side = boundary[k];
        const std::size_t cell_size = cel.cells[side.cell].size();
        const std::size_t vertex = (side.side + 1) % cell_size;
        peripherals.push_back(w);
        points.push_back(out.placements[side.cell](out.cells[side.cell].vertices[vertex]));
        out.puncture_vertex.push_back(cel.cells[side.cell].vertices[vertex]);
    }
    const std::size_t punctures = peripherals.size();
    if (punctures != cel.triangulation.vertex_count) {
        throw Error(ErrorCode::InvalidSurface, "vertex cycles do not match the surface vertices");
    }
    const int chi = cel.triangulation.euler_characteristic();
    const int genus = (2 - chi) / 2;

    AffineRepresentation free_rep;
    free_rep.presentation = GroupPresentation::free_basis(images.size(), genus, peripherals);
    free_rep.images = images;
    out.gluing_representation = free_rep;

    // M_l1 G_1 (M_r1^-1 M_l2) G_2 ... G_n M_rn^-1: the large placements only
    // enter at the two ends.
    auto evaluate_local = [&](const Word& w) {
        if (w.empty()) return LinearIsometry::identity();
        LinearIsometry inner = LinearIsometry::identity();
        std::size_t first = 0, last = 0;
        for (std::size_t k = 0; k < w.size(); ++k) {
            const Factored& f = factors[w[k].generator];
            const std::size_t left = w[k].inverse ? f.b : f.a;
            const std::size_t right = w[k].inverse ? f.a : f.b;
            if (k == 0) first = left;
            else inner = inner * (out.placements[last].inverse() * out.placements[left]);
            inner = inner * (w[k].inverse ? f.gamma.inverse() : f.gamma);
            last = right;
        }
        return out.placements[first] * inner * out.placements[last].inverse();
    };

    auto product_trivial = [&](bool invert) {
        Word w;
        for (const Word& p : peripherals) w = concat(w, invert ? inverse(p) : p);
        return w.empty();
    };
    if (genus == 0 && punctures >= 3) {
        std::optional<bool> invert;
        if (product_trivial(false)) invert = false;
        else if (product_trivial(true)) invert = true;
        if (invert) {
            AffineRepresentation rep;
            rep.presentation = GroupPresentation::marked_surface(0, static_cast<int>(punctures));
            for (const Word& p : peripherals) {
                const LinearIsometry g = evaluate_local(p);
                rep.images.emplace_back(*invert ? g.inverse() : g);
            }
            out.representation = std::move(rep);
        } else {
            out.representation = std::move(free_rep);
        }
    } else {
        out.representation = std::move(free_rep);
    }
    out.decoration.points = points;

    out.relation_residual = check_relation(out.representation);
    // Rounding in a product grows with the product of the factor norms.
    double scale = 1.0;
    if (const auto& rel = out.representation.presentation.relation) {
        for (const Letter& l : *rel) {
            scale *= std::max(1.0, out.representation.images[l.generator].linear.m.cwiseAbs().rowwise().sum().maxCoeff());
        }
    }
    if (out.relation_residual > kRelationTolerance * scale) {
        throw Error(ErrorCode::RelationResidualTooLarge, "relation residual " + std::to_string(out.relation_residual));
    }
    return out;
}

/// Linear spacetime record of the suspension over a hyperbolic surface: the
/// cone over the surface at cosmological time 1, kept as its holonomy.
struct LinearSpacetime {
    AffineRepresentation representation;
};

inline LinearSpacetime susp_h2(const AffineRepresentation& rho) {
    if (!rho.is_linear()) throw Error(ErrorCode::NotAdmissible, "representation has translation parts");
    const auto report = check_admissible(rho);
    if (!report.admissible()) {
        throw Error(ErrorCode::NotAdmissible, report.failures.empty() ? "not admissible" : report.failures.front());
    }
    return {rho};
}

inline AffineRepresentation susp_h2_inv(const LinearSpacetime& m) { return m.representation; }

struct RoundTripOptions {
    int r0 = 2;
    int r_max = 8;
    double tol = 1e-6;
    std::size_t max_orbit_points = kDefaultMaxOrbitPoints;
};

struct RoundTripReport {
    Cellulation expected;
    Cellulation recovered;
    int stabilized_at = -1;
    std::size_t fundamental_facets = 0;
    CellulationMatch match;
};

/// Suspends the surface, rebuilds the hull from the resulting holonomy and
/// decoration, and compares the induced Delaunay cellulation with that of
/// the input. Throws Mismatch with the difference when they disagree.
inline RoundTripReport penner_roundtrip(const ConeSurface& s, const RoundTripOptions& opts = {}) {
    RoundTripReport report;
    const SuspendedSpacetime st = susp_surface(s);
    HullSurfaceOptions hull_opts;
    hull_opts.max_orbit_points = opts.max_orbit_points;
    const HullSurface h = stabilize_hull(st.gluing_representation, st.decoration, opts.r0, opts.r_max, hull_opts);
    const QuotientSurfaceReport q = quotient_surface(h);
    report.stabilized_at = h.stabilized_at;
    report.fundamental_facets = h.fundamental.size();
    report.expected = st.cellulation;
    report.recovered = delaunay(q.surface);
    report.match = match_cellulations(report.expected, report.recovered, opts.tol);
    if (!report.match.matched) {
        throw Error(ErrorCode::Mismatch, "round trip differs: " + report.match.reason);
    }
    return report;
}

}  // namespace cauchyhull
