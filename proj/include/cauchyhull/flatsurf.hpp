#pragma once

// Singular Euclidean surfaces as glued triangles: hinge development, edge
// legality, Lawson flips to the Delaunay cellulation, cone angles.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

#include "cauchyhull/error.hpp"

namespace cauchyhull {

/// Relative band of the normalized in-circle determinant treated as cocyclic.
inline constexpr double kCocyclicTolerance = 1e-9;
/// Relative tolerance on the lengths of glued sides.
inline constexpr double kGlueTolerance = 1e-8;
/// Relative slack below which a triangle inequality counts as violated.
inline constexpr double kTriangleSlack = 1e-9;

inline constexpr std::size_t kNoDart = static_cast<std::size_t>(-1);

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// Triangle with corners 0, 1, 2; side k runs from corner k to corner k+1.
struct Triangle {
    std::array<std::size_t, 3> vertices{};
    std::array<double, 3> lengths{};
};

/// Dart 3t + k is side k of triangle t. `gluing` is an involution on darts
/// (kNoDart marks a boundary side).
struct ConeSurface {
    std::vector<Triangle> triangles;
    std::vector<std::size_t> gluing;
    std::size_t vertex_count = 0;

    std::size_t dart_count() const { return 3 * triangles.size(); }
    static std::size_t triangle_of(std::size_t dart) { return dart / 3; }
    static std::size_t side_of(std::size_t dart) { return dart % 3; }
    static std::size_t next(std::size_t dart) { return 3 * (dart / 3) + (dart % 3 + 1) % 3; }
    static std::size_t prev(std::size_t dart) { return 3 * (dart / 3) + (dart % 3 + 2) % 3; }

    double length(std::size_t dart) const { return triangles[dart / 3].lengths[dart % 3]; }
    std::size_t tail(std::size_t dart) const { return triangles[dart / 3].vertices[dart % 3]; }
    std::size_t head(std::size_t dart) const { return triangles[dart / 3].vertices[(dart % 3 + 1) % 3]; }
    std::size_t twin(std::size_t dart) const { return gluing[dart]; }

    /// Number of glued edges plus boundary sides.
    std::size_t edge_count() const {
        std::size_t n = 0;
        for (std::size_t d = 0; d < gluing.size(); ++d) {
            if (gluing[d] == kNoDart || d < gluing[d]) ++n;
        }
        return n;
    }

    bool closed() const {
        return std::none_of(gluing.begin(), gluing.end(), [](std::size_t g) { return g == kNoDart; });
    }

    int euler_characteristic() const {
        return static_cast<int>(vertex_count) - static_cast<int>(edge_count()) + static_cast<int>(triangles.size());
    }
};

namespace detail {

/// Twice the area from three side lengths (Kahan's stable Heron); negative
/// when the lengths violate a triangle inequality.
inline double heron_twice_area(double a, double b, double c) {
    std::array<double, 3> s{a, b, c};
    std::sort(s.begin(), s.end(), std::greater<>());
    const double x = s[0], y = s[1], z = s[2];
    const double p = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z));
    return p < 0.0 ? -0.5 * std::sqrt(-p) : 0.5 * std::sqrt(p);
}

inline double triangle_slack(double a, double b, double c) {
    const double m = std::max({a, b, c});
    return (a + b + c - 2.0 * m) / m;
}

/// Interior angle opposite side `opp` in a triangle with the other sides
/// `s1`, `s2` (half-angle formula, accurate for thin triangles).
inline double angle_opposite(double opp, double s1, double s2) {
    const double s = 0.5 * (opp + s1 + s2);
    const double num = (s - s1) * (s - s2);
    const double den = s * (s - opp);
    if (den <= 0.0) return std::numbers::pi;
    return 2.0 * std::atan(std::sqrt(std::max(0.0, num) / den));
}

/// Apex of a triangle over the segment (0,0)-(l,0) with distances da, db
/// to the two ends; `side` = +1 places it above the axis.
inline Vec2 place_apex(double l, double da, double db, double side) {
    const double x = (l * l + da * da - db * db) / (2.0 * l);
    const double h = heron_twice_area(l, da, db) / l;
    return {x, side * std::max(0.0, h)};
}

}  // namespace detail

/// Throws DegenerateTriangle when a triangle's lengths fail the strict
/// triangle inequalities, InvalidSurface when the gluing is inconsistent.
inline void validate(const ConeSurface& s) {
    if (s.gluing.size() != s.dart_count()) throw Error(ErrorCode::InvalidSurface, "gluing size mismatch");
    for (std::size_t t = 0; t < s.triangles.size(); ++t) {
        const auto& tri = s.triangles[t];
        for (double l : tri.lengths) {
            if (!(l > 0.0) || !std::isfinite(l)) {
                throw Error(ErrorCode::DegenerateTriangle, "triangle " + std::to_string(t) + " has a non-positive side");
            }
        }
        if (detail::triangle_slack(tri.lengths[0], tri.lengths[1], tri.lengths[2]) <= kTriangleSlack) {
            throw Error(ErrorCode::DegenerateTriangle, "triangle " + std::to_string(t) + " violates a triangle inequality");
        }
        for (std::size_t v : tri.vertices) {
            if (v >= s.vertex_count) throw Error(ErrorCode::InvalidSurface, "vertex id out of range");
        }
    }
    for (std::size_t d = 0; d < s.dart_count(); ++d) {
        const std::size_t g = s.gluing[d];
        if (g == kNoDart) continue;
        if (g >= s.dart_count() || s.gluing[g] != d || g == d) {
            throw Error(ErrorCode::InvalidSurface, "gluing is not a fixed-point-free involution at dart " + std::to_string(d));
        }
        const double a = s.length(d), b = s.length(g);
        if (std::abs(a - b) > kGlueTolerance * std::max(a, b)) {
            throw Error(ErrorCode::InvalidSurface, "glued sides differ in length at dart " + std::to_string(d));
        }
        if (s.tail(d) != s.head(g) || s.head(d) != s.tail(g)) {
            throw Error(ErrorCode::InvalidSurface, "glued sides disagree on vertices at dart " + std::to_string(d));
        }
    }
}

/// Builds a surface from consistently oriented faces; lengths from the
/// callback `length(u, v)`. Each directed edge u->v must be matched by v->u
/// in another face, or stays a boundary side.
template <typename LengthFn>
ConeSurface surface_from_faces(std::size_t vertex_count, const std::vector<std::array<std::size_t, 3>>& faces,
                               LengthFn length) {
    ConeSurface s;
    s.vertex_count = vertex_count;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> directed;
    for (const auto& f : faces) {
        Triangle tri;
        tri.vertices = f;
        for (int k = 0; k < 3; ++k) {
            tri.lengths[k] = length(f[k], f[(k + 1) % 3]);
            const auto key = std::make_pair(f[k], f[(k + 1) % 3]);
            if (!directed.emplace(key, 3 * s.triangles.size() + k).second) {
                throw Error(ErrorCode::InvalidSurface, "directed edge used twice; faces are not consistently oriented");
            }
        }
        s.triangles.push_back(tri);
    }
    s.gluing.assign(s.dart_count(), kNoDart);
    for (const auto& [key, dart] : directed) {
        const auto it = directed.find({key.second, key.first});
        if (it != directed.end()) s.gluing[dart] = it->second;
    }
    return s;
}

inline double area(const ConeSurface& s) {
    double total = 0.0;
    for (const auto& t : s.triangles) total += 0.5 * detail::heron_twice_area(t.lengths[0], t.lengths[1], t.lengths[2]);
    return total;
}

/// Interior angle at corner k of triangle t.
inline double corner_angle(const ConeSurface& s, std::size_t t, std::size_t k) {
    const auto& l = s.triangles[t].lengths;
    // Opposite corner k is side k+1.
    return detail::angle_opposite(l[(k + 1) % 3], l[k], l[(k + 2) % 3]);
}

inline double cone_angle(const ConeSurface& s, std::size_t vertex) {
    if (vertex >= s.vertex_count) throw Error(ErrorCode::UnknownVertex, "vertex " + std::to_string(vertex));
    double total = 0.0;
    for (std::size_t t = 0; t < s.triangles.size(); ++t) {
        for (std::size_t k = 0; k < 3; ++k) {
            if (s.triangles[t].vertices[k] == vertex) total += corner_angle(s, t, k);
        }
    }
    return total;
}

inline std::vector<double> cone_angles(const ConeSurface& s) {
    std::vector<double> out(s.vertex_count, 0.0);
    for (std::size_t t = 0; t < s.triangles.size(); ++t) {
        for (std::size_t k = 0; k < 3; ++k) out[s.triangles[t].vertices[k]] += corner_angle(s, t, k);
    }
    return out;
}

/// Sum of (2 pi - cone angle) minus 2 pi chi; zero for consistent data.
inline double gauss_bonnet_residual(const ConeSurface& s) {
    double curvature = 0.0;
    for (double a : cone_angles(s)) curvature += 2.0 * std::numbers::pi - a;
    return curvature - 2.0 * std::numbers::pi * s.euler_characteristic();
}

/// Sum over triangles of the cotangents of their angles,
/// (a^2 + b^2 + c^2) / (4 A). Each Lawson flip of an illegal edge lowers it.
inline double delaunay_energy(const ConeSurface& s) {
    double total = 0.0;
    for (const auto& t : s.triangles) {
        const auto& l = t.lengths;
        const double twice_area = detail::heron_twice_area(l[0], l[1], l[2]);
        total += (l[0] * l[0] + l[1] * l[1] + l[2] * l[2]) / (2.0 * twice_area);
    }
    return total;
}

/// Two triangles sharing `dart`, developed in the plane: points[0], points[1]
/// are the tail and head of the dart, points[2] the apex of its triangle
/// (left of the dart) and points[3] the apex across it.
struct Hinge {
    std::size_t dart = kNoDart;
    std::size_t twin = kNoDart;
    std::array<Vec2, 4> points{};
};

inline Hinge develop_hinge(const ConeSurface& s, std::size_t dart) {
    if (dart >= s.dart_count()) throw Error(ErrorCode::InvalidSurface, "dart out of range");
    const std::size_t tw = s.twin(dart);
    if (tw == kNoDart) throw Error(ErrorCode::BoundaryEdge, "dart " + std::to_string(dart) + " is on the boundary");
    for (std::size_t d : {dart, tw}) {
        const auto& l = s.triangles[d / 3].lengths;
        if (detail::triangle_slack(l[0], l[1], l[2]) <= kTriangleSlack) {
            throw Error(ErrorCode::DegenerateTriangle, "triangle " + std::to_string(d / 3) + " is degenerate");
        }
    }
    Hinge h;
    h.dart = dart;
    h.twin = tw;
    const double l = s.length(dart);
    h.points[0] = {0.0, 0.0};
    h.points[1] = {l, 0.0};
    // Apex c: |b c| is side next(dart), |c a| is side prev(dart).
    h.points[2] = detail::place_apex(l, s.length(ConeSurface::prev(dart)), s.length(ConeSurface::next(dart)), 1.0);
    // Across: the twin runs b -> a; its next side runs a -> e, prev e -> b.
    h.points[3] = detail::place_apex(l, s.length(ConeSurface::next(tw)), s.length(ConeSurface::prev(tw)), -1.0);
    return h;
}

enum class Legality { Legal, Illegal, Cocyclic };

inline const char* to_string(Legality l) {
    switch (l) {
        case Legality::Legal: return "Legal";
        case Legality::Illegal: return "Illegal";
        case Legality::Cocyclic: return "Cocyclic";
    }
    return "?";
}

/// In-circle determinant of d against the ccw triangle (a, b, c), divided by
/// the fourth power of the largest pairwise distance. Positive inside.
inline double incircle_normalized(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const Vec2 ad = a - d, bd = b - d, cd = c - d;
    const double det = (ad.x * ad.x + ad.y * ad.y) * cross(bd, cd) - (bd.x * bd.x + bd.y * bd.y) * cross(ad, cd) +
                       (cd.x * cd.x + cd.y * cd.y) * cross(ad, bd);
    const double scale = std::max({norm(ad), norm(bd), norm(cd), distance(a, b), distance(b, c), distance(c, a)});
    return det / (scale * scale * scale * scale);
}

inline Legality is_legal(const ConeSurface& s, std::size_t dart, double tol = kCocyclicTolerance) {
    const std::size_t tw = s.twin(dart);
    if (tw == kNoDart) throw Error(ErrorCode::BoundaryEdge, "dart " + std::to_string(dart) + " is on the boundary");
    if (tw / 3 == dart / 3) return Legality::Legal;
    const Hinge h = develop_hinge(s, dart);
    const double v = incircle_normalized(h.points[0], h.points[1], h.points[2], h.points[3]);
    if (std::abs(v) <= tol) return Legality::Cocyclic;
    return v > 0.0 ? Legality::Illegal : Legality::Legal;
}

/// True when the developed hinge is a strictly convex quadrilateral, so the
/// other diagonal lies inside it.
inline bool flippable(const ConeSurface& s, std::size_t dart, double margin = 1e-12) {
    const std::size_t tw = s.twin(dart);
    if (tw == kNoDart || tw / 3 == dart / 3) return false;
    const Hinge h = develop_hinge(s, dart);
    const auto& p = h.points;
    const Vec2 ce = p[3] - p[2];
    const double scale = std::max(norm(ce), distance(p[0], p[1]));
    const double sa = cross(ce, p[0] - p[2]) / (scale * scale);
    const double sb = cross(ce, p[1] - p[2]) / (scale * scale);
    return sa < -margin && sb > margin;
}

/// Replaces the diagonal of the hinge at `dart` by the other diagonal. The
/// two triangles keep their slots: (a, b, c) + (b, a, e) become (a, e, c)
/// and (e, b, c). Returns the dart of the new diagonal in the first slot.
inline std::size_t flip(ConeSurface& s, std::size_t dart) {
    if (!flippable(s, dart)) throw Error(ErrorCode::InvalidSurface, "edge is not flippable");
    const Hinge h = develop_hinge(s, dart);
    const std::size_t tw = s.twin(dart);
    const std::size_t t1 = dart / 3, t2 = tw / 3;
    const std::size_t a = s.tail(dart), b = s.head(dart);
    const std::size_t c = s.head(ConeSurface::next(dart));
    const std::size_t e = s.head(ConeSurface::next(tw));
    const std::size_t bc = ConeSurface::next(dart), ca = ConeSurface::prev(dart);
    const std::size_t ae = ConeSurface::next(tw), eb = ConeSurface::prev(tw);
    const double len_bc = s.length(bc), len_ca = s.length(ca), len_ae = s.length(ae), len_eb = s.length(eb);
    const double diag = distance(h.points[2], h.points[3]);

    // Old outer dart -> new slot.
    const std::array<std::pair<std::size_t, std::size_t>, 4> remap{{
        {ae, 3 * t1 + 0}, {ca, 3 * t1 + 2}, {eb, 3 * t2 + 0}, {bc, 3 * t2 + 1}}};
    auto mapped = [&](std::size_t d) {
        for (const auto& [from, to] : remap) {
            if (from == d) return to;
        }
        return d;
    };
    std::array<std::size_t, 4> partner{};
    for (std::size_t i = 0; i < 4; ++i) {
        const std::size_t p = s.gluing[remap[i].first];
        partner[i] = p == kNoDart ? kNoDart : mapped(p);
    }

    s.triangles[t1] = Triangle{{a, e, c}, {len_ae, diag, len_ca}};
    s.triangles[t2] = Triangle{{e, b, c}, {len_eb, len_bc, diag}};
    for (std::size_t i = 0; i < 4; ++i) {
        const std::size_t slot = remap[i].second;
        s.gluing[slot] = partner[i];
        if (partner[i] != kNoDart) s.gluing[partner[i]] = slot;
    }
    s.gluing[3 * t1 + 1] = 3 * t2 + 2;
    s.gluing[3 * t2 + 2] = 3 * t1 + 1;
    return 3 * t1 + 1;
}

/// A Delaunay cell: a convex polygon inscribed in a circle, developed in the
/// plane with counter-clockwise vertices.
struct Cell {
    /// Boundary darts of the underlying triangulation, side k from corner k
    /// to corner k+1.
    std::vector<std::size_t> darts;
    std::vector<std::size_t> vertices;
    std::vector<double> lengths;
    std::vector<Vec2> points;
    Vec2 center;
    double circumradius = 0.0;
    std::vector<std::size_t> triangles;

    std::size_t size() const { return vertices.size(); }
};

struct CellSide {
    std::size_t cell = 0;
    std::size_t side = 0;
};

struct Cellulation {
    /// Delaunay triangulation the cells were merged from.
    ConeSurface triangulation;
    std::vector<Cell> cells;
    /// For every dart of the triangulation on a cell boundary: its cell side.
    std::vector<std::optional<CellSide>> side_of_dart;
    std::size_t flips = 0;

    /// The side glued to `side` of `cell`, if any.
    std::optional<CellSide> opposite(std::size_t cell, std::size_t side) const {
        const std::size_t tw = triangulation.twin(cells[cell].darts[side]);
        if (tw == kNoDart) return std::nullopt;
        return side_of_dart[tw];
    }
};

struct DelaunayOptions {
    double tol = kCocyclicTolerance;
    /// 0 flips the smallest illegal dart first; otherwise a seeded random
    /// illegal edge is picked at each step.
    unsigned seed = 0;
};

namespace detail {

inline Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
    const Vec2 ab = b - a, ac = c - a;
    const double d = 2.0 * cross(ab, ac);
    const double ab2 = dot(ab, ab), ac2 = dot(ac, ac);
    return a + Vec2{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
}

/// Places triangle t so that `dart`'s tail is at p and head at q.
inline std::array<Vec2, 3> place_triangle(const ConeSurface& s, std::size_t dart, Vec2 p, Vec2 q) {
    const double l = s.length(dart);
    const Vec2 apex = place_apex(l, s.length(ConeSurface::prev(dart)), s.length(ConeSurface::next(dart)), 1.0);
    const Vec2 ux = (1.0 / distance(p, q)) * (q - p);
    const Vec2 uy{-ux.y, ux.x};
    const Vec2 c = p + apex.x * ux + apex.y * uy;
    std::array<Vec2, 3> out;
    const std::size_t k = dart % 3;
    out[k] = p;
    out[(k + 1) % 3] = q;
    out[(k + 2) % 3] = c;
    return out;
}

inline Cellulation build_cells(ConeSurface tri, std::size_t flips, double tol) {
    Cellulation out;
    const std::size_t nt = tri.triangles.size();
    std::vector<char> internal(tri.dart_count(), 0);
    for (std::size_t d = 0; d < tri.dart_count(); ++d) {
        const std::size_t tw = tri.twin(d);
        if (tw == kNoDart || tw / 3 == d / 3) continue;
        if (is_legal(tri, d, tol) == Legality::Cocyclic) internal[d] = 1;
    }
    std::vector<std::size_t> cell_of(nt, kNoDart);
    std::vector<std::array<Vec2, 3>> placed(nt);
    out.side_of_dart.assign(tri.dart_count(), std::nullopt);
    for (std::size_t start = 0; start < nt; ++start) {
        if (cell_of[start] != kNoDart) continue;
        const std::size_t id = out.cells.size();
        Cell cell;
        cell_of[start] = id;
        placed[start] = place_triangle(tri, 3 * start, {0.0, 0.0}, {tri.length(3 * start), 0.0});
        std::queue<std::size_t> queue;
        queue.push(start);
        while (!queue.empty()) {
            const std::size_t t = queue.front();
            queue.pop();
            cell.triangles.push_back(t);
            for (std::size_t k = 0; k < 3; ++k) {
                const std::size_t d = 3 * t + k;
                if (!internal[d]) continue;
                const std::size_t tw = tri.twin(d);
                const std::size_t u = tw / 3;
                if (cell_of[u] != kNoDart) continue;
                cell_of[u] = id;
                // The twin runs from head(d) to tail(d).
                placed[u] = place_triangle(tri, tw, placed[t][(k + 1) % 3], placed[t][k]);
                queue.push(u);
            }
        }
        std::sort(cell.triangles.begin(), cell.triangles.end());
        // Boundary walk from the smallest boundary dart.
        std::size_t first = kNoDart;
        for (std::size_t t : cell.triangles) {
            for (std::size_t k = 0; k < 3 && first == kNoDart; ++k) {
                if (!internal[3 * t + k]) first = 3 * t + k;
            }
            if (first != kNoDart) break;
        }
        std::size_t d = first;
        do {
            cell.darts.push_back(d);
            cell.vertices.push_back(tri.tail(d));
            cell.lengths.push_back(tri.length(d));
            cell.points.push_back(placed[d / 3][d % 3]);
            std::size_t x = ConeSurface::next(d);
            while (internal[x]) x = ConeSurface::next(tri.twin(x));
            d = x;
        } while (d != first && cell.darts.size() <= tri.dart_count());
        const Vec2 ctr = circumcenter(placed[start][0], placed[start][1], placed[start][2]);
        cell.center = ctr;
        cell.circumradius = distance(ctr, placed[start][0]);
        for (std::size_t k = 0; k < cell.darts.size(); ++k) out.side_of_dart[cell.darts[k]] = CellSide{id, k};
        out.cells.push_back(std::move(cell));
    }
    out.triangulation = std::move(tri);
    out.flips = flips;
    return out;
}

}  // namespace detail

/// Lawson flips until every edge is legal, then merges triangles across
/// cocyclic edges into cells. Throws FlipLimitExceeded after 100 E^2 flips.
inline Cellulation delaunay(ConeSurface s, const DelaunayOptions& opts = {}) {
    validate(s);
    const std::size_t edges = s.edge_count();
    const std::size_t cap = 100 * edges * edges;
    std::size_t flips = 0;
    std::mt19937 rng(opts.seed);
    for (;;) {
        std::vector<std::size_t> illegal;
        for (std::size_t d = 0; d < s.dart_count(); ++d) {
            const std::size_t tw = s.twin(d);
            if (tw == kNoDart || tw < d) continue;
            if (is_legal(s, d, opts.tol) == Legality::Illegal) {
                illegal.push_back(d);
                if (opts.seed == 0) break;
            }
        }
        if (illegal.empty()) break;
        if (flips >= cap) {
            throw Error(ErrorCode::FlipLimitExceeded, "flip cap " + std::to_string(cap) + " reached");
        }
        std::size_t pick = illegal.front();
        if (opts.seed != 0) pick = illegal[std::uniform_int_distribution<std::size_t>(0, illegal.size() - 1)(rng)];
        flip(s, pick);
        ++flips;
    }
    return detail::build_cells(std::move(s), flips, opts.tol);
}

/// Cellulations compared as combinatorial maps of cell sides (next within a
/// cell, twin across an edge) with side lengths; a mirror image counts as
/// equivalent.
struct CellulationMatch {
    bool matched = false;
    bool mirrored = false;
    double max_relative_error = 0.0;
    std::string reason;
};

namespace detail {

struct SideMap {
    std::vector<std::size_t> next, prev, twin;
    std::vector<double> length;
    std::vector<std::size_t> cell_size;
};

inline SideMap side_map(const Cellulation& c) {
    SideMap m;
    std::vector<std::size_t> offset;
    std::size_t total = 0;
    for (const auto& cell : c.cells) {
        offset.push_back(total);
        total += cell.size();
    }
    m.next.resize(total);
    m.prev.resize(total);
    m.twin.assign(total, kNoDart);
    m.length.resize(total);
    m.cell_size.resize(total);
    for (std::size_t i = 0; i < c.cells.size(); ++i) {
        const std::size_t n = c.cells[i].size();
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t id = offset[i] + k;
            m.next[id] = offset[i] + (k + 1) % n;
            m.prev[id] = offset[i] + (k + n - 1) % n;
            m.length[id] = c.cells[i].lengths[k];
            m.cell_size[id] = n;
            if (const auto o = c.opposite(i, k)) m.twin[id] = offset[o->cell] + o->side;
        }
    }
    return m;
}

/// Tries the map from side 0 of `a` to `start` of `b`; returns the worst
/// relative length error or nullopt when the combinatorics disagree.
inline std::optional<double> try_match(const SideMap& a, const SideMap& b, std::size_t start, bool mirror) {
    const std::size_t n = a.next.size();
    std::vector<std::size_t> image(n, kNoDart), preimage(n, kNoDart);
    std::vector<std::size_t> stack{0};
    image[0] = start;
    preimage[start] = 0;
    double worst = 0.0;
    auto assign = [&](std::size_t x, std::size_t y) {
        if (x == kNoDart || y == kNoDart) return x == y;
        if (image[x] == kNoDart && preimage[y] == kNoDart) {
            image[x] = y;
            preimage[y] = x;
            stack.push_back(x);
            return true;
        }
        return image[x] == y;
    };
    while (!stack.empty()) {
        const std::size_t x = stack.back();
        stack.pop_back();
        const std::size_t y = image[x];
        if (a.cell_size[x] != b.cell_size[y]) return std::nullopt;
        worst = std::max(worst, std::abs(a.length[x] - b.length[y]) / std::max(a.length[x], b.length[y]));
        if (!assign(a.next[x], mirror ? b.prev[y] : b.next[y])) return std::nullopt;
        if (!assign(a.twin[x], b.twin[y])) return std::nullopt;
    }
    if (std::find(image.begin(), image.end(), kNoDart) != image.end()) return std::nullopt;
    return worst;
}

}  // namespace detail

/// Finds the best isomorphism between two cellulations (including mirror
/// images) and reports its worst relative side-length error.
inline CellulationMatch match_cellulations(const Cellulation& a, const Cellulation& b, double tol = 1e-6) {
    CellulationMatch out;
    const auto ma = detail::side_map(a);
    auto mb = detail::side_map(b);
    if (ma.next.size() != mb.next.size() || a.cells.size() != b.cells.size()) {
        out.reason = "different numbers of cells or sides: " + std::to_string(a.cells.size()) + "/" +
                     std::to_string(ma.next.size()) + " vs " + std::to_string(b.cells.size()) + "/" +
                     std::to_string(mb.next.size());
        return out;
    }
    if (ma.next.empty()) {
        out.matched = true;
        return out;
    }
    // Under a mirror a side from u to v corresponds to the side from v to u,
    // so a mirrored side keeps its twin and length but swaps next and prev.
    std::optional<double> best;
    bool best_mirror = false;
    for (bool mirror : {false, true}) {
        for (std::size_t start = 0; start < mb.next.size(); ++start) {
            const auto r = detail::try_match(ma, mb, start, mirror);
            if (r && (!best || *r < *best)) {
                best = r;
                best_mirror = mirror;
            }
        }
    }
    if (!best) {
        out.reason = "no combinatorial isomorphism";
        return out;
    }
    out.max_relative_error = *best;
    out.mirrored = best_mirror;
    out.matched = *best <= tol;
    if (!out.matched) out.reason = "side lengths differ by " + std::to_string(*best);
    return out;
}

/// Applies `count` random flips of convex hinges; the metric is unchanged.
/// Hinges whose new triangles would be nearly degenerate are skipped.
inline ConeSurface random_retriangulation(ConeSurface s, unsigned seed, std::size_t count) {
    std::mt19937 rng(seed);
    std::size_t done = 0;
    std::size_t attempts = 0;
    while (done < count && attempts < 100 * count + 100) {
        ++attempts;
        const std::size_t d = std::uniform_int_distribution<std::size_t>(0, s.dart_count() - 1)(rng);
        if (!flippable(s, d, 1e-3)) continue;
        ConeSurface trial = s;
        flip(trial, d);
        bool ok = true;
        for (std::size_t t : {d / 3, trial.twin(3 * (d / 3) + 1) / 3}) {
            const auto& l = trial.triangles[t].lengths;
            if (detail::triangle_slack(l[0], l[1], l[2]) < 1e-3) ok = false;
        }
        if (!ok) continue;
        s = std::move(trial);
        ++done;
    }
    return s;
}

}  // namespace cauchyhull
