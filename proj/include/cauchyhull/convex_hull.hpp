#pragma once

// Euclidean convex hull in R^3. Quickhull-style incremental construction on
// exact orientation predicates; coplanar neighbouring triangles are merged
// into maximal convex polygons afterwards.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "cauchyhull/error.hpp"
#include "cauchyhull/predicates.hpp"

namespace cauchyhull {

/// Relative distance under which a neighbour's apex counts as coplanar.
inline constexpr double kCoplanarMergeTolerance = 1e-8;

struct HullPolygon {
    /// Cyclic vertex order, counter-clockwise seen from outside; starts at
    /// the smallest index.
    std::vector<std::size_t> vertices;
    /// Outward unit normal and offset: n . x <= offset for every input point.
    Point3 normal{};
    double offset = 0.0;
};

struct HullOptions {
    /// 0 keeps the input order; otherwise points are shuffled with this seed
    /// before insertion. The output is canonically sorted either way.
    unsigned shuffle_seed = 0;
    double merge_tolerance = kCoplanarMergeTolerance;
};

namespace detail {

inline Point3 sub(const Point3& a, const Point3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Point3 cross(const Point3& a, const Point3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double dot(const Point3& a, const Point3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Point3& a) { return std::sqrt(dot(a, a)); }
inline double inf_norm(const Point3& a) { return std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])}); }

inline bool exactly_collinear(const Point3& a, const Point3& b, const Point3& c) {
    // Collinear iff every orientation against a non-coplanar probe vanishes;
    // use the three coordinate-shifted probes of a.
    for (int k = 0; k < 3; ++k) {
        Point3 probe = a;
        probe[k] += 1.0;
        if (probe[k] == a[k]) probe[k] = a[k] * 2.0 + 1.0;
        if (orient3d(a, b, c, probe) != 0) return false;
    }
    return true;
}

class Quickhull {
public:
    struct Face {
        std::array<std::size_t, 3> v{};
        std::array<std::size_t, 3> nbr{};  // across edge (v[k], v[k+1])
        std::vector<std::size_t> outside;
        bool alive = true;
    };

    Quickhull(std::span<const Point3> pts, std::vector<std::size_t> order) : pts_(pts), order_(std::move(order)) {}

    /// Affine rank of the input (0..3); the hull is built only for rank 3.
    int run() {
        const int rank = initial_simplex();
        if (rank < 3) return rank;
        std::vector<std::size_t> stack;
        for (std::size_t f = 0; f < faces_.size(); ++f) stack.push_back(f);
        while (!stack.empty()) {
            const std::size_t f = stack.back();
            stack.pop_back();
            if (!faces_[f].alive || faces_[f].outside.empty()) continue;
            const std::size_t apex = furthest(f);
            const auto created = add_point(f, apex);
            for (std::size_t g : created) stack.push_back(g);
        }
        return 3;
    }

    const std::vector<Face>& faces() const { return faces_; }

private:
    int side(const Face& f, std::size_t p) const { return orient3d(pts_[f.v[0]], pts_[f.v[1]], pts_[f.v[2]], pts_[p]); }

    int initial_simplex() {
        if (order_.empty()) return -1;
        const std::size_t a = order_[0];
        std::size_t b = npos, c = npos, d = npos;
        double best = 0.0;
        for (std::size_t i : order_) {
            const double dist = inf_norm(sub(pts_[i], pts_[a]));
            if (dist > best) { best = dist; b = i; }
        }
        if (b == npos) return 0;
        best = 0.0;
        const Point3 ab = sub(pts_[b], pts_[a]);
        for (std::size_t i : order_) {
            const double area = norm(cross(ab, sub(pts_[i], pts_[a])));
            if (area > best) { best = area; c = i; }
        }
        if (c == npos || exactly_collinear(pts_[a], pts_[b], pts_[c])) {
            // The floating estimate may miss a barely non-collinear point.
            c = npos;
            for (std::size_t i : order_) {
                if (!exactly_collinear(pts_[a], pts_[b], pts_[i])) { c = i; break; }
            }
            if (c == npos) return 1;
        }
        best = 0.0;
        for (std::size_t i : order_) {
            const double vol = std::abs(orient3d_approx(pts_[a], pts_[b], pts_[c], pts_[i]));
            if (vol > best) { best = vol; d = i; }
        }
        if (d == npos || orient3d(pts_[a], pts_[b], pts_[c], pts_[d]) == 0) {
            d = npos;
            for (std::size_t i : order_) {
                if (orient3d(pts_[a], pts_[b], pts_[c], pts_[i]) != 0) { d = i; break; }
            }
            if (d == npos) return 2;
        }
        // Orient so that d is on the negative side of (a, b, c).
        std::array<std::size_t, 4> s{a, b, c, d};
        if (orient3d(pts_[a], pts_[b], pts_[c], pts_[d]) > 0) std::swap(s[1], s[2]);
        const std::array<std::array<std::size_t, 3>, 4> tris{{
            {s[0], s[1], s[2]}, {s[0], s[3], s[1]}, {s[1], s[3], s[2]}, {s[2], s[3], s[0]}}};
        for (const auto& t : tris) {
            Face f;
            f.v = t;
            faces_.push_back(f);
        }
        link_all();
        for (std::size_t i : order_) {
            if (i == s[0] || i == s[1] || i == s[2] || i == s[3]) continue;
            for (std::size_t f = 0; f < faces_.size(); ++f) {
                if (side(faces_[f], i) > 0) {
                    faces_[f].outside.push_back(i);
                    break;
                }
            }
        }
        return 3;
    }

    void link_all() {
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_face;
        for (std::size_t f = 0; f < faces_.size(); ++f) {
            for (int k = 0; k < 3; ++k) edge_face[{faces_[f].v[k], faces_[f].v[(k + 1) % 3]}] = f;
        }
        for (std::size_t f = 0; f < faces_.size(); ++f) {
            for (int k = 0; k < 3; ++k) {
                faces_[f].nbr[k] = edge_face.at({faces_[f].v[(k + 1) % 3], faces_[f].v[k]});
            }
        }
    }

    std::size_t furthest(std::size_t f) const {
        const Face& face = faces_[f];
        std::size_t best = face.outside.front();
        double best_val = -1.0;
        for (std::size_t p : face.outside) {
            const double val = orient3d_approx(pts_[face.v[0]], pts_[face.v[1]], pts_[face.v[2]], pts_[p]);
            if (val > best_val) { best_val = val; best = p; }
        }
        return best;
    }

    std::vector<std::size_t> add_point(std::size_t seed, std::size_t p) {
        // Visible region by flood fill from the seed face.
        std::vector<std::size_t> visible{seed};
        std::vector<char> mark(faces_.size(), 0);
        mark[seed] = 1;
        for (std::size_t i = 0; i < visible.size(); ++i) {
            for (std::size_t n : faces_[visible[i]].nbr) {
                if (mark[n]) continue;
                mark[n] = side(faces_[n], p) > 0 ? 1 : 2;
                if (mark[n] == 1) visible.push_back(n);
            }
        }
        struct Horizon { std::size_t a, b, outer; };
        std::vector<Horizon> horizon;
        for (std::size_t f : visible) {
            for (int k = 0; k < 3; ++k) {
                const std::size_t n = faces_[f].nbr[k];
                if (mark[n] != 1) horizon.push_back({faces_[f].v[k], faces_[f].v[(k + 1) % 3], n});
            }
        }
        std::vector<std::size_t> orphans;
        for (std::size_t f : visible) {
            faces_[f].alive = false;
            for (std::size_t q : faces_[f].outside) {
                if (q != p) orphans.push_back(q);
            }
            faces_[f].outside.clear();
        }
        std::vector<std::size_t> created;
        std::map<std::size_t, std::size_t> by_start;
        for (const Horizon& h : horizon) {
            Face nf;
            nf.v = {h.a, h.b, p};
            nf.nbr[0] = h.outer;
            const std::size_t id = faces_.size();
            Face& outer = faces_[h.outer];
            for (int k = 0; k < 3; ++k) {
                if (outer.v[k] == h.b && outer.v[(k + 1) % 3] == h.a) outer.nbr[k] = id;
            }
            faces_.push_back(nf);
            created.push_back(id);
            by_start[h.a] = id;
        }
        for (std::size_t id : created) {
            Face& f = faces_[id];
            f.nbr[1] = by_start.at(f.v[1]);
            // Face across (p, a) is the one ending at a.
            for (std::size_t other : created) {
                if (faces_[other].v[1] == f.v[0]) { f.nbr[2] = other; break; }
            }
        }
        for (std::size_t q : orphans) {
            for (std::size_t id : created) {
                if (side(faces_[id], q) > 0) {
                    faces_[id].outside.push_back(q);
                    break;
                }
            }
        }
        return created;
    }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::span<const Point3> pts_;
    std::vector<std::size_t> order_;
    std::vector<Face> faces_;
};

inline std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    return i;
}

/// Newell normal of a planar polygon (unnormalized).
inline Point3 newell_normal(std::span<const Point3> pts, const std::vector<std::size_t>& poly) {
    Point3 n{0, 0, 0};
    const Point3& o = pts[poly[0]];
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point3 a = sub(pts[poly[i]], o);
        const Point3 b = sub(pts[poly[(i + 1) % poly.size()]], o);
        const Point3 c = cross(a, b);
        n[0] += c[0];
        n[1] += c[1];
        n[2] += c[2];
    }
    return n;
}

inline HullPolygon make_polygon(std::span<const Point3> pts, std::vector<std::size_t> poly) {
    const auto first = std::min_element(poly.begin(), poly.end());
    std::rotate(poly.begin(), first, poly.end());
    HullPolygon out;
    Point3 n = newell_normal(pts, poly);
    const double len = norm(n);
    for (auto& c : n) c /= len;
    double offset = 0.0;
    for (std::size_t v : poly) offset += dot(n, pts[v]);
    out.normal = n;
    out.offset = offset / static_cast<double>(poly.size());
    out.vertices = std::move(poly);
    return out;
}

/// Merges coplanar neighbouring triangles and sorts the polygons.
inline std::vector<HullPolygon> merge_coplanar(std::span<const Point3> pts, const std::vector<Quickhull::Face>& faces,
                                               double tol) {
    std::vector<std::size_t> alive;
    std::vector<std::size_t> slot(faces.size(), 0);
    for (std::size_t f = 0; f < faces.size(); ++f) {
        if (faces[f].alive) {
            slot[f] = alive.size();
            alive.push_back(f);
        }
    }
    auto apex_distance = [&](const Quickhull::Face& f, std::size_t q) {
        const Point3& a = pts[f.v[0]];
        const Point3 n = cross(sub(pts[f.v[1]], a), sub(pts[f.v[2]], a));
        const double scale = std::max({1.0, inf_norm(a), inf_norm(pts[f.v[1]]), inf_norm(pts[f.v[2]]), inf_norm(pts[q])});
        return std::abs(dot(n, sub(pts[q], a))) / (norm(n) * scale);
    };
    std::vector<std::size_t> parent(alive.size());
    std::iota(parent.begin(), parent.end(), 0);
    for (std::size_t i = 0; i < alive.size(); ++i) {
        const auto& f = faces[alive[i]];
        for (int k = 0; k < 3; ++k) {
            const std::size_t nb = f.nbr[k];
            if (nb < alive[i]) continue;
            const auto& g = faces[nb];
            std::size_t apex_g = g.v[0];
            for (std::size_t v : g.v) {
                if (v != f.v[k] && v != f.v[(k + 1) % 3]) apex_g = v;
            }
            const std::size_t apex_f = f.v[(k + 2) % 3];
            if (apex_distance(f, apex_g) <= tol && apex_distance(g, apex_f) <= tol) {
                parent[find_root(parent, i)] = find_root(parent, slot[nb]);
            }
        }
    }
    std::map<std::size_t, std::map<std::size_t, std::size_t>> boundary;  // group -> start -> end
    for (std::size_t i = 0; i < alive.size(); ++i) {
        const auto& f = faces[alive[i]];
        const std::size_t root = find_root(parent, i);
        for (int k = 0; k < 3; ++k) {
            if (find_root(parent, slot[f.nbr[k]]) != root) boundary[root][f.v[k]] = f.v[(k + 1) % 3];
        }
    }
    std::vector<HullPolygon> out;
    for (auto& [root, edges] : boundary) {
        std::vector<std::size_t> poly;
        std::size_t start = edges.begin()->first;
        std::size_t cur = start;
        do {
            poly.push_back(cur);
            cur = edges.at(cur);
        } while (cur != start && poly.size() <= edges.size());
        out.push_back(make_polygon(pts, std::move(poly)));
    }
    std::sort(out.begin(), out.end(), [](const HullPolygon& a, const HullPolygon& b) { return a.vertices < b.vertices; });
    return out;
}

}  // namespace detail

/// Affine rank of a point set under exact predicates (-1 for empty input).
inline int affine_rank(std::span<const Point3> pts) {
    if (pts.empty()) return -1;
    std::size_t b = 0;
    while (b < pts.size() && pts[b] == pts[0]) ++b;
    if (b == pts.size()) return 0;
    std::size_t c = b + 1;
    while (c < pts.size() && detail::exactly_collinear(pts[0], pts[b], pts[c])) ++c;
    if (c >= pts.size()) return 1;
    for (std::size_t d = 0; d < pts.size(); ++d) {
        if (orient3d(pts[0], pts[b], pts[c], pts[d]) != 0) return 3;
    }
    return 2;
}

/// Full Euclidean convex hull as maximal convex polygons with outward
/// normals, sorted by vertex sequence. Throws Degenerate when the points
/// span less than a 3-dimensional affine space.
inline std::vector<HullPolygon> convex_hull_3d(std::span<const Point3> pts, const HullOptions& opts = {}) {
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    if (opts.shuffle_seed != 0) {
        std::mt19937 rng(opts.shuffle_seed);
        std::shuffle(order.begin(), order.end(), rng);
    }
    detail::Quickhull qh(pts, std::move(order));
    const int rank = qh.run();
    if (rank < 3) {
        throw Error(ErrorCode::Degenerate, "points span an affine space of dimension " + std::to_string(std::max(rank, 0)));
    }
    return detail::merge_coplanar(pts, qh.faces(), opts.merge_tolerance);
}

}  // namespace cauchyhull
