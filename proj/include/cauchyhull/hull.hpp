#pragma once

// The convex hull of a decorated orbit on the light cone: its spacelike
// facets, a fundamental set of facets modulo the group, face pairings, and
// the induced singular Euclidean surface.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cauchyhull/convex_hull.hpp"
#include "cauchyhull/decoration.hpp"
#include "cauchyhull/error.hpp"
#include "cauchyhull/flatsurf.hpp"
#include "cauchyhull/holonomy.hpp"
#include "cauchyhull/minkowski.hpp"

namespace cauchyhull {

/// Relative tolerance for identifying translated facets with hull facets.
inline constexpr double kFacetMatchTolerance = 1e-7;
/// Looser match, accepted only when the runner-up is kMatchSeparation times
/// further away.
inline constexpr double kLooseFacetMatchTolerance = 1e-4;
inline constexpr double kMatchSeparation = 1e3;

struct Facet {
    /// Orbit indices, counter-clockwise in the (x, y) projection.
    std::vector<std::size_t> vertices;
    /// Future timelike unit normal (q(u) = -1) and level: <v|u> = c on the
    /// facet, <p|u> <= c for every orbit point.
    MinkVec u;
    double c = 0.0;
};

struct FundamentalFacet {
    /// Index into HullSurface::facets.
    std::size_t facet = 0;
    /// Per vertex in the facet's cyclic order.
    std::vector<Word> words;
    std::vector<std::size_t> punctures;
    std::vector<MinkVec> points;
    MinkVec u;
    double c = 0.0;
};

/// Side `side` of fundamental facet `facet` is glued to side `other_side` of
/// `other`: rho(word) maps the other side onto this one, reversing it.
struct Pairing {
    std::size_t facet = 0;
    std::size_t side = 0;
    std::size_t other = 0;
    std::size_t other_side = 0;
    Word word;
};

struct HullSurface {
    OrbitPointSet orbit;
    std::vector<Facet> facets;
    std::vector<FundamentalFacet> fundamental;
    std::vector<Pairing> pairings;
    int stabilized_at = -1;
};

inline constexpr std::size_t kDefaultMaxOrbitPoints = 1'000'000;
/// Adjacent spacelike facets whose unit normals satisfy -<u|u'> - 1 <= this
/// are one facet. Unlike a Euclidean coplanarity test this does not depend
/// on the Lorentz frame of the orbit.
inline constexpr double kSpacelikeMergeTolerance = 1e-8;

struct HullSurfaceOptions {
    /// Options of the Euclidean hull; its merge tolerance is not used, since
    /// ep_surface merges only exactly coplanar triangles there.
    HullOptions hull;
    double facet_merge_tolerance = kSpacelikeMergeTolerance;
    /// Orbit size at which stabilize_hull gives up (0: unlimited).
    std::size_t max_orbit_points = kDefaultMaxOrbitPoints;
};

namespace detail {

inline Point3 as_point(const MinkVec& v) { return {v.t, v.x, v.y}; }

/// Support data of a facet with Euclidean outward normal n, kept when its
/// plane is spacelike and faces the past (decided exactly on the first
/// three vertices): u = J n, normalized to q(u) = -1.
inline std::optional<Facet> spacelike_facet(const std::vector<std::size_t>& ccw_outside,
                                            const std::vector<Point3>& pts, const Point3& n, double offset) {
    int nt_sign = 0;
    const int causal = plane_causal_sign(pts[ccw_outside[0]], pts[ccw_outside[1]], pts[ccw_outside[2]], &nt_sign);
    if (causal <= 0 || nt_sign >= 0) return std::nullopt;
    MinkVec u(-n[0], n[1], n[2]);
    const double scale = std::sqrt(-quadratic(u));
    if (!(scale > 0.0)) return std::nullopt;
    Facet f;
    f.u = u / scale;
    f.c = offset / scale;
    // Seen from outside (the past) the hull order is clockwise in (x, y).
    f.vertices.assign(ccw_outside.rbegin(), ccw_outside.rend());
    const auto first = std::min_element(f.vertices.begin(), f.vertices.end());
    std::rotate(f.vertices.begin(), first, f.vertices.end());
    return f;
}

/// Merges neighbouring facets with nearly equal normals. A facet joins a
/// group only when its normal is close to that of the group's first facet.
inline std::vector<Facet> merge_spacelike(const std::vector<Point3>& pts, std::vector<Facet> facets, double tol) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_facet;
    for (std::size_t f = 0; f < facets.size(); ++f) {
        const auto& vs = facets[f].vertices;
        for (std::size_t i = 0; i < vs.size(); ++i) edge_facet[{vs[i], vs[(i + 1) % vs.size()]}] = f;
    }
    std::vector<std::size_t> parent(facets.size());
    std::iota(parent.begin(), parent.end(), 0);
    bool merged = false;
    for (const auto& [e, f] : edge_facet) {
        const auto it = edge_facet.find({e.second, e.first});
        if (it == edge_facet.end() || it->second < f) continue;
        const std::size_t a = find_root(parent, f), b = find_root(parent, it->second);
        if (a == b || -mink_form(facets[a].u, facets[b].u) - 1.0 > tol) continue;
        parent[std::max(a, b)] = std::min(a, b);
        merged = true;
    }
    if (!merged) return facets;

    std::map<std::size_t, std::map<std::size_t, std::size_t>> boundary;  // group -> start -> end
    for (const auto& [e, f] : edge_facet) {
        const auto it = edge_facet.find({e.second, e.first});
        const std::size_t root = find_root(parent, f);
        if (it == edge_facet.end() || find_root(parent, it->second) != root) boundary[root][e.first] = e.second;
    }
    std::vector<std::size_t> members(facets.size(), 0);
    for (std::size_t f = 0; f < facets.size(); ++f) ++members[find_root(parent, f)];
    std::vector<Facet> out;
    for (auto& [root, edges] : boundary) {
        Facet g;
        const std::size_t start = edges.begin()->first;
        std::size_t cur = start;
        do {
            g.vertices.push_back(cur);
            cur = edges.at(cur);
        } while (cur != start && g.vertices.size() <= edges.size());
        if (members[root] == 1) {
            out.push_back(std::move(facets[root]));
            continue;
        }
        // Facet order is clockwise seen from the past, so the Newell normal
        // of the reversed cycle points outwards.
        const std::vector<std::size_t> outside(g.vertices.rbegin(), g.vertices.rend());
        const Point3 n = newell_normal(pts, outside);
        MinkVec u(-n[0], n[1], n[2]);
        u = u / std::sqrt(-quadratic(u));
        double c = 0.0;
        for (std::size_t v : g.vertices) c += mink_form(MinkVec(pts[v][0], pts[v][1], pts[v][2]), u);
        g.u = u;
        g.c = c / static_cast<double>(g.vertices.size());
        std::rotate(g.vertices.begin(), std::min_element(g.vertices.begin(), g.vertices.end()), g.vertices.end());
        out.push_back(std::move(g));
    }
    return out;
}

/// Convex hull of coplanar points given as a single polygon, counter-
/// clockwise as seen from the side of `normal`.
inline std::vector<std::size_t> planar_hull(const std::vector<Point3>& pts, const Point3& normal) {
    // Orthonormal basis of the plane.
    Point3 e1 = std::abs(normal[0]) < 0.9 ? Point3{1, 0, 0} : Point3{0, 1, 0};
    Point3 e2 = cross(normal, e1);
    const double l2 = norm(e2);
    for (auto& x : e2) x /= l2;
    e1 = cross(e2, normal);
    const double l1 = norm(e1);
    for (auto& x : e1) x /= l1;
    std::vector<std::size_t> idx(pts.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<std::pair<double, double>> uv(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) uv[i] = {dot(pts[i], e1), dot(pts[i], e2)};
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return uv[a] < uv[b]; });
    auto turn = [&](std::size_t o, std::size_t a, std::size_t b) {
        return (uv[a].first - uv[o].first) * (uv[b].second - uv[o].second) -
               (uv[a].second - uv[o].second) * (uv[b].first - uv[o].first);
    };
    std::vector<std::size_t> h(2 * idx.size());
    std::size_t k = 0;
    for (std::size_t i : idx) {
        while (k >= 2 && turn(h[k - 2], h[k - 1], i) <= 0) --k;
        h[k++] = i;
    }
    for (std::size_t j = idx.size() - 1, t = k + 1; j-- > 0;) {
        const std::size_t i = idx[j];
        while (k >= t && turn(h[k - 2], h[k - 1], i) <= 0) --k;
        h[k++] = i;
    }
    h.resize(k > 1 ? k - 1 : k);
    return h;
}

}  // namespace detail

/// Spacelike facets of the convex hull of the orbit, i.e. the facets of the
/// boundary of its closed convex hull seen from the past. Lightlike and
/// future-facing faces are dropped. Throws Degenerate when none remain.
inline HullSurface ep_surface(const OrbitPointSet& o, const HullSurfaceOptions& opts = {}) {
    if (o.entries.empty()) throw Error(ErrorCode::Degenerate, "empty orbit");
    HullSurface out;
    out.orbit = o;
    std::vector<Point3> pts;
    pts.reserve(o.size());
    for (const auto& e : o.entries) pts.push_back(detail::as_point(e.point));

    const int rank = affine_rank(pts);
    if (rank == 2) {
        // A single plane: one polygon, oriented so the normal points to the past.
        std::size_t b = 1;
        while (pts[b] == pts[0]) ++b;
        std::size_t c = b + 1;
        while (detail::exactly_collinear(pts[0], pts[b], pts[c])) ++c;
        Point3 n = detail::cross(detail::sub(pts[b], pts[0]), detail::sub(pts[c], pts[0]));
        const double len = detail::norm(n);
        for (auto& x : n) x /= len;
        if (n[0] > 0.0) n = {-n[0], -n[1], -n[2]};
        const auto poly = detail::planar_hull(pts, n);
        if (poly.size() >= 3) {
            if (auto f = detail::spacelike_facet(poly, pts, n, detail::dot(n, pts[poly[0]]))) out.facets.push_back(*f);
        }
    } else if (rank == 3) {
        HullOptions exact = opts.hull;
        exact.merge_tolerance = 0.0;
        for (const HullPolygon& p : convex_hull_3d(pts, exact)) {
            if (auto f = detail::spacelike_facet(p.vertices, pts, p.normal, p.offset)) out.facets.push_back(*f);
        }
        out.facets = detail::merge_spacelike(pts, std::move(out.facets), opts.facet_merge_tolerance);
    }
    if (out.facets.empty()) throw Error(ErrorCode::Degenerate, "no spacelike facet in the hull of the orbit");
    std::sort(out.facets.begin(), out.facets.end(),
              [](const Facet& a, const Facet& b) { return a.vertices < b.vertices; });
    return out;
}

namespace detail {

/// Horocyclic coordinate around a cusp: the peripheral P fixes p and acts on
/// s by the translation s -> s + alpha.
struct CuspChart {
    MinkVec p;
    MinkVec v;
    MinkVec e;
    AffineIsometry peripheral;
    double alpha = 0.0;
    double s0 = 0.0;

    double s(const MinkVec& x) const {
        const MinkVec d = x - p;
        return mink_form(d, e) / -mink_form(d, v);
    }
};

struct Corner {
    std::size_t facet = 0;     // hull facet index
    std::size_t puncture = 0;  // cusp of the corner vertex
    std::size_t position = 0;  // index of the cusp vertex in the facet
};

inline bool same_polygon(const std::vector<MinkVec>& a, const std::vector<MinkVec>& b, std::size_t* shift = nullptr) {
    if (a.size() != b.size()) return false;
    const std::size_t n = a.size();
    for (std::size_t r = 0; r < n; ++r) {
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            const MinkVec& x = a[i];
            const MinkVec& y = b[(i + r) % n];
            ok = sup_norm(x - y) <= kFacetMatchTolerance * std::max(1.0, sup_norm(x));
        }
        if (ok) {
            if (shift) *shift = r;
            return true;
        }
    }
    return false;
}

/// Least over cyclic shifts of the largest relative vertex distance.
inline double polygon_distance(const std::vector<MinkVec>& a, const std::vector<MinkVec>& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    const std::size_t n = a.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < n; ++r) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            m = std::max(m, sup_norm(a[i] - b[(i + r) % n]) / std::max(1.0, sup_norm(a[i])));
        }
        best = std::min(best, m);
    }
    return best;
}

class FundamentalBuilder {
public:
    FundamentalBuilder(const AffineRepresentation& rep, const Decoration& d, HullSurface& h)
        : rep_(rep), dec_(d), h_(h) {}

    /// Fills h.fundamental and h.pairings; false (with a reason) when the
    /// truncated complex is not yet consistent near the decoration.
    bool run(std::string& why) {
        const std::size_t s = dec_.points.size();
        for (std::size_t j = 0; j < s; ++j) {
            if (h_.orbit.entries.size() <= j || h_.orbit.entries[j].puncture != j || !h_.orbit.entries[j].word.empty()) {
                why = "decoration points are not distinct orbit points";
                return false;
            }
        }
        for (std::size_t f = 0; f < h_.facets.size(); ++f) {
            for (std::size_t v : h_.facets[f].vertices) vertex_facets_[v].push_back(f);
        }
        if (!build_charts(why)) return false;
        if (!collect_corners(why)) return false;
        if (!classify_corners(why)) return false;
        if (!build_pairings(why)) return false;
        return true;
    }

private:
    std::vector<MinkVec> facet_points(std::size_t f) const {
        std::vector<MinkVec> out;
        for (std::size_t v : h_.facets[f].vertices) out.push_back(h_.orbit.point(v));
        return out;
    }

    bool build_charts(std::string& why) {
        for (std::size_t j = 0; j < dec_.points.size(); ++j) {
            CuspChart ch;
            ch.p = dec_.points[j];
            ch.peripheral = peripheral(rep_, j);
            // The peripheral is a product of generators; allow for its rounding.
            const double size = std::max(1.0, ch.peripheral.linear.m.cwiseAbs().maxCoeff());
            ch.v = parabolic_direction(ch.peripheral.linear, 1e-8 * size);
            ch.e = mink_cross(ch.v, MinkVec(1.0, 0.0, 0.0));
            ch.e = ch.e / std::sqrt(quadratic(ch.e));
            const auto it = vertex_facets_.find(j);
            if (it == vertex_facets_.end()) {
                why = "cusp " + std::to_string(j + 1) + " is not a hull vertex";
                return false;
            }
            std::optional<double> best;
            MinkVec best_point;
            for (std::size_t f : it->second) {
                const auto& vs = h_.facets[f].vertices;
                const std::size_t n = vs.size();
                const std::size_t pos = std::find(vs.begin(), vs.end(), j) - vs.begin();
                for (std::size_t nb : {vs[(pos + 1) % n], vs[(pos + n - 1) % n]}) {
                    const MinkVec x = h_.orbit.point(nb);
                    const double sx = ch.s(x);
                    const double tie = 1e-9 * std::max(1.0, std::abs(sx));
                    if (!best || std::abs(sx) < std::abs(*best) - tie ||
                        (std::abs(std::abs(sx) - std::abs(*best)) <= tie && sx > *best)) {
                        best = sx;
                        best_point = x;
                    }
                }
            }
            ch.s0 = *best;
            ch.alpha = ch.s(ch.peripheral(best_point)) - ch.s0;
            if (!(std::abs(ch.alpha) > 0.0)) {
                why = "peripheral " + std::to_string(j + 1) + " does not translate its horocycle";
                return false;
            }
            charts_.push_back(ch);
        }
        return true;
    }

    /// Midpoint of the horocyclic coordinates of the two facet neighbours
    /// of the cusp vertex, for a polygon given by points.
    double corner_mid(const CuspChart& ch, const std::vector<MinkVec>& pts, std::size_t pos) const {
        const std::size_t n = pts.size();
        return 0.5 * (ch.s(pts[(pos + 1) % n]) + ch.s(pts[(pos + n - 1) % n]));
    }

    long window_shift(const CuspChart& ch, double mid) const {
        const double period = std::abs(ch.alpha);
        const long n = static_cast<long>(std::floor((mid - ch.s0) / period));
        return ch.alpha > 0 ? -n : n;
    }

    bool collect_corners(std::string& why) {
        for (std::size_t j = 0; j < charts_.size(); ++j) {
            const CuspChart& ch = charts_[j];
            for (std::size_t f : vertex_facets_.at(j)) {
                const auto& vs = h_.facets[f].vertices;
                const std::size_t pos = std::find(vs.begin(), vs.end(), j) - vs.begin();
                const double mid = corner_mid(ch, facet_points(f), pos);
                if (window_shift(ch, mid) == 0) corners_.push_back({f, j, pos});
            }
            bool any = false;
            for (const Corner& c : corners_) any = any || c.puncture == j;
            if (!any) {
                why = "no corner in the window of cusp " + std::to_string(j + 1);
                return false;
            }
        }
        return true;
    }

    /// Translates polygon `pts` (with cusp `j` at `pos`) into the window of
    /// cusp j; returns the matching corner and the shift exponent.
    std::optional<std::pair<std::size_t, long>> find_corner(std::size_t j, std::vector<MinkVec> pts,
                                                            std::size_t pos) const {
        const CuspChart& ch = charts_[j];
        const long k = window_shift(ch, corner_mid(ch, pts, pos));
        const AffineIsometry pk = k >= 0 ? power_of(ch.peripheral, k) : power_of(ch.peripheral.inverse(), -k);
        for (auto& x : pts) x = pk(x);
        // Far orbit points carry more rounding than kFacetMatchTolerance; a
        // looser match is accepted when it is unambiguous.
        double best = std::numeric_limits<double>::infinity(), second = best;
        std::size_t best_c = 0;
        for (std::size_t c = 0; c < corners_.size(); ++c) {
            if (corners_[c].puncture != j) continue;
            const double d = polygon_distance(facet_points(corners_[c].facet), pts);
            if (d < best) {
                second = best;
                best = d;
                best_c = c;
            } else if (d < second) {
                second = d;
            }
        }
        if (best <= kFacetMatchTolerance || (best <= kLooseFacetMatchTolerance && second >= kMatchSeparation * best)) {
            return std::make_pair(best_c, k);
        }
        return std::nullopt;
    }

    static AffineIsometry power_of(const AffineIsometry& g, long k) {
        AffineIsometry out;
        for (long i = 0; i < k; ++i) out = out * g;
        return out;
    }

    Word peripheral_power(std::size_t j, long k) const { return power(rep_.presentation.peripherals[j], k); }

    /// rho(g) maps the facet of corner c to the facet of the corner at its
    /// vertex m; returns that corner index and g.
    std::optional<std::pair<std::size_t, Word>> translate_to_vertex(std::size_t c, std::size_t m) const {
        const std::size_t f = corners_[c].facet;
        const std::size_t v = h_.facets[f].vertices[m];
        const OrbitEntry& entry = h_.orbit.entries[v];
        const AffineIsometry winv = evaluate_word(rep_, entry.word).inverse();
        std::vector<MinkVec> pts = facet_points(f);
        for (auto& x : pts) x = winv(x);
        const auto hit = find_corner(entry.puncture, pts, m);
        if (!hit) return std::nullopt;
        return std::make_pair(hit->first, concat(peripheral_power(entry.puncture, hit->second), inverse(entry.word)));
    }

    bool classify_corners(std::string& why) {
        const std::size_t n = corners_.size();
        // Edges c -> c' with rho(g) F_c = F_c'.
        std::vector<std::vector<std::pair<std::size_t, Word>>> edges(n);
        std::vector<std::size_t> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        for (std::size_t c = 0; c < n; ++c) {
            const std::size_t size = h_.facets[corners_[c].facet].vertices.size();
            for (std::size_t m = 0; m < size; ++m) {
                const auto hit = translate_to_vertex(c, m);
                if (!hit) {
                    why = "corner translate not found in the window";
                    return false;
                }
                edges[c].push_back(*hit);
                parent[find_root(parent, c)] = find_root(parent, hit->first);
            }
        }
        std::map<std::size_t, std::vector<std::size_t>> classes;
        for (std::size_t c = 0; c < n; ++c) classes[find_root(parent, c)].push_back(c);
        h_.fundamental.clear();
        corner_word_.assign(n, Word{});
        corner_class_.assign(n, 0);
        for (auto& [root, members] : classes) {
            const std::size_t size = h_.facets[corners_[members.front()].facet].vertices.size();
            if (members.size() != size) {
                why = "corner class of size " + std::to_string(members.size()) + " for a facet with " +
                      std::to_string(size) + " vertices";
                return false;
            }
            // Representative: the member whose sorted vertex words are least.
            auto key = [&](std::size_t c) {
                std::vector<Word> words;
                for (std::size_t v : h_.facets[corners_[c].facet].vertices) words.push_back(h_.orbit.entries[v].word);
                std::sort(words.begin(), words.end(), shortlex_less);
                return words;
            };
            std::size_t rep = members.front();
            auto best = key(rep);
            for (std::size_t c : members) {
                auto k = key(c);
                if (std::lexicographical_compare(k.begin(), k.end(), best.begin(), best.end(), shortlex_less)) {
                    best = std::move(k);
                    rep = c;
                }
            }
            // Words h_c with rho(h_c) F_c = F_rep, by search from rep over
            // reversed edges: c -> c' with g gives h_c = h_c' g.
            std::vector<char> seen(n, 0);
            std::vector<std::size_t> queue{rep};
            seen[rep] = 1;
            corner_word_[rep] = {};
            for (std::size_t i = 0; i < queue.size(); ++i) {
                const std::size_t target = queue[i];
                for (std::size_t c : members) {
                    if (seen[c]) continue;
                    for (const auto& [to, g] : edges[c]) {
                        if (to != target) continue;
                        corner_word_[c] = concat(corner_word_[target], g);
                        seen[c] = 1;
                        queue.push_back(c);
                        break;
                    }
                }
            }
            const std::size_t index = h_.fundamental.size();
            for (std::size_t c : members) {
                if (!seen[c]) {
                    why = "corner class is not connected";
                    return false;
                }
                corner_class_[c] = index;
            }
            const Facet& facet = h_.facets[corners_[rep].facet];
            FundamentalFacet ff;
            ff.facet = corners_[rep].facet;
            ff.u = facet.u;
            ff.c = facet.c;
            for (std::size_t v : facet.vertices) {
                ff.words.push_back(h_.orbit.entries[v].word);
                ff.punctures.push_back(h_.orbit.entries[v].puncture);
                ff.points.push_back(h_.orbit.point(v));
            }
            h_.fundamental.push_back(std::move(ff));
            rep_corner_.push_back(rep);
        }
        // Deterministic order of representatives.
        std::vector<std::size_t> order(h_.fundamental.size());
        std::iota(order.begin(), order.end(), 0);
        auto sorted_words = [&](const FundamentalFacet& f) {
            auto w = f.words;
            std::sort(w.begin(), w.end(), shortlex_less);
            return w;
        };
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const auto wa = sorted_words(h_.fundamental[a]);
            const auto wb = sorted_words(h_.fundamental[b]);
            if (wa != wb) return std::lexicographical_compare(wa.begin(), wa.end(), wb.begin(), wb.end(), shortlex_less);
            return h_.fundamental[a].facet < h_.fundamental[b].facet;
        });
        std::vector<std::size_t> rank(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
        std::vector<FundamentalFacet> sorted;
        std::vector<std::size_t> rep_sorted;
        for (std::size_t i : order) {
            sorted.push_back(h_.fundamental[i]);
            rep_sorted.push_back(rep_corner_[i]);
        }
        h_.fundamental = std::move(sorted);
        rep_corner_ = std::move(rep_sorted);
        for (auto& c : corner_class_) c = rank[c];
        return true;
    }

    bool build_pairings(std::string& why) {
        std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> edge_facets;
        for (std::size_t f = 0; f < h_.facets.size(); ++f) {
            const auto& vs = h_.facets[f].vertices;
            for (std::size_t i = 0; i < vs.size(); ++i) {
                const std::size_t a = vs[i], b = vs[(i + 1) % vs.size()];
                edge_facets[{std::min(a, b), std::max(a, b)}].push_back(f);
            }
        }
        h_.pairings.clear();
        for (std::size_t r = 0; r < h_.fundamental.size(); ++r) {
            const FundamentalFacet& ff = h_.fundamental[r];
            const auto& vs = h_.facets[ff.facet].vertices;
            const std::size_t n = vs.size();
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t a = vs[i], b = vs[(i + 1) % n];
                const auto it = edge_facets.find({std::min(a, b), std::max(a, b)});
                std::optional<std::size_t> nb;
                if (it != edge_facets.end()) {
                    for (std::size_t f : it->second) {
                        if (f != ff.facet) nb = f;
                    }
                }
                if (!nb) {
                    why = "fundamental facet side without a neighbour";
                    return false;
                }
                // Bring the neighbour to a corner through its shortest-word vertex.
                const auto& nvs = h_.facets[*nb].vertices;
                std::size_t m = 0;
                for (std::size_t k = 1; k < nvs.size(); ++k) {
                    if (shortlex_less(h_.orbit.entries[nvs[k]].word, h_.orbit.entries[nvs[m]].word)) m = k;
                }
                const OrbitEntry& entry = h_.orbit.entries[nvs[m]];
                const AffineIsometry winv = evaluate_word(rep_, entry.word).inverse();
                std::vector<MinkVec> pts;
                for (std::size_t v : nvs) pts.push_back(winv(h_.orbit.point(v)));
                const auto hit = find_corner(entry.puncture, pts, m);
                if (!hit) {
                    why = "neighbouring facet not found among corners";
                    return false;
                }
                const std::size_t cls = corner_class_[hit->first];
                const Word g = concat(concat(entry.word, peripheral_power(entry.puncture, -hit->second)),
                                      inverse(corner_word_[hit->first]));
                const AffineIsometry rho = evaluate_word(rep_, g);
                const FundamentalFacet& other = h_.fundamental[cls];
                const std::size_t on = other.points.size();
                const MinkVec pa = h_.orbit.point(a), pb = h_.orbit.point(b);
                std::optional<std::size_t> side;
                for (std::size_t k = 0; k < on; ++k) {
                    const MinkVec x = rho(other.points[k]), y = rho(other.points[(k + 1) % on]);
                    const double tol = kFacetMatchTolerance * std::max(1.0, sup_norm(pa));
                    if (sup_norm(x - pb) <= tol && sup_norm(y - pa) <= tol) side = k;
                }
                if (!side) {
                    why = "paired side not found";
                    return false;
                }
                h_.pairings.push_back({r, i, cls, *side, g});
            }
        }
        return true;
    }

    const AffineRepresentation& rep_;
    const Decoration& dec_;
    HullSurface& h_;
    std::map<std::size_t, std::vector<std::size_t>> vertex_facets_;
    std::vector<CuspChart> charts_;
    std::vector<Corner> corners_;
    std::vector<Word> corner_word_;
    std::vector<std::size_t> corner_class_;
    std::vector<std::size_t> rep_corner_;
};

/// Comparable summary of a fundamental set: words and supports.
struct FundamentalSignature {
    std::vector<std::vector<Word>> words;
    std::vector<MinkVec> u;
    std::vector<double> c;
};

inline FundamentalSignature signature(const HullSurface& h) {
    FundamentalSignature s;
    for (const auto& f : h.fundamental) {
        s.words.push_back(f.words);
        s.u.push_back(f.u);
        s.c.push_back(f.c);
    }
    return s;
}

inline bool same_signature(const FundamentalSignature& a, const FundamentalSignature& b, double tol = 1e-9) {
    if (a.words != b.words) return false;
    for (std::size_t i = 0; i < a.u.size(); ++i) {
        const double scale = std::max(1.0, std::abs(a.c[i]));
        if (sup_norm(a.u[i] - b.u[i]) > tol || std::abs(a.c[i] - b.c[i]) > tol * scale) return false;
    }
    return true;
}

/// Euler characteristic check of the fundamental set: s - E + F = 2 - 2g.
inline bool euler_consistent(const HullSurface& h, const GroupPresentation& p) {
    std::size_t sides = 0;
    for (const auto& f : h.fundamental) sides += f.words.size();
    if (sides % 2 != 0 || h.pairings.size() != sides) return false;
    const long chi = static_cast<long>(p.peripherals.size()) - static_cast<long>(sides / 2) +
                     static_cast<long>(h.fundamental.size());
    return chi == 2 - 2L * p.genus;
}

}  // namespace detail

/// Extracts the fundamental facets and pairings of a hull at a fixed radius.
/// Returns an empty string on success, else the reason it failed.
inline std::string extract_fundamental(const AffineRepresentation& rep, const Decoration& d, HullSurface& h) {
    std::string why;
    detail::FundamentalBuilder builder(rep, d, h);
    if (!builder.run(why)) {
        h.fundamental.clear();
        h.pairings.clear();
        return why;
    }
    if (!detail::euler_consistent(h, rep.presentation)) {
        h.fundamental.clear();
        h.pairings.clear();
        return "fundamental set fails the Euler characteristic";
    }
    return {};
}

/// Grows the word ball from `r0` until two consecutive radii give the same
/// fundamental facets (words and supports). Throws NotStabilized otherwise.
inline HullSurface stabilize_hull(const AffineRepresentation& rep, const Decoration& d, int r0, int r_max,
                                  const HullSurfaceOptions& opts = {}) {
    validate(d, rep);
    std::optional<detail::FundamentalSignature> previous;
    std::string last_reason;
    for (int r = r0; r <= r_max; ++r) {
        HullSurface h;
        try {
            h = ep_surface(orbit_ball(rep, d, r, opts.max_orbit_points), opts);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::NotStabilized) {
                const std::string msg = e.what();
                const std::string detail = last_reason.empty() ? "" : " (" + last_reason + ")";
                throw Error(ErrorCode::NotStabilized, msg.substr(msg.find(": ") + 2) + detail);
            }
            if (e.code() != ErrorCode::Degenerate) throw;
            previous.reset();
            last_reason = e.what();
            continue;
        }
        const std::string why = extract_fundamental(rep, d, h);
        if (!why.empty()) {
            previous.reset();
            last_reason = "R = " + std::to_string(r) + ": " + why;
            continue;
        }
        auto sig = detail::signature(h);
        if (previous && detail::same_signature(*previous, sig)) {
            h.stabilized_at = r;
            return h;
        }
        last_reason = "R = " + std::to_string(r) + ": fundamental set changed";
        previous = std::move(sig);
    }
    if (last_reason.empty()) last_reason = "radius range is empty";
    throw Error(ErrorCode::NotStabilized, "no two consecutive identical rounds up to R = " + std::to_string(r_max) +
                                              " (" + last_reason + ")");
}

struct QuotientSurfaceReport {
    ConeSurface surface;
    std::vector<double> cone_angles;
    /// Per fundamental facet, side k from vertex k to k+1.
    std::vector<std::vector<double>> edge_lengths;
    /// Surface vertex j is the cusp of decoration point j.
    std::vector<std::size_t> vertex_to_decoration;
};

inline double spacelike_length(const MinkVec& a, const MinkVec& b) { return std::sqrt(std::max(0.0, quadratic(a - b))); }

/// Singular Euclidean surface of the quotient: fundamental facets fan-
/// triangulated, glued by the pairings. Throws GluingMismatch when paired
/// sides differ in length.
inline QuotientSurfaceReport quotient_surface(const HullSurface& h, double glue_tol = kGlueTolerance) {
    if (h.fundamental.empty()) throw Error(ErrorCode::InvalidSurface, "hull has no fundamental facets");
    QuotientSurfaceReport out;
    std::size_t cusps = 0;
    for (const auto& f : h.fundamental) {
        for (std::size_t p : f.punctures) cusps = std::max(cusps, p + 1);
    }
    out.surface.vertex_count = cusps;
    out.vertex_to_decoration.resize(cusps);
    std::iota(out.vertex_to_decoration.begin(), out.vertex_to_decoration.end(), 0);

    // Dart of polygon side i in the fan from vertex 0.
    std::vector<std::size_t> first_triangle;
    auto side_dart = [&](std::size_t f, std::size_t i) {
        const std::size_t n = h.fundamental[f].points.size();
        const std::size_t t0 = first_triangle[f];
        if (i == 0) return 3 * t0;
        if (i == n - 1) return 3 * (t0 + n - 3) + 2;
        return 3 * (t0 + i - 1) + 1;
    };
    for (std::size_t f = 0; f < h.fundamental.size(); ++f) {
        const auto& ff = h.fundamental[f];
        const std::size_t n = ff.points.size();
        first_triangle.push_back(out.surface.triangles.size());
        std::vector<double> lengths;
        for (std::size_t k = 0; k < n; ++k) lengths.push_back(spacelike_length(ff.points[k], ff.points[(k + 1) % n]));
        out.edge_lengths.push_back(lengths);
        for (std::size_t m = 1; m + 1 < n; ++m) {
            Triangle t;
            t.vertices = {ff.punctures[0], ff.punctures[m], ff.punctures[m + 1]};
            t.lengths = {spacelike_length(ff.points[0], ff.points[m]), lengths[m],
                         spacelike_length(ff.points[m + 1], ff.points[0])};
            out.surface.triangles.push_back(t);
        }
    }
    out.surface.gluing.assign(out.surface.dart_count(), kNoDart);
    for (std::size_t f = 0; f < h.fundamental.size(); ++f) {
        const std::size_t t0 = first_triangle[f];
        const std::size_t n = h.fundamental[f].points.size();
        for (std::size_t m = 1; m + 2 < n; ++m) {
            const std::size_t a = 3 * (t0 + m - 1) + 2, b = 3 * (t0 + m);
            out.surface.gluing[a] = b;
            out.surface.gluing[b] = a;
        }
    }
    for (const Pairing& p : h.pairings) {
        const double la = out.edge_lengths[p.facet][p.side];
        const double lb = out.edge_lengths[p.other][p.other_side];
        if (std::abs(la - lb) > glue_tol * std::max(la, lb)) {
            throw Error(ErrorCode::GluingMismatch, "paired sides have lengths " + std::to_string(la) + " and " +
                                                       std::to_string(lb));
        }
        const std::size_t da = side_dart(p.facet, p.side), db = side_dart(p.other, p.other_side);
        out.surface.gluing[da] = db;
        out.surface.gluing[db] = da;
    }
    out.cone_angles = cone_angles(out.surface);
    return out;
}

struct RayCrossingOptions {
    /// Facets with a vertex word of length >= radius - margin are treated as
    /// possibly affected by truncation.
    int frontier_margin = 1;
};

/// Number of facets of the truncated complex met by the line base + t dir.
/// Throws InconclusiveNearBoundary when the line misses the complex or
/// meets a facet near the truncation frontier.
inline int ray_crossing_check(const HullSurface& h, const MinkVec& base, const MinkVec& dir,
                              const RayCrossingOptions& opts = {}) {
    if (!is_future_timelike(dir)) throw Error(ErrorCode::Degenerate, "ray direction must be future timelike");
    const int radius = h.stabilized_at >= 0 ? h.stabilized_at : h.orbit.radius;
    std::vector<MinkVec> hits;
    bool frontier = false;
    for (const Facet& f : h.facets) {
        const double denom = mink_form(dir, f.u);
        const double t = (f.c - mink_form(base, f.u)) / denom;
        const MinkVec x = base + t * dir;
        // Spacelike facets project injectively to (x, y); ccw polygon test.
        const std::size_t n = f.vertices.size();
        bool inside = true;
        const double scale = std::max(1.0, sup_norm(x));
        for (std::size_t i = 0; i < n && inside; ++i) {
            const MinkVec& a = h.orbit.point(f.vertices[i]);
            const MinkVec& b = h.orbit.point(f.vertices[(i + 1) % n]);
            const double turn = (b.x - a.x) * (x.y - a.y) - (b.y - a.y) * (x.x - a.x);
            if (turn < -1e-12 * scale * std::max(1.0, sup_norm(b - a))) inside = false;
        }
        if (!inside) continue;
        for (std::size_t v : f.vertices) {
            if (static_cast<int>(h.orbit.entries[v].word.size()) >= radius - opts.frontier_margin) frontier = true;
        }
        bool duplicate = false;
        for (const MinkVec& y : hits) duplicate = duplicate || sup_norm(x - y) <= 1e-9 * scale;
        if (!duplicate) hits.push_back(x);
    }
    if (frontier) throw Error(ErrorCode::InconclusiveNearBoundary, "crossing lies near the truncation frontier");
    if (hits.empty()) throw Error(ErrorCode::InconclusiveNearBoundary, "line misses the truncated complex");
    return static_cast<int>(hits.size());
}

}  // namespace cauchyhull
