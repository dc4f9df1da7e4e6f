#pragma once

// Reference inputs: lattice representations with known decompositions.

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "cauchyhull/convex_hull.hpp"
#include "cauchyhull/decoration.hpp"
#include "cauchyhull/flatsurf.hpp"
#include "cauchyhull/holonomy.hpp"
#include "cauchyhull/minkowski.hpp"

namespace cauchyhull::fixtures {

/// Null rotation fixing the lightlike direction (1, 1, 0).
inline LinearIsometry null_rotation() {
    Eigen::Matrix3d m;
    m << 1.5, -0.5, 1.0, 0.5, 0.5, 1.0, 1.0, -1.0, 1.0;
    return LinearIsometry(m);
}

/// Rotation by `theta` about the t-axis.
inline LinearIsometry rotation(double theta) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m(1, 1) = std::cos(theta);
    m(1, 2) = -std::sin(theta);
    m(2, 1) = std::sin(theta);
    m(2, 2) = std::cos(theta);
    return LinearIsometry(m);
}

/// Boost of rapidity `r` in the (t, x) plane.
inline LinearIsometry boost(double r) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m(0, 0) = std::cosh(r);
    m(0, 1) = std::sinh(r);
    m(1, 0) = std::sinh(r);
    m(1, 1) = std::cosh(r);
    return LinearIsometry(m);
}

/// Once-punctured torus: a = [[1,1],[1,2]], b = [[1,-1],[-1,2]] and
/// c = ([a,b])^-1 = [[1,0],[-6,1]] up to sign, fixing the cusp at 0.
inline AffineRepresentation punctured_torus() {
    AffineRepresentation rep;
    rep.presentation = GroupPresentation::marked_surface(1, 1);
    const LinearIsometry a = psl2_to_so12(1, 1, 1, 2);
    const LinearIsometry b = psl2_to_so12(1, -1, -1, 2);
    const LinearIsometry comm = a * b * a.inverse() * b.inverse();
    rep.images = {AffineIsometry(a), AffineIsometry(b), AffineIsometry(comm.inverse())};
    return rep;
}

/// Light-cone point over the cusp 0 of the torus fixture, scaled by `scale`.
inline Decoration punctured_torus_decoration(double scale = 1.0) {
    return Decoration{{scale * MinkVec(1.0, 0.0, -1.0)}};
}

/// Principal congruence subgroup Gamma(2) as a thrice-punctured sphere:
/// c1 = [[1,2],[0,1]] (cusp infinity), c2 = [[1,0],[-2,1]] (cusp 0),
/// c3 = (c1 c2)^-1 = [[1,-2],[2,-3]] (cusp 1).
inline AffineRepresentation gamma2() {
    AffineRepresentation rep;
    rep.presentation = GroupPresentation::marked_surface(0, 3);
    const LinearIsometry c1 = psl2_to_so12(1, 2, 0, 1);
    const LinearIsometry c2 = psl2_to_so12(1, 0, -2, 1);
    const LinearIsometry c3 = psl2_to_so12(1, -2, 2, -3);
    rep.images = {AffineIsometry(c1), AffineIsometry(c2), AffineIsometry(c3)};
    return rep;
}

/// Decoration invariant under the full modular group (the three cusps are
/// exchanged by PSL(2,Z)), each point scaled by the matching entry.
inline Decoration gamma2_decoration(double s1 = 1.0, double s2 = 1.0, double s3 = 1.0) {
    const MinkVec p_inf(1.0, 0.0, 1.0);
    const MinkVec p_0 = psl2_to_so12(0, -1, 1, 0)(p_inf);
    const MinkVec p_1 = psl2_to_so12(1, 0, 1, 1)(p_inf);
    return Decoration{{s1 * p_inf, s2 * p_0, s3 * p_1}};
}

/// Rep with every generator sent to the identity.
inline AffineRepresentation trivial(int genus, int punctures) {
    AffineRepresentation rep;
    rep.presentation = GroupPresentation::marked_surface(genus, punctures);
    rep.images.assign(rep.presentation.size(), AffineIsometry::identity());
    return rep;
}

/// Regular tetrahedron with edge `a`: four cone points of angle pi.
inline ConeSurface tetrahedron(double a = 1.0) {
    return surface_from_faces(4, {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}},
                              [a](std::size_t, std::size_t) { return a; });
}

/// Two unit squares glued along their boundary, diagonals crossing.
inline ConeSurface pillowcase(double side = 1.0) {
    const std::array<std::array<double, 2>, 4> xy{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
    return surface_from_faces(4, {{0, 1, 2}, {0, 2, 3}, {1, 0, 3}, {1, 3, 2}}, [&](std::size_t u, std::size_t v) {
        return side * std::hypot(xy[u][0] - xy[v][0], xy[u][1] - xy[v][1]);
    });
}

/// Unit square with opposite sides identified, cut along a diagonal.
inline ConeSurface square_torus() {
    ConeSurface s;
    s.vertex_count = 1;
    const double d = std::sqrt(2.0);
    s.triangles.push_back({{0, 0, 0}, {1.0, 1.0, d}});
    s.triangles.push_back({{0, 0, 0}, {d, 1.0, 1.0}});
    s.gluing = {4, 5, 3, 2, 0, 1};
    return s;
}

/// Boundary of the convex hull of `n` random points on the unit sphere.
inline ConeSurface random_convex_polyhedron(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    std::vector<Point3> pts(n);
    for (auto& p : pts) {
        p = {g(rng), g(rng), g(rng)};
        const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        for (double& c : p) c /= r;
    }
    std::vector<std::array<std::size_t, 3>> faces;
    for (const HullPolygon& f : convex_hull_3d(pts)) {
        for (std::size_t k = 1; k + 1 < f.vertices.size(); ++k) faces.push_back({f.vertices[0], f.vertices[k], f.vertices[k + 1]});
    }
    return surface_from_faces(n, faces, [&](std::size_t u, std::size_t v) {
        return std::hypot(pts[u][0] - pts[v][0], pts[u][1] - pts[v][1], pts[u][2] - pts[v][2]);
    });
}

}  // namespace cauchyhull::fixtures
