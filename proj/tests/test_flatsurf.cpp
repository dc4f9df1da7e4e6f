#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cauchyhull/fixtures.hpp"
#include "cauchyhull/flatsurf.hpp"

using namespace cauchyhull;

namespace {

constexpr double kPi = std::numbers::pi;

/// Two triangles (a, b, c) and (b, a, e) glued along ab, other sides free.
ConeSurface hinge_surface(Vec2 a, Vec2 b, Vec2 c, Vec2 e) {
    ConeSurface s;
    s.vertex_count = 4;
    s.triangles.push_back({{0, 1, 2}, {distance(a, b), distance(b, c), distance(c, a)}});
    s.triangles.push_back({{1, 0, 3}, {distance(b, a), distance(a, e), distance(e, b)}});
    s.gluing = {3, kNoDart, kNoDart, 0, kNoDart, kNoDart};
    return s;
}

/// d inside the circumcircle of (a, b, c), from the explicit circumcenter.
bool inside_circumcircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double den = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    const double a2 = a.x * a.x + a.y * a.y, b2 = b.x * b.x + b.y * b.y, c2 = c.x * c.x + c.y * c.y;
    const Vec2 o{(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / den,
                 (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / den};
    return distance(o, d) < distance(o, a);
}

}  // namespace

TEST(Surface, FixturesAreValid) {
    for (const ConeSurface& s : {fixtures::tetrahedron(), fixtures::pillowcase(), fixtures::square_torus(),
                                 fixtures::random_convex_polyhedron(12, 4)}) {
        EXPECT_NO_THROW(validate(s));
        EXPECT_TRUE(s.closed());
    }
    EXPECT_EQ(fixtures::tetrahedron().euler_characteristic(), 2);
    EXPECT_EQ(fixtures::square_torus().euler_characteristic(), 0);
    EXPECT_EQ(fixtures::random_convex_polyhedron(12, 4).triangles.size(), 20u);
}

TEST(Surface, ValidationErrors) {
    ConeSurface s = fixtures::tetrahedron();
    s.triangles[0].lengths[0] = 3.0;
    try {
        validate(s);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateTriangle);
    }
    ConeSurface t = fixtures::square_torus();
    t.gluing[0] = 1;
    EXPECT_THROW(validate(t), Error);
    ConeSurface u = fixtures::tetrahedron();
    u.triangles[0].lengths = {1.0, 1.0, 1.5};
    EXPECT_THROW(validate(u), Error);
}

TEST(DevelopHinge, UnitSquare) {
    // Diagonal of the square torus: dart 2 of triangle 0, length sqrt 2.
    const ConeSurface s = fixtures::square_torus();
    const Hinge h = develop_hinge(s, 2);
    const auto& p = h.points;
    EXPECT_NEAR(distance(p[0], p[1]), std::sqrt(2.0), 1e-12);
    for (int k : {2, 3}) {
        EXPECT_NEAR(distance(p[k], p[0]), 1.0, 1e-12);
        EXPECT_NEAR(distance(p[k], p[1]), 1.0, 1e-12);
    }
    EXPECT_NEAR(distance(p[2], p[3]), std::sqrt(2.0), 1e-12);
    EXPECT_GT(cross(p[1] - p[0], p[2] - p[0]), 0.0);
    EXPECT_LT(cross(p[1] - p[0], p[3] - p[0]), 0.0);
}

TEST(DevelopHinge, EquilateralRhombus) {
    const double a = 2.5;
    const ConeSurface s = fixtures::tetrahedron(a);
    for (std::size_t d = 0; d < s.dart_count(); ++d) {
        const Hinge h = develop_hinge(s, d);
        EXPECT_NEAR(distance(h.points[0], h.points[1]), a, 1e-12);
        EXPECT_NEAR(distance(h.points[2], h.points[3]), a * std::sqrt(3.0), 1e-12);
        for (int k : {2, 3}) {
            EXPECT_NEAR(distance(h.points[k], h.points[0]), a, 1e-12);
            EXPECT_NEAR(distance(h.points[k], h.points[1]), a, 1e-12);
        }
    }
}

TEST(DevelopHinge, Errors) {
    const ConeSurface s = hinge_surface({0, 0}, {1, 0}, {0.5, 1}, {0.5, -1});
    try {
        develop_hinge(s, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BoundaryEdge);
    }
    ConeSurface flat = s;
    flat.triangles[0].lengths = {2.0 - 1e-12, 1.0, 1.0};
    flat.triangles[1].lengths = {2.0 - 1e-12, 1.0, 1.0};
    try {
        develop_hinge(flat, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateTriangle);
    }
}

TEST(IsLegal, Examples) {
    EXPECT_EQ(is_legal(fixtures::square_torus(), 2), Legality::Cocyclic);
    const ConeSurface tet = fixtures::tetrahedron();
    for (std::size_t d = 0; d < tet.dart_count(); ++d) EXPECT_EQ(is_legal(tet, d), Legality::Legal);
    // Regular tetrahedron hinge: far apex at 2r from the circumcenter.
    const double r = 1.0 / std::sqrt(3.0);
    EXPECT_NEAR(1.0 / (2.0 * std::sqrt(3.0)) + std::sqrt(3.0) / 2.0, 2.0 * r, 1e-15);

    // Thin kite whose diagonal is the short side.
    const Vec2 a{0, 0}, b{1, 0}, c{0.5, 0.2}, e{0.5, -0.2};
    ASSERT_TRUE(inside_circumcircle(a, b, c, e));
    EXPECT_EQ(is_legal(hinge_surface(a, b, c, e), 0), Legality::Illegal);
    const Vec2 c2{0.5, 3}, e2{0.5, -3};
    ASSERT_FALSE(inside_circumcircle(a, b, c2, e2));
    EXPECT_EQ(is_legal(hinge_surface(a, b, c2, e2), 0), Legality::Legal);
    EXPECT_THROW(is_legal(hinge_surface(a, b, c, e), 1), Error);
}

TEST(Flip, KiteBecomesLegal) {
    ConeSurface s = hinge_surface({0, 0}, {1, 0}, {0.5, 0.2}, {0.5, -0.2});
    const double area_before = area(s);
    const std::size_t d = flip(s, 0);
    EXPECT_NO_THROW(validate(s));
    EXPECT_NEAR(s.length(d), 0.4, 1e-12);
    EXPECT_EQ(is_legal(s, d), Legality::Legal);
    EXPECT_NEAR(area(s), area_before, 1e-12);
}

TEST(Flip, RandomFlipsPreserveMetric) {
    const ConeSurface s = fixtures::random_convex_polyhedron(12, 9);
    const ConeSurface t = random_retriangulation(s, 3, 40);
    EXPECT_NO_THROW(validate(t));
    EXPECT_NEAR(area(t), area(s), 1e-9 * area(s));
    const auto a = cone_angles(s), b = cone_angles(t);
    for (std::size_t v = 0; v < a.size(); ++v) EXPECT_NEAR(a[v], b[v], 1e-9);
}

TEST(ConeAngle, Examples) {
    const ConeSurface tet = fixtures::tetrahedron(1.7);
    for (std::size_t v = 0; v < 4; ++v) EXPECT_NEAR(cone_angle(tet, v), kPi, 1e-12);
    const ConeSurface pil = fixtures::pillowcase();
    for (std::size_t v = 0; v < 4; ++v) EXPECT_NEAR(cone_angle(pil, v), kPi, 1e-12);
    EXPECT_NEAR(cone_angle(fixtures::square_torus(), 0), 2 * kPi, 1e-12);

    // Hexagon fanned around its center.
    ConeSurface hex;
    hex.vertex_count = 7;
    for (std::size_t k = 0; k < 6; ++k) hex.triangles.push_back({{6, k, (k + 1) % 6}, {1.0, 1.0, 1.0}});
    hex.gluing.assign(18, kNoDart);
    for (std::size_t k = 0; k < 6; ++k) {
        const std::size_t next = (k + 1) % 6;
        hex.gluing[3 * k + 2] = 3 * next;
        hex.gluing[3 * next] = 3 * k + 2;
    }
    EXPECT_NO_THROW(validate(hex));
    EXPECT_NEAR(cone_angle(hex, 6), 2 * kPi, 1e-10);
    try {
        cone_angle(hex, 7);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownVertex);
    }
}

TEST(GaussBonnet, Fixtures) {
    for (const ConeSurface& s : {fixtures::tetrahedron(), fixtures::pillowcase(), fixtures::square_torus()}) {
        EXPECT_LE(std::abs(gauss_bonnet_residual(s)), 1e-12);
    }
    for (unsigned seed = 1; seed <= 10; ++seed) {
        EXPECT_LE(std::abs(gauss_bonnet_residual(fixtures::random_convex_polyhedron(12, seed))), 1e-8);
    }
}

TEST(Delaunay, Tetrahedron) {
    const Cellulation c = delaunay(fixtures::tetrahedron());
    EXPECT_EQ(c.flips, 0u);
    ASSERT_EQ(c.cells.size(), 4u);
    for (const Cell& cell : c.cells) {
        EXPECT_EQ(cell.size(), 3u);
        EXPECT_NEAR(cell.circumradius, 1.0 / std::sqrt(3.0), 1e-12);
    }
}

TEST(Delaunay, PillowcaseSquares) {
    const Cellulation c = delaunay(fixtures::pillowcase());
    ASSERT_EQ(c.cells.size(), 2u);
    for (const Cell& cell : c.cells) {
        ASSERT_EQ(cell.size(), 4u);
        for (double l : cell.lengths) EXPECT_NEAR(l, 1.0, 1e-12);
        EXPECT_NEAR(cell.circumradius, std::sqrt(0.5), 1e-12);
        for (std::size_t k = 0; k < 4; ++k) {
            const auto o = c.opposite(0, k);
            ASSERT_TRUE(o.has_value());
        }
    }
}

TEST(Delaunay, SquareTorusSingleCell) {
    const Cellulation c = delaunay(fixtures::square_torus());
    ASSERT_EQ(c.cells.size(), 1u);
    EXPECT_EQ(c.cells[0].size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) {
        const auto o = c.opposite(0, k);
        ASSERT_TRUE(o.has_value());
        EXPECT_EQ(o->cell, 0u);
        EXPECT_EQ(o->side, (k + 2) % 4);
    }
}

TEST(Delaunay, CellsAreCocyclicAndEdgesLegal) {
    for (unsigned seed = 1; seed <= 5; ++seed) {
        const Cellulation c = delaunay(random_retriangulation(fixtures::random_convex_polyhedron(12, seed), seed, 30));
        for (const Cell& cell : c.cells) {
            for (const Vec2& p : cell.points) EXPECT_NEAR(distance(p, cell.center), cell.circumradius, 1e-9);
            for (std::size_t k = 0; k < cell.size(); ++k) {
                EXPECT_NEAR(distance(cell.points[k], cell.points[(k + 1) % cell.size()]), cell.lengths[k], 1e-9);
            }
        }
        for (std::size_t d = 0; d < c.triangulation.dart_count(); ++d) {
            EXPECT_NE(is_legal(c.triangulation, d), Legality::Illegal);
        }
    }
}

TEST(Delaunay, EnergyDecreasesAlongFlips) {
    ConeSurface s = random_retriangulation(fixtures::random_convex_polyhedron(12, 21), 5, 40);
    double energy = delaunay_energy(s);
    std::size_t flips = 0;
    for (;;) {
        std::size_t illegal = kNoDart;
        for (std::size_t d = 0; d < s.dart_count() && illegal == kNoDart; ++d) {
            if (is_legal(s, d) == Legality::Illegal) illegal = d;
        }
        if (illegal == kNoDart) break;
        flip(s, illegal);
        const double next = delaunay_energy(s);
        EXPECT_LT(next, energy);
        energy = next;
        ASSERT_LT(++flips, 100 * s.edge_count() * s.edge_count());
    }
    EXPECT_GT(flips, 0u);
}

TEST(Delaunay, UniqueUnderRetriangulationAndFlipOrder) {
    for (unsigned seed = 1; seed <= 50; ++seed) {
        const ConeSurface s = fixtures::random_convex_polyhedron(12, 100 + seed);
        ASSERT_EQ(s.triangles.size(), 20u);
        const ConeSurface s1 = random_retriangulation(s, 2 * seed, 25);
        const ConeSurface s2 = random_retriangulation(s, 2 * seed + 1, 25);
        const Cellulation c1 = delaunay(s1, {kCocyclicTolerance, seed});
        const Cellulation c2 = delaunay(s2, {kCocyclicTolerance, seed + 7});
        const auto m = match_cellulations(c1, c2, 1e-9);
        EXPECT_TRUE(m.matched) << "seed " << seed << ": " << m.reason;
        EXPECT_NEAR(area(c1.triangulation), area(s), 1e-9 * area(s));
        const auto a = cone_angles(s), b = cone_angles(c2.triangulation);
        for (std::size_t v = 0; v < a.size(); ++v) EXPECT_NEAR(a[v], b[v], 1e-9);
        EXPECT_LE(std::abs(gauss_bonnet_residual(c1.triangulation)), 1e-8);
    }
}

TEST(MatchCellulations, DetectsDifferences) {
    const Cellulation a = delaunay(fixtures::tetrahedron());
    EXPECT_TRUE(match_cellulations(a, a).matched);
    const Cellulation b = delaunay(fixtures::tetrahedron(1.0 + 1e-3));
    const auto m = match_cellulations(a, b);
    EXPECT_FALSE(m.matched);
    EXPECT_NEAR(m.max_relative_error, 1e-3 / (1.0 + 1e-3), 1e-12);
    const auto n = match_cellulations(a, delaunay(fixtures::pillowcase()));
    EXPECT_FALSE(n.matched);
    EXPECT_FALSE(n.reason.empty());
}
