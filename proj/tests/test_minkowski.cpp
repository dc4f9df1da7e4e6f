#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cauchyhull/fixtures.hpp"
#include "cauchyhull/minkowski.hpp"

using namespace cauchyhull;

namespace {

double form_defect(const LinearIsometry& g) {
    return (g.m.transpose() * minkowski_gram() * g.m - minkowski_gram()).cwiseAbs().maxCoeff();
}

// Solves gamma from the six image equations plus the three equations
// gamma(n1) = n2 as a 9x9 system in the entries of gamma.
Eigen::Matrix3d kronecker_solve(const MinkVec& a1, const MinkVec& b1, const MinkVec& a2, const MinkVec& b2) {
    const MinkVec src[3] = {a1, b1, mink_cross(a1, b1)};
    const MinkVec dst[3] = {b2, a2, mink_cross(b2, a2)};
    Eigen::Matrix<double, 9, 9> a = Eigen::Matrix<double, 9, 9>::Zero();
    Eigen::Matrix<double, 9, 1> rhs;
    for (int k = 0; k < 3; ++k) {
        for (int row = 0; row < 3; ++row) {
            const int eq = 3 * k + row;
            for (int col = 0; col < 3; ++col) a(eq, 3 * row + col) = src[k][col];
            rhs(eq) = dst[k][row];
        }
    }
    const Eigen::Matrix<double, 9, 1> x = a.fullPivLu().solve(rhs);
    Eigen::Matrix3d g;
    for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 3; ++col) g(row, col) = x(3 * row + col);
    return g;
}

MinkVec light(double theta, double scale) { return scale * MinkVec(1.0, std::cos(theta), std::sin(theta)); }

}  // namespace

TEST(MinkForm, Examples) {
    EXPECT_DOUBLE_EQ(mink_form({1, 0, 0}, {1, 0, 0}), -1.0);
    EXPECT_DOUBLE_EQ(mink_form({1, 1, 0}, {1, 1, 0}), 0.0);
    EXPECT_DOUBLE_EQ(mink_form({1.25, 0.75, 0}, {1, 1, 0}), -0.5);
}

TEST(MinkForm, SymmetricBilinear) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 50; ++i) {
        const MinkVec a(u(rng), u(rng), u(rng)), b(u(rng), u(rng), u(rng)), c(u(rng), u(rng), u(rng));
        EXPECT_NEAR(mink_form(a, b), mink_form(b, a), 1e-14);
        EXPECT_NEAR(mink_form(2.0 * a + c, b), 2.0 * mink_form(a, b) + mink_form(c, b), 1e-12);
    }
}

TEST(MinkCross, Examples) {
    const MinkVec w = mink_cross({1, 0, 0}, {0, 1, 0});
    EXPECT_NEAR(std::abs(w.y), 1.0, 1e-15);
    EXPECT_EQ(w.t, 0.0);
    EXPECT_EQ(w.x, 0.0);
    EXPECT_EQ(sup_norm(mink_cross({1, 2, 3}, {2, 4, 6})), 0.0);
    const MinkVec u(1, 1, 0), v(1, 0, 1);
    const MinkVec n = mink_cross(u, v);
    EXPECT_LE(std::abs(mink_form(n, u)), 1e-12);
    EXPECT_LE(std::abs(mink_form(n, v)), 1e-12);
    EXPECT_GT(sup_norm(n), 0.0);
}

TEST(MinkCross, OrthogonalOnUnitBall) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 200; ++i) {
        MinkVec a(u(rng), u(rng), u(rng)), b(u(rng), u(rng), u(rng));
        a = a / std::max(1.0, euclidean_norm(a));
        b = b / std::max(1.0, euclidean_norm(b));
        const MinkVec n = mink_cross(a, b);
        EXPECT_LE(std::abs(mink_form(n, a)), 1e-12);
        EXPECT_LE(std::abs(mink_form(n, b)), 1e-12);
    }
}

TEST(MinkCross, Equivariant) {
    const LinearIsometry g = fixtures::boost(0.7) * fixtures::rotation(1.1) * fixtures::null_rotation();
    const MinkVec a(2, 1, 0.5), b(-1, 0.3, 2);
    const MinkVec lhs = g(mink_cross(a, b));
    const MinkVec rhs = mink_cross(g(a), g(b));
    EXPECT_LE(sup_norm(lhs - rhs), 1e-12);
}

TEST(Classify, Examples) {
    EXPECT_EQ(classify(AffineIsometry::identity()).linear, LinearClass::Identity);
    const LinearIsometry n = fixtures::null_rotation();
    EXPECT_LE(form_defect(n), 1e-15);
    EXPECT_DOUBLE_EQ(n.trace(), 3.0);
    EXPECT_EQ(classify(AffineIsometry(n)).linear, LinearClass::Parabolic);
    const MinkVec v = parabolic_direction(n);
    EXPECT_LE(sup_norm(v - MinkVec(1, 1, 0)), 1e-12);
    const LinearIsometry r = fixtures::rotation(std::numbers::pi);
    EXPECT_NEAR(r.trace(), -1.0, 1e-15);
    EXPECT_EQ(classify(AffineIsometry(r)).linear, LinearClass::Elliptic);
    EXPECT_EQ(classify(AffineIsometry(fixtures::boost(0.5))).linear, LinearClass::Hyperbolic);
}

TEST(Classify, RejectsNonIsometry) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m(0, 1) = 0.1;
    EXPECT_THROW(classify(AffineIsometry(LinearIsometry(m))), Error);
    try {
        classify(AffineIsometry(LinearIsometry(m)));
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidIsometry);
    }
}

TEST(Classify, AffineRefinement) {
    const LinearIsometry n = fixtures::null_rotation();
    EXPECT_EQ(classify(AffineIsometry(n, {0, 0, 1})).affine, AffineClass::FixedLightlikeLine);
    EXPECT_EQ(classify(AffineIsometry(n, {1, 0, 0})).affine, AffineClass::NoFixedPoint);
    EXPECT_EQ(classify(AffineIsometry(fixtures::rotation(1.0), {0, 3, 1})).affine, AffineClass::HasFixedPoint);
    EXPECT_EQ(classify(AffineIsometry(fixtures::rotation(1.0), {1, 0, 0})).affine, AffineClass::NoFixedPoint);
    EXPECT_EQ(classify(AffineIsometry(LinearIsometry::identity(), {1, 0, 0})).affine, AffineClass::NoFixedPoint);
}

TEST(Classify, ConjugationInvariant) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    const LinearIsometry samples[] = {fixtures::null_rotation(), fixtures::rotation(2.0), fixtures::boost(1.2)};
    for (int i = 0; i < 50; ++i) {
        const LinearIsometry h = fixtures::boost(u(rng)) * fixtures::rotation(u(rng)) * fixtures::boost(u(rng));
        for (const auto& g : samples) {
            const AffineIsometry phi(g);
            const AffineIsometry conj(h * g * h.inverse());
            EXPECT_EQ(classify(phi, 1e-8).linear, classify(conj, 1e-8).linear);
        }
    }
}

TEST(ParabolicFixedLine, TangentTranslation) {
    const AffineIsometry phi(fixtures::null_rotation(), {1, 1, 0});
    const auto line = parabolic_fixed_line(phi);
    ASSERT_TRUE(line.has_value());
    EXPECT_LE(sup_norm(phi(line->point) - line->point), 1e-8);
    EXPECT_LE(sup_norm(line->direction - MinkVec(1, 1, 0)), 1e-12);
    EXPECT_LE(std::abs(quadratic(line->direction)), 1e-10);
    // Rows of (I - N): (-1/2, 1/2, -1) twice and (-1, 1, 0), so the fixed
    // points solve x - t = 0 and y = -1.
    EXPECT_NEAR(line->point.x - line->point.t, 0.0, 1e-12);
    EXPECT_NEAR(line->point.y, -1.0, 1e-12);
    for (double s : {-2.0, 0.5, 3.0}) {
        const MinkVec q = line->point + s * line->direction;
        EXPECT_LE(sup_norm(phi(q) - q), 1e-8);
    }
}

TEST(ParabolicFixedLine, ZeroTranslation) {
    const auto line = parabolic_fixed_line(AffineIsometry(fixtures::null_rotation()));
    ASSERT_TRUE(line.has_value());
    EXPECT_LE(sup_norm(line->point), 1e-12);
    EXPECT_LE(sup_norm(line->direction - MinkVec(1, 1, 0)), 1e-12);
}

TEST(ParabolicFixedLine, NonTangent) {
    EXPECT_FALSE(parabolic_fixed_line(AffineIsometry(fixtures::null_rotation(), {1, 0, 0})).has_value());
}

TEST(ParabolicFixedLine, RequiresParabolic) {
    try {
        parabolic_fixed_line(AffineIsometry(fixtures::boost(1.0)));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotParabolic);
    }
}

TEST(AlignWedge, SwapOfOppositeRays) {
    const MinkVec a(1, 1, 0), b(1, -1, 0);
    const LinearIsometry g = align_wedge(a, b, a, b);
    EXPECT_LE(form_defect(g), 1e-12);
    EXPECT_LE(sup_norm(g(a) - b), 1e-12);
    EXPECT_LE(sup_norm(g(b) - a), 1e-12);
    EXPECT_NEAR(g.m.determinant(), 1.0, 1e-12);
    EXPECT_GT(g.m(0, 0), 0.0);
}

TEST(AlignWedge, AgreesWithKroneckerSolve) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi), sc(0.3, 3.0);
    for (int i = 0; i < 100; ++i) {
        const MinkVec a1 = light(ang(rng), sc(rng)), b1 = light(ang(rng), sc(rng));
        const double pair = mink_form(a1, b1);
        const MinkVec a2 = light(ang(rng), sc(rng));
        MinkVec b2 = light(ang(rng), 1.0);
        b2 = b2 * (pair / mink_form(a2, b2));
        const LinearIsometry g = align_wedge(a1, b1, a2, b2);
        const Eigen::Matrix3d oracle = kronecker_solve(a1, b1, a2, b2);
        const double scale = std::max(1.0, oracle.cwiseAbs().maxCoeff());
        EXPECT_LE((g.m - oracle).cwiseAbs().maxCoeff(), 1e-9 * scale);
        EXPECT_LE(form_defect(g), 1e-9 * scale * scale);
        EXPECT_LE(sup_norm(g(a1) - b2), 1e-9 * scale * sup_norm(a1));
        EXPECT_LE(sup_norm(g(b1) - a2), 1e-9 * scale * sup_norm(b1));
        EXPECT_GT(g.m(0, 0), 0.0);
        EXPECT_NEAR(g.m.determinant(), 1.0, 1e-8 * scale * scale * scale);
    }
}

TEST(AlignWedge, OppositeSides) {
    // Two wedges on a common edge with consistent ccw boundary orientation:
    // after gluing, the third vertices lie on opposite sides of the edge plane.
    const MinkVec p = light(0.0, 1.0), q = light(2.0, 1.0), r = light(4.0, 1.0);
    const MinkVec p2 = light(1.0, 1.0), q2 = light(3.0, 1.0), r2 = light(5.5, 1.0);
    const double pair = mink_form(p, q);
    const MinkVec q2s = q2 * (pair / mink_form(p2, q2));
    const LinearIsometry g = align_wedge(p, q, p2, q2s);
    const MinkVec n = mink_cross(p2, q2s);
    const double side_image = mink_form(n, g(r));
    const double side_other = mink_form(n, r2);
    EXPECT_LT(side_image * side_other, 0.0);
}

TEST(AlignWedge, Errors) {
    try {
        align_wedge({1, 1, 0}, {1, -1, 0}, {1, 1, 0}, {2, -2, 0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::PairingMismatch);
    }
    try {
        align_wedge({1, 1, 0}, {2, 2, 0}, {1, 1, 0}, {1, -1, 0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateFrame);
    }
}

TEST(Psl2, Examples) {
    const LinearIsometry id = psl2_to_so12(1, 0, 0, 1);
    EXPECT_LE((id.m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-15);
    const LinearIsometry p = psl2_to_so12(1, 1, 0, 1);
    EXPECT_NEAR(p.trace(), 3.0, 1e-12);
    EXPECT_EQ(classify(AffineIsometry(p)).linear, LinearClass::Parabolic);
    const LinearIsometry h = psl2_to_so12(2, 1, 1, 1);
    EXPECT_NEAR(h.trace(), 8.0, 1e-12);
    EXPECT_EQ(classify(AffineIsometry(h)).linear, LinearClass::Hyperbolic);
    try {
        psl2_to_so12(1, 1, 1, 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotUnimodular);
    }
}

TEST(Psl2, SignLiftAndHomomorphism) {
    const LinearIsometry g = psl2_to_so12(2, 1, 1, 1);
    const LinearIsometry gneg = psl2_to_so12(-2, -1, -1, -1);
    EXPECT_LE((g.m - gneg.m).cwiseAbs().maxCoeff(), 1e-14);
    const LinearIsometry h = psl2_to_so12(1, -1, -1, 2);
    const LinearIsometry gh = psl2_to_so12(2 * 1 + 1 * -1, 2 * -1 + 1 * 2, 1 * 1 + 1 * -1, 1 * -1 + 1 * 2);
    EXPECT_LE(((g * h).m - gh.m).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(form_defect(g), 1e-13);
    EXPECT_GT(g.m(0, 0), 0.0);
}

TEST(AffineIsometry, CompositionAndInverse) {
    const AffineIsometry a(fixtures::null_rotation(), {0.5, -1, 2});
    const AffineIsometry b(fixtures::boost(0.3), {1, 0, 0});
    const MinkVec x(0.2, 0.7, -1.3);
    EXPECT_LE(sup_norm((a * b)(x) - a(b(x))), 1e-14);
    EXPECT_LE(affine_distance(a * a.inverse(), AffineIsometry::identity()), 1e-13);
}
