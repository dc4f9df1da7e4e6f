#pragma once

// Orientation of four points in R^3 with a floating-point filter and an
// exact rational fallback when the estimate is within its error bound.

#include <array>
#include <cmath>

#include <gmpxx.h>

namespace cauchyhull {

using Point3 = std::array<double, 3>;

namespace detail {

// Static filter constant for a 3x3 determinant of differences, evaluated in
// the order below (same structure as Shewchuk's orient3d, bound rounded up).
inline constexpr double kOrient3dErrBound = 1e-15;

inline int orient3d_exact(const Point3& a, const Point3& b, const Point3& c, const Point3& d) {
    mpq_class m[3][3];
    for (int k = 0; k < 3; ++k) {
        const mpq_class ak(a[k]);
        m[0][k] = mpq_class(b[k]) - ak;
        m[1][k] = mpq_class(c[k]) - ak;
        m[2][k] = mpq_class(d[k]) - ak;
    }
    const mpq_class det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                          m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                          m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    return sgn(det);
}

}  // namespace detail

/// det[b - a, c - a, d - a] in double precision (no sign guarantee).
inline double orient3d_approx(const Point3& a, const Point3& b, const Point3& c, const Point3& d) {
    const double bx = b[0] - a[0], by = b[1] - a[1], bz = b[2] - a[2];
    const double cx = c[0] - a[0], cy = c[1] - a[1], cz = c[2] - a[2];
    const double dx = d[0] - a[0], dy = d[1] - a[1], dz = d[2] - a[2];
    return bx * (cy * dz - cz * dy) - by * (cx * dz - cz * dx) + bz * (cx * dy - cy * dx);
}

/// Exact sign of det[b - a, c - a, d - a]: +1 when d lies on the side of
/// the normal (b - a) x (c - a), -1 on the other side, 0 when coplanar.
inline int orient3d(const Point3& a, const Point3& b, const Point3& c, const Point3& d) {
    const double bx = b[0] - a[0], by = b[1] - a[1], bz = b[2] - a[2];
    const double cx = c[0] - a[0], cy = c[1] - a[1], cz = c[2] - a[2];
    const double dx = d[0] - a[0], dy = d[1] - a[1], dz = d[2] - a[2];
    const double m1 = cy * dz - cz * dy;
    const double m2 = cx * dz - cz * dx;
    const double m3 = cx * dy - cy * dx;
    const double det = bx * m1 - by * m2 + bz * m3;
    const double permanent = std::abs(bx) * (std::abs(cy * dz) + std::abs(cz * dy)) +
                             std::abs(by) * (std::abs(cx * dz) + std::abs(cz * dx)) +
                             std::abs(bz) * (std::abs(cx * dy) + std::abs(cy * dx));
    const double bound = detail::kOrient3dErrBound * permanent;
    if (det > bound) return 1;
    if (det < -bound) return -1;
    return detail::orient3d_exact(a, b, c, d);
}

/// Causal type of the plane through a, b, c, exactly: with (t, x, y)
/// coordinates and n = (b - a) x (c - a), returns the sign of
/// n_t^2 - n_x^2 - n_y^2 (+1 spacelike plane, 0 lightlike, -1 timelike) and
/// stores the sign of n_t.
inline int plane_causal_sign(const Point3& a, const Point3& b, const Point3& c, int* normal_t_sign = nullptr) {
    mpq_class u[3], v[3];
    for (int k = 0; k < 3; ++k) {
        u[k] = mpq_class(b[k]) - mpq_class(a[k]);
        v[k] = mpq_class(c[k]) - mpq_class(a[k]);
    }
    const mpq_class nt = u[1] * v[2] - u[2] * v[1];
    const mpq_class nx = u[2] * v[0] - u[0] * v[2];
    const mpq_class ny = u[0] * v[1] - u[1] * v[0];
    if (normal_t_sign) *normal_t_sign = sgn(nt);
    const mpq_class q = nt * nt - nx * nx - ny * ny;
    return sgn(q);
}

}  // namespace cauchyhull
