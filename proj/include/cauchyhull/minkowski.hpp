#pragma once

// Linear algebra of Minkowski space E^{1,2}: the form -t^2 + x^2 + y^2,
// its isometries (linear part + translation), classification by trace and
// the two frame solves used everywhere else (fixed lines, wedge alignment).

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <ostream>

#include <Eigen/Dense>

#include "cauchyhull/error.hpp"

namespace cauchyhull {

/// Module tolerance on normalized quantities.
inline constexpr double kFormTolerance = 1e-9;

struct MinkVec {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;

    constexpr MinkVec() = default;
    constexpr MinkVec(double t_, double x_, double y_) : t(t_), x(x_), y(y_) {}
    explicit MinkVec(const Eigen::Vector3d& v) : t(v[0]), x(v[1]), y(v[2]) {}

    Eigen::Vector3d eigen() const { return {t, x, y}; }
    double operator[](std::size_t i) const { return i == 0 ? t : (i == 1 ? x : y); }

    MinkVec& operator+=(const MinkVec& o) { t += o.t; x += o.x; y += o.y; return *this; }
    MinkVec& operator-=(const MinkVec& o) { t -= o.t; x -= o.x; y -= o.y; return *this; }
    MinkVec& operator*=(double s) { t *= s; x *= s; y *= s; return *this; }

    friend MinkVec operator+(MinkVec a, const MinkVec& b) { return a += b; }
    friend MinkVec operator-(MinkVec a, const MinkVec& b) { return a -= b; }
    friend MinkVec operator-(const MinkVec& a) { return {-a.t, -a.x, -a.y}; }
    friend MinkVec operator*(double s, MinkVec a) { return a *= s; }
    friend MinkVec operator*(MinkVec a, double s) { return a *= s; }
    friend MinkVec operator/(MinkVec a, double s) { return a *= (1.0 / s); }
    friend bool operator==(const MinkVec&, const MinkVec&) = default;

    friend std::ostream& operator<<(std::ostream& os, const MinkVec& v) {
        return os << '(' << v.t << ", " << v.x << ", " << v.y << ')';
    }
};

/// Bilinear form <u|v> = -u.t v.t + u.x v.x + u.y v.y.
constexpr double mink_form(const MinkVec& u, const MinkVec& v) {
    return -u.t * v.t + u.x * v.x + u.y * v.y;
}

constexpr double quadratic(const MinkVec& v) { return mink_form(v, v); }

inline double sup_norm(const MinkVec& v) {
    return std::max({std::abs(v.t), std::abs(v.x), std::abs(v.y)});
}

inline double euclidean_norm(const MinkVec& v) {
    return std::sqrt(v.t * v.t + v.x * v.x + v.y * v.y);
}

/// Minkowski cross product, fixed as J * (Euclidean cross product).
///
/// It is Minkowski-orthogonal to both arguments and equivariant under
/// SO_0(1,2): g(u x v) = (gu) x (gv). With this convention
/// (1,0,0) x (0,1,0) = (0,0,1).
constexpr MinkVec mink_cross(const MinkVec& u, const MinkVec& v) {
    const double c0 = u.x * v.y - u.y * v.x;
    const double c1 = u.y * v.t - u.t * v.y;
    const double c2 = u.t * v.x - u.x * v.t;
    return {-c0, c1, c2};
}

/// Causal character helpers. The tolerance is relative to |v|^2.
inline bool is_lightlike(const MinkVec& v, double tol = kFormTolerance) {
    const double n = euclidean_norm(v);
    return n > 0.0 && std::abs(quadratic(v)) <= tol * n * n;
}

inline bool is_future_lightlike(const MinkVec& v, double tol = kFormTolerance) {
    return is_lightlike(v, tol) && v.t > 0.0;
}

inline bool is_future_timelike(const MinkVec& v) { return v.t > 0.0 && quadratic(v) < 0.0; }

inline const Eigen::Matrix3d& minkowski_gram() {
    static const Eigen::Matrix3d j = Eigen::Vector3d(-1.0, 1.0, 1.0).asDiagonal();
    return j;
}

/// Element of SO_0(1,2). The matrix is stored as given; use
/// `isometry_defect` / `validate` to check the invariants.
struct LinearIsometry {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();

    LinearIsometry() = default;
    explicit LinearIsometry(const Eigen::Matrix3d& mat) : m(mat) {}

    static LinearIsometry identity() { return {}; }

    MinkVec operator()(const MinkVec& v) const { return MinkVec(m * v.eigen()); }

    friend LinearIsometry operator*(const LinearIsometry& a, const LinearIsometry& b) {
        return LinearIsometry(a.m * b.m);
    }

    /// J m^T J, exact for form-preserving matrices.
    LinearIsometry inverse() const {
        const auto& j = minkowski_gram();
        return LinearIsometry(j * m.transpose() * j);
    }

    double trace() const { return m.trace(); }
};

/// ||m^T J m - J||_inf.
inline double isometry_defect(const LinearIsometry& g) {
    const auto& j = minkowski_gram();
    return (g.m.transpose() * j * g.m - j).cwiseAbs().maxCoeff();
}

/// Invariant check with a tolerance relative to the squared entry size, since
/// products of long words have large entries and proportional round-off.
inline bool is_valid_isometry(const LinearIsometry& g, double tol = kFormTolerance) {
    const double scale = std::max(1.0, g.m.cwiseAbs().maxCoeff());
    if (isometry_defect(g) > tol * scale * scale) return false;
    if (std::abs(g.m.determinant() - 1.0) > tol * scale * scale * scale) return false;
    return g.m(0, 0) > 0.0;
}

inline void validate(const LinearIsometry& g, double tol = kFormTolerance) {
    if (!is_valid_isometry(g, tol)) {
        throw Error(ErrorCode::InvalidIsometry,
                    "matrix does not lie in SO_0(1,2) (defect " + std::to_string(isometry_defect(g)) + ")");
    }
}

/// x -> linear * x + translation.
struct AffineIsometry {
    LinearIsometry linear;
    MinkVec translation;

    AffineIsometry() = default;
    AffineIsometry(const LinearIsometry& l, const MinkVec& tr = {}) : linear(l), translation(tr) {}

    static AffineIsometry identity() { return {}; }

    MinkVec operator()(const MinkVec& v) const { return linear(v) + translation; }

    /// (a*b)(x) = a(b(x)); translation part is the cocycle tau_a + L_a tau_b.
    friend AffineIsometry operator*(const AffineIsometry& a, const AffineIsometry& b) {
        return {a.linear * b.linear, a.translation + a.linear(b.translation)};
    }

    AffineIsometry inverse() const {
        const LinearIsometry inv = linear.inverse();
        return {inv, -inv(translation)};
    }
};

/// Sup-norm distance between two affine maps over both parts.
inline double affine_distance(const AffineIsometry& a, const AffineIsometry& b) {
    const double lin = (a.linear.m - b.linear.m).cwiseAbs().maxCoeff();
    return std::max(lin, sup_norm(a.translation - b.translation));
}

enum class LinearClass { Identity, Elliptic, Parabolic, Hyperbolic };
enum class AffineClass { HasFixedPoint, FixedLightlikeLine, NoFixedPoint };

constexpr const char* to_string(LinearClass c) {
    switch (c) {
    case LinearClass::Identity: return "Identity";
    case LinearClass::Elliptic: return "Elliptic";
    case LinearClass::Parabolic: return "Parabolic";
    case LinearClass::Hyperbolic: return "Hyperbolic";
    }
    return "?";
}

constexpr const char* to_string(AffineClass c) {
    switch (c) {
    case AffineClass::HasFixedPoint: return "HasFixedPoint";
    case AffineClass::FixedLightlikeLine: return "FixedLightlikeLine";
    case AffineClass::NoFixedPoint: return "NoFixedPoint";
    }
    return "?";
}

struct CausalClass {
    LinearClass linear = LinearClass::Identity;
    AffineClass affine = AffineClass::HasFixedPoint;

    friend bool operator==(const CausalClass&, const CausalClass&) = default;
};

namespace detail {

/// Kernel direction of (L - I): the fixed axis of a non-identity isometry.
/// Lightlike and timelike axes are normalized to t = 1 (future), spacelike
/// ones to Euclidean unit length.
inline MinkVec fixed_axis(const LinearIsometry& g) {
    const Eigen::Matrix3d a = g.m - Eigen::Matrix3d::Identity();
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(a, Eigen::ComputeFullV);
    MinkVec v(svd.matrixV().col(2));
    if (quadratic(v) <= kFormTolerance * euclidean_norm(v) * euclidean_norm(v) && std::abs(v.t) > 0.0) {
        return v / v.t;
    }
    return v / euclidean_norm(v);
}

/// Minimum-norm least-squares solution of (I - L) x = tau.
inline MinkVec solve_fixed_point(const AffineIsometry& phi) {
    const Eigen::Matrix3d a = Eigen::Matrix3d::Identity() - phi.linear.m;
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    svd.setThreshold(1e-10);
    return MinkVec(Eigen::Vector3d(svd.solve(phi.translation.eigen())));
}

inline bool translation_orthogonal(const MinkVec& tau, const MinkVec& axis, double tol) {
    const double scale = std::max(1.0, euclidean_norm(tau)) * euclidean_norm(axis);
    return std::abs(mink_form(tau, axis)) <= tol * scale;
}

inline LinearClass classify_linear(const LinearIsometry& g, double tol) {
    const double tr = g.trace();
    if (tr > 3.0 + tol) return LinearClass::Hyperbolic;
    if (tr < 3.0 - tol) return LinearClass::Elliptic;
    const double off = (g.m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    return off <= tol ? LinearClass::Identity : LinearClass::Parabolic;
}

}  // namespace detail

/// Trace-based classification of the linear part (trace = 1 + 2cos(theta)
/// for elliptic, 1 + 2cosh(l) for hyperbolic, |trace - 3| <= tol for
/// unipotent) refined by whether the affine map has a fixed point. A
/// parabolic map with a fixed point fixes a whole lightlike line.
inline CausalClass classify(const AffineIsometry& phi, double tol = kFormTolerance) {
    validate(phi.linear, std::max(tol, kFormTolerance));
    CausalClass out;
    out.linear = detail::classify_linear(phi.linear, tol);
    if (out.linear == LinearClass::Identity) {
        out.affine = sup_norm(phi.translation) <= tol ? AffineClass::HasFixedPoint : AffineClass::NoFixedPoint;
        return out;
    }
    const MinkVec axis = detail::fixed_axis(phi.linear);
    const bool solvable = detail::translation_orthogonal(phi.translation, axis, tol);
    if (!solvable) {
        out.affine = AffineClass::NoFixedPoint;
    } else {
        out.affine = out.linear == LinearClass::Parabolic ? AffineClass::FixedLightlikeLine
                                                          : AffineClass::HasFixedPoint;
    }
    return out;
}

/// Future lightlike direction fixed by a parabolic linear part (t = 1).
inline MinkVec parabolic_direction(const LinearIsometry& g, double tol = kFormTolerance) {
    if (detail::classify_linear(g, tol) != LinearClass::Parabolic) {
        throw Error(ErrorCode::NotParabolic, "linear part is not parabolic");
    }
    return detail::fixed_axis(g);
}

struct FixedLine {
    MinkVec point;
    MinkVec direction;
};

/// Fixed lightlike line of a parabolic affine isometry. It exists exactly
/// when the translation is Minkowski-orthogonal to the fixed direction of the
/// linear part, i.e. lies in Im(L - 1) = Fix(L)^perp.
inline std::optional<FixedLine> parabolic_fixed_line(const AffineIsometry& phi, double tol = kFormTolerance) {
    validate(phi.linear, std::max(tol, kFormTolerance));
    const MinkVec v = parabolic_direction(phi.linear, tol);
    if (!detail::translation_orthogonal(phi.translation, v, tol)) return std::nullopt;
    return FixedLine{detail::solve_fixed_point(phi), v};
}

/// Unique gamma in SO_0(1,2) with gamma(a1) = b2 and gamma(b1) = a2.
///
/// Solved on the frame (a1, b1, a1 x b1) -> (b2, a2, b2 x a2); by
/// equivariance of the cross product this is the only orientation
/// preserving choice, and it puts gamma of a wedge on a1,b1 on the opposite
/// side of span(a2, b2) from a wedge on a2,b2 with the same boundary
/// orientation.
inline LinearIsometry align_wedge(const MinkVec& a1, const MinkVec& b1, const MinkVec& a2, const MinkVec& b2,
                                  double tol = kFormTolerance) {
    for (const MinkVec* v : {&a1, &b1, &a2, &b2}) {
        if (!is_future_lightlike(*v, 1e-8)) {
            throw Error(ErrorCode::DegenerateFrame, "wedge vertices must be future lightlike");
        }
    }
    const MinkVec n1 = mink_cross(a1, b1);
    const MinkVec n2 = mink_cross(b2, a2);
    const double s1 = euclidean_norm(a1) * euclidean_norm(b1);
    const double s2 = euclidean_norm(a2) * euclidean_norm(b2);
    if (euclidean_norm(n1) <= 1e-12 * s1 || euclidean_norm(n2) <= 1e-12 * s2) {
        throw Error(ErrorCode::DegenerateFrame, "wedge rays are parallel");
    }
    const double p1 = mink_form(a1, b1);
    const double p2 = mink_form(a2, b2);
    if (std::abs(p1 - p2) > tol * std::max({1.0, std::abs(p1), std::abs(p2)})) {
        throw Error(ErrorCode::PairingMismatch,
                    "edge pairings differ: " + std::to_string(p1) + " vs " + std::to_string(p2));
    }
    Eigen::Matrix3d f1;
    f1.col(0) = a1.eigen();
    f1.col(1) = b1.eigen();
    f1.col(2) = n1.eigen();
    Eigen::Matrix3d f2;
    f2.col(0) = b2.eigen();
    f2.col(1) = a2.eigen();
    f2.col(2) = n2.eigen();
    return LinearIsometry(f2 * f1.inverse());
}

/// Image of +-[[a,b],[c,d]] under the adjoint action on sl(2,R) ~ E^{1,2},
/// with (t,x,y) <-> [[x, y+t], [y-t, -x]] so that q = -det. The trace
/// relation (a+d)^2 = 1 + trace holds.
inline LinearIsometry psl2_to_so12(double a, double b, double c, double d, double tol = kFormTolerance) {
    const double det = a * d - b * c;
    if (std::abs(det - 1.0) > tol * std::max({1.0, std::abs(a * d), std::abs(b * c)})) {
        throw Error(ErrorCode::NotUnimodular, "ad - bc = " + std::to_string(det));
    }
    Eigen::Matrix2d mat;
    mat << a, b, c, d;
    Eigen::Matrix2d inv;
    inv << d, -b, -c, a;
    auto embed = [](const Eigen::Vector3d& v) {
        Eigen::Matrix2d x;
        x << v[1], v[2] + v[0], v[2] - v[0], -v[1];
        return x;
    };
    auto extract = [](const Eigen::Matrix2d& x) {
        return Eigen::Vector3d((x(0, 1) - x(1, 0)) / 2.0, x(0, 0), (x(0, 1) + x(1, 0)) / 2.0);
    };
    Eigen::Matrix3d out;
    for (int i = 0; i < 3; ++i) {
        out.col(i) = extract(mat * embed(Eigen::Vector3d::Unit(i)) * inv);
    }
    return LinearIsometry(out);
}

}  // namespace cauchyhull
