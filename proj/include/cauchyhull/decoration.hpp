#pragma once

// Decorations (one light-cone point per cusp), the horocycle bijection and
// word-ball enumeration of the decoration orbit.

#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <vector>

#include "cauchyhull/error.hpp"
#include "cauchyhull/holonomy.hpp"
#include "cauchyhull/minkowski.hpp"

namespace cauchyhull {

/// Relative proximity under which two orbit points are the same point.
inline constexpr double kDedupTolerance = 1e-8;

struct Decoration {
    std::vector<MinkVec> points;
};

/// Horocycle {x in H^2 : <x|p> = -1/2}. The cone point p is the canonical
/// representation; the boundary angle and level are derived for display.
///
/// The constant: x in H^2 has <x|x> = -1 and p is lightlike, so
/// <x - p | x - p> = -1 - 2<x|p>, which vanishes (x on the boundary of the
/// future of p) exactly when <x|p> = -1/2.
struct Horocycle {
    MinkVec conepoint;

    double angle() const { return std::atan2(conepoint.y, conepoint.x); }
    double level() const { return conepoint.t; }

    static Horocycle from_display(double angle, double level) {
        return {MinkVec(level, level * std::cos(angle), level * std::sin(angle))};
    }

    /// Residual of x against the two defining equations.
    double membership_residual(const MinkVec& x) const {
        return std::max(std::abs(quadratic(x) + 1.0), std::abs(mink_form(x, conepoint) + 0.5));
    }

    /// Point of the horocycle at horocyclic parameter s (s = 0 is the point
    /// in the plane of the t-axis and the cone point).
    MinkVec point(double s = 0.0) const {
        const double lambda = level();
        const MinkVec dir(1.0, std::cos(angle()), std::sin(angle()));
        const double alpha = 1.0 / (2.0 * lambda);
        const double beta = (1.0 - alpha * alpha) / (2.0 * alpha);
        const MinkVec side(0.0, -std::sin(angle()), std::cos(angle()));
        const double kappa = s * s / (2.0 * alpha);
        return MinkVec(alpha, 0.0, 0.0) + (beta + kappa) * dir + s * side;
    }
};

inline Horocycle dec_inv(const MinkVec& p, double tol = kFormTolerance) {
    if (!is_future_lightlike(p, tol)) {
        throw Error(ErrorCode::NotLightlike, "decoration point must be future lightlike");
    }
    return {p};
}

inline MinkVec dec(const Horocycle& h) { return h.conepoint; }

/// Checks the decoration invariants against a representation: future
/// lightlike for linear holonomy, and fixed by the matching peripheral.
inline void validate(const Decoration& d, const AffineRepresentation& rep, double tol = 1e-8) {
    const auto& pres = rep.presentation;
    if (d.points.size() != pres.peripherals.size()) {
        throw Error(ErrorCode::SchemaError, "decoration needs one point per puncture");
    }
    const bool linear = rep.is_linear();
    for (std::size_t j = 0; j < d.points.size(); ++j) {
        const MinkVec& p = d.points[j];
        if (linear && !is_future_lightlike(p, tol)) {
            throw Error(ErrorCode::NotLightlike, "decoration point " + std::to_string(j + 1) + " is not future lightlike");
        }
        const AffineIsometry phi = peripheral(rep, j);
        if (sup_norm(phi(p) - p) > tol * std::max(1.0, sup_norm(p)) * std::max(1.0, phi.linear.m.cwiseAbs().maxCoeff())) {
            throw Error(ErrorCode::SchemaError,
                        "decoration point " + std::to_string(j + 1) + " is not on the fixed line of its peripheral");
        }
    }
}

/// Decoration on the fixed lines of the peripherals: the lightlike direction
/// (normalized to t = 1) times `scales[j]`, translated onto the fixed line
/// for affine holonomy.
inline Decoration default_decoration(const AffineRepresentation& rep, const std::vector<double>& scales = {}) {
    Decoration d;
    for (std::size_t j = 0; j < rep.presentation.peripherals.size(); ++j) {
        const AffineIsometry phi = peripheral(rep, j);
        const auto line = parabolic_fixed_line(phi);
        if (!line) throw Error(ErrorCode::NotAdmissible, "peripheral has no fixed lightlike line");
        const double s = j < scales.size() ? scales[j] : 1.0;
        MinkVec base = line->point;
        if (sup_norm(phi.translation) == 0.0) base = MinkVec{};
        d.points.push_back(base + s * line->direction);
    }
    return d;
}

struct OrbitEntry {
    Word word;
    MinkVec point;
    std::size_t puncture = 0;
};

/// Orbit points {rho(w) p_j : |w| <= radius}, deduplicated; each point keeps
/// its first-found shortest word. Entries [0, s) are the decoration itself.
struct OrbitPointSet {
    std::vector<OrbitEntry> entries;
    int radius = 0;

    std::size_t size() const { return entries.size(); }
    const MinkVec& point(std::size_t i) const { return entries[i].point; }
};

namespace detail {

class PointIndex {
public:
    explicit PointIndex(double rel_tol) : tol_(rel_tol) {}

    /// Index of a stored point within tolerance of p, or npos.
    std::size_t find(const std::vector<OrbitEntry>& entries, const MinkVec& p) const {
        const double tol = tol_ * std::max(1.0, sup_norm(p));
        auto lo = by_t_.lower_bound(p.t - tol);
        for (auto it = lo; it != by_t_.end() && it->first <= p.t + tol; ++it) {
            if (sup_norm(entries[it->second].point - p) <= tol) return it->second;
        }
        return npos;
    }

    void insert(const MinkVec& p, std::size_t idx) { by_t_.emplace(p.t, idx); }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    double tol_;
    std::multimap<double, std::size_t> by_t_;
};

}  // namespace detail

/// Breadth-first expansion by left multiplication with generators and
/// inverses (order: g1, g1^-1, g2, ...). A word reaching an existing point
/// is pruned, which loses nothing since extensions of equal points agree.
/// A nonzero `max_points` caps the ball; exceeding it throws NotStabilized.
inline OrbitPointSet orbit_ball(const AffineRepresentation& rep, const Decoration& d, int radius,
                                std::size_t max_points = 0) {
    if (radius < 0) throw Error(ErrorCode::SchemaError, "radius must be non-negative");
    OrbitPointSet out;
    out.radius = radius;
    detail::PointIndex index(kDedupTolerance);

    std::vector<AffineIsometry> letters;
    std::vector<Letter> labels;
    for (std::size_t g = 0; g < rep.images.size(); ++g) {
        letters.push_back(rep.images[g]);
        labels.push_back({g, false});
        letters.push_back(rep.images[g].inverse());
        labels.push_back({g, true});
    }

    std::vector<std::size_t> frontier;
    for (std::size_t j = 0; j < d.points.size(); ++j) {
        if (index.find(out.entries, d.points[j]) != detail::PointIndex::npos) continue;
        index.insert(d.points[j], out.entries.size());
        frontier.push_back(out.entries.size());
        out.entries.push_back({{}, d.points[j], j});
    }
    for (int level = 1; level <= radius; ++level) {
        std::vector<std::size_t> next;
        for (std::size_t idx : frontier) {
            for (std::size_t k = 0; k < letters.size(); ++k) {
                const OrbitEntry& src = out.entries[idx];
                // g g^-1 cancels; skip the immediate backtrack.
                if (!src.word.empty() && src.word.front().generator == labels[k].generator &&
                    src.word.front().inverse != labels[k].inverse) {
                    continue;
                }
                const MinkVec p = letters[k](src.point);
                if (index.find(out.entries, p) != detail::PointIndex::npos) continue;
                Word w;
                w.reserve(src.word.size() + 1);
                w.push_back(labels[k]);
                w.insert(w.end(), src.word.begin(), src.word.end());
                const std::size_t puncture = src.puncture;
                index.insert(p, out.entries.size());
                next.push_back(out.entries.size());
                out.entries.push_back({std::move(w), p, puncture});
                if (max_points != 0 && out.entries.size() > max_points) {
                    throw Error(ErrorCode::NotStabilized, "word ball of radius " + std::to_string(radius) +
                                                              " exceeds " + std::to_string(max_points) + " orbit points");
                }
            }
        }
        frontier = std::move(next);
    }
    return out;
}

/// Number of orbit points p with q - p future causal.
inline std::size_t count_orbit_in_past(const OrbitPointSet& o, const MinkVec& q, double eps = 1e-9) {
    std::size_t n = 0;
    for (const auto& e : o.entries) {
        const MinkVec d = q - e.point;
        const double scale = std::max(1.0, sup_norm(d));
        if (quadratic(d) <= eps * scale * scale && d.t > -eps * scale) ++n;
    }
    return n;
}

}  // namespace cauchyhull
