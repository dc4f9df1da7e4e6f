#pragma once

// Marked surface-group presentations, their representations into
// Isom(E^{1,2}) and the admissibility checks (parabolic peripherals,
// hyperbolic handle generators, tangent peripheral translations).

#include <algorithm>
#include <compare>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cauchyhull/error.hpp"
#include "cauchyhull/minkowski.hpp"

namespace cauchyhull {

/// Relation residual tolerance for inputs built from exact rationals. The
/// residual grows roughly linearly with the relation length.
inline constexpr double kRelationTolerance = 1e-8;

struct Letter {
    std::size_t generator = 0;
    bool inverse = false;

    friend auto operator<=>(const Letter&, const Letter&) = default;
};

using Word = std::vector<Letter>;

inline Word inverse(const Word& w) {
    Word out;
    out.reserve(w.size());
    for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back({it->generator, !it->inverse});
    return out;
}

/// Concatenation with free cancellation at the junction.
inline Word concat(const Word& a, const Word& b) {
    Word out = a;
    for (const Letter& l : b) {
        if (!out.empty() && out.back().generator == l.generator && out.back().inverse != l.inverse) {
            out.pop_back();
        } else {
            out.push_back(l);
        }
    }
    return out;
}

inline Word power(const Word& w, long n) {
    Word out;
    const Word base = n >= 0 ? w : inverse(w);
    for (long i = 0; i < std::abs(n); ++i) out = concat(out, base);
    return out;
}

/// Shortlex order: shorter first, then letter by letter.
inline bool shortlex_less(const Word& a, const Word& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

struct GroupPresentation {
    enum class Kind { MarkedSurface, FreeBasis };

    Kind kind = Kind::MarkedSurface;
    int genus = 0;
    int punctures = 0;
    std::vector<std::string> generators;
    /// One word per puncture, each evaluating to the peripheral element.
    std::vector<Word> peripherals;
    /// Word that must evaluate to the identity, if the group has one.
    std::optional<Word> relation;

    std::size_t size() const { return generators.size(); }

    std::optional<std::size_t> index_of(std::string_view label) const {
        for (std::size_t i = 0; i < generators.size(); ++i) {
            if (generators[i] == label) return i;
        }
        return std::nullopt;
    }

    /// Gamma = < a_1, b_1, ..., a_g, b_g, c_1, ..., c_s | prod [a_i,b_i] prod c_j >,
    /// generators in that order, [a,b] = a b a^-1 b^-1.
    static GroupPresentation marked_surface(int genus, int punctures) {
        if (genus < 0 || punctures < 1 || 2 * genus - 2 + punctures <= 0) {
            throw Error(ErrorCode::SchemaError, "marked surface needs g >= 0, s >= 1 and 2g - 2 + s > 0");
        }
        GroupPresentation p;
        p.kind = Kind::MarkedSurface;
        p.genus = genus;
        p.punctures = punctures;
        for (int i = 1; i <= genus; ++i) {
            p.generators.push_back("a" + std::to_string(i));
            p.generators.push_back("b" + std::to_string(i));
        }
        for (int j = 1; j <= punctures; ++j) p.generators.push_back("c" + std::to_string(j));
        Word rel;
        for (int i = 0; i < genus; ++i) {
            const std::size_t a = 2 * i;
            const std::size_t b = 2 * i + 1;
            rel.insert(rel.end(), {{a, false}, {b, false}, {a, true}, {b, true}});
        }
        for (int j = 0; j < punctures; ++j) {
            const std::size_t c = 2 * genus + j;
            rel.push_back({c, false});
            p.peripherals.push_back(Word{{c, false}});
        }
        p.relation = rel;
        return p;
    }

    /// Free group on `rank` generators x1..xn carrying explicit peripheral
    /// words; used when no marking of the surface is known.
    static GroupPresentation free_basis(std::size_t rank, int genus, std::vector<Word> peripherals,
                                        std::optional<Word> relation = std::nullopt) {
        GroupPresentation p;
        p.kind = Kind::FreeBasis;
        p.genus = genus;
        p.punctures = static_cast<int>(peripherals.size());
        for (std::size_t i = 1; i <= rank; ++i) p.generators.push_back("x" + std::to_string(i));
        p.peripherals = std::move(peripherals);
        p.relation = std::move(relation);
        return p;
    }
};

inline std::string format_word(const GroupPresentation& p, const Word& w) {
    std::string out;
    for (const Letter& l : w) {
        if (!out.empty()) out += ' ';
        out += l.generator < p.size() ? p.generators[l.generator] : "?" + std::to_string(l.generator);
        if (l.inverse) out += "^-1";
    }
    return out;
}

/// Parses "a1 b1^-1 c1" (whitespace separated, "^-1" marks an inverse).
inline Word parse_word(const GroupPresentation& p, std::string_view text) {
    Word out;
    std::istringstream in{std::string(text)};
    std::string tok;
    while (in >> tok) {
        bool inv = false;
        if (tok.size() > 3 && tok.compare(tok.size() - 3, 3, "^-1") == 0) {
            inv = true;
            tok.resize(tok.size() - 3);
        }
        const auto idx = p.index_of(tok);
        if (!idx) throw Error(ErrorCode::UnknownGenerator, "unknown generator '" + tok + "'");
        out.push_back({*idx, inv});
    }
    return out;
}

struct AffineRepresentation {
    GroupPresentation presentation;
    std::vector<AffineIsometry> images;

    bool is_linear(double tol = 0.0) const {
        return std::all_of(images.begin(), images.end(),
                           [&](const AffineIsometry& g) { return sup_norm(g.translation) <= tol; });
    }
};

/// Left-to-right product of generator images (inverses for inverted letters).
inline AffineIsometry evaluate_word(const AffineRepresentation& rep, const Word& w) {
    AffineIsometry out;
    for (const Letter& l : w) {
        if (l.generator >= rep.images.size()) {
            throw Error(ErrorCode::UnknownGenerator, "generator index " + std::to_string(l.generator));
        }
        const AffineIsometry& g = rep.images[l.generator];
        out = out * (l.inverse ? g.inverse() : g);
    }
    return out;
}

inline AffineIsometry evaluate_word(const AffineRepresentation& rep, std::string_view text) {
    return evaluate_word(rep, parse_word(rep.presentation, text));
}

inline AffineIsometry peripheral(const AffineRepresentation& rep, std::size_t j) {
    return evaluate_word(rep, rep.presentation.peripherals.at(j));
}

/// Sup-norm distance of the evaluated relation from the identity, over the
/// linear and translation parts. A presentation without a relation (a free
/// basis) has residual zero.
inline double check_relation(const AffineRepresentation& rep) {
    if (!rep.presentation.relation) return 0.0;
    return affine_distance(evaluate_word(rep, *rep.presentation.relation), AffineIsometry::identity());
}

/// Tangency of the translation part of a parabolic isometry: <tau | v> = 0
/// for v the fixed lightlike direction of the linear part.
inline bool is_tangent(const AffineIsometry& phi, double tol = kFormTolerance) {
    const MinkVec v = parabolic_direction(phi.linear, tol);
    return detail::translation_orthogonal(phi.translation, v, tol);
}

struct AdmissibilityReport {
    enum class Verdict { AdmissibleNecessaryConditions, NotAdmissible };

    double relation_residual = 0.0;
    bool relation_ok = false;
    std::vector<CausalClass> peripheral_classes;
    std::vector<CausalClass> handle_classes;
    std::vector<bool> tangency_ok;
    Verdict verdict = Verdict::NotAdmissible;
    std::vector<std::string> failures;
    bool discreteness_checked = false;
    std::string caveat =
        "faithfulness and discreteness are not decided numerically; the verdict covers the checkable "
        "conditions only";

    bool admissible() const { return verdict == Verdict::AdmissibleNecessaryConditions; }
};

inline const char* to_string(AdmissibilityReport::Verdict v) {
    return v == AdmissibilityReport::Verdict::AdmissibleNecessaryConditions ? "AdmissibleNecessaryConditions"
                                                                             : "NotAdmissible";
}

inline AdmissibilityReport check_admissible(const AffineRepresentation& rep, double tol = kFormTolerance) {
    AdmissibilityReport report;
    const auto& pres = rep.presentation;
    auto fail = [&](std::string msg) { report.failures.push_back(std::move(msg)); };

    if (rep.images.size() != pres.size()) {
        fail("generator count mismatch");
        return report;
    }
    for (std::size_t i = 0; i < rep.images.size(); ++i) {
        if (!is_valid_isometry(rep.images[i].linear, std::max(tol, kFormTolerance))) {
            fail("generator " + pres.generators[i] + " is not in SO_0(1,2)");
        }
    }
    if (!report.failures.empty()) return report;

    report.relation_residual = check_relation(rep);
    report.relation_ok = report.relation_residual <= kRelationTolerance;
    if (!report.relation_ok) fail("relation residual " + std::to_string(report.relation_residual));

    if (pres.kind == GroupPresentation::Kind::MarkedSurface) {
        for (int i = 0; i < 2 * pres.genus; ++i) {
            const CausalClass c = classify(rep.images[i], tol);
            report.handle_classes.push_back(c);
            if (c.linear != LinearClass::Hyperbolic) {
                fail("handle generator " + pres.generators[i] + " is " + to_string(c.linear));
            }
        }
    }
    for (std::size_t j = 0; j < pres.peripherals.size(); ++j) {
        const AffineIsometry phi = peripheral(rep, j);
        const CausalClass c = classify(phi, tol);
        report.peripheral_classes.push_back(c);
        if (c.linear != LinearClass::Parabolic) {
            fail("peripheral " + std::to_string(j + 1) + " is " + to_string(c.linear));
            report.tangency_ok.push_back(false);
            continue;
        }
        const bool tangent = is_tangent(phi, tol);
        report.tangency_ok.push_back(tangent);
        if (!tangent) fail("peripheral " + std::to_string(j + 1) + " translation is not tangent");
    }
    report.verdict = report.failures.empty() ? AdmissibilityReport::Verdict::AdmissibleNecessaryConditions
                                             : AdmissibilityReport::Verdict::NotAdmissible;
    return report;
}

struct DefaultCompose {
    AffineIsometry operator()(const AffineIsometry& a, const AffineIsometry& b) const { return a * b; }
};

/// Max deviation of tau(w1 w2) from tau(w1) + L(w1) tau(w2) over the given
/// pairs, where the product is folded with `compose`. Each deviation is
/// divided by max(1, |tau(w1)| + |L(w1)| |tau(w2)|), since orbit magnitudes
/// grow exponentially with word length. With the standard composition this
/// is an identity up to round-off; a broken composition routine shows up as
/// a large deviation.
template <typename Compose = DefaultCompose>
double cocycle_check(const AffineRepresentation& rep, const std::vector<std::pair<Word, Word>>& pairs,
                     Compose compose = {}) {
    auto fold = [&](const Word& w) {
        AffineIsometry out;
        for (const Letter& l : w) {
            const AffineIsometry& g = rep.images.at(l.generator);
            out = compose(out, l.inverse ? g.inverse() : g);
        }
        return out;
    };
    double worst = 0.0;
    for (const auto& [w1, w2] : pairs) {
        Word joined = w1;
        joined.insert(joined.end(), w2.begin(), w2.end());
        const AffineIsometry g12 = fold(joined);
        const AffineIsometry g1 = fold(w1);
        const AffineIsometry g2 = fold(w2);
        const MinkVec expected = g1.translation + g1.linear(g2.translation);
        const double scale =
            std::max(1.0, sup_norm(g1.translation) + g1.linear.m.cwiseAbs().maxCoeff() * sup_norm(g2.translation));
        worst = std::max(worst, sup_norm(g12.translation - expected) / scale);
    }
    return worst;
}

/// Conjugates every generator image: g -> h g h^-1.
inline AffineRepresentation conjugate(const AffineRepresentation& rep, const AffineIsometry& h) {
    AffineRepresentation out = rep;
    const AffineIsometry hinv = h.inverse();
    for (auto& g : out.images) g = h * g * hinv;
    return out;
}

}  // namespace cauchyhull
