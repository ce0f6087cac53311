#pragma once

#include <array>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "pqs/check.hpp"
#include "pqs/quotient_geometry.hpp"

namespace pqs {

// One character piece of the pushforward of the canonical sheaf. Vectors are
// aligned with the branch curves: the *_e entries follow the second-factor
// monodromies (curves E_1..E_s), the *_f entries the first-factor ones
// (curves F_1..F_r).
struct CanonicalPiece {
    Character character;
    std::vector<int> a_e, a_f;      // branch coefficients in [0, m-1]
    int l_e = 0, l_f = 0;           // bidegree of the twist L
    int m_e = 0, m_f = 0;           // L - (2,2)
    long long h0 = 0;               // (m_e+1)(m_f+1) clamped at 0
    std::vector<int> phi_e, phi_f;  // coefficients m-1-a of the fixed divisor
};

struct PieceDecomposition {
    FiniteAbelianGroup group;
    std::vector<int> orders_e, orders_f;  // branch curve monodromy orders
    std::vector<CanonicalPiece> pieces;   // h0 > 0 only, character-lex order
    long long chi = 0;
};

// genus of the covering curve from the branch data, by Riemann-Hurwitz
inline long long genus_from_type(const GroupTables& t, const std::vector<int>& ranks) {
    Rat s = 0;
    for (int r : ranks) s += Rat(t.ord[r] - 1, t.ord[r]);
    Rat g = 1 + Rat(t.n) * (s - 2) / 2;
    PQS_CHECK(is_integer(g) && g >= 0, "branch data gives no valid genus");
    return boost::rational_cast<long long>(g);
}

inline PieceDecomposition compute_pieces(
    const GroupTables& t, const std::vector<int>& ranks_a, const std::vector<int>& ranks_b,
    RotationConvention conv = RotationConvention::b_minus) {
    SingularityBasket basket = compute_singularities(t, ranks_a, ranks_b, conv);
    if (!is_canonical(basket))
        throw std::domain_error("canonical system pieces need a canonical basket");
    long long g_a = genus_from_type(t, ranks_a);
    long long g_b = genus_from_type(t, ranks_b);
    Rat chi = euler_characteristic(g_a, g_b, t.n, basket);
    PQS_CHECK(is_integer(chi), "chi must be integral for a group quotient");

    PieceDecomposition out;
    out.group = t.group;
    for (int r : ranks_b) out.orders_e.push_back(t.ord[r]);
    for (int r : ranks_a) out.orders_f.push_back(t.ord[r]);
    out.chi = boost::rational_cast<long long>(chi);

    // under the opposite convention the second-factor inertia characters are
    // inverted, so the branch coefficients on the E curves use -h_i
    auto e_rank = [&](int r) { return conv == RotationConvention::b_minus ? r : t.neg[r]; };

    long long h0_sum = 0;
    for (int c = 0; c < t.n; ++c) {
        CanonicalPiece p;
        p.character = t.chars[static_cast<std::size_t>(c)];
        long long num_e = 0, num_f = 0;
        for (int r : ranks_b) {
            p.a_e.push_back(t.a_at(c, e_rank(r)));
            num_e += t.pairing_at(c, e_rank(r));
        }
        for (int r : ranks_a) {
            p.a_f.push_back(t.a_at(c, r));
            num_f += t.pairing_at(c, r);
        }
        PQS_CHECK(num_e % t.exponent == 0 && num_f % t.exponent == 0,
                  "twist bidegree not integral");
        p.l_e = static_cast<int>(num_e / t.exponent);
        p.l_f = static_cast<int>(num_f / t.exponent);
        p.m_e = p.l_e - 2;
        p.m_f = p.l_f - 2;
        p.h0 = (p.m_e >= 0 && p.m_f >= 0)
                   ? static_cast<long long>(p.m_e + 1) * (p.m_f + 1)
                   : 0;
        if (p.h0 == 0) continue;
        for (std::size_t i = 0; i < ranks_b.size(); ++i)
            p.phi_e.push_back(out.orders_e[i] - 1 - p.a_e[i]);
        for (std::size_t j = 0; j < ranks_a.size(); ++j)
            p.phi_f.push_back(out.orders_f[j] - 1 - p.a_f[j]);
        h0_sum += p.h0;
        out.pieces.push_back(std::move(p));
    }
    PQS_CHECK(h0_sum == out.chi - 1, "piece dimensions must sum to chi - 1");
    return out;
}

inline PieceDecomposition compute_pieces(
    const SurfaceCandidate& cand, RotationConvention conv = RotationConvention::b_minus) {
    GroupTables t = GroupTables::build(cand.group);
    return compute_pieces(t, detail::sorted_ranks(t, cand.vec_a.entries),
                          detail::sorted_ranks(t, cand.vec_b.entries), conv);
}

struct BaseLocusReport {
    bool has_curve_component = false;
    long long isolated_points = 0;
    // (f_index, e_index, points) for each contributing branch pair, 0-based
    std::vector<std::tuple<int, int, long long>> point_sites;
};

// Base locus of the canonical system from the piece decomposition. A branch
// curve is a base component iff its fixed-divisor coefficient is positive in
// every piece; a branch pair contributes isolated points iff every piece has
// positive coefficient on at least one of its two curves. An empty piece
// list means the whole surface is base (never happens for chi >= 2).
inline BaseLocusReport base_locus(const GroupTables& t, const std::vector<int>& ranks_a,
                                  const std::vector<int>& ranks_b,
                                  const PieceDecomposition& d) {
    BaseLocusReport rep;
    if (d.pieces.empty()) {
        rep.has_curve_component = true;
        return rep;
    }
    auto always_positive = [&](auto&& coeff) {
        for (const auto& p : d.pieces)
            if (coeff(p) <= 0) return false;
        return true;
    };
    for (std::size_t i = 0; i < ranks_b.size() && !rep.has_curve_component; ++i)
        if (always_positive([&](const CanonicalPiece& p) { return p.phi_e[i]; }))
            rep.has_curve_component = true;
    for (std::size_t j = 0; j < ranks_a.size() && !rep.has_curve_component; ++j)
        if (always_positive([&](const CanonicalPiece& p) { return p.phi_f[j]; }))
            rep.has_curve_component = true;

    for (std::size_t j = 0; j < ranks_a.size(); ++j)
        for (std::size_t i = 0; i < ranks_b.size(); ++i) {
            bool covered = always_positive([&](const CanonicalPiece& p) {
                return p.phi_f[j] > 0 ? 1 : p.phi_e[i];
            });
            if (!covered) continue;
            int n = (t.cyc_mask[ranks_a[j]] & t.cyc_mask[ranks_b[i]]).count();
            long long denom = static_cast<long long>(t.ord[ranks_a[j]]) * t.ord[ranks_b[i]];
            long long num = static_cast<long long>(t.n) * n;
            PQS_CHECK(num % denom == 0, "base point count not integral");
            rep.point_sites.emplace_back(static_cast<int>(j), static_cast<int>(i),
                                         num / denom);
            rep.isolated_points += num / denom;
        }
    return rep;
}

inline BaseLocusReport base_locus(const SurfaceCandidate& cand,
                                  RotationConvention conv = RotationConvention::b_minus) {
    GroupTables t = GroupTables::build(cand.group);
    auto ra = detail::sorted_ranks(t, cand.vec_a.entries);
    auto rb = detail::sorted_ranks(t, cand.vec_b.entries);
    return base_locus(t, ra, rb, compute_pieces(t, ra, rb, conv));
}

enum class QuadricStatus { found, none, inconclusive };

struct QuadricScan {
    QuadricStatus status = QuadricStatus::none;
    // (chi_a, chi_b, chi_c) with 2*chi_a = chi_b + chi_c and 2*Phi_a = Phi_b + Phi_c
    std::optional<std::array<Character, 3>> characters;
};

// Searches for a quadric relation among the one-dimensional pieces: chosen
// section representatives have zero divisor away from the fixed part, so
// s_b * s_c and s_a^2 are proportional iff the characters match and the fixed
// divisors satisfy 2*Phi_a = Phi_b + Phi_c. Only decisive when every piece
// is one-dimensional; scan order is piece-lex, so the result is deterministic.
inline QuadricScan quadric_relation(const PieceDecomposition& d) {
    for (const auto& p : d.pieces)
        if (p.h0 != 1) return {QuadricStatus::inconclusive, std::nullopt};
    const auto& factors = d.group.invariant_factors;
    auto rel = [&](const Character& x2, const Character& y, const Character& z) {
        for (std::size_t i = 0; i < factors.size(); ++i)
            if ((2 * x2.coefficients[i]) % factors[i] !=
                (y.coefficients[i] + z.coefficients[i]) % factors[i])
                return false;
        return true;
    };
    auto doubled_phi = [](const std::vector<int>& x, const std::vector<int>& y,
                          const std::vector<int>& z) {
        for (std::size_t i = 0; i < x.size(); ++i)
            if (2 * x[i] != y[i] + z[i]) return false;
        return true;
    };
    for (const auto& pa : d.pieces)
        for (std::size_t b = 0; b < d.pieces.size(); ++b)
            for (std::size_t c = b + 1; c < d.pieces.size(); ++c) {
                const auto& pb = d.pieces[b];
                const auto& pc = d.pieces[c];
                if (!rel(pa.character, pb.character, pc.character)) continue;
                if (!doubled_phi(pa.phi_e, pb.phi_e, pc.phi_e)) continue;
                if (!doubled_phi(pa.phi_f, pb.phi_f, pc.phi_f)) continue;
                return {QuadricStatus::found,
                        std::array<Character, 3>{pa.character, pb.character, pc.character}};
            }
    return {QuadricStatus::none, std::nullopt};
}

struct DegreeReport {
    Rat upper_bound;
    std::optional<long long> exact;
    std::string note;
};

// Degree of the canonical image. The bound is K^2 of the minimal model minus
// the base point count, divided by p_g - 2 (the image spans a projective
// space of dimension p_g - 1 and is a non-degenerate surface there).
inline DegreeReport degree_report(long long pg, long long k2, long long base_points,
                                  const SingularityBasket& basket, QuadricStatus quadric) {
    PQS_CHECK(pg >= 3, "degree analysis needs pg >= 3");
    DegreeReport rep;
    rep.upper_bound = (Rat(8 * (pg + 1)) - base_points - Rat(2, 3) * basket.defect()) / (pg - 2);
    if (pg == 3 && base_points == 0) {
        rep.exact = k2;
        rep.note = "canonical map is onto the plane, degree K^2";
    } else if (pg == 4 && base_points == 0 && quadric == QuadricStatus::found) {
        PQS_CHECK(k2 % 2 == 0, "odd K^2 cannot double-cover a quadric");
        rep.exact = k2 / 2;
        rep.note = "canonical image is a quadric, degree K^2/2";
    } else if (pg == 4 && quadric == QuadricStatus::inconclusive) {
        rep.note = "piece dimensions too large to decide a quadric relation";
    } else {
        rep.note = "exact degree not determined";
    }
    return rep;
}

}  // namespace pqs
