#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pqs/check.hpp"
#include "pqs/generating_vectors.hpp"
#include "pqs/group_tables.hpp"
#include "pqs/rational.hpp"

namespace pqs {

// Local rotation attached to the second-factor monodromies. The first factor
// always rotates by e^{2*pi*i/m}; the default pairs it with the inverse
// rotation e^{-2*pi*i/m} on the second factor. Classification output is
// independent of the choice, individual singularity labels are not.
enum class RotationConvention { b_minus, b_plus };

// Cyclic quotient singularity of type 1/n (1, a), gcd(a, n) = 1, stored with
// a normalized to min(a, a^{-1} mod n) since the two describe the same germ.
struct QuotientSingularity {
    int n = 1;
    int a = 0;

    friend auto operator<=>(const QuotientSingularity&, const QuotientSingularity&) = default;
};

inline int inverse_mod(int a, int n) {
    for (int x = 1; x < n; ++x)
        if (a * x % n == 1) return x;
    PQS_CHECK(false, "not a unit");
    return 0;
}

inline QuotientSingularity normalized_singularity(int n, int a) {
    PQS_CHECK(n >= 2 && a >= 1 && a < n && std::gcd(a, n) == 1, "bad singularity label");
    return {n, std::min(a, inverse_mod(a, n))};
}

// a == n-1 is the A_{n-1} rational double point, the only canonical type
// in this family.
inline bool is_canonical(const QuotientSingularity& s) { return s.a == s.n - 1; }

struct SingularityBasket {
    // (type, number of points of that type), sorted by type
    std::vector<std::pair<QuotientSingularity, long long>> entries;

    bool empty() const { return entries.empty(); }
    long long total_points() const {
        long long t = 0;
        for (const auto& [s, c] : entries) t += c;
        return t;
    }
    // sum over points of (n^2 - 1)/n, the correction term in the invariants
    Rat defect() const {
        Rat d = 0;
        for (const auto& [s, c] : entries)
            d += Rat(static_cast<long long>(s.n) * s.n - 1, s.n) * c;
        return d;
    }
    friend bool operator==(const SingularityBasket&, const SingularityBasket&) = default;
};

inline bool is_canonical(const SingularityBasket& b) {
    for (const auto& [s, c] : b.entries)
        if (!is_canonical(s)) return false;
    return true;
}

// Unnormalized local type at the image of a fixed point shared by the pair
// (g, h) of monodromies: n is the order of <g> meet <h>, and a_raw in
// [1, n-1] depends on the rotation convention. Returns nothing when the
// intersection is trivial (no shared fixed points).
struct PairSingularity {
    int n;
    int a_raw;
};

inline std::optional<PairSingularity> branch_pair_singularity(
    const GroupTables& t, int g_rank, int h_rank,
    RotationConvention conv = RotationConvention::b_minus) {
    int n = (t.cyc_mask[g_rank] & t.cyc_mask[h_rank]).count();
    if (n <= 1) return std::nullopt;
    int ma = t.ord[g_rank], mb = t.ord[h_rank];
    // generator of the intersection with first-factor rotation weight 1
    int sigma = t.scalar_at(ma / n, g_rank);
    PQS_CHECK(sigma != 0, "intersection generator cannot be the identity");
    // express it in terms of h: sigma = l * h with mb/n dividing l
    int l = 0, p = 0;
    for (int k = 1; k < mb; ++k) {
        p = t.add_at(p, h_rank);
        if (p == sigma) {
            l = k;
            break;
        }
    }
    PQS_CHECK(l > 0 && l % (mb / n) == 0, "intersection generator not a power of h");
    int tt = (l / (mb / n)) % n;
    PQS_CHECK(tt != 0 && std::gcd(tt, n) == 1, "rotation weight must be a unit");
    int a = conv == RotationConvention::b_minus ? (n - tt) % n : tt;
    return PairSingularity{n, a};
}

inline SingularityBasket compute_singularities(
    const GroupTables& t, const std::vector<int>& ranks_a, const std::vector<int>& ranks_b,
    RotationConvention conv = RotationConvention::b_minus) {
    std::map<QuotientSingularity, long long> acc;
    for (int g : ranks_a)
        for (int h : ranks_b) {
            auto ps = branch_pair_singularity(t, g, h, conv);
            if (!ps) continue;
            long long denom = static_cast<long long>(t.ord[g]) * t.ord[h];
            long long num = static_cast<long long>(t.n) * ps->n;
            PQS_CHECK(num % denom == 0, "fixed point count not integral");
            acc[normalized_singularity(ps->n, ps->a_raw)] += num / denom;
        }
    SingularityBasket basket;
    basket.entries.assign(acc.begin(), acc.end());
    return basket;
}

inline SingularityBasket compute_singularities(
    const SurfaceCandidate& cand, RotationConvention conv = RotationConvention::b_minus) {
    GroupTables t = GroupTables::build(cand.group);
    return compute_singularities(t, detail::sorted_ranks(t, cand.vec_a.entries),
                                 detail::sorted_ranks(t, cand.vec_b.entries), conv);
}

// The quotient surface is smooth iff no pair of monodromies shares fixed
// points. Independent of the rotation convention.
inline bool is_free(const SingularityBasket& basket) { return basket.empty(); }

inline bool is_free(const SurfaceCandidate& cand) {
    return compute_singularities(cand).empty();
}

// chi(O) of the minimal resolution; valid only for canonical baskets, where
// the resolution is crepant and chi needs just the defect correction.
inline Rat euler_characteristic(long long g_a, long long g_b, long long group_order,
                                const SingularityBasket& basket) {
    if (!is_canonical(basket))
        throw std::domain_error("euler characteristic requires a canonical basket");
    return Rat((g_a - 1) * (g_b - 1), group_order) + basket.defect() / 12;
}

inline Rat k_squared_rational(long long g_a, long long g_b, long long group_order) {
    return Rat(8 * (g_a - 1) * (g_b - 1), group_order);
}

inline std::optional<long long> k_squared(long long g_a, long long g_b,
                                          long long group_order) {
    Rat k = k_squared_rational(g_a, g_b, group_order);
    if (!is_integer(k)) return std::nullopt;
    return boost::rational_cast<long long>(k);
}

}  // namespace pqs
