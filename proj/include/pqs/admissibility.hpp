#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pqs/abelian_group.hpp"
#include "pqs/rational.hpp"

namespace pqs {

/// Branch point order multiset of a cover of P^1, sorted ascending.
struct SignatureType {
    std::vector<int> orders;

    SignatureType() = default;
    explicit SignatureType(std::vector<int> m) : orders(std::move(m)) {
        std::sort(orders.begin(), orders.end());
        for (int v : orders)
            if (v < 2) throw std::invalid_argument("branch order below 2");
    }

    bool operator==(const SignatureType&) const = default;
    auto operator<=>(const SignatureType&) const = default;
};

/// Numeric shell of a candidate surface before group elements are chosen.
struct AdmissibleTuple {
    int gA = 0;
    int gB = 0;
    long long group_order = 0;
    SignatureType typeA;
    SignatureType typeB;

    bool operator==(const AdmissibleTuple&) const = default;
    auto operator<=>(const AdmissibleTuple&) const = default;
};

inline long long chi_from_pg(int pg) { return static_cast<long long>(pg) + 1; }

// Largest g with g^2 - (4*chi+2)g + 1 - 4*chi <= 0, i.e.
// g <= 1 + 2*chi + 2*sqrt(chi^2 + 2*chi), found without floating point.
inline int genus_b_max(long long chi) {
    long long g = 2;
    while ((g + 1) * (g + 1) - (4 * chi + 2) * (g + 1) + 1 - 4 * chi <= 0) ++g;
    return static_cast<int>(g);
}

// floor(4*chi*(gB+1)/(gB-1) + 1) for gB >= 2.
inline int genus_a_max(long long chi, int gB) {
    if (gB < 2) throw std::invalid_argument("gB must be at least 2");
    long long num = 4 * chi * (gB + 1) + (gB - 1);
    return static_cast<int>(num / (gB - 1));
}

inline long long group_order_bound(int gB) { return 4LL * gB + 4; }

/// All order multisets (each order dividing n) satisfying the exact
/// Riemann-Hurwitz identity sum(1 - 1/m_j) = 2 + (2g - 2)/n.
inline std::vector<SignatureType> enumerate_types(int g, long long n) {
    std::vector<SignatureType> out;
    Rat target = Rat(2) + Rat(2LL * g - 2, n);
    if (target <= Rat(0)) return out;

    std::vector<int> divisors;
    for (int d = 2; d <= n; ++d)
        if (n % d == 0) divisors.push_back(d);

    std::vector<int> cur;
    auto rec = [&](auto&& self, std::size_t min_idx, Rat remaining) -> void {
        if (remaining == Rat(0)) {
            if (cur.size() >= 3) out.push_back(SignatureType{cur});
            return;
        }
        for (std::size_t i = min_idx; i < divisors.size(); ++i) {
            Rat term(divisors[i] - 1, divisors[i]);
            if (term > remaining) continue;
            // Orders are chosen non-decreasing, so later terms are >= term.
            if (remaining - term != Rat(0) && remaining - term < term) continue;
            cur.push_back(divisors[i]);
            self(self, i, remaining - term);
            cur.pop_back();
        }
    };
    rec(rec, 0, target);
    std::sort(out.begin(), out.end());
    return out;
}

/// Numeric search space for a given geometric genus: every
/// [gA, gB, |G|, T1, T2] surviving the exact Riemann-Hurwitz identity and
/// the coarse bounds. When gA == gB only T1 <= T2 is emitted (the pair is
/// unordered in that case).
inline std::vector<AdmissibleTuple> step1_tuples(
    int pg, std::optional<long long> max_group_order = std::nullopt) {
    const long long chi = chi_from_pg(pg);
    std::vector<AdmissibleTuple> out;
    const int gB_cap = genus_b_max(chi);
    for (int gB = 2; gB <= gB_cap; ++gB) {
        const int gA_cap = genus_a_max(chi, gB);
        for (int gA = gB; gA <= gA_cap; ++gA) {
            long long n_cap = group_order_bound(gB);
            if (max_group_order) n_cap = std::min(n_cap, *max_group_order);
            for (long long n = 2; n <= n_cap; ++n) {
                // Singular corrections only add to chi, so the product part
                // may not exceed it.
                if (Rat(static_cast<long long>(gA - 1) * (gB - 1), n) > Rat(chi))
                    continue;
                auto typesA = enumerate_types(gA, n);
                if (typesA.empty()) continue;
                auto typesB = enumerate_types(gB, n);
                if (typesB.empty()) continue;
                for (const auto& tA : typesA)
                    for (const auto& tB : typesB) {
                        if (gA == gB && tB < tA) continue;
                        out.push_back(AdmissibleTuple{gA, gB, n, tA, tB});
                    }
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace pqs
