#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "pqs/rational.hpp"

namespace pqs {

/// Finite abelian group in invariant factor form: Z/d1 x ... x Z/dk with
/// d1 | d2 | ... | dk and every di >= 2. The trivial group has no factors.
struct FiniteAbelianGroup {
    std::vector<int> invariant_factors;

    FiniteAbelianGroup() = default;
    explicit FiniteAbelianGroup(std::vector<int> factors)
        : invariant_factors(std::move(factors)) {
        for (std::size_t i = 0; i < invariant_factors.size(); ++i) {
            if (invariant_factors[i] < 2)
                throw std::invalid_argument("invariant factor below 2");
            if (i + 1 < invariant_factors.size() &&
                invariant_factors[i + 1] % invariant_factors[i] != 0)
                throw std::invalid_argument("invariant factors must form a divisor chain");
        }
    }

    int rank() const { return static_cast<int>(invariant_factors.size()); }

    long long order() const {
        long long n = 1;
        for (int d : invariant_factors) n *= d;
        return n;
    }

    // Largest element order; 1 for the trivial group.
    int exponent() const {
        return invariant_factors.empty() ? 1 : invariant_factors.back();
    }

    bool operator==(const FiniteAbelianGroup&) const = default;
    auto operator<=>(const FiniteAbelianGroup&) const = default;
};

/// Element as a residue tuple aligned with the group's invariant factors.
struct GroupElement {
    std::vector<int> residues;

    bool operator==(const GroupElement&) const = default;
    auto operator<=>(const GroupElement&) const = default;
};

/// Character of G, identified with a residue tuple via the standard pairing
/// (chi, g) = sum_i c_i e_i / d_i mod 1.
struct Character {
    std::vector<int> coefficients;

    bool operator==(const Character&) const = default;
    auto operator<=>(const Character&) const = default;
};

inline void check_element(const FiniteAbelianGroup& G, const GroupElement& g) {
    if (g.residues.size() != G.invariant_factors.size())
        throw std::invalid_argument("element shape does not match group");
    for (std::size_t i = 0; i < g.residues.size(); ++i)
        if (g.residues[i] < 0 || g.residues[i] >= G.invariant_factors[i])
            throw std::invalid_argument("element residue out of range");
}

inline GroupElement zero_element(const FiniteAbelianGroup& G) {
    return GroupElement{std::vector<int>(G.invariant_factors.size(), 0)};
}

inline bool is_zero(const GroupElement& g) {
    return std::all_of(g.residues.begin(), g.residues.end(),
                       [](int r) { return r == 0; });
}

inline GroupElement add(const FiniteAbelianGroup& G, const GroupElement& a,
                        const GroupElement& b) {
    check_element(G, a);
    check_element(G, b);
    GroupElement out = a;
    for (std::size_t i = 0; i < out.residues.size(); ++i)
        out.residues[i] = (out.residues[i] + b.residues[i]) % G.invariant_factors[i];
    return out;
}

inline GroupElement negate_element(const FiniteAbelianGroup& G, const GroupElement& a) {
    check_element(G, a);
    GroupElement out = a;
    for (std::size_t i = 0; i < out.residues.size(); ++i)
        out.residues[i] = (G.invariant_factors[i] - out.residues[i]) % G.invariant_factors[i];
    return out;
}

inline GroupElement scalar_mul(const FiniteAbelianGroup& G, long long k,
                               const GroupElement& a) {
    check_element(G, a);
    GroupElement out = a;
    for (std::size_t i = 0; i < out.residues.size(); ++i) {
        long long d = G.invariant_factors[i];
        long long r = (static_cast<long long>(a.residues[i]) * (k % d)) % d;
        out.residues[i] = static_cast<int>((r + d) % d);
    }
    return out;
}

// ord(g) = lcm_i( d_i / gcd(d_i, e_i) ).
inline int element_order(const FiniteAbelianGroup& G, const GroupElement& g) {
    check_element(G, g);
    long long m = 1;
    for (std::size_t i = 0; i < g.residues.size(); ++i) {
        int d = G.invariant_factors[i];
        m = std::lcm(m, static_cast<long long>(d / std::gcd(d, g.residues[i])));
    }
    return static_cast<int>(m);
}

// Lexicographic rank of the residue tuple; ranks enumerate G in lex order.
inline int element_rank(const FiniteAbelianGroup& G, const GroupElement& g) {
    check_element(G, g);
    int r = 0;
    for (std::size_t i = 0; i < g.residues.size(); ++i)
        r = r * G.invariant_factors[i] + g.residues[i];
    return r;
}

inline GroupElement element_of_rank(const FiniteAbelianGroup& G, int rank) {
    GroupElement g = zero_element(G);
    for (std::size_t i = G.invariant_factors.size(); i-- > 0;) {
        g.residues[i] = rank % G.invariant_factors[i];
        rank /= G.invariant_factors[i];
    }
    return g;
}

inline std::vector<GroupElement> all_elements(const FiniteAbelianGroup& G) {
    std::vector<GroupElement> out;
    out.reserve(static_cast<std::size_t>(G.order()));
    for (int r = 0; r < G.order(); ++r) out.push_back(element_of_rank(G, r));
    return out;
}

/// Pairing value (chi, g) as an exact rational in [0, 1).
inline Rat character_pairing(const FiniteAbelianGroup& G, const Character& chi,
                             const GroupElement& g) {
    check_element(G, g);
    if (chi.coefficients.size() != G.invariant_factors.size())
        throw std::invalid_argument("character shape does not match group");
    Rat sum(0);
    for (std::size_t i = 0; i < g.residues.size(); ++i)
        sum += Rat(static_cast<long long>(chi.coefficients[i]) * g.residues[i],
                   G.invariant_factors[i]);
    return mod_one(sum);
}

// Same pairing as a numerator over exponent(G); always exact.
inline int pairing_numerator(const FiniteAbelianGroup& G, const Character& chi,
                             const GroupElement& g) {
    int e = G.exponent();
    long long num = 0;
    for (std::size_t i = 0; i < g.residues.size(); ++i)
        num += static_cast<long long>(chi.coefficients[i]) * g.residues[i] *
               (e / G.invariant_factors[i]);
    return static_cast<int>(((num % e) + e) % e);
}

/// All characters in lexicographic coefficient order; the trivial one first.
inline std::vector<Character> dual_characters(const FiniteAbelianGroup& G) {
    std::vector<Character> out;
    out.reserve(static_cast<std::size_t>(G.order()));
    for (int r = 0; r < G.order(); ++r)
        out.push_back(Character{element_of_rank(G, r).residues});
    return out;
}

/// Subgroup generated by a span, as rank-sorted elements.
inline std::vector<GroupElement> subgroup_generated(
    const FiniteAbelianGroup& G, const std::vector<GroupElement>& gens) {
    std::vector<char> seen(static_cast<std::size_t>(G.order()), 0);
    std::vector<int> members{element_rank(G, zero_element(G))};
    seen[static_cast<std::size_t>(members[0])] = 1;
    for (const GroupElement& gen : gens) {
        check_element(G, gen);
        // The closure is a subgroup after each step, so extending by gen
        // means translating the current members by all multiples of gen.
        int m = element_order(G, gen);
        std::vector<int> current = members;
        for (int r0 : current) {
            GroupElement y = element_of_rank(G, r0);
            for (int k = 1; k < m; ++k) {
                y = add(G, y, gen);
                int r = element_rank(G, y);
                if (!seen[static_cast<std::size_t>(r)]) {
                    seen[static_cast<std::size_t>(r)] = 1;
                    members.push_back(r);
                }
            }
        }
    }
    std::sort(members.begin(), members.end());
    std::vector<GroupElement> out;
    out.reserve(members.size());
    for (int r : members) out.push_back(element_of_rank(G, r));
    return out;
}

inline std::vector<GroupElement> cyclic_subgroup(const FiniteAbelianGroup& G,
                                                 const GroupElement& g) {
    return subgroup_generated(G, {g});
}

struct CyclicIntersection {
    std::vector<GroupElement> elements;  // rank-sorted
    int order = 1;
};

/// Intersection of the cyclic subgroups generated by g and h (itself cyclic).
inline CyclicIntersection cyclic_intersection(const FiniteAbelianGroup& G,
                                              const GroupElement& g,
                                              const GroupElement& h) {
    std::vector<GroupElement> a = cyclic_subgroup(G, g);
    std::vector<GroupElement> b = cyclic_subgroup(G, h);
    CyclicIntersection out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(out.elements));
    out.order = static_cast<int>(out.elements.size());
    return out;
}

namespace detail {

// Partitions of n in decreasing part order, each partition sorted descending.
inline std::vector<std::vector<int>> partitions_of(int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int remaining, int max_part) -> void {
        if (remaining == 0) {
            out.push_back(cur);
            return;
        }
        for (int part = std::min(remaining, max_part); part >= 1; --part) {
            cur.push_back(part);
            self(self, remaining - part, part);
            cur.pop_back();
        }
    };
    rec(rec, n, n);
    return out;
}

inline std::map<long long, int> factorize(long long n) {
    std::map<long long, int> f;
    for (long long p = 2; p * p <= n; ++p)
        while (n % p == 0) { ++f[p]; n /= p; }
    if (n > 1) ++f[n];
    return f;
}

}  // namespace detail

/// All abelian groups of order n, one per isomorphism class, sorted by
/// invariant factor list.
inline std::vector<FiniteAbelianGroup> enumerate_abelian_groups(long long n) {
    if (n < 1) throw std::invalid_argument("group order must be positive");
    if (n == 1) return {FiniteAbelianGroup{}};
    auto factors = detail::factorize(n);
    std::vector<std::vector<std::vector<int>>> per_prime_partitions;
    std::vector<long long> primes;
    for (auto& [p, a] : factors) {
        primes.push_back(p);
        per_prime_partitions.push_back(detail::partitions_of(a));
    }

    std::vector<FiniteAbelianGroup> out;
    std::vector<std::size_t> choice(primes.size(), 0);
    while (true) {
        std::size_t len = 0;
        for (std::size_t i = 0; i < primes.size(); ++i)
            len = std::max(len, per_prime_partitions[i][choice[i]].size());
        // Align largest parts; the product chain is then divisibility-sorted.
        std::vector<int> descending(len, 1);
        for (std::size_t i = 0; i < primes.size(); ++i) {
            const auto& part = per_prime_partitions[i][choice[i]];
            for (std::size_t j = 0; j < part.size(); ++j) {
                long long pw = 1;
                for (int t = 0; t < part[j]; ++t) pw *= primes[i];
                descending[j] = static_cast<int>(descending[j] * pw);
            }
        }
        std::reverse(descending.begin(), descending.end());
        out.push_back(FiniteAbelianGroup{descending});

        std::size_t i = 0;
        for (; i < choice.size(); ++i) {
            if (++choice[i] < per_prime_partitions[i].size()) break;
            choice[i] = 0;
        }
        if (i == choice.size()) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace pqs
