#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pqs/abelian_group.hpp"

namespace pqs {

/// Raised when an operation is asked to run outside its configured limits.
struct CapabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Automorphism of G, stored as the images of the standard generators
/// (the i-th generator is the residue tuple with a 1 in slot i).
struct Automorphism {
    std::vector<GroupElement> images;

    bool operator==(const Automorphism&) const = default;
    auto operator<=>(const Automorphism&) const = default;
};

inline GroupElement apply_automorphism(const FiniteAbelianGroup& G,
                                       const Automorphism& phi,
                                       const GroupElement& g) {
    check_element(G, g);
    GroupElement out = zero_element(G);
    for (std::size_t i = 0; i < g.residues.size(); ++i)
        if (g.residues[i] != 0)
            out = add(G, out, scalar_mul(G, g.residues[i], phi.images[i]));
    return out;
}

inline constexpr long long kDefaultAutomorphismOrderCap = 128;

/// Visits every automorphism of G exactly once, in a deterministic order.
/// Enumeration is a DFS over generator images: image i must have order
/// exactly d_i and the partial images must span a subgroup of order
/// d_1 * ... * d_i. Every surjective choice is an automorphism.
template <typename Fn>
inline void for_each_automorphism(const FiniteAbelianGroup& G, Fn&& fn,
                                  long long order_cap = kDefaultAutomorphismOrderCap) {
    if (G.order() > order_cap)
        throw CapabilityError("automorphism enumeration refused: group order " +
                              std::to_string(G.order()) + " exceeds cap " +
                              std::to_string(order_cap));
    const int k = G.rank();
    if (k == 0) {
        fn(Automorphism{});
        return;
    }
    const long long n = G.order();
    std::vector<GroupElement> elems = all_elements(G);
    std::vector<int> orders(elems.size());
    for (std::size_t r = 0; r < elems.size(); ++r)
        orders[r] = element_order(G, elems[r]);

    std::vector<GroupElement> images(static_cast<std::size_t>(k));
    // seen[depth] marks the subgroup generated by the first depth images.
    std::vector<std::vector<char>> seen(static_cast<std::size_t>(k + 1),
                                        std::vector<char>(static_cast<std::size_t>(n), 0));
    seen[0][0] = 1;
    std::vector<long long> sizes(static_cast<std::size_t>(k + 1), 1);

    auto rec = [&](auto&& self, int depth) -> void {
        if (depth == k) {
            fn(Automorphism{images});
            return;
        }
        int d = G.invariant_factors[static_cast<std::size_t>(depth)];
        for (std::size_t r = 0; r < elems.size(); ++r) {
            if (orders[r] != d) continue;
            if (seen[static_cast<std::size_t>(depth)][r]) continue;  // image not independent
            // Extend the partial subgroup by the candidate image.
            auto& next = seen[static_cast<std::size_t>(depth + 1)];
            next = seen[static_cast<std::size_t>(depth)];
            long long size = sizes[static_cast<std::size_t>(depth)];
            const GroupElement& gen = elems[r];
            std::vector<int> base;
            base.reserve(static_cast<std::size_t>(size));
            for (int x = 0; x < n; ++x)
                if (next[static_cast<std::size_t>(x)]) base.push_back(x);
            for (int x : base) {
                GroupElement y = element_of_rank(G, x);
                for (int t = 1; t < d; ++t) {
                    y = add(G, y, gen);
                    int yr = element_rank(G, y);
                    if (!next[static_cast<std::size_t>(yr)]) {
                        next[static_cast<std::size_t>(yr)] = 1;
                        ++size;
                    }
                }
            }
            if (size != sizes[static_cast<std::size_t>(depth)] * d) continue;
            sizes[static_cast<std::size_t>(depth + 1)] = size;
            images[static_cast<std::size_t>(depth)] = gen;
            self(self, depth + 1);
        }
    };
    rec(rec, 0);
}

inline std::vector<Automorphism> automorphisms(
    const FiniteAbelianGroup& G,
    long long order_cap = kDefaultAutomorphismOrderCap) {
    std::vector<Automorphism> out;
    for_each_automorphism(G, [&](const Automorphism& a) { out.push_back(a); },
                          order_cap);
    return out;
}

inline long long automorphism_count(
    const FiniteAbelianGroup& G,
    long long order_cap = kDefaultAutomorphismOrderCap) {
    long long c = 0;
    for_each_automorphism(G, [&](const Automorphism&) { ++c; }, order_cap);
    return c;
}

/// Every automorphism of G as a permutation of element ranks. This is the
/// form the canonical-form search consumes.
struct AutomorphismTables {
    long long group_order = 1;
    std::vector<std::vector<std::uint16_t>> perms;
};

// Keeps a runaway materialization bounded in memory; groups whose candidate
// cells survive this far have at most a few tens of thousands of
// automorphisms, while e.g. rank-5 elementary 2-groups (whose cells always
// die earlier for lack of generating vectors) would need millions.
inline constexpr long long kDefaultAutomorphismCountCeiling = 200'000;

inline AutomorphismTables build_automorphism_tables(
    const FiniteAbelianGroup& G,
    long long order_cap = kDefaultAutomorphismOrderCap,
    long long count_ceiling = kDefaultAutomorphismCountCeiling) {
    AutomorphismTables tables;
    tables.group_order = G.order();
    const long long n = G.order();
    std::vector<GroupElement> elems = all_elements(G);
    for_each_automorphism(
        G,
        [&](const Automorphism& phi) {
            if (static_cast<long long>(tables.perms.size()) >= count_ceiling)
                throw CapabilityError("automorphism table materialization exceeds ceiling");
            std::vector<std::uint16_t> perm(static_cast<std::size_t>(n));
            for (int r = 0; r < n; ++r)
                perm[static_cast<std::size_t>(r)] = static_cast<std::uint16_t>(
                    element_rank(G, apply_automorphism(G, phi, elems[static_cast<std::size_t>(r)])));
            tables.perms.push_back(std::move(perm));
        },
        order_cap);
    return tables;
}

}  // namespace pqs
