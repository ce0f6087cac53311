#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "pqs/abelian_group.hpp"
#include "pqs/admissibility.hpp"
#include "pqs/automorphisms.hpp"
#include "pqs/check.hpp"
#include "pqs/group_tables.hpp"

namespace pqs {

// Branch-point monodromies of one quotient map: entries sum to zero and
// generate the group. For an abelian group the entries are an unordered
// multiset; we store them sorted by element rank.
struct GeneratingVector {
    FiniteAbelianGroup group;
    std::vector<GroupElement> entries;

    friend bool operator==(const GeneratingVector&, const GeneratingVector&) = default;
};

// One surface datum: a pair of generating vectors for the same group. The
// first vector belongs to the curve of genus gA, the second to genus gB.
struct SurfaceCandidate {
    FiniteAbelianGroup group;
    GeneratingVector vec_a;
    GeneratingVector vec_b;

    friend bool operator==(const SurfaceCandidate&, const SurfaceCandidate&) = default;
};

inline SignatureType type_of(const FiniteAbelianGroup& G,
                             const std::vector<GroupElement>& entries) {
    std::vector<int> orders;
    orders.reserve(entries.size());
    for (const auto& e : entries) orders.push_back(element_order(G, e));
    return SignatureType(orders);
}

inline bool is_spherical_generating(const FiniteAbelianGroup& G,
                                    const std::vector<GroupElement>& entries,
                                    const SignatureType& type) {
    for (const auto& e : entries)
        if (is_zero(e)) return false;  // identity has no branch order
    if (type_of(G, entries) != type) return false;
    GroupElement sum = zero_element(G);
    for (const auto& e : entries) sum = add(G, sum, e);
    if (!is_zero(sum)) return false;
    return subgroup_generated(G, entries).size() == G.order();
}

namespace detail {

inline std::vector<int> sorted_ranks(const GroupTables& t,
                                     const std::vector<GroupElement>& entries) {
    std::vector<int> r;
    r.reserve(entries.size());
    for (const auto& e : entries) r.push_back(static_cast<int>(element_rank(t.group, e)));
    std::sort(r.begin(), r.end());
    return r;
}

inline std::vector<GroupElement> ranks_to_elements(const GroupTables& t,
                                                   const std::vector<int>& ranks) {
    std::vector<GroupElement> out;
    out.reserve(ranks.size());
    for (int r : ranks) out.push_back(t.elems[r]);
    return out;
}

}  // namespace detail

// All generating vectors of the given type, as sorted rank lists in lex
// order. Entries are grouped by order (ascending, matching the type) with
// ranks non-decreasing inside each block, so every multiset is produced
// exactly once; the last entry is forced by the zero-sum condition.
inline std::vector<std::vector<int>> enumerate_generating_vector_ranks(
    const GroupTables& t, const SignatureType& type) {
    const auto& orders = type.orders;
    std::size_t r = orders.size();
    if (r == 0) return t.n == 1 ? std::vector<std::vector<int>>{{}} : std::vector<std::vector<int>>{};
    for (int m : orders)
        if (t.exponent % m != 0) return {};

    std::vector<std::vector<int>> by_order(static_cast<std::size_t>(t.exponent) + 1);
    for (int rank = 0; rank < t.n; ++rank)
        if (t.exponent % t.ord[rank] == 0) by_order[t.ord[rank]].push_back(rank);

    std::vector<std::vector<int>> out;
    std::vector<int> chosen(r);
    auto dfs = [&](auto&& self, std::size_t slot, int sum) -> void {
        if (slot + 1 == r) {
            int last = t.neg[sum];
            if (t.ord[last] != orders[slot]) return;
            if (slot > 0 && orders[slot - 1] == orders[slot] && last < chosen[slot - 1]) return;
            chosen[slot] = last;
            if (!t.generates(chosen)) return;
            std::vector<int> vec = chosen;
            std::sort(vec.begin(), vec.end());
            out.push_back(std::move(vec));
            return;
        }
        int lo = (slot > 0 && orders[slot - 1] == orders[slot]) ? chosen[slot - 1] : 0;
        for (int rank : by_order[orders[slot]]) {
            if (rank < lo) continue;
            chosen[slot] = rank;
            self(self, slot + 1, t.add_at(sum, rank));
        }
    };
    dfs(dfs, 0, 0);
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<GeneratingVector> enumerate_generating_vectors(
    const FiniteAbelianGroup& G, const SignatureType& type) {
    GroupTables t = GroupTables::build(G);
    std::vector<GeneratingVector> out;
    for (const auto& ranks : enumerate_generating_vector_ranks(t, type))
        out.push_back({G, detail::ranks_to_elements(t, ranks)});
    return out;
}

namespace detail {

// Rank pair after applying one automorphism (a permutation of ranks) and
// re-sorting each side.
inline void apply_perm_sorted(const std::vector<std::uint16_t>& perm,
                              const std::vector<int>& in, std::vector<int>& out) {
    out.clear();
    for (int r : in) out.push_back(perm[static_cast<std::size_t>(r)]);
    std::sort(out.begin(), out.end());
}

inline bool same_order_multiset(const GroupTables& t, const std::vector<int>& a,
                                const std::vector<int>& b) {
    if (a.size() != b.size()) return false;
    std::vector<int> oa, ob;
    for (int r : a) oa.push_back(t.ord[r]);
    for (int r : b) ob.push_back(t.ord[r]);
    std::sort(oa.begin(), oa.end());
    std::sort(ob.begin(), ob.end());
    return oa == ob;
}

}  // namespace detail

// Orbit minimum under simultaneous automorphisms, with the two sides
// swappable when their types agree. Input and output rank lists are sorted.
inline std::pair<std::vector<int>, std::vector<int>> canonical_rank_pair(
    const GroupTables& t, const AutomorphismTables& aut,
    const std::vector<int>& ranks_a, const std::vector<int>& ranks_b) {
    bool swappable = detail::same_order_multiset(t, ranks_a, ranks_b);
    std::vector<int> best_a = ranks_a, best_b = ranks_b, ia, ib;
    bool first = true;
    for (const auto& perm : aut.perms) {
        detail::apply_perm_sorted(perm, ranks_a, ia);
        detail::apply_perm_sorted(perm, ranks_b, ib);
        auto consider = [&](const std::vector<int>& x, const std::vector<int>& y) {
            if (first || x < best_a || (x == best_a && y < best_b)) {
                best_a = x;
                best_b = y;
                first = false;
            }
        };
        consider(ia, ib);
        if (swappable) consider(ib, ia);
    }
    return {best_a, best_b};
}

inline SurfaceCandidate canonical_form(const GroupTables& t,
                                       const AutomorphismTables& aut,
                                       const SurfaceCandidate& cand) {
    auto [ba, bb] = canonical_rank_pair(t, aut, detail::sorted_ranks(t, cand.vec_a.entries),
                                        detail::sorted_ranks(t, cand.vec_b.entries));
    return {cand.group,
            {cand.group, detail::ranks_to_elements(t, ba)},
            {cand.group, detail::ranks_to_elements(t, bb)}};
}

inline SurfaceCandidate canonical_form(const SurfaceCandidate& cand) {
    GroupTables t = GroupTables::build(cand.group);
    AutomorphismTables aut = build_automorphism_tables(cand.group);
    return canonical_form(t, aut, cand);
}

namespace detail {

inline std::size_t index_of(const std::vector<std::vector<int>>& sorted_vecs,
                            const std::vector<int>& v) {
    auto it = std::lower_bound(sorted_vecs.begin(), sorted_vecs.end(), v);
    PQS_CHECK(it != sorted_vecs.end() && *it == v,
              "automorphism image missing from enumeration");
    return static_cast<std::size_t>(it - sorted_vecs.begin());
}

}  // namespace detail

// One representative per equivalence class of candidate pairs, in lex order
// of their canonical rank pairs. Walks each orbit once with a visited bitmap
// instead of canonicalizing every pair.
inline std::vector<SurfaceCandidate> enumerate_surface_candidates(
    const FiniteAbelianGroup& G, const SignatureType& type_a,
    const SignatureType& type_b) {
    GroupTables t = GroupTables::build(G);
    auto vecs_a = enumerate_generating_vector_ranks(t, type_a);
    if (vecs_a.empty()) return {};
    auto vecs_b = type_b == type_a ? vecs_a : enumerate_generating_vector_ranks(t, type_b);
    if (vecs_b.empty()) return {};
    AutomorphismTables aut = build_automorphism_tables(G);

    const bool swappable = type_a == type_b;
    const std::size_t nb = vecs_b.size();
    std::vector<bool> visited(vecs_a.size() * nb, false);
    std::vector<std::pair<std::vector<int>, std::vector<int>>> reps;

    std::vector<int> ia, ib;
    for (std::size_t xa = 0; xa < vecs_a.size(); ++xa)
        for (std::size_t xb = swappable ? xa : 0; xb < nb; ++xb) {
            if (visited[xa * nb + xb]) continue;
            std::vector<int> best_a = vecs_a[xa], best_b = vecs_b[xb];
            for (const auto& perm : aut.perms) {
                detail::apply_perm_sorted(perm, vecs_a[xa], ia);
                detail::apply_perm_sorted(perm, vecs_b[xb], ib);
                auto mark = [&](const std::vector<int>& x, const std::vector<int>& y) {
                    visited[detail::index_of(vecs_a, x) * nb + detail::index_of(vecs_b, y)] = true;
                    if (x < best_a || (x == best_a && y < best_b)) {
                        best_a = x;
                        best_b = y;
                    }
                };
                if (swappable) {
                    // unordered pair: store and mark with the lex-min side first
                    const auto& x = std::min(ia, ib);
                    const auto& y = std::max(ia, ib);
                    mark(x, y);
                } else {
                    mark(ia, ib);
                }
            }
            reps.emplace_back(std::move(best_a), std::move(best_b));
        }

    std::sort(reps.begin(), reps.end());
    std::vector<SurfaceCandidate> out;
    out.reserve(reps.size());
    for (const auto& [ra, rb] : reps)
        out.push_back({G,
                       {G, detail::ranks_to_elements(t, ra)},
                       {G, detail::ranks_to_elements(t, rb)}});
    return out;
}

// Negates every entry of the second vector; the geometric content is the
// same surface described in the opposite rotation convention.
inline SurfaceCandidate negate_vector_b(const SurfaceCandidate& cand) {
    std::vector<GroupElement> neg;
    neg.reserve(cand.vec_b.entries.size());
    for (const auto& e : cand.vec_b.entries) neg.push_back(negate_element(cand.group, e));
    std::sort(neg.begin(), neg.end(), [&](const GroupElement& x, const GroupElement& y) {
        return element_rank(cand.group, x) < element_rank(cand.group, y);
    });
    return {cand.group, cand.vec_a, {cand.group, neg}};
}

}  // namespace pqs
