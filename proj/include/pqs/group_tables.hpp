#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "pqs/abelian_group.hpp"
#include "pqs/check.hpp"

namespace pqs {

// Bitset over element ranks. Group orders in scope are <= 92 (4*gB+4 with
// gB <= 22), so two words suffice; build() checks the bound.
struct Mask128 {
    std::uint64_t lo = 0, hi = 0;

    void set(int i) {
        if (i < 64) lo |= std::uint64_t{1} << i;
        else hi |= std::uint64_t{1} << (i - 64);
    }
    bool test(int i) const {
        return i < 64 ? (lo >> i) & 1 : (hi >> (i - 64)) & 1;
    }
    friend Mask128 operator&(Mask128 a, Mask128 b) { return {a.lo & b.lo, a.hi & b.hi}; }
    friend Mask128 operator|(Mask128 a, Mask128 b) { return {a.lo | b.lo, a.hi | b.hi}; }
    friend bool operator==(const Mask128&, const Mask128&) = default;
    int count() const { return std::popcount(lo) + std::popcount(hi); }
};

// Dense lookup tables for one group, indexed by element rank. Everything the
// hot loops need is precomputed here so they never touch GroupElement vectors.
struct GroupTables {
    FiniteAbelianGroup group;
    int n = 0;         // group order
    int exponent = 0;

    std::vector<GroupElement> elems;      // elems[r] = element_of_rank(r)
    std::vector<int> ord;                 // element orders
    std::vector<int> neg;                 // rank of the inverse
    std::vector<int> add;                 // add[a*n+b] = rank of sum
    std::vector<std::vector<int>> cyc;    // sorted ranks of <x>, identity included
    std::vector<Mask128> cyc_mask;        // same subgroups as bitsets

    // pairing_num[c*n+r] = k with <chi_c, x_r> = k/exponent, k in [0, exponent)
    std::vector<int> pairing_num;
    // a_val[c*n+r] = ord(x_r) * k / exponent, the branch coefficient of x_r
    // in the piece of character c; always an integer in [0, ord-1]
    std::vector<int> a_val;
    std::vector<Character> chars;         // dual group, lex order, trivial first

    int add_at(int a, int b) const { return add[a * n + b]; }
    int pairing_at(int c, int r) const { return pairing_num[c * n + r]; }
    int a_at(int c, int r) const { return a_val[c * n + r]; }

    // rank of e*x given rank of x
    int scalar_at(int e, int r) const {
        int acc = 0;
        for (int i = 0; i < e; ++i) acc = add_at(acc, r);
        return acc;
    }

    static GroupTables build(const FiniteAbelianGroup& G) {
        GroupTables t;
        t.group = G;
        t.n = static_cast<int>(G.order());
        PQS_CHECK(t.n <= 128, "group order exceeds mask width");
        t.exponent = static_cast<int>(G.exponent());
        t.elems = all_elements(G);
        t.ord.resize(t.n);
        t.neg.resize(t.n);
        t.add.resize(static_cast<std::size_t>(t.n) * t.n);
        for (int a = 0; a < t.n; ++a) {
            t.ord[a] = element_order(G, t.elems[a]);
            t.neg[a] = static_cast<int>(element_rank(G, negate_element(G, t.elems[a])));
            for (int b = 0; b < t.n; ++b)
                t.add[static_cast<std::size_t>(a) * t.n + b] =
                    static_cast<int>(element_rank(G, pqs::add(G, t.elems[a], t.elems[b])));
        }
        t.cyc.resize(t.n);
        t.cyc_mask.resize(t.n);
        for (int a = 0; a < t.n; ++a) {
            int r = 0;
            do {
                t.cyc[a].push_back(r);
                r = t.add_at(r, a);
            } while (r != 0);
            std::sort(t.cyc[a].begin(), t.cyc[a].end());
            for (int m : t.cyc[a]) t.cyc_mask[a].set(m);
        }
        t.chars = dual_characters(G);
        t.pairing_num.resize(static_cast<std::size_t>(t.n) * t.n);
        t.a_val.resize(static_cast<std::size_t>(t.n) * t.n);
        for (int c = 0; c < t.n; ++c)
            for (int r = 0; r < t.n; ++r) {
                int k = pairing_numerator(G, t.chars[c], t.elems[r]);
                t.pairing_num[static_cast<std::size_t>(c) * t.n + r] = k;
                long long num = static_cast<long long>(t.ord[r]) * k;
                PQS_CHECK(num % t.exponent == 0, "branch coefficient not integral");
                t.a_val[static_cast<std::size_t>(c) * t.n + r] =
                    static_cast<int>(num / t.exponent);
            }
        return t;
    }

    // closure of the given ranks equals the whole group
    bool generates(const std::vector<int>& ranks) const {
        std::vector<int> sub{0};
        Mask128 seen;
        seen.set(0);
        for (int g : ranks) {
            if (seen.test(g)) continue;
            // sub is a subgroup after each step, so extend by coset translates
            std::vector<int> base = sub;
            int p = g;
            while (!seen.test(p)) {
                for (int s : base) {
                    int q = add_at(s, p);
                    if (!seen.test(q)) {
                        seen.set(q);
                        sub.push_back(q);
                    }
                }
                p = add_at(p, g);
            }
            if (static_cast<int>(sub.size()) == n) return true;
        }
        return static_cast<int>(sub.size()) == n;
    }
};

}  // namespace pqs
