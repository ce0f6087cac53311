#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "pqs/canonical_system.hpp"

#include "fixtures.hpp"

using namespace pqs;

namespace {

struct PieceExpectation {
    std::vector<int> character;
    std::vector<int> phi_e;
    std::vector<int> phi_f;
};

void check_pieces(const fixtures::ReferenceFamily& fam,
                  const std::vector<PieceExpectation>& expected, long long chi) {
    GroupTables t = GroupTables::build(fam.group);
    auto ra = fixtures::ranks_of(t, fam.res_a);
    auto rb = fixtures::ranks_of(t, fam.res_b);
    PieceDecomposition d = compute_pieces(t, ra, rb);
    CHECK(d.chi == chi);
    REQUIRE(d.pieces.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        INFO("piece " << i);
        const CanonicalPiece& p = d.pieces[i];
        CHECK(p.character.coefficients == expected[i].character);
        CHECK(p.phi_e == expected[i].phi_e);
        CHECK(p.phi_f == expected[i].phi_f);
        CHECK(p.l_e == 2);
        CHECK(p.l_f == 2);
        CHECK(p.h0 == 1);
    }
    BaseLocusReport bl = base_locus(t, ra, rb, d);
    CHECK(!bl.has_curve_component);
    CHECK(bl.isolated_points == 0);
    CHECK(bl.point_sites.empty());
}

}  // namespace

TEST_CASE("degree-32 families decompose into three line pieces") {
    // Both families: supports pair up the branch curves two at a time.
    std::vector<PieceExpectation> expected = {
        {{0, 0, 1, 1}, {1, 1, 0, 0, 0, 0}, {1, 1, 0, 0, 0, 0}},
        {{1, 1, 0, 0}, {0, 0, 1, 1, 0, 0}, {0, 0, 1, 1, 0, 0}},
        {{1, 1, 1, 1}, {0, 0, 0, 0, 1, 1}, {0, 0, 0, 0, 1, 1}},
    };
    check_pieces(fixtures::deg32_family_one(), expected, 4);
    check_pieces(fixtures::deg32_family_two(), expected, 4);
}

TEST_CASE("degree-12 family decomposes into four line pieces") {
    std::vector<PieceExpectation> expected = {
        {{0, 1, 0}, {1, 0, 0, 1}, {1, 1, 0, 0}},
        {{0, 2, 0}, {0, 1, 1, 0}, {0, 0, 1, 1}},
        {{1, 0, 1}, {2, 0, 0, 0}, {2, 0, 0, 0}},
        {{2, 2, 2}, {0, 0, 0, 2}, {0, 2, 0, 0}},
    };
    check_pieces(fixtures::deg12_family(), expected, 5);
}

TEST_CASE("genus recovery from branch data") {
    GroupTables t16 = GroupTables::build(FiniteAbelianGroup({2, 2, 2, 2}));
    auto f1 = fixtures::deg32_family_one();
    CHECK(genus_from_type(t16, fixtures::ranks_of(t16, f1.res_a)) == 9);
    CHECK(genus_from_type(t16, fixtures::ranks_of(t16, f1.res_b)) == 9);

    GroupTables t27 = GroupTables::build(FiniteAbelianGroup({3, 3, 3}));
    auto f3 = fixtures::deg12_family();
    CHECK(genus_from_type(t27, fixtures::ranks_of(t27, f3.res_a)) == 10);

    // Six involutions over Z/2: the genus-2 curve.
    GroupTables t2 = GroupTables::build(FiniteAbelianGroup({2}));
    CHECK(genus_from_type(t2, {1, 1, 1, 1, 1, 1}) == 2);

    // Branch data that solves no cover: (2,3,12) over Z/12 gives genus 3/2.
    GroupTables t12 = GroupTables::build(FiniteAbelianGroup({12}));
    int r6 = element_rank(t12.group, GroupElement{{6}});
    int r4 = element_rank(t12.group, GroupElement{{4}});
    int r1 = element_rank(t12.group, GroupElement{{1}});
    CHECK_THROWS_AS(genus_from_type(t12, {r6, r4, r1}), std::logic_error);
}

TEST_CASE("piece dimensions always sum to chi minus one") {
    struct Cell {
        FiniteAbelianGroup group;
        SignatureType type_a;
        SignatureType type_b;
    };
    const Cell cells[] = {
        {FiniteAbelianGroup({2}), SignatureType({2, 2, 2, 2, 2, 2}),
         SignatureType({2, 2, 2, 2, 2, 2})},
        {FiniteAbelianGroup({2, 2}), SignatureType({2, 2, 2, 2, 2}),
         SignatureType({2, 2, 2, 2, 2})},
        {FiniteAbelianGroup({4}), SignatureType({2, 2, 4, 4}),
         SignatureType({2, 2, 4, 4})},
        {FiniteAbelianGroup({2, 4}), SignatureType({2, 2, 4, 4}),
         SignatureType({2, 2, 4, 4})},
        {FiniteAbelianGroup({8}), SignatureType({2, 8, 8}), SignatureType({4, 8, 8})},
        {FiniteAbelianGroup({3, 3}), SignatureType({3, 3, 3}),
         SignatureType({3, 3, 3, 3})},
        {FiniteAbelianGroup({12}), SignatureType({2, 12, 12}),
         SignatureType({3, 12, 12})},
        {FiniteAbelianGroup({2, 2, 2}), SignatureType({2, 2, 2, 2}),
         SignatureType({2, 2, 2, 2, 2})},
    };
    long long canonical_cases = 0;
    for (const auto& cell : cells) {
        GroupTables t = GroupTables::build(cell.group);
        auto va = enumerate_generating_vector_ranks(t, cell.type_a);
        auto vb = enumerate_generating_vector_ranks(t, cell.type_b);
        for (const auto& a : va)
            for (const auto& b : vb) {
                if (!is_canonical(compute_singularities(t, a, b))) continue;
                ++canonical_cases;
                PieceDecomposition d = compute_pieces(t, a, b);
                long long h0_sum = 0;
                for (std::size_t i = 0; i < d.pieces.size(); ++i) {
                    const auto& p = d.pieces[i];
                    h0_sum += p.h0;
                    CHECK(p.h0 >= 1);
                    CHECK(p.h0 == static_cast<long long>(p.m_e + 1) * (p.m_f + 1));
                    CHECK(p.l_e == p.m_e + 2);
                    CHECK(p.l_f == p.m_f + 2);
                    if (i > 0)
                        CHECK(d.pieces[i - 1].character < p.character);
                    for (std::size_t k = 0; k < p.a_e.size(); ++k) {
                        CHECK(p.a_e[k] >= 0);
                        CHECK(p.a_e[k] < d.orders_e[k]);
                        CHECK(p.phi_e[k] == d.orders_e[k] - 1 - p.a_e[k]);
                    }
                    for (std::size_t k = 0; k < p.a_f.size(); ++k) {
                        CHECK(p.a_f[k] >= 0);
                        CHECK(p.a_f[k] < d.orders_f[k]);
                        CHECK(p.phi_f[k] == d.orders_f[k] - 1 - p.a_f[k]);
                    }
                }
                CHECK(h0_sum == d.chi - 1);
            }
    }
    CHECK(canonical_cases >= 200);
}

TEST_CASE("non-canonical baskets are rejected") {
    // Z/4 quotient where opposite rotations produce 1/4(1,1) points.
    FiniteAbelianGroup z4({4});
    GroupTables t = GroupTables::build(z4);
    auto vecs = enumerate_generating_vector_ranks(t, SignatureType({2, 2, 4, 4}));
    REQUIRE(!vecs.empty());
    bool found_noncanonical = false;
    for (const auto& a : vecs)
        for (const auto& b : vecs)
            if (!is_canonical(compute_singularities(t, a, b))) {
                found_noncanonical = true;
                CHECK_THROWS_AS(compute_pieces(t, a, b), std::domain_error);
            }
    CHECK(found_noncanonical);
}

TEST_CASE("base locus detects isolated points") {
    // Pinned from a scan: five involutions on the Klein group, both sides the
    // multiset {x,x,x,y,x+y}. Two isolated base points, no curve component.
    FiniteAbelianGroup G({2, 2});
    std::vector<std::vector<int>> side = {{0, 1}, {0, 1}, {0, 1}, {1, 0}, {1, 1}};
    GroupTables t = GroupTables::build(G);
    auto r = fixtures::ranks_of(t, side);
    PieceDecomposition d = compute_pieces(t, r, r);
    CHECK(d.chi == 3);
    BaseLocusReport bl = base_locus(t, r, r, d);
    CHECK(!bl.has_curve_component);
    CHECK(bl.isolated_points == 2);
    REQUIRE(bl.point_sites.size() == 2);
    for (const auto& [j, i, pts] : bl.point_sites) {
        CHECK(pts >= 1);
        // Recompute the covering condition and the point count at the site.
        for (const auto& p : d.pieces)
            CHECK((p.phi_f[static_cast<std::size_t>(j)] > 0 ||
                   p.phi_e[static_cast<std::size_t>(i)] > 0));
        int n = (t.cyc_mask[r[static_cast<std::size_t>(j)]] &
                 t.cyc_mask[r[static_cast<std::size_t>(i)]])
                    .count();
        long long want = t.n * n /
                         (static_cast<long long>(t.ord[r[static_cast<std::size_t>(j)]]) *
                          t.ord[r[static_cast<std::size_t>(i)]]);
        CHECK(pts == want);
    }
}

TEST_CASE("base locus detects curve components") {
    // Pinned from a scan on (Z/3)^2: a branch curve lies in every piece.
    FiniteAbelianGroup G({3, 3});
    GroupTables t = GroupTables::build(G);
    auto ra = fixtures::ranks_of(t, {{1, 0}, {1, 1}, {1, 2}});
    auto rb = fixtures::ranks_of(t, {{0, 1}, {1, 0}, {1, 1}, {1, 1}});
    PieceDecomposition d = compute_pieces(t, ra, rb);
    CHECK(d.chi == 2);
    BaseLocusReport bl = base_locus(t, ra, rb, d);
    CHECK(bl.has_curve_component);
}

TEST_CASE("quadric relation outcomes") {
    // Exponent-two groups can never satisfy 2x = y + z with y != z.
    auto f1 = fixtures::deg32_family_one();
    GroupTables t16 = GroupTables::build(f1.group);
    QuadricScan none = quadric_relation(compute_pieces(
        t16, fixtures::ranks_of(t16, f1.res_a), fixtures::ranks_of(t16, f1.res_b)));
    CHECK(none.status == QuadricStatus::none);
    CHECK(!none.characters);

    // The degree-12 family satisfies one, with the expected characters.
    auto f3 = fixtures::deg12_family();
    GroupTables t27 = GroupTables::build(f3.group);
    QuadricScan found = quadric_relation(compute_pieces(
        t27, fixtures::ranks_of(t27, f3.res_a), fixtures::ranks_of(t27, f3.res_b)));
    REQUIRE(found.status == QuadricStatus::found);
    REQUIRE(found.characters.has_value());
    CHECK((*found.characters)[0].coefficients == std::vector<int>{0, 1, 0});
    CHECK((*found.characters)[1].coefficients == std::vector<int>{1, 0, 1});
    CHECK((*found.characters)[2].coefficients == std::vector<int>{2, 2, 2});

    // A single four-dimensional piece: nothing can be decided.
    FiniteAbelianGroup z2({2});
    GroupTables t2 = GroupTables::build(z2);
    std::vector<int> ones(6, 1);
    PieceDecomposition big = compute_pieces(t2, ones, ones);
    REQUIRE(big.pieces.size() == 1);
    CHECK(big.pieces[0].h0 == 4);
    CHECK(quadric_relation(big).status == QuadricStatus::inconclusive);
}

TEST_CASE("degree reports for the landmark cases") {
    SingularityBasket empty;
    DegreeReport d32 = degree_report(3, 32, 0, empty, QuadricStatus::none);
    CHECK(d32.upper_bound == Rat(32));
    CHECK(d32.exact == 32);

    SingularityBasket nine_a2{{{QuotientSingularity{3, 2}, 9}}};
    DegreeReport d12 = degree_report(4, 24, 0, nine_a2, QuadricStatus::found);
    CHECK(d12.upper_bound == Rat(12));
    CHECK(d12.exact == 12);

    // No quadric found: only the bound survives.
    DegreeReport open4 = degree_report(4, 24, 0, nine_a2, QuadricStatus::none);
    CHECK(open4.upper_bound == Rat(12));
    CHECK(!open4.exact);

    DegreeReport inconclusive = degree_report(4, 36, 0, empty, QuadricStatus::inconclusive);
    CHECK(inconclusive.upper_bound == Rat(20));
    CHECK(!inconclusive.exact);

    // Base points lower the bound; with pg = 3 they also void exactness.
    DegreeReport with_base = degree_report(3, 20, 2, empty, QuadricStatus::none);
    CHECK(with_base.upper_bound == Rat(30));
    CHECK(!with_base.exact);

    CHECK_THROWS_AS(degree_report(2, 8, 0, empty, QuadricStatus::none),
                    std::logic_error);
    // A quadric double cover needs even K^2.
    CHECK_THROWS_AS(degree_report(4, 7, 0, empty, QuadricStatus::found),
                    std::logic_error);
}

TEST_CASE("opposite rotation convention matches the negated vector") {
    // Reading the fixed candidate in the opposite convention describes the
    // surface with vector B negated, which is a different surface in general.
    // The degree-12 family's mirror carries 1/3(1,1) points, so both readings
    // of it must refuse; a smooth family and an all-node family stay
    // comparable on both sides.
    {
        SurfaceCandidate twelve = fixtures::to_candidate(fixtures::deg12_family());
        CHECK_THROWS_AS(compute_pieces(twelve, RotationConvention::b_plus),
                        std::domain_error);
        CHECK_THROWS_AS(compute_pieces(negate_vector_b(twelve)), std::domain_error);
    }

    fixtures::ReferenceFamily nodal{FiniteAbelianGroup({2, 4}),
                                    {{1, 2}, {1, 2}, {0, 1}, {0, 3}},
                                    {{1, 2}, {1, 2}, {1, 1}, {1, 3}}};
    for (const auto& fam : {fixtures::deg32_family_one(), nodal}) {
        SurfaceCandidate cand = fixtures::to_candidate(fam);
        GroupTables t = GroupTables::build(cand.group);

        PieceDecomposition plus = compute_pieces(cand, RotationConvention::b_plus);
        PieceDecomposition minus = compute_pieces(negate_vector_b(cand));
        CHECK(plus.chi == minus.chi);
        REQUIRE(plus.pieces.size() == minus.pieces.size());

        // The E-side columns are the same curves in a different order: the
        // b_plus list negates each sorted rank in place, the negated vector
        // re-sorts them. Build that permutation and compare columnwise.
        auto rb = detail::sorted_ranks(t, cand.vec_b.entries);
        std::vector<int> plus_ranks, minus_ranks;
        for (int r : rb) plus_ranks.push_back(t.neg[r]);
        minus_ranks = plus_ranks;
        std::sort(minus_ranks.begin(), minus_ranks.end());
        std::vector<std::size_t> used(minus_ranks.size(), 0);
        std::vector<std::size_t> perm(plus_ranks.size());
        for (std::size_t i = 0; i < plus_ranks.size(); ++i)
            for (std::size_t k = 0; k < minus_ranks.size(); ++k)
                if (!used[k] && minus_ranks[k] == plus_ranks[i]) {
                    used[k] = 1;
                    perm[i] = k;
                    break;
                }

        for (std::size_t p = 0; p < plus.pieces.size(); ++p) {
            const auto& lhs = plus.pieces[p];
            const auto& rhs = minus.pieces[p];
            CHECK(lhs.character == rhs.character);
            CHECK(lhs.h0 == rhs.h0);
            CHECK(lhs.l_e == rhs.l_e);
            CHECK(lhs.l_f == rhs.l_f);
            CHECK(lhs.phi_f == rhs.phi_f);
            for (std::size_t i = 0; i < lhs.phi_e.size(); ++i)
                CHECK(lhs.phi_e[i] == rhs.phi_e[perm[i]]);
        }
    }
}
