#pragma once

#include <json.hpp>

#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pqs/canonical_system.hpp"
#include "pqs/check.hpp"
#include "pqs/generating_vectors.hpp"
#include "pqs/quotient_geometry.hpp"

namespace pqs {

// Everything the classification knows about one surface class. Vectors are
// stored in canonical form (orbit minimum), entries sorted by element rank.
struct ClassificationRecord {
    FiniteAbelianGroup group;
    long long g_a = 0, g_b = 0;
    SignatureType type_a, type_b;
    std::vector<GroupElement> vec_a, vec_b;
    SingularityBasket basket;
    long long chi = 0;
    long long k2 = 0;
    long long pg = 0;
    bool smooth_quotient = false;
    PieceDecomposition decomp;
    long long base_points = 0;
    DegreeReport degree;
    QuadricScan quadric;
};

inline std::string group_label(const FiniteAbelianGroup& G) {
    std::string s;
    for (std::size_t i = 0; i < G.invariant_factors.size(); ++i) {
        if (i) s += '*';
        s += std::to_string(G.invariant_factors[i]);
    }
    return s.empty() ? "1" : s;
}

inline std::string basket_label(const SingularityBasket& b) {
    if (b.empty()) return "-";
    std::string s;
    for (const auto& [sing, count] : b.entries) {
        if (!s.empty()) s += '+';
        s += std::to_string(count) + "x(1/" + std::to_string(sing.n) + "," +
             std::to_string(sing.a) + ")";
    }
    return s;
}

inline std::string quadric_status_label(QuadricStatus s) {
    switch (s) {
        case QuadricStatus::found: return "found";
        case QuadricStatus::none: return "none";
        default: return "inconclusive";
    }
}

namespace detail {

inline nlohmann::ordered_json residues_json(const std::vector<GroupElement>& v) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& e : v) a.push_back(e.residues);
    return a;
}

}  // namespace detail

inline nlohmann::ordered_json record_to_json(const ClassificationRecord& r) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["group"] = r.group.invariant_factors;
    j["gA"] = r.g_a;
    j["gB"] = r.g_b;
    j["typeA"] = r.type_a.orders;
    j["typeB"] = r.type_b.orders;
    j["vectorA"] = detail::residues_json(r.vec_a);
    j["vectorB"] = detail::residues_json(r.vec_b);
    nlohmann::ordered_json basket = nlohmann::ordered_json::array();
    for (const auto& [s, c] : r.basket.entries)
        basket.push_back({{"n", s.n}, {"a", s.a}, {"count", c}});
    j["basket"] = basket;
    j["chi"] = r.chi;
    j["k2"] = r.k2;
    j["pg"] = r.pg;
    j["q"] = 0;
    j["free"] = r.smooth_quotient;
    nlohmann::ordered_json pieces = nlohmann::ordered_json::array();
    for (const auto& p : r.decomp.pieces) {
        nlohmann::ordered_json pj;
        pj["character"] = p.character.coefficients;
        pj["L"] = {p.l_e, p.l_f};
        pj["h0"] = p.h0;
        pj["phi_e"] = p.phi_e;
        pj["phi_f"] = p.phi_f;
        pieces.push_back(std::move(pj));
    }
    j["pieces"] = pieces;
    j["base_points"] = r.base_points;
    j["degree_bound"] = to_string(r.degree.upper_bound);
    if (r.degree.exact) j["degree_exact"] = *r.degree.exact;
    else j["degree_exact"] = nullptr;
    nlohmann::ordered_json q;
    q["status"] = quadric_status_label(r.quadric.status);
    if (r.quadric.characters) {
        nlohmann::ordered_json chars = nlohmann::ordered_json::array();
        for (const auto& c : *r.quadric.characters) chars.push_back(c.coefficients);
        q["characters"] = chars;
    } else {
        q["characters"] = nullptr;
    }
    j["quadric_relation"] = q;
    return j;
}

inline std::string record_json_line(const ClassificationRecord& r) {
    return record_to_json(r).dump();
}

inline ClassificationRecord record_from_json(const nlohmann::json& j) {
    ClassificationRecord r;
    r.group = FiniteAbelianGroup(j.at("group").get<std::vector<int>>());
    r.g_a = j.at("gA").get<long long>();
    r.g_b = j.at("gB").get<long long>();
    r.type_a = SignatureType(j.at("typeA").get<std::vector<int>>());
    r.type_b = SignatureType(j.at("typeB").get<std::vector<int>>());
    auto parse_vec = [&](const nlohmann::json& a) {
        std::vector<GroupElement> v;
        for (const auto& e : a) {
            GroupElement el{e.get<std::vector<int>>()};
            check_element(r.group, el);
            v.push_back(std::move(el));
        }
        return v;
    };
    r.vec_a = parse_vec(j.at("vectorA"));
    r.vec_b = parse_vec(j.at("vectorB"));
    for (const auto& bj : j.at("basket"))
        r.basket.entries.push_back({{bj.at("n").get<int>(), bj.at("a").get<int>()},
                                    bj.at("count").get<long long>()});
    r.chi = j.at("chi").get<long long>();
    r.k2 = j.at("k2").get<long long>();
    r.pg = j.at("pg").get<long long>();
    r.smooth_quotient = j.at("free").get<bool>();
    r.decomp.group = r.group;
    r.decomp.chi = r.chi;
    for (const auto& e : r.vec_b) r.decomp.orders_e.push_back(element_order(r.group, e));
    for (const auto& e : r.vec_a) r.decomp.orders_f.push_back(element_order(r.group, e));
    for (const auto& pj : j.at("pieces")) {
        CanonicalPiece p;
        p.character = Character{pj.at("character").get<std::vector<int>>()};
        p.l_e = pj.at("L")[0].get<int>();
        p.l_f = pj.at("L")[1].get<int>();
        p.m_e = p.l_e - 2;
        p.m_f = p.l_f - 2;
        p.h0 = pj.at("h0").get<long long>();
        p.phi_e = pj.at("phi_e").get<std::vector<int>>();
        p.phi_f = pj.at("phi_f").get<std::vector<int>>();
        for (std::size_t i = 0; i < p.phi_e.size(); ++i)
            p.a_e.push_back(r.decomp.orders_e[i] - 1 - p.phi_e[i]);
        for (std::size_t i = 0; i < p.phi_f.size(); ++i)
            p.a_f.push_back(r.decomp.orders_f[i] - 1 - p.phi_f[i]);
        r.decomp.pieces.push_back(std::move(p));
    }
    r.base_points = j.at("base_points").get<long long>();
    r.degree.upper_bound = rational_from_string(j.at("degree_bound").get<std::string>());
    if (!j.at("degree_exact").is_null())
        r.degree.exact = j.at("degree_exact").get<long long>();
    auto qj = j.at("quadric_relation");
    std::string status = qj.at("status").get<std::string>();
    r.quadric.status = status == "found" ? QuadricStatus::found
                       : status == "none" ? QuadricStatus::none
                                          : QuadricStatus::inconclusive;
    if (!qj.at("characters").is_null()) {
        std::array<Character, 3> cs;
        for (int i = 0; i < 3; ++i)
            cs[static_cast<std::size_t>(i)] =
                Character{qj.at("characters")[static_cast<std::size_t>(i)].get<std::vector<int>>()};
        r.quadric.characters = cs;
    }
    // notes are presentation only and cheap to restore
    r.degree = degree_report(r.pg, r.k2, r.base_points, r.basket, r.quadric.status);
    return r;
}

// deterministic global order: group, genera, types, then the vectors
inline bool record_less(const ClassificationRecord& x, const ClassificationRecord& y) {
    auto key = [](const ClassificationRecord& r) {
        return std::tie(r.group, r.g_a, r.g_b, r.type_a, r.type_b, r.vec_a, r.vec_b);
    };
    return key(x) < key(y);
}

// Recomputes every stored field from the two vectors through the reference
// (table-free where possible) code paths; throws on the first mismatch.
inline void validate_record(const ClassificationRecord& r,
                            RotationConvention conv = RotationConvention::b_minus) {
    auto fail = [&](const std::string& what) {
        throw std::logic_error("record validation failed: " + what + " [group " +
                               group_label(r.group) + ", gA " + std::to_string(r.g_a) +
                               ", gB " + std::to_string(r.g_b) + "]");
    };
    if (!is_spherical_generating(r.group, r.vec_a, r.type_a)) fail("vector A");
    if (!is_spherical_generating(r.group, r.vec_b, r.type_b)) fail("vector B");

    GroupTables t = GroupTables::build(r.group);
    auto ra = detail::sorted_ranks(t, r.vec_a);
    auto rb = detail::sorted_ranks(t, r.vec_b);
    if (genus_from_type(t, ra) != r.g_a || genus_from_type(t, rb) != r.g_b)
        fail("genus");
    if (r.g_a < r.g_b) fail("genus order");

    SurfaceCandidate cand{r.group, {r.group, r.vec_a}, {r.group, r.vec_b}};
    if (canonical_form(cand) != cand) fail("canonical form");

    SingularityBasket basket = compute_singularities(t, ra, rb, conv);
    if (basket != r.basket) fail("basket");
    if (!is_canonical(basket)) fail("basket canonicity");
    if (basket.empty() != r.smooth_quotient) fail("free flag");

    Rat chi = euler_characteristic(r.g_a, r.g_b, t.n, basket);
    if (!is_integer(chi) || boost::rational_cast<long long>(chi) != r.chi) fail("chi");
    if (r.chi != r.pg + 1) fail("pg");

    auto k2 = k_squared(r.g_a, r.g_b, t.n);
    if (!k2 || *k2 != r.k2) fail("k2");
    if (Rat(8) * r.chi - Rat(2, 3) * basket.defect() != Rat(r.k2)) fail("k2 identity");

    PieceDecomposition d = compute_pieces(t, ra, rb, conv);
    if (d.pieces.size() != r.decomp.pieces.size()) fail("piece count");
    for (std::size_t i = 0; i < d.pieces.size(); ++i) {
        const auto& p = d.pieces[i];
        const auto& q = r.decomp.pieces[i];
        if (p.character != q.character || p.l_e != q.l_e || p.l_f != q.l_f ||
            p.h0 != q.h0 || p.phi_e != q.phi_e || p.phi_f != q.phi_f ||
            p.a_e != q.a_e || p.a_f != q.a_f)
            fail("piece " + std::to_string(i));
    }

    BaseLocusReport bl = base_locus(t, ra, rb, d);
    if (bl.has_curve_component) fail("curve base component");
    if (bl.isolated_points != r.base_points) fail("base points");

    QuadricScan qs = quadric_relation(d);
    if (qs.status != r.quadric.status || qs.characters != r.quadric.characters)
        fail("quadric relation");

    DegreeReport deg = degree_report(r.pg, r.k2, r.base_points, basket, qs.status);
    if (deg.upper_bound != r.degree.upper_bound || deg.exact != r.degree.exact)
        fail("degree");
}

}  // namespace pqs
