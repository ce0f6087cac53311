#pragma once

#include <vector>

#include "pqs/generating_vectors.hpp"

// Known families pinned as regression fixtures. Monodromy tuples are kept in
// their source order (not rank-sorted) so piece tables can be compared
// entry-for-entry against the expected supports.
namespace pqs::fixtures {

struct ReferenceFamily {
    FiniteAbelianGroup group;
    std::vector<std::vector<int>> res_a;
    std::vector<std::vector<int>> res_b;
};

inline std::vector<GroupElement> lift(const std::vector<std::vector<int>>& residues) {
    std::vector<GroupElement> out;
    out.reserve(residues.size());
    for (const auto& r : residues) out.push_back(GroupElement{r});
    return out;
}

inline SurfaceCandidate to_candidate(const ReferenceFamily& f) {
    return SurfaceCandidate{f.group, GeneratingVector{f.group, lift(f.res_a)},
                            GeneratingVector{f.group, lift(f.res_b)}};
}

inline std::vector<int> ranks_of(const GroupTables& t,
                                 const std::vector<std::vector<int>>& residues) {
    std::vector<int> out;
    out.reserve(residues.size());
    for (const auto& r : residues) out.push_back(element_rank(t.group, GroupElement{r}));
    return out;
}

// Smooth quotient on (Z/2)^4, genus 9 x 9, type (2^6;2^6), K^2 = 32.
// Writing e_S for the sum of basis vectors indexed by S:
// A side e1,e2,e3,e4,e13,e24 against B side e234,e134,e124,e123,e14,e23.
inline ReferenceFamily deg32_family_one() {
    return {FiniteAbelianGroup({2, 2, 2, 2}),
            {{1, 0, 0, 0},
             {0, 1, 0, 0},
             {0, 0, 1, 0},
             {0, 0, 0, 1},
             {1, 0, 1, 0},
             {0, 1, 0, 1}},
            {{0, 1, 1, 1},
             {1, 0, 1, 1},
             {1, 1, 0, 1},
             {1, 1, 1, 0},
             {1, 0, 0, 1},
             {0, 1, 1, 0}}};
}

// Second smooth degree-32 family on the same group and type:
// A side e1,e134,e123,e123,e13,e14 against B side e2,e234,e124,e124,e23,e24.
inline ReferenceFamily deg32_family_two() {
    return {FiniteAbelianGroup({2, 2, 2, 2}),
            {{1, 0, 0, 0},
             {1, 0, 1, 1},
             {1, 1, 1, 0},
             {1, 1, 1, 0},
             {1, 0, 1, 0},
             {1, 0, 0, 1}},
            {{0, 1, 0, 0},
             {0, 1, 1, 1},
             {1, 1, 0, 1},
             {1, 1, 0, 1},
             {0, 1, 1, 0},
             {0, 1, 0, 1}}};
}

// Family on (Z/3)^3, genus 10 x 10, type (3^4;3^4), nine A_2 points,
// K^2 = 24, canonical image a degree-12 surface on a quadric cone.
inline ReferenceFamily deg12_family() {
    return {FiniteAbelianGroup({3, 3, 3}),
            {{2, 1, 1}, {0, 1, 2}, {1, 2, 1}, {0, 2, 2}},
            {{1, 1, 2}, {2, 2, 0}, {1, 2, 1}, {2, 1, 0}}};
}

}  // namespace pqs::fixtures
