#pragma once

// Subfans of the nonnegative orthant given by a downward-closed family of
// coordinate subsets: the cone over {e_i : i in I} is present iff I is in the
// index. These are the target fans the moduli constructions subdivide
// products of.

#include <set>
#include <string>
#include <vector>

#include "tropfm/complex.hpp"

namespace tropfm {

struct TropFan {
    int r = 0;
    // Sorted subsets of {0..r-1}; always downward closed, with the empty set
    // and every singleton present.
    std::set<std::vector<int>> cone_index;

    static TropFan orthant(int r);
    static TropFan disjoint_rays(int r);
    // Downward closure of the given sets plus the empty set and singletons.
    // Entries are 0-based; out-of-range entries throw Error.
    static TropFan from_sets(int r, const std::vector<std::vector<int>>& sets);

    bool has(const std::vector<int>& I) const { return cone_index.count(I) > 0; }

    // Cells in index order, labelled with the subset grammar below; covering
    // pairs are the one-element extensions.
    ConeComplex as_complex() const;

    bool operator==(const TropFan& o) const {
        return r == o.r && cone_index == o.cone_index;
    }
    bool operator!=(const TropFan& o) const { return !(*this == o); }
};

// "S[]", "S[2]", "S[1,3]": 1-based ray lists.
std::string subset_label(const std::vector<int>& I);
// Inverse of subset_label; throws ParseError on bad syntax or range.
std::vector<int> parse_subset_label(const std::string& s, int r);

}  // namespace tropfm
