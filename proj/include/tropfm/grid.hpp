#pragma once

#include <map>
#include <string>
#include <vector>

#include "tropfm/complex.hpp"
#include "tropfm/tropfan.hpp"

namespace tropfm {

// Tuple of n points in the support of a fan in R^r_{>=0}.  coords has n rows;
// coords[i][j] is the j-th coordinate of point i+1 (markings are 1-based).
struct TropPointTuple {
    int n = 0;
    int r = 0;
    QMat coords;
};

// Combinatorial type of a marked grid subdivision: one ordered partition per
// ray of the element set {0, 1..n}, where element 0 anchors the zero value and
// element i stands for the i-th point's coordinate on that ray.  Blocks are
// listed in increasing value order, so block 0 always contains element 0;
// elements are sorted within each block.  Types of the universal family carry
// one more element x = n+1 (the moving point) and set `extra`.
struct GridCombType {
    int n = 0;
    bool extra = false;
    std::vector<std::vector<std::vector<int>>> rays;

    int r() const { return (int)rays.size(); }
    bool operator==(const GridCombType&) const = default;
    auto operator<=>(const GridCombType&) const = default;
};

// Product of per-ray subdivisions induced by a point tuple, with the marking
// recorded as the n x r matrix of marked-vertex coordinates.
struct MarkedGridSubdivision {
    int n = 0;
    int r = 0;
    std::vector<QVec> breaks;  // per ray: strictly increasing positive values
    QMat marking;              // row i = coordinates of the vertex carrying point i+1
};

// Moduli data of n-marked grid subdivisions of a fan.  pi is always
// materialized; pi_plus (the universal family, equal to the (n+1)-point moduli
// with the moving point's coordinate block placed first) is materialized only
// when its cell count stays within plus_limit, and verified by streaming
// otherwise.  Cell i of pi realizes types[i]; labels are grid labels.
// Face pairs are computed only for complexes small enough to afford it.
struct GridModuli {
    TropFan sigma;
    int n = 0;

    std::vector<GridCombType> types;
    ConeComplex pi;
    std::map<GridCombType, int> type_index;

    bool plus_materialized = false;
    std::vector<GridCombType> types_plus;
    ConeComplex pi_plus;
    std::map<GridCombType, int> type_index_plus;
    long long plus_cell_count = 0;

    ZMat p_matrix;                       // drops the moving point's block
    std::vector<ZMat> section_matrices;  // section i copies block i to the front
    ComplexMap p;                        // defined iff plus_materialized
    std::vector<ComplexMap> sections;    // defined iff plus_materialized
};

struct WeakSSReport {
    bool transversality = true;
    bool flatness = true;
    bool reducedness = true;
    int witness_section = 0;  // 1-based section index on transversality failure
    int witness_cell = -1;
    std::string witness_label;
    long long cells_checked = 0;
    long long plus_cells_checked = 0;

    bool ok() const { return transversality && flatness && reducedness; }
};

// Validates the rows of vals as points of the fan's support.  Throws
// NotInSupport(i) when row i's positive-coordinate set is not a cone of the
// fan, Error on negative entries or a column-count mismatch.
TropPointTuple tropicalise(const QMat& vals, const TropFan& sigma);

GridCombType grid_comb_type(const TropPointTuple& u);

// Sum over rays of (number of blocks - 1): the codimension of the stratum of
// the type, which equals the dimension of its moduli cone.
int grid_codim(const GridCombType& t);

// Grid labels look like "G[0|1,2][0,1|2]": one bracket group per ray, blocks
// separated by '|', elements by ',', the moving point printed as 'x'.
std::string grid_label(const GridCombType& t);
GridCombType parse_grid_label(const std::string& s);

// 0-based rays on which the element is positive.  element ranges over 1..n,
// or n+1 for the moving point of an `extra` type.
std::vector<int> type_support(const GridCombType& t, int element);

// Recovers the fan from the types of its moduli cells (the supports that occur
// are exactly the cones of the fan).
TropFan support_fan(const std::vector<GridCombType>& types);

// The moduli cone of a type, embedded point-major: coordinate (i-1)*r + j is
// point i's j-th coordinate; for `extra` types the moving point's block comes
// first.  Rays are the indicator vectors of the upper sets of each ray's
// partition.
Cone type_cone(const GridCombType& t);

MarkedGridSubdivision grid_from_points(const TropPointTuple& u);

// Inverse of grid_from_points.  Validates that marking coordinates are breaks
// or zero and that every break is marked (throws Error otherwise).
TropPointTuple points_from_grid(const MarkedGridSubdivision& g);

// Enumerates all combinatorial types with supports in the fan, assembles the
// moduli complex, the universal family, the projection and the sections.
// Throws SizeLimit when more than `budget` types arise for pi, and falls back
// to a streamed (unmaterialized) universal family beyond plus_limit cells.
GridModuli build_pi(const TropFan& sigma, int n, long long budget = 1000000,
                    long long plus_limit = 25000);

// Checks the three weak-semistability conditions.  With a materialized
// universal family every section image and projection image is located in the
// target complex by exact cone search; otherwise the conditions are verified
// per ray factor (exactly, via lattice normal forms) and the product types are
// streamed.
WeakSSReport verify_weak_ss(const GridModuli& m);

}  // namespace tropfm
