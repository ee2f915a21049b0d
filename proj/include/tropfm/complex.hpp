#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tropfm/cone.hpp"
#include "tropfm/lattice.hpp"

namespace tropfm {

// Embedded complex of pointed rational cones sharing one ambient space and one
// full-rank ambient lattice.  face_pairs holds covering relations (facet, cell);
// deeper inclusions follow by transitivity.  Inclusion maps are identities since
// every cell is embedded.  Not thread-safe: cells cache their H-representations.
struct ConeComplex {
    int ambient = 0;
    IntLattice lattice;
    std::vector<Cone> cells;
    std::vector<std::string> labels;
    std::vector<std::pair<int, int>> face_pairs;

    ConeComplex() = default;
    explicit ConeComplex(int amb)
        : ambient(amb), lattice(IntLattice::standard(amb)) {}
    ConeComplex(int amb, IntLattice lat)
        : ambient(amb), lattice(std::move(lat)) {}

    int size() const { return (int)cells.size(); }
    int add_cell(Cone c, std::string label = "");
    int dim() const;

    // Lattice of the linear span of a cell, as a sublattice of `lattice`.
    IntLattice cell_lattice(int i) const;

    std::optional<int> find_cell(const Cone& c) const;
    std::vector<int> facets_of(int cell) const;
    std::vector<int> maximal_cells() const;
};

// Piecewise-linear map of complexes: one integer matrix per source cell, each
// sending its cell into the designated target cell.  Matrices must agree on
// shared faces.
struct ComplexMap {
    std::vector<ZMat> cell_matrix;
    std::vector<int> target_cell;

    static ComplexMap uniform(const ZMat& m, const std::vector<int>& targets);
    const ZMat& matrix_for(int cell) const;
};

struct ValidationReport {
    bool ok = true;
    std::string reason;
    int cell_a = -1;
    int cell_b = -1;
};

struct SubdivisionResult {
    bool ok = false;
    std::string reason;
    int fine_cell = -1;
    int coarse_cell = -1;
    std::optional<QVec> witness;
};

// Quotient fan of the cells containing a chosen cell, in the quotient of the
// ambient lattice by the cell's span.  The fan's lattice is standard of rank
// ambient - dim(cell); proj maps old coordinates to new and is integral on the
// source lattice.  source_cells[i] is the cell of the source complex that star
// cell i came from.
struct StarFan {
    ConeComplex fan;
    QMat proj;
    std::vector<int> source_cells;
};

// Adds every missing face of every cell (labels default-constructed), then
// leaves face_pairs untouched; call compute_face_pairs afterwards.
void close_under_faces(ConeComplex& c);

// Recomputes all covering pairs from scratch.  Throws Error if some facet of a
// cell is not itself a cell.
void compute_face_pairs(ConeComplex& c);

// Checks structural invariants: full-rank lattice, matching ambients, distinct
// cells, registered pairs are genuine facets, facet closure.  When
// pairwise_intersections is set, also checks that the intersection of every
// pair of cells is a common face (quadratic; intended for test sizes).
ValidationReport validate_complex(const ConeComplex& c,
                                  bool pairwise_intersections = false);

// Checks that f is a well-formed map src -> dst: sizes, target range, facet
// agreement, image containment in designated targets.
ValidationReport validate_map(const ConeComplex& src, const ConeComplex& dst,
                              const ComplexMap& f);

// Structural equality up to relabelling and reordering of cells.
bool same_fan(const ConeComplex& a, const ConeComplex& b);

ConeComplex complex_product(const ConeComplex& a, const ConeComplex& b);

// Star of the cell with the given id.  Throws NotACell for a bad id.
StarFan star_fan(const ConeComplex& c, int cell_id);

// Decides whether f realizes fine as a subdivision of coarse: images of fine
// cells are single-cell-contained cones that are injective images, their
// relative interiors are disjoint, they cover every maximal cell of coarse,
// and on each fine cell the map identifies the lattice points of the cell's
// span with those of the image's span.  Throws MapUndefined when f lacks an
// entry for some cell.  On failure the result names a violating cell and,
// for coverage failures, an uncovered witness point.
SubdivisionResult is_subdivision(const ConeComplex& fine,
                                 const ConeComplex& coarse,
                                 const ComplexMap& f);

}  // namespace tropfm
