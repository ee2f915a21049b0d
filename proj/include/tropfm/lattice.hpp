#pragma once

// Integer lattice algebra: Hermite/Smith normal forms and the sublattice
// operations the moduli layer relies on (images, kernels, intersections,
// saturations, indices). Lattices are stored by canonical HNF bases, so
// structural equality is row-by-row comparison.

#include <optional>

#include "tropfm/linalg.hpp"
#include "tropfm/numbers.hpp"

namespace tropfm {

// Row-style Hermite normal form of the lattice spanned by the rows:
// pivots positive, entries above each pivot reduced into [0, pivot),
// zero rows stripped.
ZMat hnf(ZMat rows);

// Basis (rows) of {x in Z^n : A x = 0}.
ZMat kernel_z(const ZMat& A);

// Invariant factors d_1 | d_2 | ... of the integer matrix (Smith form
// diagonal, nonzero entries only).
ZVec snf_diagonal(ZMat A);

class IntLattice {
  public:
    IntLattice() : ambient_(0) {}
    static IntLattice standard(int ambient);
    static IntLattice from_rows(int ambient, const ZMat& rows);
    // Scaled standard lattice c * Z^ambient.
    static IntLattice scaled(int ambient, const Int& c);

    int ambient() const { return ambient_; }
    int rank() const { return (int)basis_.size(); }
    const ZMat& basis() const { return basis_; }

    bool contains(const ZVec& v) const;
    bool contains_q(const QVec& v) const;
    // Integer coordinates of v in the basis, if v lies in the lattice.
    std::optional<ZVec> coordinates(const ZVec& v) const;

    bool operator==(const IntLattice& o) const {
        return ambient_ == o.ambient_ && basis_ == o.basis_;
    }
    bool operator!=(const IntLattice& o) const { return !(*this == o); }

    // {v in L : E v = 0} for rational equation rows E.
    IntLattice intersect_subspace(const QMat& eqs) const;
    // (span L) cap Z^ambient.
    IntLattice saturation() const;
    // Smallest lattice point on the ray through direction d (nonzero),
    // i.e. the primitive generator of R_{>=0} d cap L.
    std::optional<ZVec> primitive_on_ray(const QVec& d) const;

  private:
    int ambient_;
    ZMat basis_; // HNF rows
};

// Image lattice of L under the integer matrix M (rows = functionals).
IntLattice lattice_image(const ZMat& M, const IntLattice& L);
// Rational matrix variant; every basis image must be integral.
IntLattice lattice_image_q(const QMat& M, const IntLattice& L);

// Index [sup : sub] for sub a finite-index sublattice of sup restricted to
// its span: requires equal ranks and sub contained in sup. Returns the index.
Int lattice_index(const IntLattice& sub, const IntLattice& sup);

bool lattice_subset(const IntLattice& sub, const IntLattice& sup);

} // namespace tropfm
