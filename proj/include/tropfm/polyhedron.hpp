#pragma once

// Exact convex polyhedra over Q. H-representations are lists of affine
// constraints a.x >= b / a.x == b; V-representations come out of the double
// description method run on the homogenization.

#include <optional>

#include "tropfm/linsys.hpp"

namespace tropfm {

struct HRep {
    int dim = 0;
    std::vector<LinCon> cons; // Rel::GE and Rel::EQ only

    explicit HRep(int d = 0) : dim(d) {}
    void ge(QVec a, Rat b) { cons.push_back({std::move(a), std::move(b), Rel::GE}); }
    void eq(QVec a, Rat b) { cons.push_back({std::move(a), std::move(b), Rel::EQ}); }
    LinSystem system() const;
    LinSystem strict_system() const; // inequalities sharpened to >
    bool contains(const QVec& x) const;
};

struct VRep {
    QMat vertices;
    QMat rays;  // primitive integer coordinates (stored as rationals)
    QMat lines; // ditto
    bool empty() const { return vertices.empty() && rays.empty() && lines.empty(); }
};

// Extreme rays (and lineality) of {x : normals.x >= 0, eq_normals.x == 0}.
// Rays are primitive and lexicographically sorted.
void dd_cone(int dim, const QMat& ineq_normals, const QMat& eq_normals, QMat& rays_out,
             QMat& lines_out);

// Full V-representation. For an empty polyhedron every part is empty.
VRep vrep(const HRep& P);

bool feasible(const HRep& P);

// Affine dimension; -1 when empty.
int dim_of(const HRep& P);

// Indices of GE constraints that hold with equality on the whole polyhedron.
std::vector<int> implicit_equalities(const HRep& P);

// A point in the relative interior, if nonempty.
std::optional<QVec> relint_point(const HRep& P);

// Face lattice of a polytope (bounded: VRep.rays/lines empty) as sorted
// vertex index sets, from the whole polytope down to the vertices.
// Does not include the empty face.
std::vector<std::vector<int>> polytope_faces(const HRep& P, const VRep& V);

} // namespace tropfm
