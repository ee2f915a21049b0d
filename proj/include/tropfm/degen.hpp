#pragma once

#include <map>
#include <string>
#include <vector>

#include "tropfm/complex.hpp"
#include "tropfm/fm.hpp"
#include "tropfm/grid.hpp"

namespace tropfm {

// Combinatorial type of n points at a common positive height t in the simplex
// slice of R^r_{>=0}: one ordered partition per coordinate of the element set
// {0, 1..n, T}, where 0 anchors the value zero, element i stands for point i's
// coordinate on that axis, and the final element T anchors the height t.
// Blocks are listed in increasing value order, so the first block contains 0
// and the last contains T; the anchors never share a block (t > 0).  Types of
// the universal family carry one more element x (the moving point) between n
// and T and set `extra`; numerically T = n + 1 + (extra ? 1 : 0) and
// x = n + 1.
struct DeltaCombType {
    int n = 0;
    bool extra = false;
    std::vector<std::vector<std::vector<int>>> coords;

    int r() const { return (int)coords.size(); }
    int xid() const { return n + 1; }
    int top() const { return n + 1 + (extra ? 1 : 0); }
    bool operator==(const DeltaCombType&) const = default;
    auto operator<=>(const DeltaCombType&) const = default;
};

// Type of a configuration: points has n rows of width r, each summing to t > 0
// with nonnegative entries.  Throws HeightMismatch on a bad row sum, Error on
// negative entries or a bad t.
DeltaCombType delta_comb_type(const QMat& points, const Rat& t);

// Labels look like "D[0|1,x|t][0,1|x|t]": one bracket group per coordinate,
// blocks separated by '|', elements by ','; the zero anchor prints as '0', the
// height anchor as 't', the moving point as 'x'.  The apex placeholder (n = 0,
// r = 0) prints as "D0".
std::string delta_label(const DeltaCombType& tau);
DeltaCombType parse_delta_label(const std::string& s);

// The inequality system cut out by the type's sign data, on (n + extra) * r
// variables laid out point-major with the moving point's block first.  The
// closed system; relative interiors come from sharpening the inequalities.
// All constraints are homogeneous (the height t enters as the coordinate sum
// of the first point), so the solution set is the closed cone of the type.
HRep type_system(const DeltaCombType& tau);

// Exact emptiness test of the sharpened system: the type is realizable by an
// actual configuration iff some point satisfies every inequality strictly.
bool type_feasible(const HRep& system);
bool type_feasible(const DeltaCombType& tau);

// Closed moduli cone of the type inside (R^r)^{n+extra}.
Cone type_cone(const DeltaCombType& tau);

// Polyhedral subdivision of the height-t slice induced by the coordinate
// hyperplanes through the given points, stored as the fan of cones over its
// cells (plus the apex).  vertices holds the height-t coordinates of the
// 0-dimensional cells; marks[i] is the vertex carrying point i+1.
struct SimplexLatticeSubdivision {
    int r = 0;
    int n = 0;
    Rat t;
    QMat points;
    ConeComplex fan;
    QMat vertices;
    std::vector<int> marks;
};

// Throws HeightMismatch if a point's coordinate sum is not t, Error for
// negative coordinates, t <= 0, a bad row width, or r < 2.
SimplexLatticeSubdivision simplex_subdiv_from_points(const QMat& points, const Rat& t);

// Moduli of n-point configurations at a common height in the slice of
// R^r_{>=0}.  Cell i of pi realizes types[i]; cell 0 is the apex and types[0]
// is the placeholder type (n = 0).  pi_plus is the universal family (the
// moduli with the moving point's block placed first), aligned with types_plus
// the same way.  The projection p drops the moving block; section i copies
// block i to the front.  heights[i] is the least positive height of an
// integral configuration realizing types[i] (0 for the apex) and h_tot their
// lcm.  After refine_lattices the complex lattices are the height-kernel
// sublattices, base_scale = h_tot, and refined is set.
struct DegenModuli {
    int r = 0;
    int n = 0;

    std::vector<DeltaCombType> types;
    ConeComplex pi;
    std::map<DeltaCombType, int> type_index;

    std::vector<DeltaCombType> types_plus;
    ConeComplex pi_plus;
    std::map<DeltaCombType, int> type_index_plus;

    ZMat p_matrix;
    std::vector<ZMat> section_matrices;
    ComplexMap p;
    std::vector<ComplexMap> sections;

    std::vector<Int> heights;
    Int h_tot = 1;
    bool refined = false;
    Int base_scale = 1;
};

// Enumerates the feasible types coordinate-partition by coordinate-partition,
// assembles both complexes, the projection, the sections, and the heights.
// Throws SizeLimit when the candidate count exceeds the budget, Error for
// r < 2 or n < 1.
DegenModuli build_pi_delta(int r, int n, long long budget = 1000000);

// Least t > 0 such that an integral tuple of common height t lies in the
// relative interior of tau (ambient r * k for k points).  Bounded by the
// height of the integral relative-interior witness obtained by summing the
// primitive rays.  Throws Error for the zero cone or a cone whose points do
// not share a common height.
Int min_height(const Cone& tau, int r);

// Replaces the lattices of pi and pi_plus by the kernels of the per-point
// height maps modulo h_tot and the height target by h_tot * Z.
DegenModuli refine_lattices(const DegenModuli& m);

struct DegenSSReport {
    bool transversality = true;
    bool flatness = true;
    bool reducedness = true;
    int witness_section = 0;  // 1-based section index on transversality failure
    int witness_cell = -1;
    std::string witness_label;
    long long cells_checked = 0;

    bool ok() const { return transversality && flatness && reducedness; }
};

// Checks that section images and projection images land on cells (exact cone
// search) and that on every nonzero cone the height map is reduced: the span
// lattice maps onto base_scale * Z and some lattice point of the cone's
// relative interior has height exactly base_scale.
DegenSSReport verify_degen_ss(const DegenModuli& m);

// Types whose moduli cone is a ray (the configuration is determined up to
// scaling); their configurations are the vertices of the moduli subdivision.
std::vector<DeltaCombType> rigid_types(const DegenModuli& m);

// Kernel of the height functional on a cone's lattice, with the vertex
// position maps of the induced slice subdivision restricted to that kernel.
// phi[k] sends kernel coordinates to the displacement of vertex vertex_ids[k]
// (an r x rank integer matrix); the action is free when the maps of the
// marked vertices stack to an injective matrix.  zero_maps lists marked
// vertices whose restricted map vanishes despite a positive rank.
struct RubberData {
    IntLattice n_tau;
    int rank = 0;
    SimplexLatticeSubdivision subdiv;
    std::vector<int> vertex_ids;
    std::vector<ZMat> phi;
    bool free_action = true;
    std::vector<int> zero_maps;
};

RubberData rubber_data(const DegenModuli& m, const DeltaCombType& tau);

// Vertex retraction onto a rigid degeneration: psi[j] is the vertex of the
// rigid configuration's subdivision that point j+1 retracts to (the moving
// direction of its section ray), and classes[v] lists the 1-based labels
// retracting to vertex v.  Throws NotRigid if rho is not rigid, NotAFace if
// rho's cone is not a face of tau's, Error for unknown types.
struct RetractionResult {
    SimplexLatticeSubdivision s_rho;
    std::vector<int> psi;
    std::vector<std::vector<int>> classes;
};

RetractionResult retraction(const DegenModuli& m, const DeltaCombType& tau,
                            const DeltaCombType& rho);

// The combinatorial cutting map at a rigid type rho: the star of rho's ray in
// the moduli is cut into the product, over the marked vertices v of rho's
// subdivision, of the grid moduli of the labels retracting to v on the star
// fan of v in the slice.  vertex_ids/labels/vertex_stars/vertex_fans/factors
// are aligned per marked vertex (vertices with no labels are listed in
// trivial_vertices and contribute no factor); kappa maps the star complex
// into the product complex, with each factor's block rows giving the
// ray-coordinate image of the corresponding points.  The certificate combines
// the exact subdivision check with deterministic point and lattice-box
// samples; slice_height is the lifting height used for the sample
// cross-check.
struct CuttingMapResult {
    DeltaCombType rho;
    SimplexLatticeSubdivision s_rho;
    StarFan star;
    std::vector<int> vertex_ids;
    std::vector<std::vector<int>> labels;
    std::vector<StarFan> vertex_stars;
    std::vector<TropFan> vertex_fans;
    std::vector<GridModuli> factors;
    std::vector<int> trivial_vertices;
    ConeComplex product;
    ComplexMap kappa;

    bool support_bijective = false;
    bool lattice_bijective = false;
    bool image_subdivision = false;
    std::string failure;
    long long samples_checked = 0;
    long long lattice_points_checked = 0;
    Int slice_height = 0;

    bool ok() const { return support_bijective && lattice_bijective && image_subdivision; }
};

// Throws NotRigid when rho's cone is not a ray, Error when m is not refined
// or rho is unknown, SliceTooSmall when a sample's lift at the chosen height
// leaves the open vertex stars (retry with a larger height_factor).
CuttingMapResult cutting_map(const DegenModuli& m, const DeltaCombType& rho,
                             const Int& height_factor = Int(4));

// One factor of the degeneration attached to a rigid type: the star fan of a
// vertex of the rigid subdivision together with the point labels living
// there.  rays counts the star's rays; labels may be empty (trivial factor).
struct DegenFactor {
    int vertex = -1;
    std::vector<int> labels;
    TropFan fan;
    int rays = 0;
};

struct DegenReport {
    DeltaCombType rho;
    SimplexLatticeSubdivision s_rho;
    std::vector<DegenFactor> factors;
    CuttingMapResult cut;
    int rigid_count = 0;
};

// Factor data for every vertex of the rigid subdivision plus the cutting-map
// certificate.  Throws NotRigid / Error as cutting_map does.
DegenReport degeneration_report(const DegenModuli& m, const DeltaCombType& rho);

// Moduli cones of a configuration type with rooted trees hanging off the
// marked points and one extra unlabeled marker.  source is the moduli cone
// with the marker placed, base the cone without it, and proj the coordinate
// map forgetting the marker; placement_flat checks that proj maps source
// exactly onto base.  Placing the marker on the slice pairs a universal-
// family type over its base type with the edge orthant; placing it at a tree
// vertex changes nothing; placing it on a tree edge splits that edge (the
// first edge of the designated tree) into two halves whose lengths add, the
// extra half appended as the last edge coordinate.  Edge coordinates are
// ordered tree-major, child vertex ascending.
struct MarkerPlacement {
    Cone source;
    Cone base;
    ZMat proj;
};

MarkerPlacement p0_on_subdivision(const DegenModuli& m, const DeltaCombType& plus_type,
                                  const std::vector<RootedTree>& trees);
MarkerPlacement p0_on_tree_vertex(const DegenModuli& m, const DeltaCombType& type,
                                  const std::vector<RootedTree>& trees);
MarkerPlacement p0_on_tree_edge(const DegenModuli& m, const DeltaCombType& type,
                                const std::vector<RootedTree>& trees, int tree);

bool placement_flat(const MarkerPlacement& mp);

}  // namespace tropfm
