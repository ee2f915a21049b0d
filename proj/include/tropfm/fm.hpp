#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tropfm/cone.hpp"
#include "tropfm/grid.hpp"

namespace tropfm {

// Rooted tree with labeled legs.  Vertex 0 is the root and parent[v] < v, so
// the numbering is topological; legs are sorted per vertex and the labels are
// distinct across the tree.
struct RootedTree {
    std::vector<int> parent = {-1};
    std::vector<std::vector<int>> legs = {{}};

    int vcount() const { return (int)parent.size(); }
    bool operator==(const RootedTree&) const = default;
};

// Stratum type of a configuration expansion: a base subdivision type plus one
// rooted tree per collision class of its markings, the tree's legs being
// exactly the class members.  A root-only tree keeps its class on the base.
// classes are sorted internally and ordered by smallest member.
struct PlantedForestType {
    GridCombType base;
    std::vector<std::vector<int>> classes;
    std::vector<RootedTree> trees;

    bool operator==(const PlantedForestType&) const = default;
};

struct StabilityReport {
    bool stable = true;
    int tree = -1;
    int vertex = -1;
};

struct BlowupCenter {
    bool section = false;
    std::vector<int> members;

    bool operator==(const BlowupCenter&) const = default;
};

struct BlowupSchedule {
    std::vector<BlowupCenter> centers;
};

// Face of a product stratum cone: a face of the base cone (the ray subset
// kept) together with a set of contracted tree edges, plus whether the
// contracted forest is still stable.
struct FMFace {
    std::vector<int> base_rays;
    std::vector<int> contracted;
    bool stable = false;
};

// Product cone of a stratum: base cone coordinates followed by one length
// coordinate per tree edge.  edges[k] names edge k as (tree index, child
// vertex); base_ray_pos / edge_ray_pos locate the factors' rays inside the
// canonically sorted product cone.
struct FMCone {
    Cone cone;
    int base_dim = 0;
    int edge_count = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<int> base_ray_pos;
    std::vector<int> edge_ray_pos;
    std::vector<FMFace> faces;
};

// Collision classes of the markings of a base type: element labels grouped by
// equal position (same block on every ray), classes ordered by smallest
// member.  Includes the moving point as label n+1 when present.
std::vector<std::vector<int>> marking_classes(const GridCombType& t);

// Throws Error unless f is well-formed: classes match the base, trees are
// topologically numbered, and each class's labels appear exactly once as legs
// of its tree.
void validate_forest(const PlantedForestType& f);

// Every non-root vertex must have valence >= 3, counting the parent edge,
// child edges, and legs.  Reports the first violation.
StabilityReport is_stable(const PlantedForestType& f);
StabilityReport is_stable_tree(const RootedTree& t);

// Codimension of the stratum: base codimension plus the number of tree edges.
// Throws Unstable.
int fm_codim(const PlantedForestType& f);

std::string tree_code(const RootedTree& t);
RootedTree canonical_tree(const RootedTree& t);

// Canonical form: classes ordered by smallest member, trees canonically
// numbered with children sorted by code.
PlantedForestType canonical_forest(const PlantedForestType& f);
std::string forest_code(const PlantedForestType& f);

// Contracts the named edges, each given as (tree index, child vertex): the
// child merges into its parent, the root absorbing root edges.  The result is
// canonical and may be unstable.
PlantedForestType contract_edges(const PlantedForestType& f,
                                 const std::vector<std::pair<int, int>>& edges);

// Blow-up bookkeeping order, n >= 2.  Diagonal centers are grouped by maximal
// element ascending, ordered inside a group by decreasing size then
// lexicographically; section centers are ordered by decreasing size then
// lexicographically.  Both schedules list every subset of {1..n} of size >= 2.
BlowupSchedule blowup_schedule(int n, bool sections);
std::string center_label(const BlowupCenter& c);

// All stable forest types over the base moduli with codimension at most
// max_codim, canonical and duplicate-free, ordered by base cell then by code.
// Throws SizeLimit past `limit` types.
std::vector<PlantedForestType> enumerate_fm_types(const GridModuli& base, int max_codim,
                                                  long long limit = 200000);

// Product cone of a stable forest type with its full face list.  Throws
// Unstable, or SizeLimit when the face list would be unreasonably large.
FMCone fm_cone(const PlantedForestType& f);

// The face of fc.cone selected by a face descriptor.
Cone fm_face_cone(const FMCone& fc, const FMFace& face);

}  // namespace tropfm
