#include "tropfm/complex.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "tropfm/errors.hpp"
#include "tropfm/linalg.hpp"
#include "tropfm/linsys.hpp"
#include "tropfm/polyhedron.hpp"

namespace tropfm {

namespace {

// Facets of a cone, from the tight ray set of each inequality of its
// H-representation (one facet per extreme dual ray, deduplicated).
std::vector<Cone> facet_cones(const Cone& c) {
    std::set<QMat> seen;
    std::vector<Cone> out;
    for (const auto& con : c.hrep().cons) {
        if (con.rel != Rel::GE) continue;
        QMat tight;
        for (const auto& r : c.rays())
            if (dot(con.a, r) == 0) tight.push_back(r);
        if ((int)tight.size() == c.nrays()) continue;
        if (seen.insert(tight).second)
            out.push_back(Cone::from_extreme_rays(c.ambient(), tight));
    }
    return out;
}

ValidationReport fail(std::string reason, int a = -1, int b = -1) {
    return ValidationReport{false, std::move(reason), a, b};
}

}  // namespace

int ConeComplex::add_cell(Cone c, std::string label) {
    if (c.ambient() != ambient) throw DimensionMismatch("ConeComplex::add_cell");
    cells.push_back(std::move(c));
    labels.push_back(std::move(label));
    return (int)cells.size() - 1;
}

int ConeComplex::dim() const {
    int d = -1;
    for (const auto& c : cells) d = std::max(d, c.dim());
    return d;
}

IntLattice ConeComplex::cell_lattice(int i) const {
    if (i < 0 || i >= size()) throw NotACell("cell_lattice: no such cell");
    return lattice.intersect_subspace(span_equations(cells[i].rays(), ambient));
}

std::optional<int> ConeComplex::find_cell(const Cone& c) const {
    for (int i = 0; i < size(); ++i)
        if (cells[i] == c) return i;
    return std::nullopt;
}

std::vector<int> ConeComplex::facets_of(int cell) const {
    std::vector<int> out;
    for (const auto& [f, t] : face_pairs)
        if (t == cell) out.push_back(f);
    return out;
}

std::vector<int> ConeComplex::maximal_cells() const {
    std::vector<char> covered(size(), 0);
    for (const auto& [f, t] : face_pairs) covered[f] = 1;
    std::vector<int> out;
    for (int i = 0; i < size(); ++i)
        if (!covered[i]) out.push_back(i);
    return out;
}

ComplexMap ComplexMap::uniform(const ZMat& m, const std::vector<int>& targets) {
    ComplexMap f;
    f.cell_matrix.assign(targets.size(), m);
    f.target_cell = targets;
    return f;
}

const ZMat& ComplexMap::matrix_for(int cell) const {
    if (cell < 0 || cell >= (int)cell_matrix.size())
        throw MapUndefined("no matrix for cell");
    return cell_matrix[cell];
}

void close_under_faces(ConeComplex& c) {
    std::set<Cone> have(c.cells.begin(), c.cells.end());
    std::vector<Cone> queue(c.cells.begin(), c.cells.end());
    while (!queue.empty()) {
        Cone cell = queue.back();
        queue.pop_back();
        for (auto& f : facet_cones(cell)) {
            if (!have.insert(f).second) continue;
            queue.push_back(f);
            c.add_cell(std::move(f));
        }
    }
}

void compute_face_pairs(ConeComplex& c) {
    std::map<Cone, int> index;
    for (int i = 0; i < c.size(); ++i)
        if (!index.emplace(c.cells[i], i).second)
            throw Error("compute_face_pairs: duplicate cell");
    std::set<std::pair<int, int>> pairs;
    for (int i = 0; i < c.size(); ++i) {
        for (const auto& f : facet_cones(c.cells[i])) {
            auto it = index.find(f);
            if (it == index.end())
                throw Error("compute_face_pairs: complex not closed under faces");
            pairs.emplace(it->second, i);
        }
    }
    c.face_pairs.assign(pairs.begin(), pairs.end());
}

ValidationReport validate_complex(const ConeComplex& c, bool pairwise_intersections) {
    if ((int)c.labels.size() != c.size()) return fail("labels out of sync with cells");
    if (c.lattice.ambient() != c.ambient) return fail("lattice ambient mismatch");
    if (c.lattice.rank() != c.ambient) return fail("ambient lattice not full rank");
    for (int i = 0; i < c.size(); ++i)
        if (c.cells[i].ambient() != c.ambient) return fail("cell ambient mismatch", i);
    {
        std::map<Cone, int> seen;
        for (int i = 0; i < c.size(); ++i)
            if (!seen.emplace(c.cells[i], i).second)
                return fail("duplicate cell", seen[c.cells[i]], i);
    }
    std::set<std::pair<int, int>> pairset(c.face_pairs.begin(), c.face_pairs.end());
    for (const auto& [f, t] : c.face_pairs) {
        if (f < 0 || f >= c.size() || t < 0 || t >= c.size())
            return fail("face pair out of range", f, t);
        if (c.cells[f].dim() != c.cells[t].dim() - 1)
            return fail("face pair is not a covering relation", f, t);
        if (!is_face_of(c.cells[f], c.cells[t]))
            return fail("face pair is not a face inclusion", f, t);
    }
    std::map<Cone, int> index;
    for (int i = 0; i < c.size(); ++i) index.emplace(c.cells[i], i);
    for (int i = 0; i < c.size(); ++i) {
        for (const auto& fc : facet_cones(c.cells[i])) {
            auto it = index.find(fc);
            if (it == index.end()) return fail("facet of a cell is not a cell", i);
            if (!pairset.count({it->second, i}))
                return fail("facet pair not registered", it->second, i);
        }
    }
    if (pairwise_intersections) {
        for (int i = 0; i < c.size(); ++i) {
            for (int j = i + 1; j < c.size(); ++j) {
                Cone k = intersect(c.cells[i], c.cells[j]);
                if (!index.count(k)) return fail("pairwise intersection is not a cell", i, j);
                if (!is_face_of(k, c.cells[i]) || !is_face_of(k, c.cells[j]))
                    return fail("pairwise intersection is not a common face", i, j);
            }
        }
    }
    return ValidationReport{};
}

ValidationReport validate_map(const ConeComplex& src, const ConeComplex& dst,
                              const ComplexMap& f) {
    if ((int)f.cell_matrix.size() != src.size() || (int)f.target_cell.size() != src.size())
        return fail("map not defined on every cell");
    for (int i = 0; i < src.size(); ++i) {
        const ZMat& m = f.cell_matrix[i];
        if ((int)m.size() != dst.ambient) return fail("matrix row count mismatch", i);
        for (const auto& row : m)
            if ((int)row.size() != src.ambient) return fail("matrix column count mismatch", i);
        int t = f.target_cell[i];
        if (t < 0 || t >= dst.size()) return fail("target cell out of range", i);
        QMat mq = to_qmat(m);
        for (const auto& r : src.cells[i].rays())
            if (!dst.cells[t].contains(matvec(mq, r)))
                return fail("image not contained in designated target", i, t);
    }
    for (const auto& [a, b] : src.face_pairs) {
        if (a < 0 || a >= src.size() || b < 0 || b >= src.size())
            return fail("face pair out of range", a, b);
        QMat ma = to_qmat(f.cell_matrix[a]), mb = to_qmat(f.cell_matrix[b]);
        for (const auto& r : src.cells[a].rays())
            if (matvec(ma, r) != matvec(mb, r))
                return fail("matrices disagree on a shared face", a, b);
    }
    return ValidationReport{};
}

bool same_fan(const ConeComplex& a, const ConeComplex& b) {
    if (a.ambient != b.ambient || a.size() != b.size()) return false;
    if (a.lattice != b.lattice) return false;
    std::vector<int> pa(a.size()), pb(b.size());
    for (int i = 0; i < a.size(); ++i) pa[i] = pb[i] = i;
    std::sort(pa.begin(), pa.end(), [&](int x, int y) { return a.cells[x] < a.cells[y]; });
    std::sort(pb.begin(), pb.end(), [&](int x, int y) { return b.cells[x] < b.cells[y]; });
    for (int k = 0; k < a.size(); ++k)
        if (a.cells[pa[k]] != b.cells[pb[k]]) return false;
    std::vector<int> ra(a.size()), rb(b.size());
    for (int k = 0; k < a.size(); ++k) {
        ra[pa[k]] = k;
        rb[pb[k]] = k;
    }
    std::set<std::pair<int, int>> fa, fb;
    for (const auto& [f, t] : a.face_pairs) fa.emplace(ra[f], ra[t]);
    for (const auto& [f, t] : b.face_pairs) fb.emplace(rb[f], rb[t]);
    return fa == fb;
}

ConeComplex complex_product(const ConeComplex& a, const ConeComplex& b) {
    ZMat rows;
    for (const auto& r : a.lattice.basis()) {
        ZVec v(a.ambient + b.ambient, Int(0));
        for (int i = 0; i < a.ambient; ++i) v[i] = r[i];
        rows.push_back(v);
    }
    for (const auto& r : b.lattice.basis()) {
        ZVec v(a.ambient + b.ambient, Int(0));
        for (int i = 0; i < b.ambient; ++i) v[a.ambient + i] = r[i];
        rows.push_back(v);
    }
    ConeComplex out(a.ambient + b.ambient,
                    IntLattice::from_rows(a.ambient + b.ambient, rows));
    int nb = b.size();
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < nb; ++j)
            out.add_cell(cone_product(a.cells[i], b.cells[j]),
                         a.labels[i] + "|" + b.labels[j]);
    std::set<std::pair<int, int>> pairs;
    for (const auto& [f, t] : a.face_pairs)
        for (int j = 0; j < nb; ++j) pairs.emplace(f * nb + j, t * nb + j);
    for (const auto& [f, t] : b.face_pairs)
        for (int i = 0; i < a.size(); ++i) pairs.emplace(i * nb + f, i * nb + t);
    out.face_pairs.assign(pairs.begin(), pairs.end());
    return out;
}

StarFan star_fan(const ConeComplex& c, int cell_id) {
    if (cell_id < 0 || cell_id >= c.size()) throw NotACell("star_fan: no such cell");
    const Cone& sigma = c.cells[cell_id];
    int d = c.ambient;
    if (c.lattice.rank() != d) throw Error("star_fan: ambient lattice not full rank");
    IntLattice S = c.cell_lattice(cell_id);
    ZMat coords;
    for (const auto& row : S.basis()) {
        auto co = c.lattice.coordinates(row);
        if (!co) throw Error("star_fan: cell lattice escapes ambient lattice");
        coords.push_back(*co);
    }
    ZMat q0 = coords.empty() ? zidentity(d) : kernel_z(coords);
    QMat qmap = matmul(to_qmat(q0), inverse(transpose(to_qmat(c.lattice.basis()))));
    StarFan out;
    out.fan = ConeComplex((int)q0.size());
    out.proj = qmap;
    std::vector<int> img_id(c.size(), -1);
    std::map<Cone, int> dedup;
    for (int t = 0; t < c.size(); ++t) {
        if (!is_face_of(sigma, c.cells[t])) continue;
        Cone ic = image_cone(qmap, c.cells[t]);
        if (ic.dim() != c.cells[t].dim() - sigma.dim())
            throw Error("star_fan: image dimension drop is not uniform");
        if (!dedup.emplace(ic, t).second) throw Error("star_fan: star images collide");
        img_id[t] = out.fan.add_cell(std::move(ic), c.labels[t]);
        out.source_cells.push_back(t);
    }
    std::set<std::pair<int, int>> pairs;
    for (const auto& [f, t] : c.face_pairs)
        if (img_id[f] >= 0 && img_id[t] >= 0) pairs.emplace(img_id[f], img_id[t]);
    out.fan.face_pairs.assign(pairs.begin(), pairs.end());
    return out;
}

SubdivisionResult is_subdivision(const ConeComplex& fine, const ConeComplex& coarse,
                                 const ComplexMap& f) {
    if ((int)f.cell_matrix.size() != fine.size() || (int)f.target_cell.size() != fine.size())
        throw MapUndefined("is_subdivision: map not defined on every cell");
    SubdivisionResult res;
    auto vm = validate_map(fine, coarse, f);
    if (!vm.ok) {
        res.reason = "map: " + vm.reason;
        res.fine_cell = vm.cell_a;
        return res;
    }
    int m = fine.size();
    std::vector<Cone> img;
    img.reserve(m);
    for (int i = 0; i < m; ++i) {
        img.push_back(image_cone(to_qmat(f.cell_matrix[i]), fine.cells[i]));
        if (img[i].dim() != fine.cells[i].dim()) {
            res.reason = "map is not injective on a cell";
            res.fine_cell = i;
            return res;
        }
    }
    for (int i = 0; i < m; ++i) {
        IntLattice lsrc = fine.cell_lattice(i);
        IntLattice limg = lattice_image_q(to_qmat(f.cell_matrix[i]), lsrc);
        IntLattice lspan =
            coarse.lattice.intersect_subspace(span_equations(img[i].rays(), coarse.ambient));
        if (!(limg == lspan)) {
            res.reason = "cell lattice does not map onto the image span lattice";
            res.fine_cell = i;
            return res;
        }
    }
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            LinSystem sys = img[i].hrep().strict_system();
            for (const auto& con : img[j].hrep().strict_system().cons)
                sys.add(con.a, con.b, con.rel);
            if (auto x = feasible_point(sys)) {
                res.reason = "images of cells " + std::to_string(i) + " and " +
                             std::to_string(j) + " overlap in relative interiors";
                res.fine_cell = i;
                res.witness = *x;
                return res;
            }
        }
    }
    constexpr int kGuard = 1000000;
    for (int cid : coarse.maximal_cells()) {
        const Cone& cc = coarse.cells[cid];
        int cd = cc.dim();
        std::vector<int> cand;
        for (int i = 0; i < m; ++i) {
            if (img[i].dim() != cd) continue;
            bool inside = true;
            for (const auto& r : img[i].rays())
                if (!cc.contains(r)) {
                    inside = false;
                    break;
                }
            if (inside) cand.push_back(i);
        }
        std::vector<LinSystem> stack{cc.hrep().system()};
        int pops = 0;
        while (!stack.empty()) {
            if (++pops > kGuard) throw Error("is_subdivision: coverage search exceeded bound");
            LinSystem region = stack.back();
            stack.pop_back();
            auto x = feasible_point(region);
            if (!x) continue;
            int hit = -1;
            for (int i : cand)
                if (img[i].contains(*x)) {
                    hit = i;
                    break;
                }
            if (hit < 0) {
                res.reason = "maximal cell not covered by full-dimensional images";
                res.coarse_cell = cid;
                res.witness = *x;
                return res;
            }
            for (const auto& con : img[hit].hrep().cons) {
                if (con.rel != Rel::GE) continue;
                LinSystem child = region;
                child.add_gt(scale(Rat(-1), con.a), Rat(0));
                stack.push_back(std::move(child));
            }
        }
    }
    res.ok = true;
    res.reason = "subdivision";
    return res;
}

}  // namespace tropfm
