#include "tropfm/degen.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "tropfm/linsys.hpp"
#include "tropfm/polyhedron.hpp"

namespace tropfm {

namespace {

int col_of(const DeltaCombType& t, int e, int j) {
    if (t.extra) return (e == t.xid() ? 0 : e) * t.r() + j;
    return (e - 1) * t.r() + j;
}

void validate_type(const DeltaCombType& t) {
    if (t.n == 0) {
        if (t.extra || !t.coords.empty()) throw Error("malformed placeholder type");
        return;
    }
    if (t.n < 0) throw Error("negative point count");
    if (t.r() < 2) throw Error("type needs at least two coordinates");
    int top = t.top();
    for (const auto& part : t.coords) {
        if (part.size() < 2) throw Error("anchors share a block");
        std::vector<char> seen(top + 1, 0);
        int count = 0;
        for (const auto& blk : part) {
            if (blk.empty()) throw Error("empty block");
            if (!std::is_sorted(blk.begin(), blk.end())) throw Error("unsorted block");
            for (int e : blk) {
                if (e < 0 || e > top) throw Error("element out of range");
                if (seen[e]++) throw Error("repeated element");
                ++count;
            }
        }
        if (count != top + 1) throw Error("missing element");
        if (part.front().front() != 0) throw Error("zero anchor not in the first block");
        if (part.back().back() != top) throw Error("height anchor not in the last block");
    }
}

QVec unit_q(int dim, int i) {
    QVec v(dim, Rat(0));
    v[i] = 1;
    return v;
}

ZVec unit_z(int dim, int i) {
    ZVec v(dim, Int(0));
    v[i] = 1;
    return v;
}

bool in_relint(const Cone& c, const QVec& x) {
    const HRep& H = c.hrep();
    for (const auto& con : H.cons) {
        Rat v = dot(con.a, x);
        if (con.rel == Rel::EQ) {
            if (v != con.b) return false;
        } else {
            if (v <= con.b) return false;
        }
    }
    return true;
}

ZMat to_zmat_checked(const QMat& M, const char* what) {
    ZMat out(M.size());
    for (size_t i = 0; i < M.size(); ++i) {
        out[i].resize(M[i].size());
        for (size_t j = 0; j < M[i].size(); ++j) {
            if (den(M[i][j]) != 1) throw Error(std::string("non-integral entry in ") + what);
            out[i][j] = num(M[i][j]);
        }
    }
    return out;
}

ZMat zmatmul(const ZMat& A, const ZMat& B) {
    size_t n = A.size(), k = B.size(), m = k ? B[0].size() : 0;
    ZMat out(n, ZVec(m, Int(0)));
    for (size_t i = 0; i < n; ++i)
        for (size_t l = 0; l < k; ++l) {
            if (A[i][l] == 0) continue;
            for (size_t j = 0; j < m; ++j) out[i][j] += A[i][l] * B[l][j];
        }
    return out;
}

// Common height of a point-major configuration vector (k blocks of r).
// Throws when the blocks disagree.
Rat config_height(const QVec& x, int r) {
    int k = (int)x.size() / r;
    Rat h = 0;
    for (int j = 0; j < r; ++j) h += x[j];
    for (int i = 1; i < k; ++i) {
        Rat hi = 0;
        for (int j = 0; j < r; ++j) hi += x[i * r + j];
        if (hi != h) throw Error("blocks do not share a common height");
    }
    return h;
}

// All nonnegative integer vectors whose k point blocks each sum to t; stops
// early when the callback returns true.
bool for_each_config(const Int& t, int k, int r, ZVec& buf,
                     const std::function<bool(const ZVec&)>& f) {
    std::function<bool(int, int, const Int&)> rec = [&](int block, int j, const Int& rem) -> bool {
        if (block == k) return f(buf);
        if (j == r - 1) {
            buf[block * r + j] = rem;
            return rec(block + 1, 0, t);
        }
        for (Int v = 0; v <= rem; ++v) {
            buf[block * r + j] = v;
            if (rec(block, j + 1, rem - v)) return true;
        }
        return false;
    };
    return rec(0, 0, t);
}

// Diagonalization U A V = S over Z with unimodular U, V (no divisibility
// chain; enough to solve linear systems exactly).
struct DiagT {
    ZMat U, S, V;
    int rank = 0;
};

DiagT diagonalize_z(ZMat A) {
    int m = (int)A.size();
    int n = m ? (int)A[0].size() : 0;
    DiagT d;
    d.U = zidentity(m);
    d.V = zidentity(n);
    int t = 0;
    auto swap_rows = [&](int a, int b) { std::swap(A[a], A[b]); std::swap(d.U[a], d.U[b]); };
    auto swap_cols = [&](int a, int b) {
        for (int i = 0; i < m; ++i) std::swap(A[i][a], A[i][b]);
        for (int i = 0; i < n; ++i) std::swap(d.V[i][a], d.V[i][b]);
    };
    auto addmul_row = [&](int dst, int src, const Int& c) {
        for (int j = 0; j < n; ++j) A[dst][j] += c * A[src][j];
        for (int j = 0; j < m; ++j) d.U[dst][j] += c * d.U[src][j];
    };
    auto addmul_col = [&](int dst, int src, const Int& c) {
        for (int i = 0; i < m; ++i) A[i][dst] += c * A[i][src];
        for (int i = 0; i < n; ++i) d.V[i][dst] += c * d.V[i][src];
    };
    while (t < m && t < n) {
        int pi = -1, pj = -1;
        for (int i = t; i < m; ++i)
            for (int j = t; j < n; ++j)
                if (A[i][j] != 0 &&
                    (pi < 0 || abs(A[i][j]) < abs(A[pi][pj]))) {
                    pi = i;
                    pj = j;
                }
        if (pi < 0) break;
        swap_rows(t, pi);
        swap_cols(t, pj);
        bool clean = false;
        while (!clean) {
            clean = true;
            for (int i = t + 1; i < m; ++i) {
                if (A[i][t] == 0) continue;
                Int q = A[i][t] / A[t][t];
                addmul_row(i, t, -q);
                if (A[i][t] != 0) {
                    swap_rows(t, i);
                    clean = false;
                }
            }
            for (int j = t + 1; j < n; ++j) {
                if (A[t][j] == 0) continue;
                Int q = A[t][j] / A[t][t];
                addmul_col(j, t, -q);
                if (A[t][j] != 0) {
                    swap_cols(t, j);
                    clean = false;
                }
            }
        }
        if (A[t][t] < 0) addmul_row(t, t, Int(-2));
        ++t;
    }
    d.S = std::move(A);
    d.rank = t;
    return d;
}

// One integer solution of A x = b, if any.
std::optional<ZVec> solve_z(const ZMat& A, const ZVec& b) {
    int m = (int)A.size();
    int n = m ? (int)A[0].size() : 0;
    if ((int)b.size() != m) throw DimensionMismatch("solve_z");
    if (m == 0) return ZVec(n, Int(0));
    DiagT d = diagonalize_z(A);
    ZVec y = matvec_z(d.U, b);
    ZVec z(n, Int(0));
    for (int i = 0; i < m; ++i) {
        if (i < d.rank) {
            if (y[i] % d.S[i][i] != 0) return std::nullopt;
            z[i] = y[i] / d.S[i][i];
        } else if (y[i] != 0) {
            return std::nullopt;
        }
    }
    return matvec_z(d.V, z);
}

// Ordered set partitions of elems into nonempty blocks (block order matters,
// elements keep ascending order within blocks).
void ordered_partitions(const std::vector<int>& elems,
                        const std::function<void(const std::vector<std::vector<int>>&)>& cb) {
    std::vector<std::vector<int>> acc;
    std::function<void(std::vector<int>)> rec = [&](std::vector<int> rest) {
        if (rest.empty()) {
            cb(acc);
            return;
        }
        int k = (int)rest.size();
        for (unsigned mask = 1; mask < (1u << k); ++mask) {
            std::vector<int> blk, rem;
            for (int i = 0; i < k; ++i) (mask >> i & 1 ? blk : rem).push_back(rest[i]);
            acc.push_back(blk);
            rec(rem);
            acc.pop_back();
        }
    };
    rec(elems);
}

// All ordered partitions of {0, 1..n, n+1} with 0 in the first block, n+1 in
// the last, anchors separated.
std::vector<std::vector<std::vector<int>>> two_anchor_partitions(int n) {
    std::vector<std::vector<std::vector<int>>> out;
    int top = n + 1;
    long long p3 = 1;
    for (int i = 0; i < n; ++i) p3 *= 3;
    for (long long code = 0; code < p3; ++code) {
        std::vector<int> s0{0}, st, mid;
        long long c = code;
        for (int e = 1; e <= n; ++e, c /= 3) {
            int dgt = (int)(c % 3);
            (dgt == 0 ? s0 : dgt == 1 ? st : mid).push_back(e);
        }
        st.push_back(top);
        ordered_partitions(mid, [&](const std::vector<std::vector<int>>& blocks) {
            std::vector<std::vector<int>> part;
            part.push_back(s0);
            for (const auto& b : blocks) part.push_back(b);
            part.push_back(st);
            out.push_back(part);
        });
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Base type of a universal-family type: the moving point removed, the height
// anchor renumbered down.
DeltaCombType restrict_plus(const DeltaCombType& pt) {
    DeltaCombType b;
    b.n = pt.n;
    b.extra = false;
    b.coords.resize(pt.r());
    for (int j = 0; j < pt.r(); ++j) {
        for (const auto& blk : pt.coords[j]) {
            std::vector<int> nb;
            for (int e : blk) {
                if (e == pt.xid()) continue;
                nb.push_back(e == pt.top() ? b.n + 1 : e);
            }
            if (!nb.empty()) b.coords[j].push_back(nb);
        }
    }
    return b;
}

// Universal-family type with the moving point glued to point i everywhere.
DeltaCombType with_x_at_point(const DeltaCombType& base, int i) {
    DeltaCombType pt;
    pt.n = base.n;
    pt.extra = true;
    pt.coords.resize(base.r());
    int x = pt.xid();
    for (int j = 0; j < base.r(); ++j) {
        for (const auto& blk : base.coords[j]) {
            std::vector<int> nb;
            bool has_i = false;
            for (int e : blk) {
                if (e == i) has_i = true;
                nb.push_back(e == base.n + 1 ? pt.top() : e);
            }
            if (has_i) {
                nb.push_back(x);
                std::sort(nb.begin(), nb.end());
            }
            pt.coords[j].push_back(nb);
        }
    }
    return pt;
}

int lookup_type(const DegenModuli& m, const DeltaCombType& tau) {
    auto it = m.type_index.find(tau);
    if (it == m.type_index.end()) throw Error("unknown type: " + delta_label(tau));
    return it->second;
}

// The minimal cell whose relative interior meets the image, after checking
// the whole image fits inside it.
int minimal_containing_cell(const ConeComplex& cx, const Cone& img, const char* what) {
    QVec y = img.nrays() == 0 ? QVec(cx.ambient, Rat(0)) : img.relint_point();
    for (int i = 0; i < cx.size(); ++i) {
        if (!in_relint(cx.cells[i], y)) continue;
        if (!cx.cells[i].contains_cone(img)) throw Error(what);
        return i;
    }
    throw Error(what);
}

// Star of a vertex of the slice subdivision together with its abstract model:
// rays indexed 0..k-1, every cone re-expressed as its ray-index set.  Errors
// out when a star cone is not simplicial or not unimodular, since then the
// coordinate model would not be lattice-faithful.
struct VertexStarData {
    StarFan vstar;
    TropFan tf;
    std::vector<ZVec> ray_vecs;
    std::vector<std::vector<int>> set_of_cell;
    int rays = 0;
};

VertexStarData vertex_star(const SimplexLatticeSubdivision& S, int v) {
    Cone vray = Cone::from_rays(S.r, QMat{S.vertices[v]});
    auto vc = S.fan.find_cell(vray);
    if (!vc) throw Error("vertex ray is not a cell of the slice subdivision");
    VertexStarData D;
    D.vstar = star_fan(S.fan, *vc);
    const ConeComplex& fan = D.vstar.fan;
    for (int i = 0; i < fan.size(); ++i)
        if (fan.cells[i].dim() == 1) D.ray_vecs.push_back(primitive(fan.cells[i].rays()[0]));
    D.rays = (int)D.ray_vecs.size();
    D.set_of_cell.resize(fan.size());
    std::vector<std::vector<int>> sets;
    for (int i = 0; i < fan.size(); ++i) {
        const Cone& c = fan.cells[i];
        std::vector<int> set;
        for (const QVec& ray : c.rays()) {
            ZVec p = primitive(ray);
            int idx = -1;
            for (int k = 0; k < D.rays; ++k)
                if (D.ray_vecs[k] == p) {
                    idx = k;
                    break;
                }
            if (idx < 0) throw Error("star cone ray is not a ray of the star");
            set.push_back(idx);
        }
        std::sort(set.begin(), set.end());
        if ((int)set.size() != c.dim()) throw Error("vertex star is not simplicial");
        if (c.dim() >= 1) {
            ZMat rows;
            for (const QVec& ray : c.rays()) rows.push_back(primitive(ray));
            IntLattice rl = IntLattice::from_rows(fan.ambient, rows);
            if (lattice_index(rl, rl.saturation()) != 1)
                throw Error("vertex star is not smooth");
        }
        D.set_of_cell[i] = set;
        sets.push_back(set);
    }
    D.tf = TropFan::from_sets(D.rays, sets);
    if ((int)D.tf.cone_index.size() != fan.size())
        throw Error("vertex star cones are not determined by their rays");
    return D;
}

// Rows converting a point of the cone over ray set I into its coefficients on
// the star's rays: row i is a dual functional for i in I, zero otherwise.
ZMat dual_rows(const VertexStarData& D, const std::vector<int>& I) {
    int q = D.vstar.fan.ambient;
    ZMat W(D.rays, ZVec(q, Int(0)));
    if (I.empty()) return W;
    ZMat R;
    for (int i : I) R.push_back(D.ray_vecs[i]);
    for (size_t idx = 0; idx < I.size(); ++idx) {
        auto w = solve_z(R, unit_z((int)I.size(), (int)idx));
        if (!w) throw Error("vertex star has no integral dual basis");
        W[I[idx]] = *w;
    }
    return W;
}

// Position of vertex v of the subdivision as an integer linear map of the
// configuration: each coordinate is pinned to zero or to a point's coordinate,
// with at most one coordinate recovered through the height.
ZMat vertex_position_map(const SimplexLatticeSubdivision& S, int v) {
    int r = S.r, n = S.n;
    const QVec& w = S.vertices[v];
    std::vector<int> pin(r, -2);
    for (int j = 0; j < r; ++j) {
        if (w[j] == 0) {
            pin[j] = -1;
            continue;
        }
        for (int i = 0; i < n; ++i)
            if (S.points[i][j] == w[j]) {
                pin[j] = i;
                break;
            }
    }
    ZMat M(r, ZVec(n * r, Int(0)));
    int unpinned = -1;
    for (int j = 0; j < r; ++j) {
        if (pin[j] == -2) {
            if (unpinned >= 0) throw Error("vertex position is underdetermined");
            unpinned = j;
        } else if (pin[j] >= 0) {
            M[j][pin[j] * r + j] = 1;
        }
    }
    if (unpinned >= 0) {
        ZVec row(n * r, Int(0));
        for (int jj = 0; jj < r; ++jj) row[jj] = 1;
        for (int j = 0; j < r; ++j)
            if (j != unpinned)
                for (int c = 0; c < n * r; ++c) row[c] -= M[j][c];
        M[unpinned] = row;
    }
    return M;
}

// Deterministic relative-interior points of the maximal cells: positive
// rational ray combinations with varying weights.
std::vector<QVec> sample_points(const ConeComplex& cx, int want) {
    std::vector<QVec> out;
    std::set<QVec> seen;
    auto maxc = cx.maximal_cells();
    for (int pat = 0; (int)out.size() < want && pat < 200; ++pat) {
        for (int ci : maxc) {
            const Cone& c = cx.cells[ci];
            if (c.nrays() == 0) continue;
            QVec p(cx.ambient, Rat(0));
            for (int i = 0; i < c.nrays(); ++i) {
                int a = 1 + (pat * (i + 3) + i * i) % 7;
                int b = 1 + (pat + i) % 3;
                p = add(p, scale(Rat(a, b), c.rays()[i]));
            }
            if (seen.insert(p).second) {
                out.push_back(p);
                if ((int)out.size() >= want) break;
            }
        }
    }
    return out;
}

// Finds the preimages of a point under a cell-wise linear map.  Per maximal
// source cell the stacked system [matrix; span equations] has full column
// rank when the map is injective on the cell, so a precomputed left inverse
// yields the unique candidate, verified against the system and the cell.
struct PreimageFinder {
    const ConeComplex* src = nullptr;
    std::vector<int> maxcells;
    std::vector<QMat> systems;
    std::vector<QMat> left_inv;
    std::vector<Cone> images;
    bool injective = true;

    PreimageFinder(const ConeComplex& s, const ComplexMap& f) : src(&s) {
        maxcells = s.maximal_cells();
        for (int ci : maxcells) {
            QMat mat = to_qmat(f.cell_matrix[ci]);
            images.push_back(image_cone(mat, s.cells[ci]));
            QMat sys = std::move(mat);
            QMat eqs = span_equations(s.cells[ci].rays(), s.ambient);
            for (auto& row : eqs) sys.push_back(row);
            if (rank(sys) != s.ambient) {
                injective = false;
                left_inv.emplace_back();
            } else {
                QMat st = transpose(sys);
                left_inv.push_back(matmul(inverse(matmul(st, sys)), st));
            }
            systems.push_back(std::move(sys));
        }
    }

    // Distinct preimages x in the source support with f(x) = y.  The image
    // cone check screens out most cells before the exact solve.
    std::vector<QVec> preimages(const QVec& y) const {
        std::set<QVec> found;
        for (size_t k = 0; k < maxcells.size(); ++k) {
            if (left_inv[k].empty()) continue;
            if (!images[k].contains(y)) continue;
            QVec rhs = y;
            rhs.resize(systems[k].size(), Rat(0));
            QVec x = matvec(left_inv[k], rhs);
            if (matvec(systems[k], x) != rhs) continue;
            if (!src->cells[maxcells[k]].contains(x)) continue;
            found.insert(std::move(x));
        }
        return std::vector<QVec>(found.begin(), found.end());
    }

    bool injective_cells() const { return injective; }
};

// Machine-integer mirror of the lattice walk data.  Every matrix entry and
// every intermediate product stays far below 2^62 for the magnitudes the
// guard admits, so the walk over the height box runs on long long; any cell
// that does not fit falls back to exact rationals.
constexpr long long kFastEntryCap = 1 << 20;

bool to_ll_rows(const QMat& M, std::vector<std::vector<long long>>& out) {
    out.clear();
    for (const QVec& row : M) {
        Int d = 1;
        for (const Rat& e : row) d = lcm(d, den(e));
        if (d > kFastEntryCap) return false;
        std::vector<long long> r;
        for (const Rat& e : row) {
            Int v = num(e) * (d / den(e));
            if (abs(v) > kFastEntryCap) return false;
            r.push_back(v.convert_to<long long>());
        }
        out.push_back(std::move(r));
    }
    return true;
}

// Homogeneous cone membership test in long long.
struct FastCone {
    std::vector<std::vector<long long>> eq, ge;

    bool load(const Cone& c) {
        QMat eqs, ges;
        for (const auto& con : c.hrep().cons) (con.rel == Rel::EQ ? eqs : ges).push_back(con.a);
        return to_ll_rows(eqs, eq) && to_ll_rows(ges, ge);
    }
    bool contains(const long long* x) const {
        for (const auto& row : eq) {
            long long s = 0;
            for (size_t i = 0; i < row.size(); ++i) s += row[i] * x[i];
            if (s != 0) return false;
        }
        for (const auto& row : ge) {
            long long s = 0;
            for (size_t i = 0; i < row.size(); ++i) s += row[i] * x[i];
            if (s < 0) return false;
        }
        return true;
    }
};

// Per-cell solver mirroring PreimageFinder in long long: x = Lnum rhs / den.
struct FastSolveCell {
    FastCone image, cell;
    std::vector<std::vector<long long>> lnum, sys;
    long long den = 1;
    int q = 0, rows = 0;

    bool load(const PreimageFinder& pf, size_t k) {
        if (pf.left_inv[k].empty()) return false;
        if (!image.load(pf.images[k])) return false;
        if (!cell.load(pf.src->cells[pf.maxcells[k]])) return false;
        Int d = 1;
        for (const QVec& row : pf.left_inv[k])
            for (const Rat& e : row) d = lcm(d, den(e));
        if (d > kFastEntryCap) return false;
        QMat scaled = pf.left_inv[k];
        for (QVec& row : scaled)
            for (Rat& e : row) e *= Rat(d);
        if (!to_ll_rows(scaled, lnum) || !to_ll_rows(pf.systems[k], sys)) return false;
        den = d.convert_to<long long>();
        q = (int)lnum.size();
        rows = (int)sys.size();
        return true;
    }
};

DeltaCombType delta_comb_type(const QMat& points, const Rat& t) {
    int n = (int)points.size();
    if (n < 1) throw Error("empty configuration");
    int r = (int)points[0].size();
    if (r < 2) throw Error("slice needs at least two coordinates");
    if (t <= 0) throw Error("slice height must be positive");
    for (int i = 0; i < n; ++i) {
        if ((int)points[i].size() != r) throw DimensionMismatch("configuration rows");
        Rat s = 0;
        for (const Rat& v : points[i]) {
            if (v < 0) throw Error("negative coordinate in configuration");
            s += v;
        }
        if (s != t) throw HeightMismatch("point " + std::to_string(i + 1));
    }
    DeltaCombType tau;
    tau.n = n;
    tau.extra = false;
    tau.coords.resize(r);
    int top = n + 1;
    for (int j = 0; j < r; ++j) {
        std::map<Rat, std::vector<int>> by_val;
        by_val[Rat(0)].push_back(0);
        by_val[t].push_back(top);
        for (int i = 1; i <= n; ++i) by_val[points[i - 1][j]].push_back(i);
        for (auto& [v, blk] : by_val) {
            std::sort(blk.begin(), blk.end());
            tau.coords[j].push_back(blk);
        }
    }
    return tau;
}

std::string delta_label(const DeltaCombType& tau) {
    validate_type(tau);
    if (tau.n == 0) return "D0";
    std::string out = "D";
    for (const auto& part : tau.coords) {
        out += '[';
        bool firstb = true;
        for (const auto& blk : part) {
            if (!firstb) out += '|';
            firstb = false;
            bool firste = true;
            for (int e : blk) {
                if (!firste) out += ',';
                firste = false;
                if (e == 0)
                    out += '0';
                else if (e == tau.top())
                    out += 't';
                else if (tau.extra && e == tau.xid())
                    out += 'x';
                else
                    out += std::to_string(e);
            }
        }
        out += ']';
    }
    return out;
}

DeltaCombType parse_delta_label(const std::string& s) {
    if (s == "D0") return DeltaCombType{};
    if (s.empty() || s[0] != 'D') throw ParseError("delta label must start with 'D'");
    // tokens: -1 = height anchor, -2 = moving point
    std::vector<std::vector<std::vector<int>>> groups;
    size_t i = 1;
    bool saw_x = false;
    int maxnum = 0;
    while (i < s.size()) {
        if (s[i] != '[') throw ParseError("expected '['");
        ++i;
        std::vector<std::vector<int>> part;
        std::vector<int> blk;
        std::string tok;
        auto flush_tok = [&]() {
            if (tok.empty()) throw ParseError("empty element");
            if (tok == "t")
                blk.push_back(-1);
            else if (tok == "x") {
                blk.push_back(-2);
                saw_x = true;
            } else {
                for (char c : tok)
                    if (!isdigit((unsigned char)c)) throw ParseError("bad element: " + tok);
                if (tok.size() > 1 && tok[0] == '0') throw ParseError("bad element: " + tok);
                int v = std::stoi(tok);
                maxnum = std::max(maxnum, v);
                blk.push_back(v);
            }
            tok.clear();
        };
        for (; i < s.size() && s[i] != ']'; ++i) {
            char c = s[i];
            if (c == ',') {
                flush_tok();
            } else if (c == '|') {
                flush_tok();
                part.push_back(blk);
                blk.clear();
            } else {
                tok += c;
            }
        }
        if (i >= s.size()) throw ParseError("unterminated bracket group");
        flush_tok();
        part.push_back(blk);
        ++i;
        groups.push_back(part);
    }
    if (groups.empty()) throw ParseError("no coordinate groups");
    DeltaCombType tau;
    tau.n = maxnum;
    tau.extra = saw_x;
    if (tau.n == 0) throw ParseError("no points in label");
    int x = tau.xid(), top = tau.top();
    tau.coords.resize(groups.size());
    for (size_t j = 0; j < groups.size(); ++j) {
        for (auto& blk : groups[j]) {
            for (int& e : blk) {
                if (e == -1)
                    e = top;
                else if (e == -2)
                    e = x;
            }
            std::sort(blk.begin(), blk.end());
            tau.coords[j].push_back(blk);
        }
    }
    try {
        validate_type(tau);
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
    return tau;
}

HRep type_system(const DeltaCombType& tau) {
    validate_type(tau);
    if (tau.n == 0) throw Error("placeholder type has no inequality system");
    int r = tau.r();
    int k = tau.n + (tau.extra ? 1 : 0);
    int dim = k * r;
    HRep H(dim);
    QVec hrow(dim, Rat(0));
    for (int j = 0; j < r; ++j) hrow[col_of(tau, 1, j)] = 1;
    std::vector<int> elems;
    for (int i = 1; i <= tau.n; ++i) elems.push_back(i);
    if (tau.extra) elems.push_back(tau.xid());
    for (int e : elems) {
        if (e == 1) continue;
        QVec a(dim, Rat(0));
        for (int j = 0; j < r; ++j) {
            a[col_of(tau, e, j)] += 1;
            a[col_of(tau, 1, j)] -= 1;
        }
        H.eq(std::move(a), Rat(0));
    }
    for (int j = 0; j < r; ++j) {
        const auto& part = tau.coords[j];
        int m = (int)part.size();
        auto rep = [&](int b) -> QVec {
            if (b == 0) return QVec(dim, Rat(0));
            if (b == m - 1) return hrow;
            return unit_q(dim, col_of(tau, part[b][0], j));
        };
        for (int b = 0; b < m; ++b) {
            QVec rb = rep(b);
            for (int e : part[b]) {
                if (e == 0 || e == tau.top()) continue;
                if (b > 0 && b < m - 1 && e == part[b][0]) continue;
                H.eq(sub(unit_q(dim, col_of(tau, e, j)), rb), Rat(0));
            }
        }
        for (int b = 0; b + 1 < m; ++b) H.ge(sub(rep(b + 1), rep(b)), Rat(0));
    }
    return H;
}

bool type_feasible(const HRep& system) { return is_feasible(system.strict_system()); }

bool type_feasible(const DeltaCombType& tau) { return type_feasible(type_system(tau)); }

Cone type_cone(const DeltaCombType& tau) {
    HRep H = type_system(tau);
    QMat ineq, eqs;
    for (const auto& c : H.cons) (c.rel == Rel::EQ ? eqs : ineq).push_back(c.a);
    QMat rays, lines;
    dd_cone(H.dim, ineq, eqs, rays, lines);
    if (!lines.empty()) throw Error("type cone is not pointed");
    return Cone::from_extreme_rays(H.dim, rays);
}

SimplexLatticeSubdivision simplex_subdiv_from_points(const QMat& points, const Rat& t) {
    SimplexLatticeSubdivision S;
    S.n = (int)points.size();
    if (S.n < 1) throw Error("empty configuration");
    S.r = (int)points[0].size();
    if (S.r < 2) throw Error("slice needs at least two coordinates");
    if (t <= 0) throw Error("slice height must be positive");
    for (int i = 0; i < S.n; ++i) {
        if ((int)points[i].size() != S.r) throw DimensionMismatch("configuration rows");
        Rat s = 0;
        for (const Rat& v : points[i]) {
            if (v < 0) throw Error("negative coordinate in configuration");
            s += v;
        }
        if (s != t) throw HeightMismatch("point " + std::to_string(i + 1));
    }
    S.t = t;
    S.points = points;
    int r = S.r;

    struct Thr {
        int j;
        Rat v;
    };
    std::vector<Thr> thr;
    for (int j = 0; j < r; ++j) {
        std::set<Rat> vals;
        for (int i = 0; i < S.n; ++i) {
            const Rat& v = points[i][j];
            if (v > 0 && v < t) vals.insert(v);
        }
        for (const Rat& v : vals) thr.push_back({j, v});
    }
    int T = (int)thr.size();
    {
        Int total = 1;
        for (int i = 0; i < r; ++i) total *= 2;
        for (int i = 0; i < T; ++i) total *= 3;
        if (total > 10000000) throw SizeLimit("slice subdivision sign vectors");
    }

    QMat thr_rows;
    for (const Thr& th : thr) {
        QVec a(r, -th.v / t);
        a[th.j] += 1;
        thr_rows.push_back(a);
    }

    S.fan = ConeComplex(r);
    long long total = 1;
    for (int i = 0; i < r; ++i) total *= 2;
    for (int i = 0; i < T; ++i) total *= 3;
    for (long long code = 0; code < total; ++code) {
        long long c = code;
        std::vector<int> fs(r), ts(T);
        for (int j = 0; j < r; ++j, c /= 2) fs[j] = (int)(c % 2);
        for (int k = 0; k < T; ++k, c /= 3) ts[k] = (int)(c % 3);
        LinSystem rel(r);
        QMat ineq, eqs;
        for (int j = 0; j < r; ++j) {
            QVec a = unit_q(r, j);
            if (fs[j] == 0) {
                rel.add_eq(a, 0);
                eqs.push_back(a);
            } else {
                rel.add_gt(a, 0);
                ineq.push_back(a);
            }
        }
        for (int k = 0; k < T; ++k) {
            const QVec& a = thr_rows[k];
            if (ts[k] == 0) {
                rel.add_gt(scale(Rat(-1), a), 0);
                ineq.push_back(scale(Rat(-1), a));
            } else if (ts[k] == 1) {
                rel.add_eq(a, 0);
                eqs.push_back(a);
            } else {
                rel.add_gt(a, 0);
                ineq.push_back(a);
            }
        }
        if (!is_feasible(rel)) continue;
        QMat rays, lines;
        dd_cone(r, ineq, eqs, rays, lines);
        if (!lines.empty()) throw Error("slice cell is not pointed");
        S.fan.add_cell(Cone::from_extreme_rays(r, rays));
    }

    // vertices: rays of the subdivision scaled to the slice height
    QMat verts;
    for (int i = 0; i < S.fan.size(); ++i) {
        if (S.fan.cells[i].dim() != 1) continue;
        const QVec& ray = S.fan.cells[i].rays()[0];
        Rat h = 0;
        for (const Rat& v : ray) h += v;
        if (h <= 0) throw Error("slice vertex at height zero");
        verts.push_back(scale(t / h, ray));
    }
    std::sort(verts.begin(), verts.end());
    S.vertices = verts;

    for (int i = 0; i < S.fan.size(); ++i) {
        std::string lab = "K[";
        bool first = true;
        for (size_t v = 0; v < S.vertices.size(); ++v) {
            if (!S.fan.cells[i].contains(S.vertices[v])) continue;
            if (!first) lab += ',';
            first = false;
            lab += std::to_string(v + 1);
        }
        lab += ']';
        S.fan.labels[i] = lab;
    }

    S.marks.resize(S.n);
    for (int i = 0; i < S.n; ++i) {
        int found = -1;
        for (size_t v = 0; v < S.vertices.size(); ++v)
            if (S.vertices[v] == points[i]) {
                found = (int)v;
                break;
            }
        if (found < 0) throw Error("configuration point is not a vertex of its subdivision");
        S.marks[i] = found;
    }
    compute_face_pairs(S.fan);
    return S;
}

Int min_height(const Cone& tau, int r) {
    if (r < 1 || tau.ambient() % r != 0) throw DimensionMismatch("min_height");
    int k = tau.ambient() / r;
    if (tau.nrays() == 0) throw Error("zero cone has no positive height");
    for (const QVec& ray : tau.rays()) config_height(ray, r);
    QVec w = tau.relint_point();
    Rat hq = config_height(w, r);
    if (den(hq) != 1 || hq <= 0) throw Error("relative interior witness is not integral");
    Int H = num(hq);
    ZVec buf(k * r, Int(0));
    for (Int t = 1; t <= H; ++t) {
        bool hit = for_each_config(t, k, r, buf, [&](const ZVec& cfg) {
            return in_relint(tau, to_qvec(cfg));
        });
        if (hit) return t;
    }
    throw Error("no integral configuration found up to the witness height");
}

DegenModuli build_pi_delta(int r, int n, long long budget) {
    if (r < 2) throw Error("slice needs at least two coordinates");
    if (n < 1) throw Error("need at least one point");
    if (budget < 1) throw Error("bad budget");
    DegenModuli m;
    m.r = r;
    m.n = n;

    auto parts = two_anchor_partitions(n);
    Int cand = 1;
    for (int j = 0; j < r; ++j) {
        cand *= (Int)parts.size();
        if (cand > budget) throw SizeLimit("base type candidates");
    }

    m.pi = ConeComplex(n * r);
    DeltaCombType apex;
    m.types.push_back(apex);
    m.pi.add_cell(Cone::zero(n * r), "D0");
    m.type_index[apex] = 0;

    std::vector<size_t> idx(r, 0);
    while (true) {
        DeltaCombType tau;
        tau.n = n;
        tau.extra = false;
        tau.coords.resize(r);
        for (int j = 0; j < r; ++j) tau.coords[j] = parts[idx[j]];
        if (type_feasible(tau)) {
            int id = m.pi.add_cell(type_cone(tau), delta_label(tau));
            m.types.push_back(tau);
            m.type_index[tau] = id;
        }
        int j = r - 1;
        while (j >= 0 && ++idx[j] == parts.size()) idx[j--] = 0;
        if (j < 0) break;
    }
    compute_face_pairs(m.pi);

    m.pi_plus = ConeComplex((n + 1) * r);
    m.types_plus.push_back(apex);
    m.pi_plus.add_cell(Cone::zero((n + 1) * r), "D0");
    m.type_index_plus[apex] = 0;

    Int pcand = 0;
    for (size_t c = 1; c < m.types.size(); ++c) {
        Int mult = 1;
        for (int j = 0; j < r; ++j) mult *= 2 * (Int)m.types[c].coords[j].size() - 1;
        pcand += mult;
        if (pcand > budget) throw SizeLimit("family type candidates");
    }
    for (size_t c = 1; c < m.types.size(); ++c) {
        const DeltaCombType& base = m.types[c];
        // placement per coordinate, in axis order: join block 0, new block in
        // gap 1, join block 1, ...
        std::vector<int> nopts(r);
        for (int j = 0; j < r; ++j) nopts[j] = 2 * (int)base.coords[j].size() - 1;
        std::vector<int> opt(r, 0);
        while (true) {
            DeltaCombType pt;
            pt.n = n;
            pt.extra = true;
            pt.coords.resize(r);
            int x = pt.xid();
            for (int j = 0; j < r; ++j) {
                const auto& bpart = base.coords[j];
                int o = opt[j];
                for (size_t b = 0; b < bpart.size(); ++b) {
                    if (o == 2 * (int)b - 1) pt.coords[j].push_back({x});
                    std::vector<int> nb;
                    for (int e : bpart[b]) nb.push_back(e == n + 1 ? pt.top() : e);
                    if (o == 2 * (int)b) {
                        nb.push_back(x);
                        std::sort(nb.begin(), nb.end());
                    }
                    pt.coords[j].push_back(nb);
                }
            }
            if (type_feasible(pt)) {
                int id = m.pi_plus.add_cell(type_cone(pt), delta_label(pt));
                m.types_plus.push_back(pt);
                m.type_index_plus[pt] = id;
            }
            int j = r - 1;
            while (j >= 0 && ++opt[j] == nopts[j]) opt[j--] = 0;
            if (j < 0) break;
        }
    }
    compute_face_pairs(m.pi_plus);

    m.p_matrix = ZMat(n * r, ZVec((n + 1) * r, Int(0)));
    for (int i = 1; i <= n; ++i)
        for (int j = 0; j < r; ++j) m.p_matrix[(i - 1) * r + j][i * r + j] = 1;
    for (int i = 1; i <= n; ++i) {
        ZMat s((n + 1) * r, ZVec(n * r, Int(0)));
        for (int j = 0; j < r; ++j) s[j][(i - 1) * r + j] = 1;
        for (int k = 1; k <= n; ++k)
            for (int j = 0; j < r; ++j) s[k * r + j][(k - 1) * r + j] = 1;
        m.section_matrices.push_back(s);
    }

    std::vector<int> ptargets(m.pi_plus.size(), 0);
    for (int d = 1; d < m.pi_plus.size(); ++d) {
        DeltaCombType base = restrict_plus(m.types_plus[d]);
        auto it = m.type_index.find(base);
        if (it == m.type_index.end()) throw Error("family type restricts to an unknown type");
        ptargets[d] = it->second;
    }
    m.p = ComplexMap::uniform(m.p_matrix, ptargets);
    for (int i = 1; i <= n; ++i) {
        std::vector<int> targets(m.pi.size(), 0);
        for (int c = 1; c < m.pi.size(); ++c) {
            DeltaCombType pt = with_x_at_point(m.types[c], i);
            auto it = m.type_index_plus.find(pt);
            if (it == m.type_index_plus.end())
                throw Error("section image is not a family type");
            targets[c] = it->second;
        }
        m.sections.push_back(ComplexMap::uniform(m.section_matrices[i - 1], targets));
    }

    m.heights.assign(m.pi.size(), Int(0));
    m.h_tot = 1;
    for (int c = 1; c < m.pi.size(); ++c) {
        m.heights[c] = min_height(m.pi.cells[c], r);
        m.h_tot = lcm(m.h_tot, m.heights[c]);
    }
    return m;
}

DegenModuli refine_lattices(const DegenModuli& m) {
    DegenModuli out = m;
    auto kernel_lattice = [&](int k) {
        ZMat rows;
        for (int i = 0; i < k; ++i) {
            ZVec v(k * m.r, Int(0));
            v[i * m.r] = m.h_tot;
            rows.push_back(v);
            for (int j = 1; j < m.r; ++j) {
                ZVec w(k * m.r, Int(0));
                w[i * m.r + j] = 1;
                w[i * m.r] = -1;
                rows.push_back(w);
            }
        }
        return IntLattice::from_rows(k * m.r, rows);
    };
    out.pi.lattice = kernel_lattice(m.n);
    out.pi_plus.lattice = kernel_lattice(m.n + 1);
    out.base_scale = m.h_tot;
    out.refined = true;
    return out;
}

DegenSSReport verify_degen_ss(const DegenModuli& m) {
    DegenSSReport rep;
    for (int i = 1; i <= m.n && rep.transversality; ++i) {
        QMat sec = to_qmat(m.section_matrices[i - 1]);
        for (int c = 0; c < m.pi.size(); ++c) {
            ++rep.cells_checked;
            Cone img = image_cone(sec, m.pi.cells[c]);
            auto f = m.pi_plus.find_cell(img);
            if (!f || *f != m.sections[i - 1].target_cell[c]) {
                rep.transversality = false;
                rep.witness_section = i;
                rep.witness_cell = c;
                rep.witness_label = m.pi.labels[c];
                break;
            }
        }
    }
    if (rep.transversality) {
        QMat pm = to_qmat(m.p_matrix);
        for (int d = 0; d < m.pi_plus.size(); ++d) {
            ++rep.cells_checked;
            Cone img = image_cone(pm, m.pi_plus.cells[d]);
            auto f = m.pi.find_cell(img);
            if (!f || *f != m.p.target_cell[d]) {
                rep.flatness = false;
                rep.witness_cell = d;
                rep.witness_label = m.pi_plus.labels[d];
                break;
            }
        }
    }
    if (rep.transversality && rep.flatness) {
        ZVec hrow(m.n * m.r, Int(0));
        for (int j = 0; j < m.r; ++j) hrow[j] = 1;
        IntLattice full_img = lattice_image(ZMat{hrow}, m.pi.lattice);
        if (full_img.rank() != 1) throw Error("height image is degenerate");
        Int g = full_img.basis()[0][0];
        IntLattice target = IntLattice::scaled(1, m.base_scale);
        ZVec buf(m.n * m.r, Int(0));
        for (int c = 1; c < m.pi.size(); ++c) {
            ++rep.cells_checked;
            IntLattice img = lattice_image(ZMat{hrow}, m.pi.cell_lattice(c));
            bool ok = (img == target);
            if (ok) {
                ok = false;
                for (Int t = g; t <= m.base_scale; t += g) {
                    bool hit = for_each_config(t, m.n, m.r, buf, [&](const ZVec& cfg) {
                        return m.pi.lattice.contains(cfg) && in_relint(m.pi.cells[c], to_qvec(cfg));
                    });
                    if (hit) {
                        ok = (t == m.base_scale);
                        break;
                    }
                }
            }
            if (!ok) {
                rep.reducedness = false;
                rep.witness_cell = c;
                rep.witness_label = m.pi.labels[c];
                break;
            }
        }
    }
    return rep;
}

std::vector<DeltaCombType> rigid_types(const DegenModuli& m) {
    std::vector<DeltaCombType> out;
    for (int c = 1; c < m.pi.size(); ++c)
        if (m.pi.cells[c].dim() == 1) out.push_back(m.types[c]);
    return out;
}

RubberData rubber_data(const DegenModuli& m, const DeltaCombType& tau) {
    int cell = lookup_type(m, tau);
    if (cell == 0) throw Error("placeholder type has no configurations");
    RubberData rd;
    IntLattice L = m.pi.cell_lattice(cell);
    ZVec hv;
    for (const ZVec& row : L.basis()) {
        Int h = 0;
        for (int j = 0; j < m.r; ++j) h += row[j];
        hv.push_back(h);
    }
    ZMat coef = kernel_z(ZMat{hv});
    ZMat nbasis;
    for (const ZVec& c : coef) {
        ZVec v(m.n * m.r, Int(0));
        for (size_t k = 0; k < c.size(); ++k)
            for (int col = 0; col < m.n * m.r; ++col) v[col] += c[k] * L.basis()[k][col];
        nbasis.push_back(v);
    }
    rd.n_tau = IntLattice::from_rows(m.n * m.r, nbasis);
    rd.rank = rd.n_tau.rank();

    QVec q = m.pi.cells[cell].relint_point();
    Rat h = config_height(q, m.r);
    QMat pts(m.n, QVec(m.r));
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.r; ++j) pts[i][j] = q[i * m.r + j];
    rd.subdiv = simplex_subdiv_from_points(pts, h);

    ZMat nb_t = transpose_z(rd.n_tau.basis());
    int V = (int)rd.subdiv.vertices.size();
    for (int v = 0; v < V; ++v) {
        rd.vertex_ids.push_back(v);
        ZMat Mv = vertex_position_map(rd.subdiv, v);
        rd.phi.push_back(rd.rank == 0 ? ZMat(m.r, ZVec(0)) : zmatmul(Mv, nb_t));
    }
    std::set<int> marked(rd.subdiv.marks.begin(), rd.subdiv.marks.end());
    ZMat stacked;
    for (int v : marked)
        for (const ZVec& row : rd.phi[v]) stacked.push_back(row);
    rd.free_action = rd.rank == 0 || rank_z(stacked) == rd.rank;
    if (rd.rank > 0)
        for (int v : marked) {
            bool zero = true;
            for (const ZVec& row : rd.phi[v])
                for (const Int& e : row)
                    if (e != 0) zero = false;
            if (zero) rd.zero_maps.push_back(v);
        }
    return rd;
}

RetractionResult retraction(const DegenModuli& m, const DeltaCombType& tau,
                            const DeltaCombType& rho) {
    int tc = lookup_type(m, tau);
    int rc = lookup_type(m, rho);
    if (rc == 0 || m.pi.cells[rc].dim() != 1) throw NotRigid(delta_label(rho));
    if (!is_face_of(m.pi.cells[rc], m.pi.cells[tc]))
        throw NotAFace(delta_label(rho) + " of " + delta_label(tau));
    RetractionResult rr;
    const QVec& g = m.pi.cells[rc].rays()[0];
    Rat t = config_height(g, m.r);
    QMat pts(m.n, QVec(m.r));
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.r; ++j) pts[i][j] = g[i * m.r + j];
    rr.s_rho = simplex_subdiv_from_points(pts, t);

    rr.psi.resize(m.n);
    for (int i = 1; i <= m.n; ++i) {
        int pc = m.sections[i - 1].target_cell[rc];
        const Cone& sc = m.pi_plus.cells[pc];
        if (sc.dim() != 1) throw Error("section image of a ray is not a ray");
        const QVec& gen = sc.rays()[0];
        QVec x(gen.begin(), gen.begin() + m.r);
        Rat th = 0;
        for (const Rat& v : x) th += v;
        if (th <= 0) throw Error("moving point at height zero");
        QVec w = scale(t / th, x);
        int found = -1;
        for (size_t v = 0; v < rr.s_rho.vertices.size(); ++v)
            if (rr.s_rho.vertices[v] == w) {
                found = (int)v;
                break;
            }
        if (found < 0) throw Error("retracted point is not a vertex");
        if (found != rr.s_rho.marks[i - 1])
            throw Error("retraction disagrees with the marking");
        rr.psi[i - 1] = found;
    }
    rr.classes.assign(rr.s_rho.vertices.size(), {});
    for (int i = 1; i <= m.n; ++i) rr.classes[rr.psi[i - 1]].push_back(i);
    return rr;
}

CuttingMapResult cutting_map(const DegenModuli& m, const DeltaCombType& rho,
                             const Int& height_factor) {
    if (!m.refined) throw Error("cutting map needs refined lattices");
    if (height_factor < 1) throw Error("bad height factor");
    int rc = lookup_type(m, rho);
    if (rc == 0 || m.pi.cells[rc].dim() != 1) throw NotRigid(delta_label(rho));

    CuttingMapResult R;
    R.rho = rho;
    RetractionResult ret = retraction(m, rho, rho);
    R.s_rho = ret.s_rho;
    R.star = star_fan(m.pi, rc);
    int nr = m.n * m.r;
    int q = nr - 1;
    if (R.star.fan.ambient != q) throw Error("unexpected star quotient rank");

    // integer section of the star projection with columns in the moduli lattice
    const ZMat& B = m.pi.lattice.basis();
    ZMat q0 = to_zmat_checked(matmul(R.star.proj, transpose(to_qmat(B))),
                              "star projection on the lattice");
    ZMat sec(nr, ZVec(q, Int(0)));
    for (int i = 0; i < q; ++i) {
        auto c = solve_z(q0, unit_z(q, i));
        if (!c) throw Error("star projection is not onto the quotient lattice");
        for (int row = 0; row < nr; ++row) {
            Int v = 0;
            for (int k = 0; k < nr; ++k) v += B[k][row] * (*c)[k];
            sec[row][i] = v;
        }
    }

    int V = (int)R.s_rho.vertices.size();
    std::vector<VertexStarData> stars;
    for (int v = 0; v < V; ++v) {
        const std::vector<int>& iv = ret.classes[v];
        if (iv.empty()) {
            R.trivial_vertices.push_back(v);
            continue;
        }
        VertexStarData D = vertex_star(R.s_rho, v);
        GridModuli F = build_pi(D.tf, (int)iv.size());
        R.vertex_ids.push_back(v);
        R.labels.push_back(iv);
        R.vertex_stars.push_back(D.vstar);
        R.vertex_fans.push_back(D.tf);
        R.factors.push_back(std::move(F));
        stars.push_back(std::move(D));
    }
    if (R.factors.empty()) throw Error("no marked vertices");
    R.product = R.factors[0].pi;
    for (size_t f = 1; f < R.factors.size(); ++f)
        R.product = complex_product(R.product, R.factors[f].pi);

    // kappa: per star cell, stack the ray-coordinate values of each point's
    // displacement seen from its vertex
    QMat secq = to_qmat(sec);
    int ncells = R.star.fan.size();
    std::vector<ZMat> mats(ncells);
    std::vector<int> targets(ncells);
    for (int c = 0; c < ncells; ++c) {
        const Cone& sc = R.star.fan.cells[c];
        ZMat M;
        for (size_t f = 0; f < R.factors.size(); ++f) {
            const VertexStarData& D = stars[f];
            for (int j : R.labels[f]) {
                QMat ejsec(secq.begin() + (j - 1) * m.r, secq.begin() + j * m.r);
                QMat loc = matmul(D.vstar.proj, ejsec);
                Cone img = image_cone(loc, sc);
                int vc = minimal_containing_cell(D.vstar.fan, img,
                                                 "star cell maps across the vertex star");
                ZMat W = dual_rows(D, D.set_of_cell[vc]);
                ZMat rows = to_zmat_checked(matmul(to_qmat(W), loc), "cutting map block");
                for (auto& row : rows) M.push_back(std::move(row));
            }
        }
        if ((int)M.size() != R.product.ambient) throw Error("cutting map row mismatch");
        Cone img = image_cone(to_qmat(M), sc);
        targets[c] = minimal_containing_cell(R.product, img,
                                             "star cell image escapes the product");
        mats[c] = std::move(M);
    }
    R.kappa.cell_matrix = std::move(mats);
    R.kappa.target_cell = std::move(targets);

    auto record_failure = [&](const std::string& why) {
        if (R.failure.empty()) R.failure = why;
    };

    auto vm = validate_map(R.star.fan, R.product, R.kappa);
    if (!vm.ok) {
        record_failure("map validation: " + vm.reason);
        R.image_subdivision = false;
    } else {
        auto sub = is_subdivision(R.star.fan, R.product, R.kappa);
        R.image_subdivision = sub.ok;
        if (!sub.ok) record_failure("subdivision: " + sub.reason);
    }

    PreimageFinder pf(R.star.fan, R.kappa);
    bool injective = pf.injective_cells();
    if (!injective) record_failure("a star cell maps without full rank");

    // lattice points of the product support up to the height bound, each with
    // exactly one lattice preimage
    R.lattice_bijective = injective;
    if (injective) {
        Int bound = 4 * m.h_tot;
        long long bnd = bound.convert_to<long long>();
        int D = R.product.ambient;

        // machine-integer mirrors of the per-factor supports and the per-cell
        // solvers; the walk prunes a whole subtree as soon as the coordinate
        // block of some factor leaves that factor's support
        bool fast = bnd <= (1 << 12);
        std::vector<int> block_start(R.factors.size()), ends_at(D + 1, -1);
        std::vector<std::vector<FastCone>> fsup(R.factors.size());
        for (size_t f = 0, off = 0; fast && f < R.factors.size(); ++f) {
            block_start[f] = (int)off;
            off += R.factors[f].pi.ambient;
            ends_at[off] = (int)f;
            for (int ci : R.factors[f].pi.maximal_cells()) {
                FastCone fc;
                if (!fc.load(R.factors[f].pi.cells[ci])) fast = false;
                fsup[f].push_back(std::move(fc));
            }
        }
        std::vector<FastSolveCell> fcells(pf.maxcells.size());
        for (size_t k = 0; fast && k < pf.maxcells.size(); ++k)
            if (!fcells[k].load(pf, k)) fast = false;

        auto fail_at = [&](const char* what, const std::vector<long long>& yv) {
            QVec yq;
            for (long long v : yv) yq.push_back(Rat(v));
            record_failure(std::string(what) + vec_str(yq));
            R.lattice_bijective = false;
        };

        std::vector<long long> yv(D, 0);
        std::function<bool(int, long long)> walk64 = [&](int pos, long long rem) -> bool {
            if (int f = ends_at[pos]; f >= 0) {
                bool in = false;
                for (const FastCone& fc : fsup[f])
                    if (fc.contains(yv.data() + block_start[f])) {
                        in = true;
                        break;
                    }
                if (!in) return false;
            }
            if (pos == D) {
                ++R.lattice_points_checked;
                int found = 0;
                std::vector<long long> xn0;
                long long den0 = 1;
                for (const FastSolveCell& c : fcells) {
                    if (!c.image.contains(yv.data())) continue;
                    std::vector<long long> xn(c.q, 0);
                    for (int i = 0; i < c.q; ++i) {
                        long long s = 0;
                        for (int j = 0; j < D; ++j) s += c.lnum[i][j] * yv[j];
                        xn[i] = s;
                    }
                    bool okc = true;
                    for (int i = 0; i < c.rows && okc; ++i) {
                        long long s = 0;
                        for (int j = 0; j < c.q; ++j) s += c.sys[i][j] * xn[j];
                        if (s != (i < D ? c.den * yv[i] : 0)) okc = false;
                    }
                    if (!okc || !c.cell.contains(xn.data())) continue;
                    long long g = c.den;
                    for (long long v : xn) g = std::gcd(g, v);
                    for (long long& v : xn) v /= g;
                    long long d = c.den / g;
                    if (found == 0) {
                        xn0 = std::move(xn);
                        den0 = d;
                        found = 1;
                    } else if (d != den0 || xn != xn0) {
                        found = 2;
                        break;
                    }
                }
                if (found != 1) {
                    fail_at("lattice point without a unique preimage at ", yv);
                    return true;
                }
                if (den0 != 1) {
                    fail_at("lattice point with a non-integral preimage at ", yv);
                    return true;
                }
                return false;
            }
            for (long long v = 0; v <= rem; ++v) {
                yv[pos] = v;
                if (walk64(pos + 1, rem - v)) return true;
            }
            yv[pos] = 0;
            return false;
        };

        if (fast) {
            walk64(0, bnd);
        } else {
            auto maxp = R.product.maximal_cells();
            ZVec y(D, Int(0));
            std::function<bool(int, long long)> walk = [&](int pos, long long rem) -> bool {
                if (pos == D) {
                    QVec yq = to_qvec(y);
                    bool insup = false;
                    for (int ci : maxp)
                        if (R.product.cells[ci].contains(yq)) {
                            insup = true;
                            break;
                        }
                    if (!insup) return false;
                    ++R.lattice_points_checked;
                    auto pre = pf.preimages(yq);
                    if (pre.size() != 1) {
                        record_failure("lattice point without a unique preimage at " +
                                       vec_str(yq));
                        R.lattice_bijective = false;
                        return true;
                    }
                    for (const Rat& e : (*pre.begin())) {
                        if (den(e) != 1) {
                            record_failure("lattice point with a non-integral preimage at " +
                                           vec_str(yq));
                            R.lattice_bijective = false;
                            return true;
                        }
                    }
                    return false;
                }
                for (long long v = 0; v <= rem; ++v) {
                    y[pos] = v;
                    if (walk(pos + 1, rem - v)) return true;
                }
                return false;
            };
            walk(0, bnd);
        }
    }

    // support bijectivity on deterministic samples, plus the slice-level
    // cross-check of star-side samples at a large lifting height
    R.support_bijective = injective;
    if (injective) {
        auto fwd = sample_points(R.product, 100);
        auto bwd = sample_points(R.star.fan, 100);

        for (const QVec& y : fwd) {
            ++R.samples_checked;
            auto pre = pf.preimages(y);
            if (pre.size() != 1) {
                record_failure("sample without a unique preimage at " + vec_str(y));
                R.support_bijective = false;
                break;
            }
        }

        // lifting height: comfortably above every sample's own height
        Rat hmax = 0;
        Int dmax = 1;
        std::vector<std::pair<int, QVec>> bwd_cells;
        for (const QVec& x : bwd) {
            for (const Rat& e : x) dmax = std::max(dmax, den(e));
            QVec z = matvec(secq, x);
            Rat hz = config_height(z, m.r);
            if (abs(hz) > hmax) hmax = abs(hz);
            int cell = -1;
            for (int ci : pf.maxcells)
                if (R.star.fan.cells[ci].contains(x)) {
                    cell = ci;
                    break;
                }
            if (cell < 0) throw Error("sample escaped its own fan");
            bwd_cells.push_back({cell, x});
        }
        Int hceil = num(hmax) / den(hmax) + 1;
        Int T = height_factor * m.h_tot * dmax * (1 + hceil);
        R.slice_height = T;

        const QVec& g = m.pi.cells[rc].rays()[0];
        Rat hrho = config_height(g, m.r);
        for (auto& [cell, x] : bwd_cells) {
            if (!R.support_bijective) break;
            ++R.samples_checked;
            QVec kx = matvec(to_qmat(R.kappa.cell_matrix[cell]), x);
            auto pre = pf.preimages(kx);
            if (pre.size() != 1 || pre[0] != x) {
                record_failure("sample image has a different preimage at " + vec_str(x));
                R.support_bijective = false;
                break;
            }
            // exact lift at slice height T
            QVec z = matvec(secq, x);
            Rat s = (Rat(T) - config_height(z, m.r)) / hrho;
            QVec lift = add(z, scale(s, g));
            int src = R.star.source_cells[cell];
            if (s < 0 || !m.pi.cells[src].contains(lift))
                throw SliceTooSmall("sample " + vec_str(x));
            // each point of the lifted configuration must sit inside the open
            // star of its vertex, in the cell matching its ray coordinates
            int row0 = 0;
            for (size_t f = 0; f < R.factors.size(); ++f) {
                const VertexStarData& D = stars[f];
                int kv = D.rays;
                for (size_t l = 0; l < R.labels[f].size(); ++l) {
                    int j = R.labels[f][l];
                    QVec uj(lift.begin() + (j - 1) * m.r, lift.begin() + j * m.r);
                    int cj = -1;
                    for (int ci = 0; ci < R.s_rho.fan.size(); ++ci)
                        if (in_relint(R.s_rho.fan.cells[ci], uj)) {
                            cj = ci;
                            break;
                        }
                    if (cj < 0) throw Error("lifted point escaped the slice");
                    int vtx = R.vertex_ids[f];
                    if (!R.s_rho.fan.cells[cj].contains(R.s_rho.vertices[vtx]))
                        throw SliceTooSmall("point " + std::to_string(j) + " of sample " +
                                            vec_str(x));
                    // the quotient cell of the displacement must come from cj
                    QVec locv = matvec(D.vstar.proj, uj);
                    int vc = -1;
                    for (int ci = 0; ci < D.vstar.fan.size(); ++ci)
                        if (in_relint(D.vstar.fan.cells[ci], locv)) {
                            vc = ci;
                            break;
                        }
                    if (vc < 0 || D.vstar.source_cells[vc] != cj)
                        throw Error("lift disagrees with the vertex star");
                    // ray coordinates of the displacement equal the map's value
                    ZMat W = dual_rows(D, D.set_of_cell[vc]);
                    QVec coords = matvec(to_qmat(W), locv);
                    for (int kk = 0; kk < kv; ++kk)
                        if (coords[kk] != kx[row0 + kk])
                            throw Error("lift disagrees with the cutting map");
                    row0 += kv;
                }
            }
        }
    }
    return R;
}

DegenReport degeneration_report(const DegenModuli& m, const DeltaCombType& rho) {
    DegenReport rep;
    rep.cut = cutting_map(m, rho);
    rep.rho = rho;
    rep.s_rho = rep.cut.s_rho;
    RetractionResult ret = retraction(m, rho, rho);
    int V = (int)rep.s_rho.vertices.size();
    for (int v = 0; v < V; ++v) {
        DegenFactor f;
        f.vertex = v;
        f.labels = ret.classes[v];
        VertexStarData D = vertex_star(rep.s_rho, v);
        f.fan = D.tf;
        f.rays = D.rays;
        rep.factors.push_back(std::move(f));
    }
    rep.rigid_count = (int)rigid_types(m).size();
    return rep;
}

namespace {

int tree_edge_total(const std::vector<RootedTree>& trees) {
    int E = 0;
    for (const RootedTree& t : trees) {
        if (t.vcount() < 1 || t.parent[0] != -1) throw Error("malformed tree");
        if ((int)t.legs.size() != t.vcount()) throw Error("malformed tree legs");
        for (int v = 1; v < t.vcount(); ++v)
            if (t.parent[v] < 0 || t.parent[v] >= v) throw Error("tree is not topologically numbered");
        E += t.vcount() - 1;
    }
    return E;
}

ZMat blockdiag_eye(const ZMat& A, int eyes) {
    int rows = (int)A.size();
    int cols = rows ? (int)A[0].size() : 0;
    ZMat out(rows + eyes, ZVec(cols + eyes, Int(0)));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) out[i][j] = A[i][j];
    for (int e = 0; e < eyes; ++e) out[rows + e][cols + e] = 1;
    return out;
}

}  // namespace

MarkerPlacement p0_on_subdivision(const DegenModuli& m, const DeltaCombType& plus_type,
                                  const std::vector<RootedTree>& trees) {
    auto it = m.type_index_plus.find(plus_type);
    if (it == m.type_index_plus.end()) throw Error("unknown family type");
    int pc = it->second;
    if (pc == 0) throw Error("placeholder type has no configurations");
    int bc = m.p.target_cell[pc];
    int E = tree_edge_total(trees);
    MarkerPlacement mp;
    mp.source = cone_product(m.pi_plus.cells[pc], Cone::orthant(E));
    mp.base = cone_product(m.pi.cells[bc], Cone::orthant(E));
    mp.proj = blockdiag_eye(m.p_matrix, E);
    return mp;
}

MarkerPlacement p0_on_tree_vertex(const DegenModuli& m, const DeltaCombType& type,
                                  const std::vector<RootedTree>& trees) {
    int bc = lookup_type(m, type);
    if (bc == 0) throw Error("placeholder type has no configurations");
    int E = tree_edge_total(trees);
    MarkerPlacement mp;
    mp.source = cone_product(m.pi.cells[bc], Cone::orthant(E));
    mp.base = mp.source;
    mp.proj = zidentity(m.n * m.r + E);
    return mp;
}

MarkerPlacement p0_on_tree_edge(const DegenModuli& m, const DeltaCombType& type,
                                const std::vector<RootedTree>& trees, int tree) {
    int bc = lookup_type(m, type);
    if (bc == 0) throw Error("placeholder type has no configurations");
    int E = tree_edge_total(trees);
    if (tree < 0 || tree >= (int)trees.size()) throw Error("bad tree index");
    if (trees[tree].vcount() < 2) throw Error("tree has no edge");
    int e0 = 0;
    for (int t = 0; t < tree; ++t) e0 += trees[t].vcount() - 1;
    int nr = m.n * m.r;
    MarkerPlacement mp;
    mp.source = cone_product(m.pi.cells[bc], Cone::orthant(E + 1));
    mp.base = cone_product(m.pi.cells[bc], Cone::orthant(E));
    mp.proj = ZMat(nr + E, ZVec(nr + E + 1, Int(0)));
    for (int i = 0; i < nr + E; ++i) mp.proj[i][i] = 1;
    mp.proj[nr + e0][nr + E] = 1;
    return mp;
}

bool placement_flat(const MarkerPlacement& mp) {
    return image_cone(to_qmat(mp.proj), mp.source) == mp.base;
}

}  // namespace tropfm
