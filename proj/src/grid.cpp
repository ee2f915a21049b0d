#include "tropfm/grid.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "tropfm/errors.hpp"
#include "tropfm/linalg.hpp"

namespace tropfm {

namespace {

using Blocks = std::vector<std::vector<int>>;

constexpr long long kFacePairsLimit = 2500;

void ordered_partitions_rec(const std::vector<int>& rest, Blocks& acc,
                            std::vector<Blocks>& out) {
    if (rest.empty()) {
        out.push_back(acc);
        return;
    }
    int m = (int)rest.size();
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
        std::vector<int> block, remaining;
        for (int k = 0; k < m; ++k)
            ((mask >> k) & 1 ? block : remaining).push_back(rest[k]);
        acc.push_back(std::move(block));
        ordered_partitions_rec(remaining, acc, out);
        acc.pop_back();
    }
}

// All ordered partitions of {0} with the given positive elements appended,
// element 0 anchored in the first block; sorted canonically.
std::vector<Blocks> anchored_partitions(const std::vector<int>& elems) {
    std::vector<Blocks> out;
    int m = (int)elems.size();
    for (unsigned zmask = 0; zmask < (1u << m); ++zmask) {
        std::vector<int> zero{0}, rest;
        for (int k = 0; k < m; ++k)
            ((zmask >> k) & 1 ? zero : rest).push_back(elems[k]);
        Blocks acc{std::move(zero)};
        ordered_partitions_rec(rest, acc, out);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Universal-family per-ray partitions: the moving point x lands in each block
// or forms a new block in each gap above the zero block.
std::vector<Blocks> insert_x_everywhere(const std::vector<Blocks>& base, int x) {
    std::vector<Blocks> out;
    for (const auto& P : base) {
        for (size_t b = 0; b < P.size(); ++b) {
            Blocks q = P;
            q[b].push_back(x);
            out.push_back(std::move(q));
        }
        for (size_t g = 1; g <= P.size(); ++g) {
            Blocks q = P;
            q.insert(q.begin() + (long)g, {x});
            out.push_back(std::move(q));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

uint32_t zero_mask(const Blocks& P) {
    uint32_t z = 0;
    for (int e : P[0])
        if (e > 0) z |= 1u << (e - 1);
    return z;
}

std::vector<uint32_t> zero_masks(const std::vector<Blocks>& parts) {
    std::vector<uint32_t> z(parts.size());
    for (size_t i = 0; i < parts.size(); ++i) z[i] = zero_mask(parts[i]);
    return z;
}

std::vector<char> index_mask(const TropFan& fan) {
    if (fan.r > 20) throw SizeLimit("fans with more than 20 rays are not supported");
    std::vector<char> has(1u << fan.r, 0);
    for (const auto& I : fan.cone_index) {
        uint32_t m = 0;
        for (int i : I) m |= 1u << i;
        has[m] = 1;
    }
    return has;
}

// Enumerates per-ray type products whose per-element supports are cones of the
// fan.  Since the cone index is downward closed, a partial product with an
// invalid partial support has no valid completion, so the branch is pruned.
template <class Leaf>
void enumerate_types(const TropFan& fan, const std::vector<Blocks>& per_ray,
                     const std::vector<uint32_t>& zmask, int nelem,
                     const std::vector<char>& has_mask, Leaf&& leaf) {
    int r = fan.r;
    std::vector<int> idx(r, 0);
    std::vector<uint32_t> supp(nelem, 0);
    auto rec = [&](auto&& self, int j) -> void {
        if (j == r) {
            leaf(idx);
            return;
        }
        for (int t = 0; t < (int)per_ray.size(); ++t) {
            uint32_t z = zmask[t];
            bool ok = true;
            for (int e = 0; e < nelem; ++e) {
                if ((z >> e) & 1) continue;
                supp[e] |= 1u << j;
                if (!has_mask[supp[e]]) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                idx[j] = t;
                self(self, j + 1);
            }
            for (int e = 0; e < nelem; ++e)
                if (!((z >> e) & 1)) supp[e] &= ~(1u << j);
        }
    };
    rec(rec, 0);
}

GridCombType make_type(int n, bool extra, const std::vector<Blocks>& per_ray,
                       const std::vector<int>& idx) {
    GridCombType t;
    t.n = n;
    t.extra = extra;
    t.rays.reserve(idx.size());
    for (int k : idx) t.rays.push_back(per_ray[k]);
    return t;
}

int block_pos(const GridCombType& t, int e) {
    if (!t.extra) return e - 1;
    return e == t.n + 1 ? 0 : e;
}

Blocks dup_blocks(const Blocks& P, int i, int x) {
    Blocks q = P;
    for (auto& blk : q)
        if (std::binary_search(blk.begin(), blk.end(), i)) {
            blk.push_back(x);
            break;
        }
    return q;
}

Blocks drop_x_blocks(const Blocks& P, int x) {
    Blocks q = P;
    for (size_t b = 0; b < q.size(); ++b) {
        auto& blk = q[b];
        if (!blk.empty() && blk.back() == x) {
            blk.pop_back();
            if (blk.empty()) q.erase(q.begin() + (long)b);
            break;
        }
    }
    return q;
}

GridCombType dup_type(const GridCombType& t, int i) {
    GridCombType q = t;
    q.extra = true;
    for (auto& P : q.rays) P = dup_blocks(P, i, t.n + 1);
    return q;
}

GridCombType drop_x_type(const GridCombType& t) {
    GridCombType q = t;
    q.extra = false;
    for (auto& P : q.rays) P = drop_x_blocks(P, t.n + 1);
    return q;
}

// Exact cone lookup over a complex without copying cells.
struct CellFinder {
    const ConeComplex* c;
    std::vector<int> order;

    explicit CellFinder(const ConeComplex& cc) : c(&cc) {
        order.resize(cc.size());
        for (int i = 0; i < cc.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return cc.cells[a] < cc.cells[b]; });
    }

    int find(const Cone& k) const {
        auto it = std::lower_bound(order.begin(), order.end(), k,
                                   [&](int a, const Cone& kk) { return c->cells[a] < kk; });
        if (it == order.end() || !(c->cells[*it] == k)) return -1;
        return *it;
    }
};

// Conical image of a cell.  Fast path when the distinct nonzero ray images
// stay linearly independent (always the case for grid cones, whose rays are
// staircase indicators); falls back to the general computation otherwise.
Cone image_cone_of(const QMat& M, const Cone& c, int target_dim) {
    QMat img;
    for (const auto& ry : c.rays()) {
        QVec v = matvec(M, ry);
        if (!is_zero(v)) img.push_back(std::move(v));
    }
    std::sort(img.begin(), img.end());
    img.erase(std::unique(img.begin(), img.end()), img.end());
    if (rank(img) == (int)img.size()) return Cone::from_extreme_rays(target_dim, img);
    return image_cone(M, c);
}

}  // namespace

TropPointTuple tropicalise(const QMat& vals, const TropFan& sigma) {
    TropPointTuple u;
    u.n = (int)vals.size();
    u.r = sigma.r;
    for (size_t i = 0; i < vals.size(); ++i) {
        if ((int)vals[i].size() != sigma.r)
            throw Error("tropicalise: row width does not match the ray count");
        std::vector<int> supp;
        for (int j = 0; j < sigma.r; ++j) {
            if (vals[i][j] < 0) throw Error("tropicalise: negative coordinate");
            if (vals[i][j] > 0) supp.push_back(j);
        }
        if (!sigma.has(supp)) throw NotInSupport((int)i + 1);
    }
    u.coords = vals;
    return u;
}

GridCombType grid_comb_type(const TropPointTuple& u) {
    GridCombType t;
    t.n = u.n;
    t.rays.resize(u.r);
    for (int j = 0; j < u.r; ++j) {
        std::map<Rat, std::vector<int>> by_val;
        by_val[Rat(0)].push_back(0);
        for (int i = 1; i <= u.n; ++i) by_val[u.coords[i - 1][j]].push_back(i);
        for (auto& [v, blk] : by_val) t.rays[j].push_back(std::move(blk));
    }
    return t;
}

int grid_codim(const GridCombType& t) {
    int c = 0;
    for (const auto& P : t.rays) c += (int)P.size() - 1;
    return c;
}

std::string grid_label(const GridCombType& t) {
    std::string s = "G";
    for (const auto& P : t.rays) {
        s += '[';
        for (size_t b = 0; b < P.size(); ++b) {
            if (b) s += '|';
            for (size_t k = 0; k < P[b].size(); ++k) {
                if (k) s += ',';
                int e = P[b][k];
                if (t.extra && e == t.n + 1)
                    s += 'x';
                else
                    s += std::to_string(e);
            }
        }
        s += ']';
    }
    return s;
}

GridCombType parse_grid_label(const std::string& s) {
    if (s.empty() || s[0] != 'G') throw ParseError("grid label must start with 'G'");
    std::vector<std::vector<std::vector<std::string>>> toks;
    size_t pos = 1;
    while (pos < s.size()) {
        if (s[pos] != '[') throw ParseError("grid label: expected '['");
        size_t close = s.find(']', pos);
        if (close == std::string::npos) throw ParseError("grid label: missing ']'");
        std::vector<std::vector<std::string>> blocks;
        std::vector<std::string> block;
        std::string tok;
        for (size_t k = pos + 1; k <= close; ++k) {
            char ch = s[k];
            if (ch == ',' || ch == '|' || ch == ']') {
                if (tok.empty()) throw ParseError("grid label: empty element");
                block.push_back(std::move(tok));
                tok.clear();
                if (ch != ',') {
                    blocks.push_back(std::move(block));
                    block.clear();
                }
            } else {
                tok += ch;
            }
        }
        toks.push_back(std::move(blocks));
        pos = close + 1;
    }
    if (toks.empty()) throw ParseError("grid label: no ray groups");

    int n = 0;
    bool extra = false;
    auto parse_elem = [&](const std::string& e) -> int {
        if (e == "x") return -1;
        if (e.size() > 1 && e[0] == '0') throw ParseError("grid label: leading zero");
        for (char c : e)
            if (!std::isdigit((unsigned char)c)) throw ParseError("grid label: bad element '" + e + "'");
        return std::stoi(e);
    };
    for (const auto& blocks : toks)
        for (const auto& blk : blocks)
            for (const auto& e : blk) {
                int v = parse_elem(e);
                if (v < 0)
                    extra = true;
                else
                    n = std::max(n, v);
            }

    GridCombType t;
    t.n = n;
    t.extra = extra;
    for (const auto& blocks : toks) {
        Blocks P;
        std::vector<char> seen(n + 2, 0);
        for (const auto& blk : blocks) {
            std::vector<int> b;
            for (const auto& e : blk) {
                int v = parse_elem(e);
                if (v < 0) v = n + 1;
                if (seen[v]) throw ParseError("grid label: repeated element");
                seen[v] = 1;
                b.push_back(v);
            }
            std::sort(b.begin(), b.end());
            P.push_back(std::move(b));
        }
        for (int e = 0; e <= n; ++e)
            if (!seen[e]) throw ParseError("grid label: ray group missing element " + std::to_string(e));
        if ((bool)seen[n + 1] != extra)
            throw ParseError("grid label: the moving point must appear on every ray or none");
        if (P.empty() || P[0].empty() || P[0][0] != 0)
            throw ParseError("grid label: element 0 must lie in the first block");
        t.rays.push_back(std::move(P));
    }
    return t;
}

std::vector<int> type_support(const GridCombType& t, int element) {
    int top = t.n + (t.extra ? 1 : 0);
    if (element < 1 || element > top) throw Error("type_support: no such element");
    std::vector<int> out;
    for (int j = 0; j < t.r(); ++j) {
        const auto& blk0 = t.rays[j][0];
        if (!std::binary_search(blk0.begin(), blk0.end(), element)) out.push_back(j);
    }
    return out;
}

TropFan support_fan(const std::vector<GridCombType>& types) {
    if (types.empty()) throw Error("support_fan: no types");
    int r = types[0].r();
    std::vector<std::vector<int>> sets;
    for (const auto& t : types) {
        if (t.r() != r) throw Error("support_fan: mixed ray counts");
        int top = t.n + (t.extra ? 1 : 0);
        for (int e = 1; e <= top; ++e) sets.push_back(type_support(t, e));
    }
    return TropFan::from_sets(r, sets);
}

Cone type_cone(const GridCombType& t) {
    int r = t.r();
    int D = (t.n + (t.extra ? 1 : 0)) * r;
    QMat rays;
    for (int j = 0; j < r; ++j) {
        const auto& P = t.rays[j];
        for (size_t l = 1; l < P.size(); ++l) {
            QVec v(D, Rat(0));
            for (size_t b = l; b < P.size(); ++b)
                for (int e : P[b]) v[block_pos(t, e) * r + j] = 1;
            rays.push_back(std::move(v));
        }
    }
    return Cone::from_extreme_rays(D, rays);
}

MarkedGridSubdivision grid_from_points(const TropPointTuple& u) {
    MarkedGridSubdivision g;
    g.n = u.n;
    g.r = u.r;
    g.marking = u.coords;
    g.breaks.resize(u.r);
    for (int j = 0; j < u.r; ++j) {
        std::set<Rat> vals;
        for (int i = 0; i < u.n; ++i)
            if (u.coords[i][j] > 0) vals.insert(u.coords[i][j]);
        g.breaks[j].assign(vals.begin(), vals.end());
    }
    return g;
}

TropPointTuple points_from_grid(const MarkedGridSubdivision& g) {
    for (int j = 0; j < g.r; ++j) {
        const auto& br = g.breaks[j];
        for (size_t k = 0; k < br.size(); ++k) {
            if (br[k] <= 0) throw Error("points_from_grid: breaks must be positive");
            if (k > 0 && br[k] <= br[k - 1])
                throw Error("points_from_grid: breaks must increase strictly");
        }
        std::set<Rat> unmarked(br.begin(), br.end());
        for (int i = 0; i < g.n; ++i) {
            const Rat& v = g.marking[i][j];
            if (v != 0 && !std::binary_search(br.begin(), br.end(), v))
                throw Error("points_from_grid: marking coordinate is not a break");
            unmarked.erase(v);
        }
        if (!unmarked.empty())
            throw Error("points_from_grid: some break carries no marking");
    }
    TropPointTuple u;
    u.n = g.n;
    u.r = g.r;
    u.coords = g.marking;
    return u;
}

GridModuli build_pi(const TropFan& sigma, int n, long long budget, long long plus_limit) {
    if (n < 1) throw Error("build_pi: n must be at least 1");
    if (n > 24) throw SizeLimit("build_pi: more than 24 markings");
    if (sigma.r < 1) throw Error("build_pi: the fan must have at least one ray");

    GridModuli m;
    m.sigma = sigma;
    m.n = n;
    auto has = index_mask(sigma);

    std::vector<int> elems;
    for (int e = 1; e <= n; ++e) elems.push_back(e);
    std::vector<Blocks> parts = anchored_partitions(elems);
    std::vector<uint32_t> zmask = zero_masks(parts);

    int r = sigma.r;
    int D = n * r;
    int Dp = (n + 1) * r;

    m.pi = ConeComplex(D);
    enumerate_types(sigma, parts, zmask, n, has, [&](const std::vector<int>& idx) {
        if ((long long)m.types.size() >= budget)
            throw SizeLimit("more than " + std::to_string(budget) + " grid types");
        GridCombType t = make_type(n, false, parts, idx);
        int id = m.pi.add_cell(type_cone(t), grid_label(t));
        m.type_index.emplace(t, id);
        m.types.push_back(std::move(t));
    });
    if (m.pi.size() <= kFacePairsLimit) compute_face_pairs(m.pi);

    std::vector<Blocks> parts_plus = insert_x_everywhere(parts, n + 1);
    std::vector<uint32_t> zmask_plus = zero_masks(parts_plus);
    long long count = 0;
    enumerate_types(sigma, parts_plus, zmask_plus, n + 1, has,
                    [&](const std::vector<int>&) { ++count; });
    m.plus_cell_count = count;

    if (count <= plus_limit) {
        m.plus_materialized = true;
        m.pi_plus = ConeComplex(Dp);
        enumerate_types(sigma, parts_plus, zmask_plus, n + 1, has,
                        [&](const std::vector<int>& idx) {
            GridCombType t = make_type(n, true, parts_plus, idx);
            int id = m.pi_plus.add_cell(type_cone(t), grid_label(t));
            m.type_index_plus.emplace(t, id);
            m.types_plus.push_back(std::move(t));
        });
        if (m.pi_plus.size() <= kFacePairsLimit) compute_face_pairs(m.pi_plus);
    }

    m.p_matrix.assign(D, ZVec(Dp, Int(0)));
    for (int a = 0; a < D; ++a) m.p_matrix[a][r + a] = 1;
    for (int i = 1; i <= n; ++i) {
        ZMat s(Dp, ZVec(D, Int(0)));
        for (int j = 0; j < r; ++j) s[j][(i - 1) * r + j] = 1;
        for (int a = 0; a < D; ++a) s[r + a][a] = 1;
        m.section_matrices.push_back(std::move(s));
    }
    QMat pq = to_qmat(m.p_matrix);
    for (int i = 0; i < n; ++i)
        if (matmul(pq, to_qmat(m.section_matrices[i])) != qidentity(D))
            throw Error("build_pi: projection does not invert a section");

    if (m.plus_materialized) {
        std::vector<int> ptargets(m.pi_plus.size());
        for (int c = 0; c < (int)m.types_plus.size(); ++c)
            ptargets[c] = m.type_index.at(drop_x_type(m.types_plus[c]));
        m.p = ComplexMap::uniform(m.p_matrix, ptargets);
        for (int i = 1; i <= n; ++i) {
            std::vector<int> st(m.pi.size());
            for (int c = 0; c < (int)m.types.size(); ++c)
                st[c] = m.type_index_plus.at(dup_type(m.types[c], i));
            m.sections.push_back(ComplexMap::uniform(m.section_matrices[i - 1], st));
        }
    }
    return m;
}

namespace {

WeakSSReport verify_materialized(const GridModuli& m) {
    WeakSSReport rep;
    CellFinder in_plus(m.pi_plus), in_pi(m.pi);
    int D = m.n * m.sigma.r;
    int Dp = D + m.sigma.r;

    bool witnessed = false;
    auto mark = [&](int cell, const std::string& lab, int section = 0) {
        if (witnessed) return;
        witnessed = true;
        rep.witness_section = section;
        rep.witness_cell = cell;
        rep.witness_label = lab;
    };

    for (int i = 1; i <= m.n && rep.transversality; ++i) {
        QMat sq = to_qmat(m.section_matrices[i - 1]);
        for (int c = 0; c < m.pi.size(); ++c) {
            Cone img = image_cone_of(sq, m.pi.cells[c], Dp);
            if (in_plus.find(img) < 0) {
                rep.transversality = false;
                mark(c, m.pi.labels[c], i);
                break;
            }
            ++rep.cells_checked;
        }
    }

    QMat pq = to_qmat(m.p_matrix);
    for (int c = 0; c < m.pi_plus.size(); ++c) {
        Cone img = image_cone_of(pq, m.pi_plus.cells[c], D);
        int tgt = in_pi.find(img);
        if (tgt < 0) {
            if (rep.flatness) {
                rep.flatness = false;
                mark(c, m.pi_plus.labels[c]);
            }
            continue;
        }
        ++rep.plus_cells_checked;
        if (rep.reducedness) {
            IntLattice L = m.pi_plus.cell_lattice(c);
            if (lattice_image(m.p_matrix, L) != m.pi.cell_lattice(tgt)) {
                rep.reducedness = false;
                mark(c, m.pi_plus.labels[c]);
            }
        }
    }
    return rep;
}

// Streamed verification: every condition is a product over rays of per-ray
// factor conditions (cones, maps, and lattices all decompose along the
// per-ray coordinate blocks), so each factor is checked exactly once and the
// product types are then enumerated to confirm support validity and image
// membership.
WeakSSReport verify_streamed(const GridModuli& m) {
    WeakSSReport rep;
    int n = m.n;
    auto has = index_mask(m.sigma);

    std::vector<int> elems;
    for (int e = 1; e <= n; ++e) elems.push_back(e);
    std::vector<Blocks> parts = anchored_partitions(elems);
    std::vector<uint32_t> zmask = zero_masks(parts);
    std::vector<Blocks> parts_plus = insert_x_everywhere(parts, n + 1);
    std::vector<uint32_t> zmask_plus = zero_masks(parts_plus);

    auto find_part = [](const std::vector<Blocks>& v, const Blocks& b) -> int {
        auto it = std::lower_bound(v.begin(), v.end(), b);
        return (it != v.end() && *it == b) ? int(it - v.begin()) : -1;
    };
    auto local_rays = [&](const Blocks& P, bool extra) {
        int d = n + (extra ? 1 : 0);
        ZMat rays;
        for (size_t l = 1; l < P.size(); ++l) {
            ZVec v(d, Int(0));
            for (size_t b = l; b < P.size(); ++b)
                for (int e : P[b]) v[extra ? (e == n + 1 ? 0 : e) : e - 1] = 1;
            rays.push_back(std::move(v));
        }
        std::sort(rays.begin(), rays.end());
        return rays;
    };
    auto factor_witness = [](const char* what, size_t k) {
        return std::string(what) + " factor " + std::to_string(k);
    };

    ZMat dropm(n, ZVec(n + 1, Int(0)));
    for (int a = 0; a < n; ++a) dropm[a][a + 1] = 1;

    std::vector<int> drop_of(parts_plus.size());
    for (size_t tp = 0; tp < parts_plus.size(); ++tp) {
        Blocks dropped = drop_x_blocks(parts_plus[tp], n + 1);
        int d = find_part(parts, dropped);
        drop_of[tp] = d;
        ZMat prays = local_rays(parts_plus[tp], true);
        ZMat drays = local_rays(dropped, false);
        ZMat img;
        for (const auto& v : prays) {
            ZVec w(v.begin() + 1, v.end());
            if (!is_zero_z(w)) img.push_back(std::move(w));
        }
        std::sort(img.begin(), img.end());
        img.erase(std::unique(img.begin(), img.end()), img.end());
        if (d < 0 || img != drays) {
            rep.flatness = false;
            rep.witness_label = factor_witness("projection", tp);
            return rep;
        }
        IntLattice Lp = IntLattice::from_rows(n + 1, prays);
        IntLattice Ld = IntLattice::from_rows(n, drays);
        if (Lp.saturation() != Lp || Ld.saturation() != Ld ||
            lattice_image(dropm, Lp) != Ld) {
            rep.reducedness = false;
            rep.witness_label = factor_witness("lattice", tp);
            return rep;
        }
    }

    std::vector<std::vector<int>> dup_of(n, std::vector<int>(parts.size()));
    for (size_t s = 0; s < parts.size(); ++s) {
        ZMat brays = local_rays(parts[s], false);
        for (int i = 1; i <= n; ++i) {
            Blocks dupd = dup_blocks(parts[s], i, n + 1);
            int d = find_part(parts_plus, dupd);
            dup_of[i - 1][s] = d;
            ZMat img;
            for (const auto& v : brays) {
                ZVec w(n + 1, Int(0));
                w[0] = v[i - 1];
                for (int a = 0; a < n; ++a) w[a + 1] = v[a];
                img.push_back(std::move(w));
            }
            std::sort(img.begin(), img.end());
            if (d < 0 || img != local_rays(dupd, true)) {
                rep.transversality = false;
                rep.witness_section = i;
                rep.witness_label = factor_witness("section", s);
                return rep;
            }
        }
    }

    // Product assembly: collect the base types (their per-ray index tuples) and
    // confirm that every streamed universal-family type projects to one.
    std::map<std::vector<int>, int> base_ids;
    long long base_count = 0;
    enumerate_types(m.sigma, parts, zmask, n, has, [&](const std::vector<int>& idx) {
        base_ids.emplace(idx, (int)base_count);
        ++base_count;
    });
    if (base_count != m.pi.size()) {
        rep.transversality = false;
        rep.witness_label = "base cell count drifted between build and verify";
        return rep;
    }
    rep.cells_checked = base_count;

    std::vector<int> dtuple(m.sigma.r);
    enumerate_types(m.sigma, parts_plus, zmask_plus, n + 1, has,
                    [&](const std::vector<int>& idx) {
        ++rep.plus_cells_checked;
        for (size_t j = 0; j < idx.size(); ++j) dtuple[j] = drop_of[idx[j]];
        if (!base_ids.count(dtuple) && rep.flatness) {
            rep.flatness = false;
            rep.witness_label = "projected type is not a base cell";
        }
    });
    if (rep.plus_cells_checked != m.plus_cell_count && rep.flatness) {
        rep.flatness = false;
        rep.witness_label = "universal-family cell count drifted between build and verify";
    }
    return rep;
}

}  // namespace

WeakSSReport verify_weak_ss(const GridModuli& m) {
    if (m.plus_materialized) return verify_materialized(m);
    return verify_streamed(m);
}

}  // namespace tropfm
