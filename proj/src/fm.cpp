#include "tropfm/fm.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>
#include <utility>

#include "tropfm/errors.hpp"

namespace tropfm {

namespace {

std::vector<std::vector<int>> children_of(const RootedTree& t) {
    std::vector<std::vector<int>> kids(t.vcount());
    for (int v = 1; v < t.vcount(); ++v) kids[t.parent[v]].push_back(v);
    return kids;
}

std::string code_at(const RootedTree& t, const std::vector<std::vector<int>>& kids, int v) {
    std::vector<std::string> toks;
    for (int l : t.legs[v]) toks.push_back("l" + std::to_string(l));
    for (int c : kids[v]) toks.push_back(code_at(t, kids, c));
    std::sort(toks.begin(), toks.end());
    std::string s = "(";
    for (size_t i = 0; i < toks.size(); ++i) {
        if (i) s += ",";
        s += toks[i];
    }
    s += ")";
    return s;
}

// Appends a copy of frag below vertex `at`; frag's own root becomes the child.
void attach(RootedTree& acc, int at, const RootedTree& frag) {
    int off = acc.vcount();
    for (int v = 0; v < frag.vcount(); ++v) {
        acc.parent.push_back(v == 0 ? at : frag.parent[v] + off);
        acc.legs.push_back(frag.legs[v]);
    }
}

void combine_blocks(const std::vector<std::vector<RootedTree>>& opts, size_t i, int left,
                    RootedTree& acc, std::vector<RootedTree>& out) {
    if (i == opts.size()) {
        out.push_back(acc);
        return;
    }
    for (const auto& frag : opts[i]) {
        if (frag.vcount() > left) continue;
        size_t save = acc.parent.size();
        attach(acc, 0, frag);
        combine_blocks(opts, i + 1, left - frag.vcount(), acc, out);
        acc.parent.resize(save);
        acc.legs.resize(save);
    }
}

// All trees whose vertex 0 carries some legs of S and whose children account
// for the rest, using at most `budget` vertices below vertex 0.  When
// `constrained`, vertex 0 is itself a non-root vertex and needs
// #children + #legs >= 2; every deeper vertex is always constrained.  Each
// child's leg set must have size >= 2, or no stable subtree could sit there.
void expand_vertex(const std::vector<int>& S, int budget, bool constrained,
                   std::vector<RootedTree>& out) {
    int m = (int)S.size();
    std::vector<std::vector<int>> blocks;
    std::vector<int> root_legs;

    auto emit = [&]() {
        if (constrained && (int)blocks.size() + (int)root_legs.size() < 2) return;
        if ((int)blocks.size() > budget) return;
        std::vector<std::vector<RootedTree>> opts;
        opts.reserve(blocks.size());
        for (const auto& b : blocks) {
            std::vector<RootedTree> o;
            expand_vertex(b, budget - 1, true, o);
            if (o.empty()) return;
            opts.push_back(std::move(o));
        }
        RootedTree acc;
        acc.legs[0] = root_legs;
        combine_blocks(opts, 0, budget, acc, out);
    };

    auto part = [&](auto&& self, const std::vector<int>& R) -> void {
        if (R.empty()) {
            emit();
            return;
        }
        int a = R[0];
        std::vector<int> tail(R.begin() + 1, R.end());
        int tm = (int)tail.size();
        for (unsigned bm = 1; bm < (1u << tm); ++bm) {
            std::vector<int> blk{a}, rem;
            for (int i = 0; i < tm; ++i) (((bm >> i) & 1) ? blk : rem).push_back(tail[i]);
            blocks.push_back(std::move(blk));
            self(self, rem);
            blocks.pop_back();
        }
    };

    for (unsigned lm = 0; lm < (1u << m); ++lm) {
        root_legs.clear();
        std::vector<int> rest;
        for (int i = 0; i < m; ++i) (((lm >> i) & 1) ? root_legs : rest).push_back(S[i]);
        part(part, rest);
    }
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s;
}

}  // namespace

std::vector<std::vector<int>> marking_classes(const GridCombType& t) {
    int top = t.n + (t.extra ? 1 : 0);
    std::map<std::vector<int>, std::vector<int>> by_pos;
    for (int e = 1; e <= top; ++e) {
        std::vector<int> pos;
        pos.reserve(t.rays.size());
        for (const auto& P : t.rays) {
            int b = -1;
            for (int k = 0; k < (int)P.size(); ++k)
                if (std::find(P[k].begin(), P[k].end(), e) != P[k].end()) {
                    b = k;
                    break;
                }
            if (b < 0) throw Error("marking_classes: element missing from a ray partition");
            pos.push_back(b);
        }
        by_pos[pos].push_back(e);
    }
    std::vector<std::vector<int>> classes;
    classes.reserve(by_pos.size());
    for (auto& [pos, members] : by_pos) classes.push_back(std::move(members));
    std::sort(classes.begin(), classes.end());
    return classes;
}

void validate_forest(const PlantedForestType& f) {
    if (f.classes != marking_classes(f.base))
        throw Error("forest classes do not match the base type's collision classes");
    if (f.trees.size() != f.classes.size()) throw Error("forest needs one tree per class");
    for (size_t k = 0; k < f.trees.size(); ++k) {
        const RootedTree& t = f.trees[k];
        if (t.vcount() == 0 || t.parent[0] != -1) throw Error("tree root must be vertex 0");
        if (t.legs.size() != t.parent.size())
            throw Error("tree needs one leg list per vertex");
        std::vector<int> all;
        for (int v = 0; v < t.vcount(); ++v) {
            if (v > 0 && (t.parent[v] < 0 || t.parent[v] >= v))
                throw Error("tree numbering must be topological");
            if (!std::is_sorted(t.legs[v].begin(), t.legs[v].end()))
                throw Error("legs must be sorted per vertex");
            for (int l : t.legs[v]) all.push_back(l);
        }
        std::sort(all.begin(), all.end());
        if (all != f.classes[k])
            throw Error("tree legs must be exactly the class members, once each");
    }
}

StabilityReport is_stable_tree(const RootedTree& t) {
    std::vector<int> nchild(t.vcount(), 0);
    for (int v = 1; v < t.vcount(); ++v) ++nchild[t.parent[v]];
    for (int v = 1; v < t.vcount(); ++v)
        if (1 + nchild[v] + (int)t.legs[v].size() < 3) return {false, -1, v};
    return {};
}

StabilityReport is_stable(const PlantedForestType& f) {
    for (size_t k = 0; k < f.trees.size(); ++k) {
        StabilityReport rep = is_stable_tree(f.trees[k]);
        if (!rep.stable) {
            rep.tree = (int)k;
            return rep;
        }
    }
    return {};
}

int fm_codim(const PlantedForestType& f) {
    StabilityReport rep = is_stable(f);
    if (!rep.stable)
        throw Unstable("tree " + std::to_string(rep.tree) + ", vertex " +
                       std::to_string(rep.vertex));
    int c = grid_codim(f.base);
    for (const auto& t : f.trees) c += t.vcount() - 1;
    return c;
}

std::string tree_code(const RootedTree& t) {
    return code_at(t, children_of(t), 0);
}

RootedTree canonical_tree(const RootedTree& t) {
    auto kids = children_of(t);
    RootedTree out;
    out.parent.clear();
    out.legs.clear();
    auto rec = [&](auto&& self, int v, int new_parent) -> void {
        int nv = (int)out.parent.size();
        out.parent.push_back(new_parent);
        std::vector<int> L = t.legs[v];
        std::sort(L.begin(), L.end());
        out.legs.push_back(std::move(L));
        std::vector<int> ch = kids[v];
        std::sort(ch.begin(), ch.end(), [&](int a, int b) {
            return code_at(t, kids, a) < code_at(t, kids, b);
        });
        for (int c : ch) self(self, c, nv);
    };
    rec(rec, 0, -1);
    return out;
}

PlantedForestType canonical_forest(const PlantedForestType& f) {
    if (f.trees.size() != f.classes.size()) throw Error("forest needs one tree per class");
    std::vector<std::pair<std::vector<int>, RootedTree>> pairs;
    pairs.reserve(f.classes.size());
    for (size_t k = 0; k < f.classes.size(); ++k) {
        std::vector<int> c = f.classes[k];
        std::sort(c.begin(), c.end());
        pairs.emplace_back(std::move(c), canonical_tree(f.trees[k]));
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    PlantedForestType out;
    out.base = f.base;
    for (auto& [c, t] : pairs) {
        out.classes.push_back(std::move(c));
        out.trees.push_back(std::move(t));
    }
    return out;
}

std::string forest_code(const PlantedForestType& f) {
    std::string s = grid_label(f.base);
    for (size_t k = 0; k < f.classes.size(); ++k)
        s += "@[" + join_ints(f.classes[k]) + "]" + tree_code(f.trees[k]);
    return s;
}

PlantedForestType contract_edges(const PlantedForestType& f,
                                 const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::vector<char>> cut(f.trees.size());
    for (size_t k = 0; k < f.trees.size(); ++k) cut[k].assign(f.trees[k].vcount(), 0);
    for (auto [tk, v] : edges) {
        if (tk < 0 || tk >= (int)f.trees.size() || v < 1 || v >= f.trees[tk].vcount())
            throw Error("contract_edges: no edge (" + std::to_string(tk) + "," +
                        std::to_string(v) + ")");
        cut[tk][v] = 1;
    }
    PlantedForestType out = f;
    for (size_t k = 0; k < f.trees.size(); ++k) {
        const RootedTree& t = f.trees[k];
        std::vector<int> rep(t.vcount());
        rep[0] = 0;
        for (int v = 1; v < t.vcount(); ++v) rep[v] = cut[k][v] ? rep[t.parent[v]] : v;
        std::vector<int> newid(t.vcount(), -1);
        RootedTree nt;
        nt.parent.clear();
        nt.legs.clear();
        for (int v = 0; v < t.vcount(); ++v) {
            if (cut[k][v]) continue;
            newid[v] = (int)nt.parent.size();
            nt.parent.push_back(v == 0 ? -1 : newid[rep[t.parent[v]]]);
            nt.legs.push_back({});
        }
        for (int v = 0; v < t.vcount(); ++v)
            for (int l : t.legs[v]) nt.legs[newid[rep[v]]].push_back(l);
        for (auto& L : nt.legs) std::sort(L.begin(), L.end());
        out.trees[k] = std::move(nt);
    }
    return canonical_forest(out);
}

BlowupSchedule blowup_schedule(int n, bool sections) {
    if (n < 2) throw Error("blowup schedule needs n >= 2");
    if (n > 20) throw SizeLimit("blowup schedule for n = " + std::to_string(n));
    std::vector<std::vector<int>> subsets;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        if (std::popcount(mask) < 2) continue;
        std::vector<int> J;
        for (int i = 1; i <= n; ++i)
            if ((mask >> (i - 1)) & 1) J.push_back(i);
        subsets.push_back(std::move(J));
    }
    auto size_then_lex = [](const std::vector<int>& a, const std::vector<int>& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a < b;
    };
    if (sections) {
        std::sort(subsets.begin(), subsets.end(), size_then_lex);
    } else {
        std::sort(subsets.begin(), subsets.end(),
                  [&](const std::vector<int>& a, const std::vector<int>& b) {
                      if (a.back() != b.back()) return a.back() < b.back();
                      return size_then_lex(a, b);
                  });
    }
    BlowupSchedule s;
    s.centers.reserve(subsets.size());
    for (auto& J : subsets) s.centers.push_back({sections, std::move(J)});
    return s;
}

std::string center_label(const BlowupCenter& c) {
    return (c.section ? std::string("s{") : std::string("d{")) + join_ints(c.members) + "}";
}

std::vector<PlantedForestType> enumerate_fm_types(const GridModuli& base, int max_codim,
                                                  long long limit) {
    if (max_codim < 0) throw Error("enumerate_fm_types: negative codimension bound");
    std::vector<PlantedForestType> out;
    std::set<std::string> seen;
    for (const GridCombType& t : base.types) {
        int w = grid_codim(t);
        if (w > max_codim) continue;
        int budget = max_codim - w;
        std::vector<std::vector<int>> classes = marking_classes(t);
        std::vector<std::vector<RootedTree>> opts;
        opts.reserve(classes.size());
        for (const auto& c : classes) {
            std::vector<RootedTree> o;
            expand_vertex(c, budget, false, o);
            opts.push_back(std::move(o));
        }
        std::vector<PlantedForestType> local;
        std::vector<RootedTree> pick(classes.size());
        auto rec = [&](auto&& self, size_t k, int left) -> void {
            if (k == classes.size()) {
                PlantedForestType f;
                f.base = t;
                f.classes = classes;
                f.trees = pick;
                local.push_back(canonical_forest(f));
                return;
            }
            for (const auto& tr : opts[k]) {
                int cost = tr.vcount() - 1;
                if (cost > left) continue;
                pick[k] = tr;
                self(self, k + 1, left - cost);
            }
        };
        rec(rec, 0, budget);
        std::vector<std::pair<std::string, size_t>> order;
        order.reserve(local.size());
        for (size_t i = 0; i < local.size(); ++i) order.emplace_back(forest_code(local[i]), i);
        std::sort(order.begin(), order.end());
        for (auto& [code, i] : order) {
            if ((long long)out.size() >= limit)
                throw SizeLimit("more than " + std::to_string(limit) + " forest types");
            if (!seen.insert(code).second)
                throw Error("duplicate forest type generated: " + code);
            out.push_back(std::move(local[i]));
        }
    }
    return out;
}

FMCone fm_cone(const PlantedForestType& f) {
    StabilityReport rep = is_stable(f);
    if (!rep.stable)
        throw Unstable("tree " + std::to_string(rep.tree) + ", vertex " +
                       std::to_string(rep.vertex));
    FMCone fc;
    Cone base_cone = type_cone(f.base);
    fc.base_dim = base_cone.dim();
    for (size_t k = 0; k < f.trees.size(); ++k)
        for (int v = 1; v < f.trees[k].vcount(); ++v) fc.edges.emplace_back((int)k, v);
    fc.edge_count = (int)fc.edges.size();
    fc.cone = fc.edge_count == 0 ? base_cone
                                 : cone_product(base_cone, Cone::orthant(fc.edge_count));

    int d = base_cone.ambient();
    int dp = fc.cone.ambient();
    auto locate = [&](const QVec& v) {
        const QMat& rays = fc.cone.rays();
        for (int i = 0; i < (int)rays.size(); ++i)
            if (rays[i] == v) return i;
        throw Error("fm_cone: factor ray missing from the product cone");
    };
    for (const auto& r : base_cone.rays()) {
        QVec v(dp, Rat(0));
        for (int i = 0; i < d; ++i) v[i] = r[i];
        fc.base_ray_pos.push_back(locate(v));
    }
    for (int e = 0; e < fc.edge_count; ++e) {
        QVec v(dp, Rat(0));
        v[d + e] = 1;
        fc.edge_ray_pos.push_back(locate(v));
    }

    if (fc.edge_count > 16) throw SizeLimit("face list of a cone with " +
                                            std::to_string(fc.edge_count) + " edges");
    std::vector<std::vector<int>> bfaces = base_cone.face_ray_sets();
    long long total = (long long)bfaces.size() << fc.edge_count;
    if (total > 100000) throw SizeLimit("face list of size " + std::to_string(total));
    fc.faces.reserve((size_t)total);
    for (const auto& bf : bfaces) {
        for (unsigned em = 0; em < (1u << fc.edge_count); ++em) {
            FMFace face;
            face.base_rays = bf;
            std::vector<std::pair<int, int>> kill;
            for (int e = 0; e < fc.edge_count; ++e)
                if ((em >> e) & 1) {
                    face.contracted.push_back(e);
                    kill.push_back(fc.edges[e]);
                }
            face.stable = is_stable(contract_edges(f, kill)).stable;
            fc.faces.push_back(std::move(face));
        }
    }
    return fc;
}

Cone fm_face_cone(const FMCone& fc, const FMFace& face) {
    std::vector<int> keep;
    for (int i : face.base_rays) keep.push_back(fc.base_ray_pos.at(i));
    std::vector<char> cut(fc.edge_count, 0);
    for (int e : face.contracted) cut.at(e) = 1;
    for (int e = 0; e < fc.edge_count; ++e)
        if (!cut[e]) keep.push_back(fc.edge_ray_pos[e]);
    std::sort(keep.begin(), keep.end());
    return fc.cone.subcone(keep);
}

}  // namespace tropfm
