#include "tropfm/polyhedron.hpp"

#include <algorithm>
#include <set>

#include "tropfm/linalg.hpp"

namespace tropfm {

LinSystem HRep::system() const {
    LinSystem S(dim);
    S.cons = cons;
    return S;
}

LinSystem HRep::strict_system() const {
    LinSystem S(dim);
    for (auto c : cons) {
        if (c.rel == Rel::GE) c.rel = Rel::GT;
        S.cons.push_back(c);
    }
    return S;
}

bool HRep::contains(const QVec& x) const {
    for (const auto& c : cons)
        if (!satisfies(c, x)) return false;
    return true;
}

namespace {

struct DDRay {
    QVec v;                   // primitive
    std::vector<char> active; // tight flags per inequality row; 0 past `processed`
};

QVec primitive_q(const QVec& v) { return to_qvec(primitive(v)); }

// Fukuda-Prodon combinatorial test over the processed rows. Flags beyond the
// processed prefix are all zero, so scanning the full width is equivalent.
bool adjacent(const std::vector<DDRay>& rays, size_t i, size_t j) {
    size_t nrows = rays[i].active.size();
    for (size_t k = 0; k < rays.size(); ++k) {
        if (k == i || k == j) continue;
        bool covers = true;
        for (size_t t = 0; t < nrows; ++t) {
            if (rays[i].active[t] && rays[j].active[t] && !rays[k].active[t]) {
                covers = false;
                break;
            }
        }
        if (covers) return false;
    }
    return true;
}

} // namespace

void dd_cone(int dim, const QMat& ineq_normals, const QMat& eq_normals, QMat& rays_out,
             QMat& lines_out) {
    QMat lines;
    for (int i = 0; i < dim; ++i) {
        QVec e(dim, Rat(0));
        e[i] = 1;
        lines.push_back(e);
    }
    std::vector<DDRay> rays;
    size_t nineq = ineq_normals.size();
    size_t processed = 0; // inequality rows handled so far

    auto recompute_active = [&](DDRay& r) {
        r.active.assign(nineq, 0);
        for (size_t t = 0; t < processed; ++t)
            if (dot(ineq_normals[t], r.v) == 0) r.active[t] = 1;
    };

    // If some remaining line has n.l != 0, pivot on it: project the other
    // lines and all rays into {n.x == 0} and hand back the pivot.
    auto project_on_pivot = [&](const QVec& n) -> std::optional<QVec> {
        int piv = -1;
        for (size_t i = 0; i < lines.size(); ++i)
            if (dot(n, lines[i]) != 0) { piv = (int)i; break; }
        if (piv < 0) return std::nullopt;
        QVec l0 = lines[piv];
        Rat nv = dot(n, l0);
        QMat kept;
        for (size_t i = 0; i < lines.size(); ++i) {
            if ((int)i == piv) continue;
            Rat f = dot(n, lines[i]) / nv;
            kept.push_back(primitive_q(sub(lines[i], scale(f, l0))));
        }
        lines = std::move(kept);
        for (auto& r : rays) {
            Rat f = dot(n, r.v) / nv;
            if (f != 0) r.v = primitive_q(sub(r.v, scale(f, l0)));
        }
        return l0;
    };

    auto combine = [&](const QVec& n, const DDRay& rp, const DDRay& rm) -> std::optional<DDRay> {
        Rat vp = dot(n, rp.v), vm = dot(n, rm.v); // vp > 0 > vm
        QVec w = sub(scale(vp, rm.v), scale(vm, rp.v));
        if (is_zero(w)) return std::nullopt;
        DDRay nr;
        nr.v = primitive_q(w);
        recompute_active(nr);
        return nr;
    };

    for (const auto& n : eq_normals) {
        if (is_zero(n)) continue;
        if (project_on_pivot(n)) continue;
        std::vector<DDRay> zero, pos, negs;
        for (auto& r : rays) {
            Rat v = dot(n, r.v);
            if (v == 0) zero.push_back(std::move(r));
            else if (v > 0) pos.push_back(std::move(r));
            else negs.push_back(std::move(r));
        }
        std::vector<DDRay> all;
        all.reserve(zero.size() + pos.size() + negs.size());
        for (auto& r : zero) all.push_back(std::move(r));
        size_t zcount = all.size();
        for (auto& r : pos) all.push_back(std::move(r));
        size_t pcount = all.size();
        for (auto& r : negs) all.push_back(std::move(r));
        std::vector<DDRay> next(all.begin(), all.begin() + zcount);
        for (size_t i = zcount; i < pcount; ++i)
            for (size_t j = pcount; j < all.size(); ++j) {
                if (!adjacent(all, i, j)) continue;
                if (auto nr = combine(n, all[i], all[j])) next.push_back(std::move(*nr));
            }
        rays = std::move(next);
    }

    for (size_t row = 0; row < nineq; ++row) {
        const QVec& n = ineq_normals[row];
        if (is_zero(n)) {
            for (auto& r : rays) r.active[row] = 1;
            processed = row + 1;
            continue;
        }
        if (auto l0 = project_on_pivot(n)) {
            for (auto& r : rays) r.active[row] = 1;
            QVec l = *l0;
            if (dot(n, l) < 0) l = scale(Rat(-1), l);
            DDRay nr;
            nr.v = primitive_q(l);
            recompute_active(nr);
            rays.push_back(std::move(nr));
            processed = row + 1;
            continue;
        }
        std::vector<DDRay> all;
        all.reserve(rays.size());
        size_t zcount = 0, pcount = 0;
        std::vector<DDRay> pos, negs;
        for (auto& r : rays) {
            Rat v = dot(n, r.v);
            if (v == 0) { r.active[row] = 1; all.push_back(std::move(r)); }
            else if (v > 0) pos.push_back(std::move(r));
            else negs.push_back(std::move(r));
        }
        zcount = all.size();
        for (auto& r : pos) all.push_back(std::move(r));
        pcount = all.size();
        for (auto& r : negs) all.push_back(std::move(r));
        std::vector<DDRay> next(all.begin(), all.begin() + pcount);
        for (size_t i = zcount; i < pcount; ++i)
            for (size_t j = pcount; j < all.size(); ++j) {
                if (!adjacent(all, i, j)) continue;
                if (auto nr = combine(n, all[i], all[j])) {
                    nr->active[row] = 1;
                    next.push_back(std::move(*nr));
                }
            }
        rays = std::move(next);
        processed = row + 1;
    }

    std::set<QVec> seen;
    rays_out.clear();
    for (auto& r : rays)
        if (seen.insert(r.v).second) rays_out.push_back(r.v);
    std::sort(rays_out.begin(), rays_out.end());
    lines_out.clear();
    for (auto& l : lines) lines_out.push_back(l);
    std::sort(lines_out.begin(), lines_out.end());
}

VRep vrep(const HRep& P) {
    int d = P.dim;
    QMat ineq, eqs;
    for (const auto& c : P.cons) {
        QVec n = c.a;
        n.push_back(-c.b);
        if (c.rel == Rel::EQ) eqs.push_back(n);
        else ineq.push_back(n);
    }
    {
        QVec s(d + 1, Rat(0));
        s[d] = 1;
        ineq.push_back(s);
    }
    QMat rays, lines;
    dd_cone(d + 1, ineq, eqs, rays, lines);
    VRep V;
    for (const auto& r : rays) {
        if (r[d] > 0) {
            QVec x(d);
            for (int i = 0; i < d; ++i) x[i] = r[i] / r[d];
            V.vertices.push_back(x);
        } else {
            V.rays.push_back(QVec(r.begin(), r.begin() + d));
        }
    }
    for (const auto& l : lines) {
        QVec x(l.begin(), l.begin() + d);
        if (!is_zero(x)) V.lines.push_back(x);
    }
    if (V.vertices.empty() && V.lines.empty()) return VRep{};
    if (V.vertices.empty()) {
        // lineality hit the homogenization coordinate; recover a point by
        // shifting a line with nonzero last coordinate (cannot happen with
        // the explicit s >= 0 row, kept for safety)
        return VRep{};
    }
    std::sort(V.vertices.begin(), V.vertices.end());
    std::sort(V.rays.begin(), V.rays.end());
    std::sort(V.lines.begin(), V.lines.end());
    return V;
}

bool feasible(const HRep& P) { return is_feasible(P.system()); }

std::vector<int> implicit_equalities(const HRep& P) {
    std::vector<int> out;
    for (size_t i = 0; i < P.cons.size(); ++i) {
        if (P.cons[i].rel != Rel::GE) continue;
        LinSystem S = P.system();
        S.cons[i].rel = Rel::GT;
        if (!is_feasible(S)) out.push_back((int)i);
    }
    return out;
}

int dim_of(const HRep& P) {
    if (!feasible(P)) return -1;
    QMat eqrows;
    for (const auto& c : P.cons)
        if (c.rel == Rel::EQ) eqrows.push_back(c.a);
    for (int i : implicit_equalities(P)) eqrows.push_back(P.cons[i].a);
    return P.dim - rank(eqrows);
}

std::optional<QVec> relint_point(const HRep& P) {
    std::vector<int> imp = implicit_equalities(P);
    std::set<int> impset(imp.begin(), imp.end());
    LinSystem S(P.dim);
    for (size_t i = 0; i < P.cons.size(); ++i) {
        const auto& c = P.cons[i];
        if (c.rel == Rel::EQ || impset.count((int)i)) S.add_eq(c.a, c.b);
        else S.add_gt(c.a, c.b);
    }
    return feasible_point(S);
}

std::vector<std::vector<int>> polytope_faces(const HRep& P, const VRep& V) {
    if (!V.rays.empty() || !V.lines.empty()) throw Error("polytope_faces: unbounded input");
    size_t nv = V.vertices.size();
    if (nv == 0) return {};
    std::vector<std::vector<int>> tights;
    for (const auto& c : P.cons) {
        if (c.rel != Rel::GE) continue;
        std::vector<int> t;
        for (size_t v = 0; v < nv; ++v)
            if (dot(c.a, V.vertices[v]) == c.b) t.push_back((int)v);
        if (t.size() < nv) tights.push_back(t);
    }
    std::vector<int> all(nv);
    for (size_t v = 0; v < nv; ++v) all[v] = (int)v;
    std::set<std::vector<int>> faces;
    std::vector<std::vector<int>> queue{all};
    faces.insert(all);
    while (!queue.empty()) {
        std::vector<int> f = queue.back();
        queue.pop_back();
        for (const auto& t : tights) {
            std::vector<int> g;
            std::set_intersection(f.begin(), f.end(), t.begin(), t.end(),
                                  std::back_inserter(g));
            if (g.empty() || g == f) continue;
            if (faces.insert(g).second) queue.push_back(g);
        }
    }
    return std::vector<std::vector<int>>(faces.begin(), faces.end());
}

} // namespace tropfm
