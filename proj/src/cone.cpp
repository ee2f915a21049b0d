#include "tropfm/cone.hpp"

#include <algorithm>
#include <set>

#include "tropfm/errors.hpp"
#include "tropfm/linalg.hpp"
#include "tropfm/linsys.hpp"

namespace tropfm {

namespace {

QMat normalize_gens(int ambient, const QMat& gens) {
    std::set<QVec> seen;
    QMat out;
    for (const auto& g : gens) {
        if ((int)g.size() != ambient) throw DimensionMismatch("cone generator size");
        if (is_zero(g)) continue;
        QVec p = to_qvec(primitive(g));
        if (seen.insert(p).second) out.push_back(std::move(p));
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool cone_is_pointed(int ambient, const QMat& gens) {
    if (gens.empty()) return true;
    int m = (int)gens.size();
    LinSystem S(m);
    for (int d = 0; d < ambient; ++d) {
        QVec a(m);
        for (int i = 0; i < m; ++i) a[i] = gens[i][d];
        S.add_eq(a, Rat(0));
    }
    QVec ones(m, Rat(1));
    S.add_eq(ones, Rat(1));
    for (int i = 0; i < m; ++i) {
        QVec e(m, Rat(0));
        e[i] = 1;
        S.add_ge(e, Rat(0));
    }
    return !is_feasible(S);
}

bool in_nonneg_span(const QVec& x, const QMat& gens) {
    int m = (int)gens.size();
    int d = (int)x.size();
    if (m == 0) return is_zero(x);
    LinSystem S(m);
    for (int k = 0; k < d; ++k) {
        QVec a(m);
        for (int i = 0; i < m; ++i) a[i] = gens[i][k];
        S.add_eq(a, x[k]);
    }
    for (int i = 0; i < m; ++i) {
        QVec e(m, Rat(0));
        e[i] = 1;
        S.add_ge(e, Rat(0));
    }
    return is_feasible(S);
}

} // namespace

Cone Cone::zero(int ambient) {
    Cone c;
    c.ambient_ = ambient;
    return c;
}

Cone Cone::orthant(int ambient) {
    QMat rays;
    for (int i = 0; i < ambient; ++i) {
        QVec e(ambient, Rat(0));
        e[i] = 1;
        rays.push_back(e);
    }
    return from_extreme_rays(ambient, rays);
}

Cone Cone::from_extreme_rays(int ambient, const QMat& rays) {
    Cone c;
    c.ambient_ = ambient;
    c.rays_ = normalize_gens(ambient, rays);
    return c;
}

Cone Cone::from_rays(int ambient, const QMat& gens) {
    QMat g = normalize_gens(ambient, gens);
    if (!cone_is_pointed(ambient, g)) throw Error("cone is not pointed");
    if (rank(g) == (int)g.size()) return from_extreme_rays(ambient, g);
    for (size_t i = g.size(); i-- > 0;) {
        QMat rest;
        for (size_t j = 0; j < g.size(); ++j)
            if (j != i) rest.push_back(g[j]);
        if (in_nonneg_span(g[i], rest)) g = std::move(rest);
    }
    return from_extreme_rays(ambient, g);
}

int Cone::dim() const {
    if (dim_ < 0) dim_ = rank(rays_);
    return dim_;
}

const HRep& Cone::hrep() const {
    if (!hrep_) {
        QMat dual_rays, dual_lines;
        dd_cone(ambient_, rays_, {}, dual_rays, dual_lines);
        HRep H;
        H.dim = ambient_;
        for (const auto& n : dual_lines) H.cons.push_back({n, Rat(0), Rel::EQ});
        for (const auto& n : dual_rays) H.cons.push_back({n, Rat(0), Rel::GE});
        hrep_ = std::move(H);
    }
    return *hrep_;
}

bool Cone::contains(const QVec& x) const {
    if ((int)x.size() != ambient_) throw DimensionMismatch("cone containment");
    return hrep().contains(x);
}

bool Cone::contains_cone(const Cone& other) const {
    if (other.ambient_ != ambient_) throw DimensionMismatch("cone containment");
    for (const auto& r : other.rays_)
        if (!contains(r)) return false;
    return true;
}

QVec Cone::relint_point() const {
    QVec p(ambient_, Rat(0));
    for (const auto& r : rays_) p = add(p, r);
    return p;
}

Cone Cone::face_at(const QVec& normal) const {
    QMat tight;
    for (const auto& r : rays_) {
        Rat v = dot(normal, r);
        if (v < 0) throw NotAFace("normal is negative on a ray");
        if (v == 0) tight.push_back(r);
    }
    return from_extreme_rays(ambient_, tight);
}

Cone Cone::subcone(const std::vector<int>& ray_idx) const {
    QMat sub;
    for (int i : ray_idx) sub.push_back(rays_.at(i));
    return from_extreme_rays(ambient_, sub);
}

std::vector<std::vector<int>> Cone::face_ray_sets() const {
    size_t nr = rays_.size();
    std::vector<std::vector<int>> tights;
    for (const auto& c : hrep().cons) {
        if (c.rel != Rel::GE) continue;
        std::vector<int> t;
        for (size_t i = 0; i < nr; ++i)
            if (dot(c.a, rays_[i]) == 0) t.push_back((int)i);
        if (t.size() < nr) tights.push_back(t);
    }
    std::vector<int> all(nr);
    for (size_t i = 0; i < nr; ++i) all[i] = (int)i;
    std::set<std::vector<int>> faces;
    faces.insert(all);
    std::vector<std::vector<int>> queue{all};
    while (!queue.empty()) {
        std::vector<int> f = queue.back();
        queue.pop_back();
        for (const auto& t : tights) {
            std::vector<int> g;
            std::set_intersection(f.begin(), f.end(), t.begin(), t.end(),
                                  std::back_inserter(g));
            if (g == f) continue;
            if (faces.insert(g).second && !g.empty()) queue.push_back(g);
        }
    }
    if (dim() > 0) faces.insert({});
    return std::vector<std::vector<int>>(faces.begin(), faces.end());
}

Cone intersect(const Cone& a, const Cone& b) {
    if (a.ambient() != b.ambient()) throw DimensionMismatch("cone intersection");
    QMat ineq, eqs;
    for (const Cone* c : {&a, &b})
        for (const auto& con : c->hrep().cons) {
            if (con.rel == Rel::EQ) eqs.push_back(con.a);
            else ineq.push_back(con.a);
        }
    QMat rays, lines;
    dd_cone(a.ambient(), ineq, eqs, rays, lines);
    if (!lines.empty()) throw Error("intersection of pointed cones produced lineality");
    return Cone::from_extreme_rays(a.ambient(), rays);
}

Cone cone_product(const Cone& a, const Cone& b) {
    int da = a.ambient(), db = b.ambient();
    QMat rays;
    for (const auto& r : a.rays()) {
        QVec v(da + db, Rat(0));
        for (int i = 0; i < da; ++i) v[i] = r[i];
        rays.push_back(v);
    }
    for (const auto& r : b.rays()) {
        QVec v(da + db, Rat(0));
        for (int i = 0; i < db; ++i) v[da + i] = r[i];
        rays.push_back(v);
    }
    return Cone::from_extreme_rays(da + db, rays);
}

Cone image_cone(const QMat& M, const Cone& c) {
    QMat imgs;
    for (const auto& r : c.rays()) imgs.push_back(matvec(M, r));
    return Cone::from_rays((int)M.size(), imgs);
}

bool is_face_of(const Cone& f, const Cone& c) {
    if (f.ambient() != c.ambient()) return false;
    if (f.nrays() == 0) return true;
    for (const auto& r : f.rays()) {
        auto it = std::lower_bound(c.rays().begin(), c.rays().end(), r);
        if (it == c.rays().end() || *it != r) return false;
    }
    // f equals the minimal face of c containing a relative-interior point of f:
    // collect the facets of c tight there, then the rays of c tight on all of them.
    QVec x = f.relint_point();
    QMat tight_normals;
    for (const auto& con : c.hrep().cons)
        if (con.rel == Rel::GE && dot(con.a, x) == 0) tight_normals.push_back(con.a);
    QMat tight_rays;
    for (const auto& r : c.rays()) {
        bool all0 = true;
        for (const auto& n : tight_normals)
            if (dot(n, r) != 0) { all0 = false; break; }
        if (all0) tight_rays.push_back(r);
    }
    return tight_rays == f.rays();
}

} // namespace tropfm
