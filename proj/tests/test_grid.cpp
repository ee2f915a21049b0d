#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "grid_mutations.hpp"
#include "tropfm/errors.hpp"
#include "tropfm/fan_json.hpp"
#include "tropfm/grid.hpp"
#include "tropfm/linalg.hpp"
#include "tropfm/tropfan.hpp"

using namespace tropfm;

namespace {

ConeComplex closed_orthant_fan(int d) {
    ConeComplex c(d);
    c.add_cell(Cone::orthant(d), "top");
    close_under_faces(c);
    compute_face_pairs(c);
    return c;
}

// Oracle: per-ray types as level functions f on {0..n} with f(0) = 0 and
// image {0..max}, blocks being the level sets.  Plain scan over all
// (n+1)^n functions, no recursion, no pruning.
std::vector<std::vector<std::vector<int>>> level_function_types(int n) {
    std::vector<std::vector<std::vector<int>>> out;
    long long total = 1;
    for (int i = 0; i < n; ++i) total *= n + 1;
    for (long long code = 0; code < total; ++code) {
        std::vector<int> f(n + 1, 0);
        long long c = code;
        int top = 0;
        for (int i = 1; i <= n; ++i) {
            f[i] = int(c % (n + 1));
            c /= n + 1;
            top = std::max(top, f[i]);
        }
        std::vector<std::vector<int>> blocks(top + 1);
        for (int i = 0; i <= n; ++i) blocks[f[i]].push_back(i);
        bool onto = true;
        for (const auto& b : blocks)
            if (b.empty()) onto = false;
        if (onto) out.push_back(blocks);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Oracle: full label set of the base moduli over a fan, via the level-function
// enumeration and a direct support test per point.
std::set<std::string> oracle_labels(const TropFan& fan, int n) {
    auto per = level_function_types(n);
    std::set<std::string> out;
    std::vector<int> idx(fan.r, 0);
    auto rec = [&](auto&& self, int j) -> void {
        if (j == fan.r) {
            GridCombType t;
            t.n = n;
            for (int k : idx) t.rays.push_back(per[k]);
            for (int e = 1; e <= n; ++e) {
                std::vector<int> supp;
                for (int jj = 0; jj < fan.r; ++jj) {
                    const auto& b0 = t.rays[jj][0];
                    if (std::find(b0.begin(), b0.end(), e) == b0.end()) supp.push_back(jj);
                }
                if (!fan.has(supp)) return;
            }
            out.insert(grid_label(t));
            return;
        }
        for (int k = 0; k < (int)per.size(); ++k) {
            idx[j] = k;
            self(self, j + 1);
        }
    };
    rec(rec, 0);
    return out;
}

// Oracle: maximal cells over two disjoint rays, from a subset split and a
// strict order on each side.
std::set<std::string> disjoint_two_maximal_labels(int n) {
    std::set<std::string> out;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<int> a, b;
        for (int i = 1; i <= n; ++i) ((mask >> (i - 1)) & 1 ? a : b).push_back(i);
        std::vector<int> pa = a;
        do {
            std::vector<int> pb = b;
            do {
                GridCombType t;
                t.n = n;
                t.rays.resize(2);
                std::vector<int> z0 = b;
                z0.push_back(0);
                std::sort(z0.begin(), z0.end());
                t.rays[0].push_back(z0);
                for (int e : pa) t.rays[0].push_back({e});
                std::vector<int> z1 = a;
                z1.push_back(0);
                std::sort(z1.begin(), z1.end());
                t.rays[1].push_back(z1);
                for (int e : pb) t.rays[1].push_back({e});
                out.insert(grid_label(t));
            } while (std::next_permutation(pb.begin(), pb.end()));
        } while (std::next_permutation(pa.begin(), pa.end()));
    }
    return out;
}

long long factorial(int k) {
    long long f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

bool in_relint(const Cone& c, const QVec& x) {
    for (const auto& con : c.hrep().cons) {
        Rat d = dot(con.a, x);
        if (con.rel == Rel::EQ ? d != con.b : d <= con.b) return false;
    }
    return true;
}

QMat rows_of(const QVec& x, int n, int r) {
    QMat rows(n, QVec(r));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < r; ++j) rows[i][j] = x[i * r + j];
    return rows;
}

std::set<std::string> label_set(const ConeComplex& c) {
    return std::set<std::string>(c.labels.begin(), c.labels.end());
}

// Moves the moving-point coordinate block from the front to the back.
ConeComplex moving_block_last(const ConeComplex& cp, int n, int r) {
    int Dp = (n + 1) * r;
    QMat P(Dp, QVec(Dp, Rat(0)));
    for (int j = 0; j < r; ++j) P[n * r + j][j] = 1;
    for (int e = 1; e <= n; ++e)
        for (int j = 0; j < r; ++j) P[(e - 1) * r + j][e * r + j] = 1;
    ConeComplex out(Dp);
    for (const auto& c : cp.cells) out.add_cell(image_cone(P, c));
    compute_face_pairs(out);
    return out;
}

ConeComplex fan_power(const TropFan& f, int n) {
    ConeComplex acc = f.as_complex();
    for (int i = 1; i < n; ++i) acc = complex_product(acc, f.as_complex());
    compute_face_pairs(acc);
    return acc;
}

Cone product_cone_of_type(const GridCombType& t) {
    int r = t.r();
    int D = t.n * r;
    QMat rays;
    for (int e = 1; e <= t.n; ++e)
        for (int j : type_support(t, e)) {
            QVec v(D, Rat(0));
            v[(e - 1) * r + j] = 1;
            rays.push_back(std::move(v));
        }
    return Cone::from_extreme_rays(D, rays);
}

}  // namespace

TEST_SUITE("grid") {

TEST_CASE("tropical fan builders") {
    TropFan full = TropFan::orthant(3);
    CHECK(full.r == 3);
    CHECK(full.cone_index.size() == 8);
    CHECK(full.has({0, 1, 2}));
    ConeComplex fc = full.as_complex();
    CHECK(same_fan(fc, closed_orthant_fan(3)));
    CHECK(validate_complex(fc, true).ok);

    TropFan rays = TropFan::disjoint_rays(3);
    CHECK(rays.cone_index.size() == 4);
    CHECK_FALSE(rays.has({0, 1}));
    ConeComplex rc = rays.as_complex();
    CHECK(rc.size() == 4);
    CHECK(rc.maximal_cells().size() == 3);
    CHECK(validate_complex(rc, true).ok);

    TropFan mix = TropFan::from_sets(3, {{0, 1}});
    CHECK(mix.cone_index.size() == 5);
    CHECK(mix.has({0, 1}));
    CHECK_FALSE(mix.has({0, 2}));
    CHECK(validate_complex(mix.as_complex(), true).ok);
    CHECK_THROWS_AS(TropFan::from_sets(2, {{0, 5}}), Error);

    CHECK(TropFan::orthant(2) != TropFan::disjoint_rays(2));
    CHECK(TropFan::from_sets(2, {{0, 1}}) == TropFan::orthant(2));
}

TEST_CASE("subset labels") {
    CHECK(subset_label({}) == "S[]");
    CHECK(subset_label({0, 2}) == "S[1,3]");
    CHECK(parse_subset_label("S[1,3]", 3) == std::vector<int>{0, 2});
    CHECK(parse_subset_label("S[]", 3).empty());
    CHECK_THROWS_AS(parse_subset_label("X[]", 3), ParseError);
    CHECK_THROWS_AS(parse_subset_label("S[0]", 3), ParseError);
    CHECK_THROWS_AS(parse_subset_label("S[4]", 3), ParseError);
    CHECK_THROWS_AS(parse_subset_label("S[1,1]", 3), ParseError);
    CHECK_THROWS_AS(parse_subset_label("S[a]", 3), ParseError);

    // the fan is reconstructible from its complex labels
    TropFan f = TropFan::from_sets(3, {{0, 1}, {1, 2}});
    ConeComplex c = f.as_complex();
    TropFan back;
    back.r = c.ambient;
    for (const auto& lab : c.labels) back.cone_index.insert(parse_subset_label(lab, back.r));
    CHECK(back == f);

    // and survives a json round trip
    ConeComplex c2 = fan_from_json(fan_to_json(c));
    TropFan back2;
    back2.r = c2.ambient;
    for (const auto& lab : c2.labels) back2.cone_index.insert(parse_subset_label(lab, back2.r));
    CHECK(back2 == f);
}

TEST_CASE("tropicalisation and combinatorial types") {
    TropFan ray = TropFan::orthant(1);
    TropFan orth2 = TropFan::orthant(2);
    TropFan disj2 = TropFan::disjoint_rays(2);

    TropPointTuple u0 = tropicalise({{Rat(0)}, {Rat(0)}}, ray);
    CHECK(grid_label(grid_comb_type(u0)) == "G[0,1,2]");
    CHECK(grid_codim(grid_comb_type(u0)) == 0);

    TropPointTuple u1 = tropicalise({{Rat(1)}, {Rat(3)}}, ray);
    CHECK(grid_label(grid_comb_type(u1)) == "G[0|1|2]");
    CHECK(grid_codim(grid_comb_type(u1)) == 2);

    TropPointTuple u2 = tropicalise({{Rat(2)}, {Rat(2)}}, ray);
    CHECK(grid_label(grid_comb_type(u2)) == "G[0|1,2]");
    CHECK(grid_codim(grid_comb_type(u2)) == 1);

    TropPointTuple u3 = tropicalise({{Rat(1), Rat(1)}, {Rat(1), Rat(2)}}, orth2);
    GridCombType t3 = grid_comb_type(u3);
    CHECK(grid_label(t3) == "G[0|1,2][0|1|2]");
    CHECK(grid_codim(t3) == 3);
    CHECK(type_support(t3, 1) == std::vector<int>{0, 1});
    CHECK(type_support(t3, 2) == std::vector<int>{0, 1});
    CHECK_THROWS_AS(type_support(t3, 3), Error);

    CHECK_THROWS_AS(tropicalise({{Rat(1), Rat(2)}}, disj2), NotInSupport);
    try {
        tropicalise({{Rat(0), Rat(0)}, {Rat(1), Rat(2)}}, disj2);
        CHECK(false);
    } catch (const NotInSupport& e) {
        CHECK(e.point_index == 2);
    }
    CHECK_THROWS_AS(tropicalise({{Rat(-1)}}, ray), Error);
    CHECK_THROWS_AS(tropicalise({{Rat(1), Rat(1)}}, ray), Error);
}

TEST_CASE("grid labels parse") {
    for (const char* s : {"G[0,1,2]", "G[0|1|2]", "G[0,2|1,3][0|1,2,3]",
                          "G[0|1,x][0,x|1]", "G[0,1,x]"}) {
        GridCombType t = parse_grid_label(s);
        CHECK(grid_label(t) == s);
    }
    CHECK(parse_grid_label("G[0|1,x][0,x|1]").extra);
    CHECK(parse_grid_label("G[0|1,x][0,x|1]").n == 1);
    CHECK_FALSE(parse_grid_label("G[0,1,2]").extra);

    CHECK_THROWS_AS(parse_grid_label("X[0|1]"), ParseError);
    CHECK_THROWS_AS(parse_grid_label("G"), ParseError);
    CHECK_THROWS_AS(parse_grid_label("G[1|0]"), ParseError);
    CHECK_THROWS_AS(parse_grid_label("G[0,1][0]"), ParseError);
    CHECK_THROWS_AS(parse_grid_label("G[0,1,1]"), ParseError);
    CHECK_THROWS_AS(parse_grid_label("G[0||1]"), ParseError);
    CHECK_THROWS_AS(parse_grid_label("G[0|x][0,1]"), ParseError);
    CHECK_THROWS_AS(parse_grid_label("G[0,01]"), ParseError);
    CHECK_THROWS_AS(parse_grid_label("G[0|1"), ParseError);
}

TEST_CASE("marked grid subdivisions round trip") {
    TropFan orth2 = TropFan::orthant(2);
    QMat vals = {{Rat(2), Rat(0)}, {Rat(1, 2), Rat(3)}, {Rat(2), Rat(3)}};
    TropPointTuple u = tropicalise(vals, orth2);
    MarkedGridSubdivision g = grid_from_points(u);
    CHECK(g.breaks[0] == QVec{Rat(1, 2), Rat(2)});
    CHECK(g.breaks[1] == QVec{Rat(3)});
    CHECK(points_from_grid(g).coords == vals);

    MarkedGridSubdivision bad = g;
    bad.marking[0][0] = Rat(7);
    CHECK_THROWS_AS(points_from_grid(bad), Error);
    bad = g;
    bad.breaks[0].push_back(Rat(9));
    CHECK_THROWS_AS(points_from_grid(bad), Error);
    bad = g;
    bad.breaks[1] = {Rat(3), Rat(3)};
    CHECK_THROWS_AS(points_from_grid(bad), Error);
    bad = g;
    bad.breaks[1] = {Rat(0), Rat(3)};
    CHECK_THROWS_AS(points_from_grid(bad), Error);
}

TEST_CASE("type cones") {
    GridCombType chain = parse_grid_label("G[0|1|2]");
    Cone c = type_cone(chain);
    CHECK(c.ambient() == 2);
    CHECK(c.dim() == 2);
    CHECK(c.contains({Rat(1), Rat(3)}));
    CHECK_FALSE(c.contains({Rat(3), Rat(1)}));

    GridCombType t = parse_grid_label("G[0|1,2][0|1|2]");
    Cone c2 = type_cone(t);
    CHECK(c2.ambient() == 4);
    CHECK(c2.dim() == grid_codim(t));
    CHECK(c2.contains({Rat(1), Rat(1), Rat(1), Rat(2)}));
    CHECK_FALSE(c2.contains({Rat(1), Rat(2), Rat(1), Rat(1)}));
}

TEST_CASE("base moduli over a single ray") {
    GridModuli m = build_pi(TropFan::orthant(1), 2);
    CHECK(m.pi.size() == 6);
    std::set<std::string> want = {"G[0,1,2]", "G[0,1|2]", "G[0,2|1]",
                                  "G[0|1,2]", "G[0|1|2]", "G[0|2|1]"};
    CHECK(label_set(m.pi) == want);
    CHECK(label_set(m.pi) == oracle_labels(TropFan::orthant(1), 2));
    CHECK(validate_complex(m.pi, true).ok);
    CHECK(m.pi.maximal_cells().size() == 2);
    for (int c = 0; c < m.pi.size(); ++c)
        CHECK(m.pi.cells[c].dim() == grid_codim(m.types[c]));

    CHECK(m.plus_materialized);
    CHECK(m.pi_plus.size() == 26);
    CHECK(m.plus_cell_count == 26);
    CHECK(validate_complex(m.pi_plus, true).ok);

    // the universal family is the base construction with one more marking,
    // up to moving the extra coordinate block to the back
    GridModuli next = build_pi(TropFan::orthant(1), 3);
    CHECK(same_fan(moving_block_last(m.pi_plus, 2, 1), next.pi));

    // and the base subdivides the power of the fan
    ConeComplex coarse = fan_power(TropFan::orthant(1), 2);
    std::vector<int> targets;
    for (const auto& t : m.types) {
        auto hit = coarse.find_cell(product_cone_of_type(t));
        REQUIRE(hit.has_value());
        targets.push_back(*hit);
    }
    ComplexMap incl = ComplexMap::uniform(zidentity(2), targets);
    CHECK(validate_map(m.pi, coarse, incl).ok);
    CHECK(is_subdivision(m.pi, coarse, incl).ok);
}

TEST_CASE("base moduli with one marking reproduce the fan") {
    for (const TropFan& f :
         {TropFan::orthant(1), TropFan::orthant(2), TropFan::orthant(3),
          TropFan::disjoint_rays(3), TropFan::from_sets(3, {{0, 1}, {1, 2}})}) {
        GridModuli m = build_pi(f, 1);
        CHECK(same_fan(m.pi, f.as_complex()));
    }
}

TEST_CASE("base moduli match the level function oracle") {
    struct Row {
        TropFan fan;
        int n;
        int count;
    };
    std::vector<Row> rows = {{TropFan::orthant(2), 2, 36},
                             {TropFan::disjoint_rays(2), 2, 13},
                             {TropFan::disjoint_rays(2), 3, 75},
                             {TropFan::from_sets(3, {{0, 1}, {1, 2}}), 1, 6},
                             {TropFan::orthant(3), 1, 8}};
    for (const auto& row : rows) {
        GridModuli m = build_pi(row.fan, row.n);
        CHECK(m.pi.size() == row.count);
        CHECK(label_set(m.pi) == oracle_labels(row.fan, row.n));
    }
}

TEST_CASE("maximal cells over two disjoint rays") {
    TropFan f = TropFan::disjoint_rays(2);
    for (int n : {2, 3, 4}) {
        GridModuli m = build_pi(f, n);
        std::set<std::string> got;
        for (int c : m.pi.maximal_cells()) got.insert(m.pi.labels[c]);
        CHECK((long long)got.size() == factorial(n + 1));
        CHECK(got == disjoint_two_maximal_labels(n));
        std::set<std::string> by_codim;
        for (int c = 0; c < m.pi.size(); ++c)
            if (grid_codim(m.types[c]) == n) by_codim.insert(m.pi.labels[c]);
        CHECK(by_codim == got);
    }
    CHECK(build_pi(f, 4).pi.size() == 541);
}

TEST_CASE("weak semistability holds for small moduli") {
    GridModuli m = build_pi(TropFan::orthant(2), 2);
    CHECK(m.pi.size() == 36);
    CHECK(m.pi_plus.size() == 676);
    WeakSSReport rep = verify_weak_ss(m);
    CHECK(rep.ok());
    CHECK(rep.cells_checked == 72);
    CHECK(rep.plus_cells_checked == 676);

    CHECK(validate_map(m.pi_plus, m.pi, m.p).ok);
    for (int i = 0; i < m.n; ++i) {
        CHECK(validate_map(m.pi, m.pi_plus, m.sections[i]).ok);
        CHECK(matmul(to_qmat(m.p_matrix), to_qmat(m.section_matrices[i])) == qidentity(4));
    }

    CHECK(verify_weak_ss(build_pi(TropFan::orthant(1), 2)).ok());
    CHECK(verify_weak_ss(build_pi(TropFan::disjoint_rays(2), 2)).ok());
}

TEST_CASE("weak semistability streams past the materialization bound") {
    GridModuli m = build_pi(TropFan::orthant(2), 2, 1000000, 0);
    CHECK_FALSE(m.plus_materialized);
    CHECK(m.plus_cell_count == 676);
    CHECK(m.pi_plus.size() == 0);
    CHECK(m.sections.empty());
    WeakSSReport rep = verify_weak_ss(m);
    CHECK(rep.ok());
    CHECK(rep.cells_checked == 36);
    CHECK(rep.plus_cells_checked == 676);

    GridModuli d = build_pi(TropFan::disjoint_rays(2), 3, 1000000, 0);
    CHECK(d.plus_cell_count == 541);
    WeakSSReport rep2 = verify_weak_ss(d);
    CHECK(rep2.ok());
    CHECK(rep2.plus_cells_checked == 541);
}

TEST_CASE("weak semistability detects injected defects") {
    GridModuli m = build_pi(TropFan::orthant(2), 2);

    WeakSSReport r1 = verify_weak_ss(testing::unsubdivided_plus(m));
    CHECK_FALSE(r1.transversality);
    CHECK(r1.witness_section == 1);
    CHECK_FALSE(r1.witness_label.empty());

    WeakSSReport r2 = verify_weak_ss(testing::scale_plus_lattice(m));
    CHECK(r2.transversality);
    CHECK(r2.flatness);
    CHECK_FALSE(r2.reducedness);
    CHECK_FALSE(r2.witness_label.empty());

    WeakSSReport r3 = verify_weak_ss(testing::drop_section_image_cell(m));
    CHECK_FALSE(r3.transversality);
    CHECK(r3.flatness);
    CHECK(r3.reducedness);
    CHECK(r3.witness_section == 1);
    CHECK(r3.witness_cell == m.pi.size() - 1);
    CHECK(r3.witness_label == m.pi.labels.back());
}

TEST_CASE("support fans recover the base fan") {
    for (const TropFan& f : {TropFan::orthant(2), TropFan::disjoint_rays(2),
                             TropFan::from_sets(2, {{0}})}) {
        GridModuli m = build_pi(f, 2);
        CHECK(support_fan(m.types) == f);
        CHECK(support_fan(m.types_plus) == f);
        std::vector<GridCombType> reparsed;
        for (const auto& lab : m.pi.labels) reparsed.push_back(parse_grid_label(lab));
        CHECK(support_fan(reparsed) == f);
    }
}

TEST_CASE("relative interiors classify points uniquely") {
    for (const TropFan& f : {TropFan::orthant(2), TropFan::disjoint_rays(2)}) {
        GridModuli m = build_pi(f, 2);
        for (int c = 0; c < m.pi.size(); ++c) {
            QVec x = m.pi.cells[c].relint_point();
            TropPointTuple u = tropicalise(rows_of(x, 2, 2), f);
            CHECK(grid_comb_type(u) == m.types[c]);
            CHECK(m.pi.find_cell(type_cone(m.types[c])) == c);
            int hits = 0;
            for (int d = 0; d < m.pi.size(); ++d)
                if (in_relint(m.pi.cells[d], x)) ++hits;
            CHECK(hits == 1);
        }
    }
}

TEST_CASE("moduli size limits") {
    CHECK_THROWS_AS(build_pi(TropFan::orthant(2), 3, 10), SizeLimit);
    CHECK_THROWS_AS(build_pi(TropFan::orthant(1), 0), Error);
    CHECK_THROWS_AS(build_pi(TropFan::orthant(1), 25), SizeLimit);
}

}  // TEST_SUITE
