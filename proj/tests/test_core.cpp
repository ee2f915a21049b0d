#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "tropfm/cone.hpp"
#include "tropfm/lattice.hpp"
#include "tropfm/linalg.hpp"
#include "tropfm/linsys.hpp"
#include "tropfm/numbers.hpp"
#include "tropfm/polyhedron.hpp"

using namespace tropfm;

namespace {

QVec qv(std::initializer_list<int> xs) {
    QVec v;
    for (int x : xs) v.push_back(Rat(x));
    return v;
}

ZVec zv(std::initializer_list<int> xs) {
    ZVec v;
    for (int x : xs) v.push_back(Int(x));
    return v;
}

// Independent vertex oracle: every d-subset of tight constraints, solved and
// filtered by feasibility.
QMat brute_vertices(const HRep& P) {
    int d = P.dim;
    int m = (int)P.cons.size();
    std::set<QVec> verts;
    std::vector<int> idx(d);
    auto rec = [&](auto&& self, int pos, int start) -> void {
        if (pos == d) {
            QMat A;
            QVec b;
            for (int i : idx) {
                A.push_back(P.cons[i].a);
                b.push_back(P.cons[i].b);
            }
            if (rank(A) < d) return;
            auto x = solve(A, b);
            if (x && P.contains(*x)) verts.insert(*x);
            return;
        }
        for (int i = start; i < m; ++i) {
            idx[pos] = i;
            self(self, pos + 1, i + 1);
        }
    };
    rec(rec, 0, 0);
    return QMat(verts.begin(), verts.end());
}

ZMat random_unimodular(int n, std::mt19937_64& rng, int ops = 12) {
    ZMat U = zidentity(n);
    std::uniform_int_distribution<int> row(0, n - 1), coef(-3, 3), kind(0, 2);
    for (int t = 0; t < ops; ++t) {
        int i = row(rng), j = row(rng);
        switch (kind(rng)) {
        case 0:
            if (i != j) {
                Int c(coef(rng));
                for (int k = 0; k < n; ++k) U[i][k] += c * U[j][k];
            }
            break;
        case 1:
            std::swap(U[i], U[j]);
            break;
        default:
            for (int k = 0; k < n; ++k) U[i][k] = -U[i][k];
        }
    }
    return U;
}

ZMat zmul(const ZMat& A, const ZMat& B) {
    size_t n = A.size(), m = B[0].size(), k = B.size();
    ZMat C(n, ZVec(m, Int(0)));
    for (size_t i = 0; i < n; ++i)
        for (size_t t = 0; t < k; ++t)
            for (size_t j = 0; j < m; ++j) C[i][j] += A[i][t] * B[t][j];
    return C;
}

} // namespace

TEST_SUITE("core") {

TEST_CASE("rational parse and print canonicalize") {
    CHECK(rat_str(parse_rat("2/4")) == "1/2");
    CHECK(rat_str(parse_rat("-6/4")) == "-3/2");
    CHECK(rat_str(parse_rat("3/-6")) == "-1/2");
    CHECK(rat_str(parse_rat("7")) == "7");
    CHECK(rat_str(parse_rat("0/5")) == "0");
    CHECK(parse_rat("1/3") + parse_rat("1/6") == parse_rat("1/2"));
    CHECK_THROWS_AS(parse_rat("1/0"), ParseError);
    CHECK_THROWS_AS(parse_rat("x"), ParseError);
    CHECK_THROWS_AS(parse_rat(""), ParseError);
    CHECK_THROWS_AS(parse_rat("1.5"), ParseError);
}

TEST_CASE("primitive vectors") {
    QVec v{parse_rat("2/3"), parse_rat("-4/3")};
    CHECK(primitive(v) == zv({1, -2}));
    QVec w{parse_rat("-2/3"), parse_rat("4/3")};
    CHECK(primitive(w) == zv({-1, 2}));
    CHECK(primitive_normalized(w) == zv({1, -2}));
    CHECK(primitive_z(zv({6, -9, 3})) == zv({2, -3, 1}));
    QVec z{Rat(0), Rat(0)};
    CHECK(primitive(z) == zv({0, 0}));
}

TEST_CASE("rref, rank, solve, nullspace") {
    QMat A = {qv({1, 2, 3}), qv({2, 4, 6}), qv({1, 0, 1})};
    CHECK(rank(A) == 2);

    auto x = solve({qv({1, 1}), qv({1, -1})}, qv({3, 1}));
    REQUIRE(x.has_value());
    CHECK(*x == qv({2, 1}));

    CHECK_FALSE(solve({qv({1, 1}), qv({2, 2})}, qv({1, 3})).has_value());

    QMat N = nullspace({qv({1, 1, 1})});
    CHECK(N.size() == 2);
    for (const auto& n : N) CHECK(dot(qv({1, 1, 1}), n) == 0);

    QMat E = span_equations({qv({1, 1, 0}), qv({0, 0, 1})}, 3);
    REQUIRE(E.size() == 1);
    CHECK(dot(E[0], qv({1, 1, 0})) == 0);
    CHECK(dot(E[0], qv({0, 0, 1})) == 0);
    CHECK(dot(E[0], qv({1, 0, 0})) != 0);

    auto c = coords_in({qv({1, 1}), qv({1, -1})}, qv({4, 2}));
    REQUIRE(c.has_value());
    CHECK(*c == qv({3, 1}));
    CHECK_FALSE(coords_in({qv({1, 0, 0})}, qv({0, 1, 0})).has_value());
}

TEST_CASE("hermite normal form: shape and pinned example") {
    ZMat H = hnf({zv({4, 0}), zv({0, 4}), zv({1, 1})});
    CHECK(H == ZMat{zv({1, 1}), zv({0, 4})});

    CHECK(hnf({zv({0, 0}), zv({0, 0})}).empty());
    CHECK(hnf({zv({0, -5})}) == ZMat{zv({0, 5})});
}

TEST_CASE("hermite normal form: canonical under unimodular row ops") {
    std::mt19937_64 rng(20260818);
    for (int trial = 0; trial < 40; ++trial) {
        int n = 2 + (int)(rng() % 3);
        std::uniform_int_distribution<int> entry(0, 6);
        ZMat H0(n, ZVec(n, Int(0)));
        for (int i = 0; i < n; ++i) {
            H0[i][i] = Int(1 + entry(rng));
            for (int j = i + 1; j < n; ++j) H0[i][j] = Int(entry(rng));
        }
        // reduce above pivots so H0 is already canonical; ascending column
        // order keeps finished columns untouched (row j is zero left of j)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < j; ++i) {
                Int q = H0[i][j] / H0[j][j];
                if (H0[i][j] - q * H0[j][j] < 0) q -= 1;
                for (int k = 0; k < n; ++k) H0[i][k] -= q * H0[j][k];
            }
        ZMat U = random_unimodular(n, rng);
        CHECK(hnf(zmul(U, H0)) == H0);
    }
}

TEST_CASE("integer kernel") {
    ZMat K = kernel_z({zv({1, 1, 1})});
    CHECK(K.size() == 2);
    for (const auto& k : K) CHECK(dot_z(zv({1, 1, 1}), k) == 0);
    // saturated: invariant factors of the basis are all 1
    for (const auto& d : snf_diagonal(K)) CHECK(d == 1);

    CHECK(kernel_z({zv({1, 0}), zv({0, 1})}).empty());

    ZMat K2 = kernel_z({zv({2, -3})});
    REQUIRE(K2.size() == 1);
    CHECK(K2[0] == zv({3, 2}));
}

TEST_CASE("smith normal form diagonal") {
    CHECK(snf_diagonal({zv({2, 0}), zv({0, 4})}) == zv({2, 4}));
    CHECK(snf_diagonal({zv({4, 0}), zv({0, 6})}) == zv({2, 12}));
    CHECK(snf_diagonal({zv({1, 2}), zv({3, 4})}) == zv({1, 2}));
    CHECK(snf_diagonal({zv({0, 0}), zv({0, 0})}).empty());

    std::mt19937_64 rng(777);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 2 + (int)(rng() % 2);
        ZVec d;
        Int cur(1);
        std::uniform_int_distribution<int> mult(1, 4);
        for (int i = 0; i < n; ++i) {
            cur *= Int(mult(rng));
            d.push_back(cur);
        }
        ZMat D(n, ZVec(n, Int(0)));
        for (int i = 0; i < n; ++i) D[i][i] = d[i];
        ZMat U = random_unimodular(n, rng), V = random_unimodular(n, rng);
        CHECK(snf_diagonal(zmul(U, zmul(D, V))) == d);
    }
}

TEST_CASE("integer lattices") {
    IntLattice Z2 = IntLattice::standard(2);
    CHECK(Z2.contains(zv({5, -7})));
    CHECK(Z2.contains_q(qv({3, 0})));
    CHECK_FALSE(Z2.contains_q({parse_rat("1/2"), Rat(0)}));

    IntLattice L = IntLattice::from_rows(2, {zv({4, 0}), zv({0, 4}), zv({1, 1})});
    CHECK(L.rank() == 2);
    CHECK(L.contains(zv({1, 1})));
    CHECK(L.contains(zv({0, 4})));
    CHECK_FALSE(L.contains(zv({1, 0})));
    CHECK(lattice_index(L, Z2) == 4);
    CHECK(lattice_subset(L, Z2));
    CHECK_FALSE(lattice_subset(Z2, L));

    auto coords = L.coordinates(zv({2, 6}));
    REQUIRE(coords.has_value());
    ZVec back(2, Int(0));
    for (size_t i = 0; i < coords->size(); ++i)
        for (int j = 0; j < 2; ++j) back[j] += (*coords)[i] * L.basis()[i][j];
    CHECK(back == zv({2, 6}));

    IntLattice twoZ = IntLattice::scaled(2, Int(2));
    CHECK(lattice_index(twoZ, Z2) == 4);

    IntLattice plane = IntLattice::standard(3).intersect_subspace({qv({1, 1, 1})});
    CHECK(plane.rank() == 2);
    for (const auto& b : plane.basis()) CHECK(dot_z(zv({1, 1, 1}), b) == 0);
    CHECK(plane.contains(zv({1, -1, 0})));
    CHECK(plane.contains(zv({0, 1, -1})));

    IntLattice sat = IntLattice::from_rows(2, {zv({2, 0})}).saturation();
    CHECK(sat.contains(zv({1, 0})));
    CHECK(sat.rank() == 1);

    // no equations: the whole lattice comes back
    CHECK(twoZ.intersect_subspace({}) == twoZ);
    // full-rank lattices saturate to the standard lattice
    CHECK(twoZ.saturation() == IntLattice::standard(2));

    auto p = Z2.primitive_on_ray({parse_rat("1/2"), parse_rat("1/2")});
    REQUIRE(p.has_value());
    CHECK(*p == zv({1, 1}));
    auto p2 = twoZ.primitive_on_ray(qv({1, 1}));
    REQUIRE(p2.has_value());
    CHECK(*p2 == zv({2, 2}));
    auto p3 = L.primitive_on_ray(qv({1, 0}));
    REQUIRE(p3.has_value());
    CHECK(*p3 == zv({4, 0}));
}

TEST_CASE("lattice images") {
    IntLattice Z3 = IntLattice::standard(3);
    ZMat M = {zv({1, 0, 0}), zv({0, 1, 0})};
    IntLattice img = lattice_image(M, Z3);
    CHECK(img == IntLattice::standard(2));

    QMat Mq = {{parse_rat("1/2"), Rat(0)}, {Rat(0), Rat(1)}};
    IntLattice half = lattice_image_q(Mq, IntLattice::scaled(2, Int(2)));
    CHECK(half.contains(zv({1, 0})));
    CHECK(half.contains(zv({0, 2})));
    CHECK_FALSE(half.contains(zv({0, 1})));
    CHECK_THROWS_AS(lattice_image_q(Mq, IntLattice::standard(2)), Error);
}

TEST_CASE("feasible points with mixed strictness") {
    LinSystem S(1);
    S.add_gt(qv({1}), Rat(0));
    S.add_gt(qv({-1}), Rat(-1));
    auto x = feasible_point(S);
    REQUIRE(x.has_value());
    CHECK((*x)[0] > 0);
    CHECK((*x)[0] < 1);

    LinSystem bad(1);
    bad.add_ge(qv({1}), Rat(1));
    bad.add_ge(qv({-1}), Rat(0));
    CHECK_FALSE(feasible_point(bad).has_value());

    LinSystem tight(1);
    tight.add_ge(qv({1}), Rat(1));
    tight.add_ge(qv({-1}), Rat(-1));
    auto t = feasible_point(tight);
    REQUIRE(t.has_value());
    CHECK((*t)[0] == 1);

    LinSystem strictbad(1);
    strictbad.add_ge(qv({1}), Rat(1));
    strictbad.add_gt(qv({-1}), Rat(-1));
    CHECK_FALSE(feasible_point(strictbad).has_value());

    LinSystem eq(3);
    eq.add_eq(qv({1, 1, 1}), Rat(6));
    eq.add_eq(qv({1, -1, 0}), Rat(0));
    eq.add_gt(qv({0, 0, 1}), Rat(0));
    eq.add_ge(qv({1, 0, 0}), Rat(1));
    auto y = feasible_point(eq);
    REQUIRE(y.has_value());
    CHECK(satisfies_all(eq, *y));
}

TEST_CASE("feasible points: randomized satisfaction") {
    std::mt19937_64 rng(424242);
    std::uniform_int_distribution<int> entry(-4, 4), dimd(1, 4), rows(1, 8), slack(0, 3);
    for (int trial = 0; trial < 60; ++trial) {
        int d = dimd(rng);
        QVec x0(d);
        for (auto& c : x0) c = Rat(entry(rng), 2);
        LinSystem S(d);
        int m = rows(rng);
        for (int i = 0; i < m; ++i) {
            QVec a(d);
            for (auto& c : a) c = Rat(entry(rng));
            Rat rhs = dot(a, x0) - Rat(slack(rng));
            int r = (int)(rng() % 3);
            if (r == 0) S.add_eq(a, dot(a, x0));
            else if (r == 1) S.add_ge(a, rhs);
            else S.add_gt(a, rhs - 1);
        }
        auto w = feasible_point(S);
        REQUIRE(w.has_value());
        CHECK(satisfies_all(S, *w));
    }
}

TEST_CASE("vertex enumeration matches brute force") {
    HRep square;
    square.dim = 2;
    square.cons = {{qv({1, 0}), Rat(0), Rel::GE},
                   {qv({-1, 0}), Rat(-1), Rel::GE},
                   {qv({0, 1}), Rat(0), Rel::GE},
                   {qv({0, -1}), Rat(-1), Rel::GE}};
    VRep V = vrep(square);
    CHECK(V.vertices == QMat{qv({0, 0}), qv({0, 1}), qv({1, 0}), qv({1, 1})});
    CHECK(V.rays.empty());
    CHECK(V.lines.empty());
    CHECK(V.vertices == brute_vertices(square));

    std::mt19937_64 rng(99173);
    std::uniform_int_distribution<int> entry(-3, 3), dimd(2, 3), rows(2, 6);
    for (int trial = 0; trial < 40; ++trial) {
        int d = dimd(rng);
        HRep P;
        P.dim = d;
        for (int i = 0; i < d; ++i) {
            QVec lo(d, Rat(0)), hi(d, Rat(0));
            lo[i] = 1;
            hi[i] = -1;
            P.cons.push_back({lo, Rat(-2), Rel::GE});
            P.cons.push_back({hi, Rat(-2), Rel::GE});
        }
        int m = rows(rng);
        for (int i = 0; i < m; ++i) {
            QVec a(d);
            for (auto& c : a) c = Rat(entry(rng));
            P.cons.push_back({a, Rat(-1), Rel::GE});
        }
        VRep W = vrep(P);
        CHECK(W.rays.empty());
        CHECK(W.vertices == brute_vertices(P));
    }
}

TEST_CASE("vrep handles emptiness, rays and lines") {
    HRep empty;
    empty.dim = 1;
    empty.cons = {{qv({1}), Rat(1), Rel::GE}, {qv({-1}), Rat(0), Rel::GE}};
    CHECK(vrep(empty).empty());
    CHECK_FALSE(feasible(empty));
    CHECK(dim_of(empty) == -1);

    HRep halfline;
    halfline.dim = 1;
    halfline.cons = {{qv({1}), Rat(0), Rel::GE}};
    VRep V = vrep(halfline);
    CHECK(V.vertices == QMat{qv({0})});
    CHECK(V.rays == QMat{qv({1})});

    HRep slab; // y free
    slab.dim = 2;
    slab.cons = {{qv({1, 0}), Rat(0), Rel::GE}, {qv({-1, 0}), Rat(-1), Rel::GE}};
    VRep W = vrep(slab);
    CHECK(W.lines.size() == 1);
    CHECK(W.lines[0] == qv({0, 1}));

    HRep point;
    point.dim = 2;
    point.cons = {{qv({1, 0}), Rat(3), Rel::EQ}, {qv({0, 1}), Rat(-2), Rel::EQ}};
    VRep U = vrep(point);
    CHECK(U.vertices == QMat{qv({3, -2})});
    CHECK(dim_of(point) == 0);
}

TEST_CASE("implicit equalities, dimension, relative interior") {
    HRep P;
    P.dim = 2;
    P.cons = {{qv({1, 0}), Rat(0), Rel::GE},
              {qv({-1, 0}), Rat(0), Rel::GE},
              {qv({0, 1}), Rat(0), Rel::GE}};
    CHECK(implicit_equalities(P) == std::vector<int>{0, 1});
    CHECK(dim_of(P) == 1);
    auto ri = relint_point(P);
    REQUIRE(ri.has_value());
    CHECK((*ri)[0] == 0);
    CHECK((*ri)[1] > 0);

    HRep square;
    square.dim = 2;
    square.cons = {{qv({1, 0}), Rat(0), Rel::GE},
                   {qv({-1, 0}), Rat(-1), Rel::GE},
                   {qv({0, 1}), Rat(0), Rel::GE},
                   {qv({0, -1}), Rat(-1), Rel::GE}};
    CHECK(dim_of(square) == 2);
    CHECK(implicit_equalities(square).empty());
    auto c = relint_point(square);
    REQUIRE(c.has_value());
    CHECK(satisfies_all(square.strict_system(), *c));
}

TEST_CASE("polytope face lattice of the square") {
    HRep square;
    square.dim = 2;
    square.cons = {{qv({1, 0}), Rat(0), Rel::GE},
                   {qv({-1, 0}), Rat(-1), Rel::GE},
                   {qv({0, 1}), Rat(0), Rel::GE},
                   {qv({0, -1}), Rat(-1), Rel::GE}};
    VRep V = vrep(square);
    auto faces = polytope_faces(square, V);
    CHECK(faces.size() == 9);
    std::set<std::vector<int>> fs(faces.begin(), faces.end());
    CHECK(fs.count({0, 1, 2, 3}));
    CHECK(fs.count({0, 1}));
    CHECK(fs.count({0, 2}));
    CHECK(fs.count({1, 3}));
    CHECK(fs.count({2, 3}));
    for (int i = 0; i < 4; ++i) CHECK(fs.count({i}));
}

TEST_CASE("cones: canonical rays, membership, faces") {
    Cone c = Cone::from_rays(2, {qv({1, 0}), qv({0, 1}), qv({1, 1}), qv({2, 0})});
    CHECK(c.rays() == QMat{qv({0, 1}), qv({1, 0})});
    CHECK(c.dim() == 2);
    CHECK(c.contains(qv({3, 5})));
    CHECK_FALSE(c.contains(qv({-1, 0})));
    CHECK(c.contains(c.relint_point()));

    Cone z = Cone::zero(2);
    CHECK(z.dim() == 0);
    CHECK(z.contains(qv({0, 0})));
    CHECK_FALSE(z.contains(qv({1, 0})));
    CHECK(c.contains_cone(z));

    Cone o3 = Cone::orthant(3);
    auto sets = o3.face_ray_sets();
    CHECK(sets.size() == 8);

    CHECK_THROWS_AS(Cone::from_rays(2, {qv({1, 0}), qv({-1, 0})}), Error);

    Cone wedge = Cone::from_rays(2, {qv({1, 1}), qv({-1, 1})});
    Cone meet = intersect(Cone::orthant(2), wedge);
    CHECK(meet.rays() == QMat{qv({0, 1}), qv({1, 1})});

    Cone ray = Cone::from_rays(2, {qv({1, 0})});
    CHECK(is_face_of(ray, Cone::orthant(2)));
    CHECK(is_face_of(Cone::zero(2), Cone::orthant(2)));
    Cone diag = Cone::from_rays(2, {qv({1, 1})});
    CHECK_FALSE(is_face_of(diag, Cone::orthant(2)));

    Cone prod = cone_product(ray, Cone::orthant(1));
    CHECK(prod.rays() == QMat{qv({0, 0, 1}), qv({1, 0, 0})});

    QMat proj = {qv({1, 0, 0}), qv({0, 1, 0})};
    CHECK(image_cone(proj, Cone::orthant(3)) == Cone::orthant(2));
}

} // TEST_SUITE
