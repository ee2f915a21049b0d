#include "doctest.h"

#include <string>
#include <vector>

#include "tropfm/complex.hpp"
#include "tropfm/errors.hpp"
#include "tropfm/fan_json.hpp"
#include "tropfm/linalg.hpp"

using namespace tropfm;

namespace {

QVec qv(std::initializer_list<int> xs) {
    QVec v;
    for (int x : xs) v.emplace_back(x);
    return v;
}

ZVec zv(std::initializer_list<int> xs) {
    ZVec v;
    for (int x : xs) v.emplace_back(x);
    return v;
}

ConeComplex orthant_fan(int d) {
    ConeComplex c(d);
    c.add_cell(Cone::orthant(d), "top");
    close_under_faces(c);
    compute_face_pairs(c);
    return c;
}

std::vector<int> identity_targets(const ConeComplex& c) {
    std::vector<int> ids(c.size());
    for (int i = 0; i < c.size(); ++i) ids[i] = i;
    return ids;
}

}  // namespace

TEST_SUITE("complex") {

TEST_CASE("face closure and covering pairs of the orthant fan") {
    ConeComplex c = orthant_fan(2);
    CHECK(c.size() == 4);
    CHECK(c.dim() == 2);
    CHECK(c.face_pairs.size() == 4);
    CHECK(validate_complex(c, true).ok);
    auto mx = c.maximal_cells();
    REQUIRE(mx.size() == 1);
    CHECK(c.cells[mx[0]] == Cone::orthant(2));
    CHECK(c.facets_of(mx[0]).size() == 2);

    ConeComplex c3 = orthant_fan(3);
    CHECK(c3.size() == 8);
    CHECK(c3.face_pairs.size() == 3 + 6 + 3);
    CHECK(validate_complex(c3, true).ok);
}

TEST_CASE("validate_complex catches structural defects") {
    ConeComplex missing(2);
    missing.add_cell(Cone::orthant(2));
    CHECK_FALSE(validate_complex(missing).ok);

    ConeComplex dropped = orthant_fan(2);
    dropped.face_pairs.pop_back();
    CHECK_FALSE(validate_complex(dropped).ok);

    ConeComplex dup = orthant_fan(2);
    dup.add_cell(Cone::orthant(2));
    CHECK_FALSE(validate_complex(dup).ok);

    ConeComplex overlap(2);
    overlap.add_cell(Cone::from_rays(2, {qv({1, 0}), qv({1, 1})}));
    overlap.add_cell(Cone::from_rays(2, {qv({2, 1}), qv({0, 1})}));
    close_under_faces(overlap);
    compute_face_pairs(overlap);
    CHECK(validate_complex(overlap, false).ok);
    CHECK_FALSE(validate_complex(overlap, true).ok);
}

TEST_CASE("cell lattices restrict the ambient lattice") {
    ZMat even{zv({1, 1}), zv({0, 2})};  // {(a, b) : a + b even}
    ConeComplex c(2, IntLattice::from_rows(2, even));
    c.add_cell(Cone::orthant(2));
    close_under_faces(c);
    compute_face_pairs(c);
    CHECK(validate_complex(c, true).ok);

    int rx = *c.find_cell(Cone::from_rays(2, {qv({1, 0})}));
    IntLattice lx = c.cell_lattice(rx);
    REQUIRE(lx.rank() == 1);
    CHECK(lx.basis()[0] == zv({2, 0}));

    ConeComplex d(2, IntLattice::from_rows(2, even));
    d.add_cell(Cone::from_rays(2, {qv({1, 1})}));
    close_under_faces(d);
    compute_face_pairs(d);
    int rd = *d.find_cell(Cone::from_rays(2, {qv({1, 1})}));
    REQUIRE(d.cell_lattice(rd).rank() == 1);
    CHECK(d.cell_lattice(rd).basis()[0] == zv({1, 1}));
}

TEST_CASE("same_fan ignores cell order and labels") {
    ConeComplex a = orthant_fan(2);
    ConeComplex b(2);
    b.add_cell(Cone::zero(2), "o");
    b.add_cell(Cone::from_rays(2, {qv({0, 1})}), "y");
    b.add_cell(Cone::from_rays(2, {qv({1, 0})}), "x");
    b.add_cell(Cone::orthant(2), "t");
    compute_face_pairs(b);
    CHECK(same_fan(a, b));
    CHECK(same_fan(b, a));

    ConeComplex c(2);
    c.add_cell(Cone::zero(2));
    c.add_cell(Cone::from_rays(2, {qv({0, 1})}));
    c.add_cell(Cone::from_rays(2, {qv({1, 1})}));
    c.add_cell(Cone::from_rays(2, {qv({1, 1}), qv({0, 1})}));
    compute_face_pairs(c);
    CHECK_FALSE(same_fan(a, c));

    ConeComplex scaled(2, IntLattice::scaled(2, Int(2)));
    scaled.cells = a.cells;
    scaled.labels = a.labels;
    scaled.face_pairs = a.face_pairs;
    CHECK_FALSE(same_fan(a, scaled));
}

TEST_CASE("complex products") {
    ConeComplex half = orthant_fan(1);
    ConeComplex prod = complex_product(half, half);
    CHECK(prod.size() == 4);
    CHECK(same_fan(prod, orthant_fan(2)));
    CHECK(validate_complex(prod, true).ok);

    ConeComplex scaled(1, IntLattice::scaled(1, Int(2)));
    scaled.add_cell(Cone::orthant(1));
    close_under_faces(scaled);
    compute_face_pairs(scaled);
    ConeComplex p2 = complex_product(scaled, half);
    CHECK(p2.lattice.basis() == ZMat{zv({2, 0}), zv({0, 1})});
    CHECK(validate_complex(p2, true).ok);
}

TEST_CASE("star fans") {
    ConeComplex c = orthant_fan(2);

    SUBCASE("star of the origin reproduces the complex") {
        int o = *c.find_cell(Cone::zero(2));
        StarFan s = star_fan(c, o);
        CHECK(same_fan(s.fan, c));
        CHECK(s.proj == qidentity(2));
        for (size_t k = 0; k < s.source_cells.size(); ++k)
            CHECK(s.fan.labels[k] == c.labels[s.source_cells[k]]);
    }

    SUBCASE("star of a ray in the orthant is a half line") {
        int rx = *c.find_cell(Cone::from_rays(2, {qv({1, 0})}));
        StarFan s = star_fan(c, rx);
        CHECK(s.fan.ambient == 1);
        CHECK(s.fan.size() == 2);
        CHECK(same_fan(s.fan, orthant_fan(1)));
        CHECK(validate_complex(s.fan).ok);
        CHECK(matvec(s.proj, qv({1, 0})) == qv({0}));
    }

    SUBCASE("star of a maximal cell is the point fan") {
        int top = *c.find_cell(Cone::orthant(2));
        StarFan s = star_fan(c, top);
        CHECK(s.fan.ambient == 0);
        CHECK(s.fan.size() == 1);
        CHECK(s.fan.cells[0].dim() == 0);
        CHECK(s.source_cells == std::vector<int>{top});
    }

    SUBCASE("unknown cell id") {
        CHECK_THROWS_AS(star_fan(c, 99), NotACell);
        CHECK_THROWS_AS(star_fan(c, -1), NotACell);
    }

    SUBCASE("quotient respects a nonstandard ambient lattice") {
        ZMat even{zv({1, 1}), zv({0, 2})};
        ConeComplex cc(2, IntLattice::from_rows(2, even));
        cc.add_cell(Cone::orthant(2));
        close_under_faces(cc);
        compute_face_pairs(cc);
        int rx = *cc.find_cell(Cone::from_rays(2, {qv({1, 0})}));
        StarFan s = star_fan(cc, rx);
        CHECK(s.fan.ambient == 1);
        CHECK(same_fan(s.fan, orthant_fan(1)));
        CHECK(matvec(s.proj, qv({1, 0})) == qv({0}));
        QVec im = matvec(s.proj, qv({1, 1}));
        REQUIRE(im.size() == 1);
        CHECK(den(im[0]) == 1);
        QVec im2 = matvec(s.proj, qv({0, 2}));
        CHECK(den(im2[0]) == 1);
    }
}

TEST_CASE("complex map validation") {
    ConeComplex c = orthant_fan(2);
    ComplexMap idm = ComplexMap::uniform(zidentity(2), identity_targets(c));
    CHECK(validate_map(c, c, idm).ok);

    int top = *c.find_cell(Cone::orthant(2));
    ComplexMap bad = idm;
    bad.cell_matrix[top] = ZMat{zv({1, 1}), zv({0, 1})};
    auto rep = validate_map(c, c, bad);
    CHECK_FALSE(rep.ok);
    CHECK(rep.reason.find("disagree") != std::string::npos);

    ComplexMap esc = idm;
    esc.cell_matrix[top] = ZMat{zv({-1, 0}), zv({0, 1})};
    CHECK_FALSE(validate_map(c, c, esc).ok);

    ComplexMap tiny;
    CHECK_FALSE(validate_map(c, c, tiny).ok);
}

TEST_CASE("subdivision decisions") {
    ConeComplex coarse = orthant_fan(2);
    int top = *coarse.find_cell(Cone::orthant(2));
    int rx = *coarse.find_cell(Cone::from_rays(2, {qv({1, 0})}));
    int ry = *coarse.find_cell(Cone::from_rays(2, {qv({0, 1})}));
    int oo = *coarse.find_cell(Cone::zero(2));

    auto targets_into_coarse = [&](const ConeComplex& fine) {
        std::vector<int> tg(fine.size(), top);
        for (int i = 0; i < fine.size(); ++i) {
            if (fine.cells[i] == Cone::from_rays(2, {qv({1, 0})})) tg[i] = rx;
            if (fine.cells[i] == Cone::from_rays(2, {qv({0, 1})})) tg[i] = ry;
            if (fine.cells[i] == Cone::zero(2)) tg[i] = oo;
        }
        return tg;
    };

    SUBCASE("identity is a subdivision") {
        auto r = is_subdivision(coarse, coarse,
                                ComplexMap::uniform(zidentity(2), identity_targets(coarse)));
        CHECK(r.ok);
    }

    SUBCASE("diagonal refinement is a subdivision and its reverse is not") {
        ConeComplex fine(2);
        fine.add_cell(Cone::from_rays(2, {qv({1, 0}), qv({1, 1})}), "low");
        fine.add_cell(Cone::from_rays(2, {qv({1, 1}), qv({0, 1})}), "high");
        close_under_faces(fine);
        compute_face_pairs(fine);
        auto r = is_subdivision(fine, coarse,
                                ComplexMap::uniform(zidentity(2), targets_into_coarse(fine)));
        CHECK(r.ok);

        std::vector<int> rev_tg(coarse.size(), 0);
        auto rev = is_subdivision(coarse, fine, ComplexMap::uniform(zidentity(2), rev_tg));
        CHECK_FALSE(rev.ok);
    }

    SUBCASE("lattice refinement is rejected with the cell named") {
        ConeComplex fine(1, IntLattice::scaled(1, Int(2)));
        fine.add_cell(Cone::orthant(1));
        close_under_faces(fine);
        compute_face_pairs(fine);
        ConeComplex cz(1);
        cz.add_cell(Cone::orthant(1));
        close_under_faces(cz);
        compute_face_pairs(cz);
        auto r = is_subdivision(fine, cz,
                                ComplexMap::uniform(zidentity(1), identity_targets(cz)));
        CHECK_FALSE(r.ok);
        CHECK(r.fine_cell == 0);
        CHECK(r.reason.find("lattice") != std::string::npos);
    }

    SUBCASE("uncovered region is witnessed") {
        ConeComplex fine(2);
        fine.add_cell(Cone::from_rays(2, {qv({1, 0}), qv({1, 1})}), "half");
        close_under_faces(fine);
        compute_face_pairs(fine);
        auto r = is_subdivision(fine, coarse,
                                ComplexMap::uniform(zidentity(2), targets_into_coarse(fine)));
        CHECK_FALSE(r.ok);
        CHECK(r.coarse_cell == top);
        REQUIRE(r.witness.has_value());
        CHECK(coarse.cells[top].contains(*r.witness));
        CHECK_FALSE(fine.cells[0].contains(*r.witness));
    }

    SUBCASE("overlapping images are rejected") {
        ConeComplex fine(2);
        fine.add_cell(Cone::orthant(2));
        fine.add_cell(Cone::from_rays(2, {qv({1, 0}), qv({1, 1})}));
        close_under_faces(fine);
        compute_face_pairs(fine);
        auto r = is_subdivision(fine, coarse,
                                ComplexMap::uniform(zidentity(2), targets_into_coarse(fine)));
        CHECK_FALSE(r.ok);
        CHECK(r.reason.find("overlap") != std::string::npos);
    }

    SUBCASE("unimodular reparametrization is a subdivision") {
        ConeComplex fine(2);
        fine.add_cell(Cone::from_rays(2, {qv({1, 0}), qv({1, 1})}), "wedge");
        close_under_faces(fine);
        compute_face_pairs(fine);
        ZMat m{zv({1, -1}), zv({0, 1})};
        std::vector<int> tg(fine.size(), top);
        for (int i = 0; i < fine.size(); ++i) {
            if (fine.cells[i] == Cone::from_rays(2, {qv({1, 0})})) tg[i] = rx;
            if (fine.cells[i] == Cone::from_rays(2, {qv({1, 1})})) tg[i] = ry;
            if (fine.cells[i] == Cone::zero(2)) tg[i] = oo;
        }
        auto r = is_subdivision(fine, coarse, ComplexMap::uniform(m, tg));
        CHECK(r.ok);
    }

    SUBCASE("non-unimodular reparametrization fails the lattice condition") {
        ConeComplex fine(1);
        fine.add_cell(Cone::orthant(1));
        close_under_faces(fine);
        compute_face_pairs(fine);
        ZMat dbl{zv({2})};
        auto r = is_subdivision(fine, fine, ComplexMap::uniform(dbl, identity_targets(fine)));
        CHECK_FALSE(r.ok);
        CHECK(r.reason.find("lattice") != std::string::npos);
    }

    SUBCASE("undefined map throws") {
        CHECK_THROWS_AS(is_subdivision(coarse, coarse, ComplexMap{}), MapUndefined);
    }
}

TEST_CASE("fan json round trip") {
    ZMat even{zv({1, 1}), zv({0, 2})};
    ConeComplex c(2, IntLattice::from_rows(2, even));
    c.add_cell(Cone::orthant(2), "top");
    close_under_faces(c);
    compute_face_pairs(c);

    std::string text = fan_to_json(c);
    CHECK(text == fan_to_json(c));  // deterministic
    ConeComplex back = fan_from_json(text);
    CHECK(same_fan(back, c));
    CHECK(back.labels.size() == c.labels.size());
    for (int i = 0; i < c.size(); ++i) CHECK(back.labels[i] == c.labels[i]);
    CHECK(fan_to_json(back) == text);  // byte-identical re-export

    // generators are written primitive for the ambient lattice: the x ray of
    // the even lattice exports as (2, 0)
    CHECK(text.find("\"2\"") != std::string::npos);
}

TEST_CASE("fan json rejects malformed input") {
    CHECK_THROWS_AS(fan_from_json("{"), ParseError);
    CHECK_THROWS_AS(fan_from_json("[]"), ParseError);
    CHECK_THROWS_AS(fan_from_json(R"({"ambient_rank": 1})"), ParseError);
    CHECK_THROWS_AS(
        fan_from_json(R"({"ambient_rank": 1, "lattice_basis": [], "cones": [], "faces": []})"),
        ParseError);

    std::string ok = R"({"ambient_rank": 1, "lattice_basis": [["1"]],
        "cones": [{"id": 0, "generators": [], "label": ""}], "faces": []})";
    ConeComplex c = fan_from_json(ok);
    CHECK(c.size() == 1);
    CHECK(c.cells[0].dim() == 0);

    CHECK_THROWS_AS(fan_from_json(R"({"ambient_rank": 1, "lattice_basis": [["1"]],
        "cones": [{"id": 0, "generators": [], "label": ""},
                  {"id": 0, "generators": [], "label": ""}], "faces": []})"),
                    ParseError);
    CHECK_THROWS_AS(fan_from_json(R"({"ambient_rank": 1, "lattice_basis": [["1"]],
        "cones": [{"id": 0, "generators": [["1/2"]], "label": ""}], "faces": []})"),
                    ParseError);
    CHECK_THROWS_AS(fan_from_json(R"({"ambient_rank": 1, "lattice_basis": [["1"]],
        "cones": [{"id": 0, "generators": [], "label": ""}], "faces": [[0, 5]]})"),
                    ParseError);
    CHECK_THROWS_AS(fan_from_json(R"({"ambient_rank": 1, "lattice_basis": [["1"]],
        "cones": [{"id": 0, "generators": [["1"]], "lattice_basis": [["2"]],
                   "label": ""}], "faces": []})"),
                    ParseError);
}

TEST_CASE("point configuration json") {
    PointConfig p;
    p.n = 2;
    p.r = 2;
    p.coords = {QVec{Rat(1, 2), Rat(0)}, QVec{Rat(1), Rat(3, 4)}};
    std::string text = points_to_json(p);
    PointConfig q = points_from_json(text);
    CHECK(q.n == p.n);
    CHECK(q.r == p.r);
    CHECK(q.coords == p.coords);
    CHECK(points_to_json(q) == text);

    CHECK_THROWS_AS(points_from_json("{}"), ParseError);
    CHECK_THROWS_AS(points_from_json(R"({"n": 2, "r": 1, "coords": [["1"]]})"), ParseError);
    CHECK_THROWS_AS(points_from_json(R"({"n": 1, "r": 1, "coords": [["x"]]})"), ParseError);
}

}  // TEST_SUITE
