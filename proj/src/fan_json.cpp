#include "tropfm/fan_json.hpp"

#include <set>
#include <utility>

#include "json.hpp"
#include "tropfm/errors.hpp"
#include "tropfm/linalg.hpp"

namespace tropfm {

namespace {

using json = nlohmann::ordered_json;

json zvec_json(const ZVec& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(int_str(x));
    return a;
}

json qvec_json(const QVec& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(rat_str(x));
    return a;
}

const json& field(const json& o, const char* key) {
    auto it = o.find(key);
    if (it == o.end()) throw ParseError(std::string("missing field: ") + key);
    return *it;
}

int int_field(const json& j, const char* what) {
    if (!j.is_number_integer())
        throw ParseError(std::string(what) + ": expected an integer");
    return (int)j.get<long long>();
}

Int parse_int_entry(const json& j) {
    if (j.is_string()) return parse_int(j.get<std::string>());
    if (j.is_number_integer()) return Int(j.get<long long>());
    throw ParseError("expected an integer entry");
}

Rat parse_rat_entry(const json& j) {
    if (j.is_string()) return parse_rat(j.get<std::string>());
    if (j.is_number_integer()) return Rat(j.get<long long>());
    throw ParseError("expected a rational entry as \"p/q\"");
}

ZVec parse_zvec(const json& j, int width, const char* what) {
    if (!j.is_array() || (int)j.size() != width)
        throw ParseError(std::string(what) + ": expected a vector of length " +
                         std::to_string(width));
    ZVec v;
    for (const auto& e : j) v.push_back(parse_int_entry(e));
    return v;
}

QVec parse_qvec(const json& j, int width, const char* what) {
    if (!j.is_array() || (int)j.size() != width)
        throw ParseError(std::string(what) + ": expected a vector of length " +
                         std::to_string(width));
    QVec v;
    for (const auto& e : j) v.push_back(parse_rat_entry(e));
    return v;
}

}  // namespace

std::string fan_to_json(const ConeComplex& c) {
    json root;
    root["ambient_rank"] = c.ambient;
    json lb = json::array();
    for (const auto& row : c.lattice.basis()) lb.push_back(zvec_json(row));
    root["lattice_basis"] = lb;
    json cones = json::array();
    for (int i = 0; i < c.size(); ++i) {
        json jc;
        jc["id"] = i;
        json gens = json::array();
        for (const auto& r : c.cells[i].rays()) {
            auto g = c.lattice.primitive_on_ray(r);
            if (!g) throw Error("fan_to_json: ray carries no lattice point");
            gens.push_back(zvec_json(*g));
        }
        jc["generators"] = gens;
        json clb = json::array();
        IntLattice cl = c.cell_lattice(i);
        for (const auto& row : cl.basis()) clb.push_back(zvec_json(row));
        jc["lattice_basis"] = clb;
        jc["label"] = c.labels[i];
        cones.push_back(std::move(jc));
    }
    root["cones"] = std::move(cones);
    json faces = json::array();
    for (const auto& [f, t] : c.face_pairs) faces.push_back(json::array({f, t}));
    root["faces"] = std::move(faces);
    return root.dump(2) + "\n";
}

ConeComplex fan_from_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("fan: invalid json: ") + e.what());
    }
    if (!root.is_object()) throw ParseError("fan: expected a json object");
    int ambient = int_field(field(root, "ambient_rank"), "ambient_rank");
    if (ambient < 0) throw ParseError("ambient_rank: negative");
    const json& jlb = field(root, "lattice_basis");
    if (!jlb.is_array()) throw ParseError("lattice_basis: expected an array");
    ZMat rows;
    for (const auto& e : jlb) rows.push_back(parse_zvec(e, ambient, "lattice_basis"));
    IntLattice lat = IntLattice::from_rows(ambient, rows);
    if (lat.rank() != ambient) throw ParseError("lattice_basis: ambient lattice must have full rank");
    ConeComplex out(ambient, lat);

    const json& jcones = field(root, "cones");
    if (!jcones.is_array()) throw ParseError("cones: expected an array");
    int m = (int)jcones.size();
    std::vector<Cone> cells(m);
    std::vector<std::string> labels(m);
    std::vector<const json*> latt(m, nullptr);
    std::vector<char> seen(m, 0);
    for (const auto& jc : jcones) {
        if (!jc.is_object()) throw ParseError("cones: expected objects");
        int id = int_field(field(jc, "id"), "cone id");
        if (id < 0 || id >= m || seen[id]) throw ParseError("cone ids must be a permutation of 0..n-1");
        seen[id] = 1;
        const json& jg = field(jc, "generators");
        if (!jg.is_array()) throw ParseError("generators: expected an array");
        QMat gens;
        for (const auto& e : jg) gens.push_back(to_qvec(parse_zvec(e, ambient, "generator")));
        cells[id] = Cone::from_rays(ambient, gens);
        labels[id] = jc.value("label", std::string());
        auto it = jc.find("lattice_basis");
        if (it != jc.end()) latt[id] = &*it;
    }
    for (int i = 0; i < m; ++i) out.add_cell(std::move(cells[i]), std::move(labels[i]));
    for (int i = 0; i < m; ++i) {
        if (!latt[i]) continue;
        if (!latt[i]->is_array()) throw ParseError("cone lattice_basis: expected an array");
        ZMat crows;
        for (const auto& e : *latt[i]) crows.push_back(parse_zvec(e, ambient, "cone lattice_basis"));
        if (IntLattice::from_rows(ambient, crows) != out.cell_lattice(i))
            throw ParseError("cone lattice_basis disagrees with the ambient lattice restriction");
    }
    const json& jf = field(root, "faces");
    if (!jf.is_array()) throw ParseError("faces: expected an array");
    std::set<std::pair<int, int>> pairs;
    for (const auto& e : jf) {
        if (!e.is_array() || e.size() != 2) throw ParseError("faces: expected [face, cell] pairs");
        int f = int_field(e[0], "face id"), t = int_field(e[1], "cell id");
        if (f < 0 || f >= m || t < 0 || t >= m) throw ParseError("faces: id out of range");
        pairs.emplace(f, t);
    }
    out.face_pairs.assign(pairs.begin(), pairs.end());
    return out;
}

std::string points_to_json(const PointConfig& p) {
    json root;
    root["n"] = p.n;
    root["r"] = p.r;
    json rows = json::array();
    for (const auto& row : p.coords) rows.push_back(qvec_json(row));
    root["coords"] = std::move(rows);
    return root.dump(2) + "\n";
}

PointConfig points_from_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("points: invalid json: ") + e.what());
    }
    if (!root.is_object()) throw ParseError("points: expected a json object");
    PointConfig p;
    p.n = int_field(field(root, "n"), "n");
    p.r = int_field(field(root, "r"), "r");
    if (p.n < 0 || p.r < 0) throw ParseError("points: n and r must be nonnegative");
    const json& jc = field(root, "coords");
    if (!jc.is_array() || (int)jc.size() != p.n)
        throw ParseError("coords: expected one row per point");
    for (const auto& e : jc) p.coords.push_back(parse_qvec(e, p.r, "coords"));
    return p;
}

}  // namespace tropfm
