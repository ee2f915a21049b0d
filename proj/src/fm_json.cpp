#include "tropfm/fm_json.hpp"

#include "json.hpp"
#include "tropfm/errors.hpp"

namespace tropfm {

namespace {

using json = nlohmann::ordered_json;

json ivec_json(const std::vector<int>& v) {
    json a = json::array();
    for (int x : v) a.push_back(x);
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

std::vector<int> parse_ivec(const json& j, const char* what) {
    if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array");
    std::vector<int> v;
    for (const auto& e : j) v.push_back(int_field(e, what));
    return v;
}

}  // namespace

std::string fm_types_to_json(int n, int rays, const std::vector<PlantedForestType>& types) {
    json root;
    root["schema"] = "fm-types";
    root["n"] = n;
    root["rays"] = rays;
    json jt = json::array();
    for (const auto& f : types) {
        if (f.base.n != n || f.base.r() != rays)
            throw Error("fm_types_to_json: type does not match the declared n and rays");
        validate_forest(f);
        json o;
        o["base"] = grid_label(f.base);
        json jc = json::array();
        for (const auto& c : f.classes) jc.push_back(ivec_json(c));
        o["classes"] = std::move(jc);
        json jtr = json::array();
        for (const auto& t : f.trees) {
            json to;
            to["parent"] = ivec_json(t.parent);
            json jl = json::array();
            for (const auto& L : t.legs) jl.push_back(ivec_json(L));
            to["legs"] = std::move(jl);
            jtr.push_back(std::move(to));
        }
        o["trees"] = std::move(jtr);
        jt.push_back(std::move(o));
    }
    root["types"] = std::move(jt);
    return root.dump(2) + "\n";
}

std::vector<PlantedForestType> fm_types_from_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("fm-types: invalid json: ") + e.what());
    }
    if (!root.is_object()) throw ParseError("fm-types: expected a json object");
    const json& js = field(root, "schema");
    if (!js.is_string() || js.get<std::string>() != "fm-types")
        throw ParseError("fm-types: wrong schema tag");
    int n = int_field(field(root, "n"), "n");
    int rays = int_field(field(root, "rays"), "rays");
    const json& jt = field(root, "types");
    if (!jt.is_array()) throw ParseError("types: expected an array");
    std::vector<PlantedForestType> out;
    for (const auto& o : jt) {
        if (!o.is_object()) throw ParseError("types: expected objects");
        const json& jb = field(o, "base");
        if (!jb.is_string()) throw ParseError("base: expected a grid label string");
        PlantedForestType f;
        f.base = parse_grid_label(jb.get<std::string>());
        if (f.base.n != n || f.base.r() != rays)
            throw ParseError("base: label does not match the declared n and rays");
        for (const auto& e : field(o, "classes")) f.classes.push_back(parse_ivec(e, "classes"));
        const json& jtr = field(o, "trees");
        if (!jtr.is_array()) throw ParseError("trees: expected an array");
        for (const auto& to : jtr) {
            if (!to.is_object()) throw ParseError("trees: expected objects");
            RootedTree t;
            t.parent = parse_ivec(field(to, "parent"), "parent");
            t.legs.clear();
            for (const auto& e : field(to, "legs")) t.legs.push_back(parse_ivec(e, "legs"));
            f.trees.push_back(std::move(t));
        }
        try {
            validate_forest(f);
        } catch (const Error& e) {
            throw ParseError(std::string("types: ") + e.what());
        }
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace tropfm
