#include "tropfm/tropfan.hpp"

#include <algorithm>
#include <map>

#include "tropfm/errors.hpp"

namespace tropfm {

namespace {

void add_with_subsets(std::set<std::vector<int>>& index, const std::vector<int>& I) {
    if (!index.insert(I).second) return;
    for (size_t k = 0; k < I.size(); ++k) {
        std::vector<int> sub = I;
        sub.erase(sub.begin() + (long)k);
        add_with_subsets(index, sub);
    }
}

}  // namespace

TropFan TropFan::orthant(int r) {
    std::vector<int> all(r);
    for (int i = 0; i < r; ++i) all[i] = i;
    return from_sets(r, {all});
}

TropFan TropFan::disjoint_rays(int r) { return from_sets(r, {}); }

TropFan TropFan::from_sets(int r, const std::vector<std::vector<int>>& sets) {
    if (r < 0) throw Error("TropFan: negative ray count");
    TropFan f;
    f.r = r;
    f.cone_index.insert(std::vector<int>{});
    for (int i = 0; i < r; ++i) f.cone_index.insert({i});
    for (auto I : sets) {
        std::sort(I.begin(), I.end());
        I.erase(std::unique(I.begin(), I.end()), I.end());
        for (int i : I)
            if (i < 0 || i >= r) throw Error("TropFan: ray index out of range");
        add_with_subsets(f.cone_index, I);
    }
    return f;
}

ConeComplex TropFan::as_complex() const {
    ConeComplex c(r);
    std::map<std::vector<int>, int> id;
    for (const auto& I : cone_index) {
        QMat rays;
        for (int i : I) {
            QVec e(r, Rat(0));
            e[i] = 1;
            rays.push_back(e);
        }
        id[I] = c.add_cell(Cone::from_extreme_rays(r, rays), subset_label(I));
    }
    for (const auto& I : cone_index) {
        for (size_t k = 0; k < I.size(); ++k) {
            std::vector<int> sub = I;
            sub.erase(sub.begin() + (long)k);
            c.face_pairs.emplace_back(id.at(sub), id.at(I));
        }
    }
    std::sort(c.face_pairs.begin(), c.face_pairs.end());
    return c;
}

std::string subset_label(const std::vector<int>& I) {
    std::string s = "S[";
    for (size_t k = 0; k < I.size(); ++k) {
        if (k) s += ",";
        s += std::to_string(I[k] + 1);
    }
    return s + "]";
}

std::vector<int> parse_subset_label(const std::string& s, int r) {
    if (s.size() < 3 || s.substr(0, 2) != "S[" || s.back() != ']')
        throw ParseError("subset label: expected S[...]");
    std::string body = s.substr(2, s.size() - 3);
    std::vector<int> I;
    if (body.empty()) return I;
    size_t pos = 0;
    while (pos <= body.size()) {
        size_t comma = body.find(',', pos);
        std::string tok = body.substr(pos, comma == std::string::npos ? std::string::npos
                                                                      : comma - pos);
        if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
            throw ParseError("subset label: bad ray index");
        int v = std::stoi(tok) - 1;
        if (v < 0 || v >= r) throw ParseError("subset label: ray index out of range");
        I.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    std::sort(I.begin(), I.end());
    if (std::adjacent_find(I.begin(), I.end()) != I.end())
        throw ParseError("subset label: repeated ray index");
    return I;
}

}  // namespace tropfm
