#pragma once

// Linear constraint systems over Q and Fourier-Motzkin elimination with
// back-substitution. Produces exact witness points; with all-strict
// inequalities the witness is a relative interior point.

#include <optional>

#include "tropfm/numbers.hpp"

namespace tropfm {

enum class Rel { GE, GT, EQ };

struct LinCon {
    QVec a;
    Rat b;
    Rel rel; // a . x  (>=|>|==)  b
};

struct LinSystem {
    int dim = 0;
    std::vector<LinCon> cons;

    explicit LinSystem(int d = 0) : dim(d) {}

    void add(QVec a, Rat b, Rel rel) {
        if ((int)a.size() != dim) throw DimensionMismatch("LinSystem::add");
        cons.push_back({std::move(a), std::move(b), rel});
    }
    void add_ge(QVec a, Rat b) { add(std::move(a), std::move(b), Rel::GE); }
    void add_gt(QVec a, Rat b) { add(std::move(a), std::move(b), Rel::GT); }
    void add_eq(QVec a, Rat b) { add(std::move(a), std::move(b), Rel::EQ); }
};

// Exact feasibility; returns a witness point if the system has a solution.
std::optional<QVec> feasible_point(const LinSystem& S);

inline bool is_feasible(const LinSystem& S) { return feasible_point(S).has_value(); }

bool satisfies(const LinCon& c, const QVec& x);
bool satisfies_all(const LinSystem& S, const QVec& x);

} // namespace tropfm
