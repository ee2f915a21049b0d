#include "tropfm/linsys.hpp"

#include "tropfm/linalg.hpp"

#include <algorithm>
#include <map>

namespace tropfm {

bool satisfies(const LinCon& c, const QVec& x) {
    Rat v = dot(c.a, x);
    switch (c.rel) {
        case Rel::GE: return v >= c.b;
        case Rel::GT: return v > c.b;
        case Rel::EQ: return v == c.b;
    }
    return false;
}

bool satisfies_all(const LinSystem& S, const QVec& x) {
    for (const auto& c : S.cons)
        if (!satisfies(c, x)) return false;
    return true;
}

namespace {

// inequality in the working form a.x (>=|>) b
struct Ineq {
    QVec a;
    Rat b;
    bool strict;
};

// canonical key for dominance-aware dedup
struct Key {
    ZVec a;
    bool operator<(const Key& o) const { return a < o.a; }
};

void normalize(Ineq& q) {
    QVec full = q.a;
    full.push_back(q.b);
    ZVec prim = primitive(full); // positive scaling, orientation preserved
    for (size_t i = 0; i < q.a.size(); ++i) q.a[i] = Rat(prim[i]);
    q.b = Rat(prim.back());
}

// Keep only the dominant bound per direction: larger b is stronger; on a tie
// a strict bound is stronger.
void dedup(std::vector<Ineq>& v) {
    std::map<Key, size_t> best;
    std::vector<Ineq> out;
    for (auto& q : v) {
        normalize(q);
        Key k;
        k.a.reserve(q.a.size());
        for (const Rat& c : q.a) k.a.push_back(num(c)); // integral after normalize
        auto it = best.find(k);
        if (it == best.end()) {
            best[k] = out.size();
            out.push_back(q);
        } else {
            Ineq& cur = out[it->second];
            if (q.b > cur.b || (q.b == cur.b && q.strict && !cur.strict)) cur = q;
        }
    }
    v = std::move(out);
}

} // namespace

std::optional<QVec> feasible_point(const LinSystem& S) {
    int d = S.dim;

    // Stage 1: eliminate equalities by substitution.
    QMat eqs; // rows (a | b)
    std::vector<Ineq> ineqs;
    for (const auto& c : S.cons) {
        if (c.rel == Rel::EQ) {
            QVec row = c.a;
            row.push_back(c.b);
            eqs.push_back(row);
        } else {
            ineqs.push_back({c.a, c.b, c.rel == Rel::GT});
        }
    }
    std::vector<int> pivots = rref(eqs);
    for (int p : pivots)
        if (p == d) return std::nullopt; // 0 == nonzero
    // substitution: x_p = eq_b - sum(eq_a_free * x_free)
    std::vector<int> pivot_row(d, -1);
    for (size_t k = 0; k < pivots.size(); ++k) pivot_row[pivots[k]] = (int)k;

    auto substitute = [&](const QVec& a, const Rat& b) {
        // returns reduced (a', b') over free variables only (pivot coords zeroed)
        QVec aa = a;
        Rat bb = b;
        for (int p = 0; p < d; ++p) {
            if (pivot_row[p] < 0 || aa[p] == 0) continue;
            const QVec& e = eqs[pivot_row[p]]; // e: x_p + sum e_j x_j = e_d
            Rat f = aa[p];
            aa[p] = 0;
            for (int j = 0; j < d; ++j) {
                if (j == p || e[j] == 0) continue;
                aa[j] -= f * e[j];
            }
            bb -= f * e[d];
        }
        return std::make_pair(aa, bb);
    };

    std::vector<Ineq> work;
    for (const auto& q : ineqs) {
        auto [aa, bb] = substitute(q.a, q.b);
        if (is_zero(aa)) {
            if (bb > 0 || (bb == 0 && q.strict)) return std::nullopt;
            continue;
        }
        work.push_back({aa, bb, q.strict});
    }
    dedup(work);

    std::vector<int> free_vars;
    for (int j = 0; j < d; ++j)
        if (pivot_row[j] < 0) free_vars.push_back(j);

    // Stage 2: Fourier-Motzkin on the free variables.
    struct Elim {
        int var;
        std::vector<Ineq> lowers, uppers; // bounds in terms of later variables
    };
    std::vector<Elim> trail;
    std::vector<bool> active(d, false);
    for (int v : free_vars) active[v] = true;

    size_t remaining = free_vars.size();
    while (remaining > 0) {
        // choose the active variable minimizing the FM product
        int bestv = -1;
        long bestcost = -1;
        for (int v = 0; v < d; ++v) {
            if (!active[v]) continue;
            long lo = 0, up = 0;
            for (const auto& q : work) {
                if (q.a[v] > 0) ++lo;
                else if (q.a[v] < 0) ++up;
            }
            long cost = lo * up - (lo + up);
            if (bestv < 0 || cost < bestcost) { bestv = v; bestcost = cost; }
        }
        int v = bestv;
        Elim el;
        el.var = v;
        std::vector<Ineq> rest;
        for (auto& q : work) {
            if (q.a[v] > 0) {
                // x_v >= (b - rest)/coef
                Rat c = q.a[v];
                Ineq l;
                l.a = q.a;
                l.a[v] = 0;
                for (auto& t : l.a) t = -t / c;
                l.b = q.b / c;
                l.strict = q.strict;
                el.lowers.push_back(l); // x_v (>=|>) l.b + l.a . x
            } else if (q.a[v] < 0) {
                Rat c = -q.a[v];
                Ineq u;
                u.a = q.a;
                u.a[v] = 0;
                for (auto& t : u.a) t = t / c;
                u.b = -q.b / c;
                u.strict = q.strict;
                el.uppers.push_back(u); // x_v (<=|<) u.b + u.a . x
            } else {
                rest.push_back(q);
            }
        }
        for (const auto& l : el.lowers)
            for (const auto& u : el.uppers) {
                // u.b + u.a.x  >=(>)  l.b + l.a.x
                Ineq q;
                q.a = sub(u.a, l.a);
                q.b = l.b - u.b;
                q.strict = l.strict || u.strict;
                if (is_zero(q.a)) {
                    if (q.b > 0 || (q.b == 0 && q.strict)) return std::nullopt;
                    continue;
                }
                rest.push_back(q);
            }
        dedup(rest);
        work = std::move(rest);
        trail.push_back(std::move(el));
        active[v] = false;
        --remaining;
    }

    for (const auto& q : work) {
        // no variables left: 0 >= b
        (void)q;
        if (q.b > 0 || (q.b == 0 && q.strict)) return std::nullopt;
    }

    // Stage 3: back-substitution.
    QVec x(d, Rat(0));
    for (auto it = trail.rbegin(); it != trail.rend(); ++it) {
        bool has_lo = false, has_up = false, lo_strict = false, up_strict = false;
        Rat lo, up;
        for (const auto& l : it->lowers) {
            Rat v = l.b + dot(l.a, x);
            if (!has_lo) { lo = v; lo_strict = l.strict; has_lo = true; }
            else if (v > lo) { lo = v; lo_strict = l.strict; }
            else if (v == lo) lo_strict = lo_strict || l.strict;
        }
        for (const auto& u : it->uppers) {
            Rat v = u.b + dot(u.a, x);
            if (!has_up) { up = v; up_strict = u.strict; has_up = true; }
            else if (v < up) { up = v; up_strict = u.strict; }
            else if (v == up) up_strict = up_strict || u.strict;
        }
        Rat val;
        if (has_lo && has_up) {
            if (lo > up || (lo == up && (lo_strict || up_strict)))
                throw Error("fm back-substitution inconsistency");
            if (lo == up) val = lo;
            else val = (lo + up) / 2;
        } else if (has_lo) {
            val = lo + 1;
        } else if (has_up) {
            val = up - 1;
        } else {
            val = 0;
        }
        x[it->var] = val;
    }
    // pivot variables from the equalities
    for (int p = 0; p < d; ++p) {
        if (pivot_row[p] < 0) continue;
        const QVec& e = eqs[pivot_row[p]];
        Rat v = e[d];
        for (int j = 0; j < d; ++j) {
            if (j == p || e[j] == 0) continue;
            v -= e[j] * x[j];
        }
        x[p] = v;
    }
    return x;
}

} // namespace tropfm
