#include "tropfm/lattice.hpp"

namespace tropfm {

static Int floor_div(const Int& a, const Int& b) {
    Int q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

// Hermite reduction of rows [r0, end) over columns [c0, end).
static void hnf_block(ZMat& M, size_t r0, size_t c0) {
    if (M.empty()) return;
    size_t rows = M.size(), cols = M[0].size();
    size_t r = r0;
    for (size_t c = c0; c < cols && r < rows; ++c) {
        // Euclidean elimination below row r in column c.
        while (true) {
            size_t best = rows;
            for (size_t i = r; i < rows; ++i) {
                if (M[i][c] == 0) continue;
                if (best == rows || abs(M[i][c]) < abs(M[best][c])) best = i;
            }
            if (best == rows) break; // column zero below r
            std::swap(M[r], M[best]);
            bool clean = true;
            for (size_t i = r + 1; i < rows; ++i) {
                if (M[i][c] == 0) continue;
                Int q = floor_div(M[i][c], M[r][c]);
                if (q != 0)
                    for (size_t j = 0; j < cols; ++j) M[i][j] -= q * M[r][j];
                if (M[i][c] != 0) clean = false;
            }
            if (clean) break;
        }
        if (M[r][c] == 0) continue;
        if (M[r][c] < 0)
            for (size_t j = 0; j < cols; ++j) M[r][j] = -M[r][j];
        for (size_t i = r0; i < r; ++i) {
            Int q = floor_div(M[i][c], M[r][c]);
            if (q != 0)
                for (size_t j = 0; j < cols; ++j) M[i][j] -= q * M[r][j];
        }
        ++r;
    }
}

ZMat hnf(ZMat rows) {
    hnf_block(rows, 0, 0);
    while (!rows.empty() && is_zero_z(rows.back())) rows.pop_back();
    return rows;
}

ZMat kernel_z(const ZMat& A) {
    // HNF of [A^T | I]: rows whose left part vanishes carry a kernel basis.
    size_t m = A.size(), n = m ? A[0].size() : 0;
    if (n == 0) return {};
    ZMat M(n, ZVec(m + n, Int(0)));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < m; ++j) M[i][j] = A[j][i];
        M[i][m + i] = 1;
    }
    hnf_block(M, 0, 0);
    // Rows with zero left part sit at the bottom after reduction over the
    // left columns; locate them and canonicalize their right parts.
    size_t r = 0;
    for (size_t i = 0; i < n; ++i) {
        bool lz = true;
        for (size_t j = 0; j < m; ++j)
            if (M[i][j] != 0) { lz = false; break; }
        if (!lz) r = i + 1;
    }
    ZMat K;
    for (size_t i = r; i < n; ++i) K.push_back(ZVec(M[i].begin() + m, M[i].end()));
    return hnf(std::move(K));
}

ZVec snf_diagonal(ZMat A) {
    size_t rows = A.size(), cols = rows ? A[0].size() : 0;
    ZVec diag;
    size_t t = 0;
    while (t < rows && t < cols) {
        // find a nonzero pivot
        size_t pi = rows, pj = cols;
        for (size_t i = t; i < rows && pi == rows; ++i)
            for (size_t j = t; j < cols; ++j)
                if (A[i][j] != 0) { pi = i; pj = j; break; }
        if (pi == rows) break;
        std::swap(A[t], A[pi]);
        for (size_t i = 0; i < rows; ++i) std::swap(A[i][t], A[i][pj]);
        bool again = true;
        while (again) {
            again = false;
            for (size_t i = t + 1; i < rows; ++i) {
                if (A[i][t] == 0) continue;
                Int q = floor_div(A[i][t], A[t][t]);
                for (size_t j = t; j < cols; ++j) A[i][j] -= q * A[t][j];
                if (A[i][t] != 0) { std::swap(A[t], A[i]); again = true; }
            }
            for (size_t j = t + 1; j < cols; ++j) {
                if (A[t][j] == 0) continue;
                Int q = floor_div(A[t][j], A[t][t]);
                for (size_t i = t; i < rows; ++i) A[i][j] -= q * A[i][t];
                if (A[t][j] != 0) {
                    for (size_t i = t; i < rows; ++i) std::swap(A[i][t], A[i][j]);
                    again = true;
                }
            }
            if (!again) {
                // pivot must divide the remaining block
                for (size_t i = t + 1; i < rows && !again; ++i)
                    for (size_t j = t + 1; j < cols && !again; ++j)
                        if (A[i][j] % A[t][t] != 0) {
                            for (size_t l = t; l < cols; ++l) A[t][l] += A[i][l];
                            again = true;
                        }
            }
        }
        if (A[t][t] < 0)
            for (size_t j = t; j < cols; ++j) A[t][j] = -A[t][j];
        diag.push_back(A[t][t]);
        ++t;
    }
    return diag;
}

IntLattice IntLattice::standard(int ambient) {
    IntLattice L;
    L.ambient_ = ambient;
    L.basis_ = zidentity(ambient);
    return L;
}

IntLattice IntLattice::scaled(int ambient, const Int& c) {
    IntLattice L;
    L.ambient_ = ambient;
    L.basis_ = zidentity(ambient);
    for (auto& row : L.basis_)
        for (auto& z : row) z *= c;
    return L;
}

IntLattice IntLattice::from_rows(int ambient, const ZMat& rows) {
    for (const auto& r : rows)
        if ((int)r.size() != ambient) throw DimensionMismatch("lattice basis row");
    IntLattice L;
    L.ambient_ = ambient;
    L.basis_ = hnf(rows);
    return L;
}

std::optional<ZVec> IntLattice::coordinates(const ZVec& v) const {
    auto c = coords_in(to_qmat(basis_), to_qvec(v));
    if (!c) return std::nullopt;
    ZVec out(c->size());
    for (size_t i = 0; i < c->size(); ++i) {
        if (den((*c)[i]) != 1) return std::nullopt;
        out[i] = num((*c)[i]);
    }
    return out;
}

bool IntLattice::contains(const ZVec& v) const { return coordinates(v).has_value(); }

bool IntLattice::contains_q(const QVec& v) const {
    for (const Rat& q : v)
        if (den(q) != 1) return false;
    ZVec z(v.size());
    for (size_t i = 0; i < v.size(); ++i) z[i] = num(v[i]);
    return contains(z);
}

IntLattice IntLattice::intersect_subspace(const QMat& eqs) const {
    if (basis_.empty() || eqs.empty()) return *this;
    // rows of (eqs . basis^T), cleared to integers
    ZMat A;
    for (const auto& e : eqs) {
        QVec row(basis_.size());
        for (size_t i = 0; i < basis_.size(); ++i) row[i] = dot(e, to_qvec(basis_[i]));
        A.push_back(primitive(row));
    }
    ZMat K = kernel_z(A);
    ZMat rows;
    for (const auto& k : K) {
        ZVec v(ambient_, Int(0));
        for (size_t i = 0; i < basis_.size(); ++i)
            for (int j = 0; j < ambient_; ++j) v[j] += k[i] * basis_[i][j];
        rows.push_back(v);
    }
    return from_rows(ambient_, rows);
}

IntLattice IntLattice::saturation() const {
    QMat eqs = span_equations(to_qmat(basis_), ambient_);
    if (eqs.empty()) return standard(ambient_);
    ZMat E;
    for (const auto& e : eqs) E.push_back(primitive(e));
    return from_rows(ambient_, kernel_z(E));
}

std::optional<ZVec> IntLattice::primitive_on_ray(const QVec& d) const {
    // Points of L on the ray are the integer multiples of the first one;
    // find the least k > 0 with k * d0 in L where d0 is the Z-primitive
    // direction, via coordinates in the saturated sublattice.
    ZVec d0 = primitive(d);
    if (is_zero_z(d0)) return std::nullopt;
    IntLattice line = intersect_subspace(span_equations({to_qvec(d0)}, ambient_));
    if (line.rank() != 1) return std::nullopt;
    ZVec g = line.basis()[0];
    // orient along d
    for (size_t i = 0; i < g.size(); ++i) {
        if (d0[i] == 0) continue;
        if ((g[i] < 0) != (d0[i] < 0))
            for (auto& z : g) z = -z;
        break;
    }
    return g;
}

IntLattice lattice_image(const ZMat& M, const IntLattice& L) {
    ZMat rows;
    for (const auto& b : L.basis()) rows.push_back(matvec_z(M, b));
    return IntLattice::from_rows((int)M.size(), rows);
}

IntLattice lattice_image_q(const QMat& M, const IntLattice& L) {
    ZMat rows;
    for (const auto& b : L.basis()) {
        QVec y = matvec(M, to_qvec(b));
        ZVec z(y.size());
        for (size_t i = 0; i < y.size(); ++i) {
            if (den(y[i]) != 1) throw Error("lattice image not integral");
            z[i] = num(y[i]);
        }
        rows.push_back(z);
    }
    return IntLattice::from_rows((int)M.size(), rows);
}

bool lattice_subset(const IntLattice& sub, const IntLattice& sup) {
    for (const auto& b : sub.basis())
        if (!sup.contains(b)) return false;
    return true;
}

Int lattice_index(const IntLattice& sub, const IntLattice& sup) {
    if (sub.rank() != sup.rank()) throw DimensionMismatch("lattice_index ranks");
    ZMat C;
    for (const auto& b : sub.basis()) {
        auto c = coords_in(to_qmat(sup.basis()), to_qvec(b));
        if (!c) throw Error("lattice_index: not a sublattice");
        ZVec row(c->size());
        for (size_t i = 0; i < c->size(); ++i) {
            if (den((*c)[i]) != 1) throw Error("lattice_index: not a sublattice");
            row[i] = num((*c)[i]);
        }
        C.push_back(row);
    }
    ZMat H = hnf(C);
    Int idx = 1;
    if ((int)H.size() != sub.rank()) throw Error("lattice_index: degenerate");
    // product of HNF pivots
    size_t col = 0;
    for (size_t i = 0; i < H.size(); ++i) {
        while (col < H[i].size() && H[i][col] == 0) ++col;
        idx *= H[i][col];
    }
    return idx;
}

} // namespace tropfm
