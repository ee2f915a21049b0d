#include "tropfm/linalg.hpp"

namespace tropfm {

std::vector<int> rref(QMat& M) {
    std::vector<int> pivots;
    if (M.empty()) return pivots;
    size_t rows = M.size(), cols = M[0].size();
    size_t r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t p = r;
        while (p < rows && M[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(M[r], M[p]);
        Rat inv = M[r][c];
        for (size_t j = c; j < cols; ++j) M[r][j] /= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || M[i][c] == 0) continue;
            Rat f = M[i][c];
            for (size_t j = c; j < cols; ++j) M[i][j] -= f * M[r][j];
        }
        pivots.push_back((int)c);
        ++r;
    }
    return pivots;
}

int rank(QMat M) { return (int)rref(M).size(); }

int rank_z(const ZMat& M) { return rank(to_qmat(M)); }

std::optional<QVec> solve(const QMat& A, const QVec& b) {
    size_t rows = A.size(), cols = rows ? A[0].size() : 0;
    QMat M(rows, QVec(cols + 1));
    for (size_t i = 0; i < rows; ++i) {
        for (size_t j = 0; j < cols; ++j) M[i][j] = A[i][j];
        M[i][cols] = b[i];
    }
    std::vector<int> piv = rref(M);
    for (int p : piv)
        if ((size_t)p == cols) return std::nullopt; // inconsistent
    QVec x(cols, Rat(0));
    for (size_t k = 0; k < piv.size(); ++k) x[piv[k]] = M[k][cols];
    return x;
}

QMat nullspace(const QMat& A) {
    size_t cols = A.empty() ? 0 : A[0].size();
    QMat M = A;
    std::vector<int> piv = rref(M);
    std::vector<bool> is_pivot(cols, false);
    for (int p : piv) is_pivot[p] = true;
    QMat basis;
    for (size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        QVec v(cols, Rat(0));
        v[f] = 1;
        for (size_t k = 0; k < piv.size(); ++k) v[piv[k]] = -M[k][f];
        basis.push_back(v);
    }
    return basis;
}

QMat span_equations(const QMat& rows, int ambient) {
    if (rows.empty()) return qidentity(ambient);
    return nullspace(rows); // complement of the row space: {y : rows . y = 0}
}

std::optional<QVec> coords_in(const QMat& basis_rows, const QVec& x) {
    if (basis_rows.empty()) return is_zero(x) ? std::optional<QVec>(QVec{}) : std::nullopt;
    QMat A = transpose(basis_rows);
    auto sol = solve(A, x);
    if (!sol) return std::nullopt;
    // verify (solve() returns some solution of the possibly overdetermined system)
    QVec back(x.size(), Rat(0));
    for (size_t i = 0; i < basis_rows.size(); ++i)
        for (size_t j = 0; j < x.size(); ++j) back[j] += (*sol)[i] * basis_rows[i][j];
    for (size_t j = 0; j < x.size(); ++j)
        if (back[j] != x[j]) return std::nullopt;
    return sol;
}

QMat inverse(const QMat& A) {
    size_t n = A.size();
    if (n == 0) return {};
    if (A[0].size() != n) throw Error("inverse: matrix not square");
    QMat M(n, QVec(2 * n, Rat(0)));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) M[i][j] = A[i][j];
        M[i][n + i] = 1;
    }
    std::vector<int> piv = rref(M);
    if (piv.size() < n || piv[n - 1] != (int)n - 1)
        throw Error("inverse: singular matrix");
    QMat out(n, QVec(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) out[i][j] = M[i][n + j];
    return out;
}

} // namespace tropfm
