#pragma once

// Dense exact linear algebra over Q used by the polyhedral layer.

#include <optional>

#include "tropfm/numbers.hpp"

namespace tropfm {

// Reduced row echelon form in place; returns pivot column indices.
std::vector<int> rref(QMat& M);

int rank(QMat M);
int rank_z(const ZMat& M);

// One solution of A x = b, if any.
std::optional<QVec> solve(const QMat& A, const QVec& b);

// Basis of {x : A x = 0}, as rows.
QMat nullspace(const QMat& A);

// Basis (rows) of the orthogonal complement of the row space, i.e. equations
// cutting out span(rows).
QMat span_equations(const QMat& rows, int ambient);

// Coordinates of x in the row basis B (solves B^T c = x). Requires x in span.
std::optional<QVec> coords_in(const QMat& basis_rows, const QVec& x);

// Inverse of a square nonsingular matrix; throws Error when singular.
QMat inverse(const QMat& A);

} // namespace tropfm
