#pragma once

// Exact arithmetic. All core computations run over Q (GMP-backed); floating
// point is not used anywhere in the library.

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <vector>

#include "tropfm/errors.hpp"

namespace tropfm {

using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;

using ZVec = std::vector<Int>;
using QVec = std::vector<Rat>;
using ZMat = std::vector<ZVec>;
using QMat = std::vector<QVec>;

inline Int num(const Rat& q) { return Int(numerator(q)); }
inline Int den(const Rat& q) { return Int(denominator(q)); }

inline Rat make_rat(const Int& p, const Int& q) {
    if (q == 0) throw ParseError("zero denominator");
    return Rat(p, q); // the pair constructor canonicalizes
}

// Canonical text form: "p" when the denominator is 1, else "p/q".
std::string rat_str(const Rat& q);
std::string int_str(const Int& z);

// Accepts "p" and "p/q" (optional sign, decimal digits). Canonicalizes.
Rat parse_rat(const std::string& s);
Int parse_int(const std::string& s);

Int gcd(const Int& a, const Int& b);
Int lcm(const Int& a, const Int& b);

inline QVec to_qvec(const ZVec& v) {
    QVec out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = Rat(v[i]);
    return out;
}

inline QMat to_qmat(const ZMat& m) {
    QMat out(m.size());
    for (size_t i = 0; i < m.size(); ++i) out[i] = to_qvec(m[i]);
    return out;
}

// Clears denominators and divides by the content; the zero vector maps to
// itself. The sign convention keeps the first nonzero entry's sign.
ZVec primitive(const QVec& v);
// Same, but flips so the first nonzero entry is positive.
ZVec primitive_normalized(const QVec& v);
ZVec primitive_z(const ZVec& v);

bool is_zero(const QVec& v);
bool is_zero_z(const ZVec& v);

Rat dot(const QVec& a, const QVec& b);
Int dot_z(const ZVec& a, const ZVec& b);
QVec add(const QVec& a, const QVec& b);
QVec sub(const QVec& a, const QVec& b);
QVec scale(const Rat& c, const QVec& v);

// y = M x (rows of M are the linear functionals).
QVec matvec(const QMat& M, const QVec& x);
ZVec matvec_z(const ZMat& M, const ZVec& x);
QMat matmul(const QMat& A, const QMat& B);
QMat transpose(const QMat& M);
ZMat transpose_z(const ZMat& M);
QMat qidentity(int n);
ZMat zidentity(int n);

std::string vec_str(const QVec& v);
std::string vec_str_z(const ZVec& v);

} // namespace tropfm
