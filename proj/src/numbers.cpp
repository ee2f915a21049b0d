#include "tropfm/numbers.hpp"

#include <sstream>

namespace tropfm {

std::string int_str(const Int& z) { return z.str(); }

std::string rat_str(const Rat& q) {
    if (den(q) == 1) return num(q).str();
    return num(q).str() + "/" + den(q).str();
}

static bool digits_only(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

Int parse_int(const std::string& s) {
    std::string t = s;
    bool neg = false;
    if (!t.empty() && (t[0] == '-' || t[0] == '+')) {
        neg = t[0] == '-';
        t = t.substr(1);
    }
    if (!digits_only(t)) throw ParseError("bad integer '" + s + "'");
    Int v(t);
    return neg ? Int(-v) : v;
}

Rat parse_rat(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(parse_int(s));
    Int p = parse_int(s.substr(0, slash));
    Int q = parse_int(s.substr(slash + 1));
    if (q < 0) { p = -p; q = -q; }
    return make_rat(p, q);
}

Int gcd(const Int& a, const Int& b) { return boost::multiprecision::gcd(a, b); }
Int lcm(const Int& a, const Int& b) { return boost::multiprecision::lcm(a, b); }

ZVec primitive(const QVec& v) {
    Int d = 1;
    for (const Rat& q : v) d = lcm(d, den(q));
    ZVec out(v.size());
    Int g = 0;
    for (size_t i = 0; i < v.size(); ++i) {
        out[i] = num(v[i]) * (d / den(v[i]));
        g = gcd(g, out[i]);
    }
    if (g > 1)
        for (Int& z : out) z /= g;
    return out;
}

ZVec primitive_normalized(const QVec& v) {
    ZVec out = primitive(v);
    for (const Int& z : out) {
        if (z > 0) break;
        if (z < 0) {
            for (Int& w : out) w = -w;
            break;
        }
    }
    return out;
}

ZVec primitive_z(const ZVec& v) {
    Int g = 0;
    for (const Int& z : v) g = gcd(g, z);
    ZVec out = v;
    if (g > 1)
        for (Int& z : out) z /= g;
    return out;
}

bool is_zero(const QVec& v) {
    for (const Rat& q : v)
        if (q != 0) return false;
    return true;
}

bool is_zero_z(const ZVec& v) {
    for (const Int& z : v)
        if (z != 0) return false;
    return true;
}

Rat dot(const QVec& a, const QVec& b) {
    Rat s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Int dot_z(const ZVec& a, const ZVec& b) {
    Int s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

QVec add(const QVec& a, const QVec& b) {
    QVec out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

QVec sub(const QVec& a, const QVec& b) {
    QVec out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

QVec scale(const Rat& c, const QVec& v) {
    QVec out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = c * v[i];
    return out;
}

QVec matvec(const QMat& M, const QVec& x) {
    QVec out(M.size());
    for (size_t i = 0; i < M.size(); ++i) out[i] = dot(M[i], x);
    return out;
}

ZVec matvec_z(const ZMat& M, const ZVec& x) {
    ZVec out(M.size());
    for (size_t i = 0; i < M.size(); ++i) out[i] = dot_z(M[i], x);
    return out;
}

QMat matmul(const QMat& A, const QMat& B) {
    size_t n = A.size(), k = B.size(), m = k ? B[0].size() : 0;
    QMat C(n, QVec(m, Rat(0)));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < k; ++j) {
            if (A[i][j] == 0) continue;
            for (size_t l = 0; l < m; ++l) C[i][l] += A[i][j] * B[j][l];
        }
    return C;
}

QMat transpose(const QMat& M) {
    size_t n = M.size(), m = n ? M[0].size() : 0;
    QMat T(m, QVec(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j) T[j][i] = M[i][j];
    return T;
}

ZMat transpose_z(const ZMat& M) {
    size_t n = M.size(), m = n ? M[0].size() : 0;
    ZMat T(m, ZVec(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j) T[j][i] = M[i][j];
    return T;
}

QMat qidentity(int n) {
    QMat I(n, QVec(n, Rat(0)));
    for (int i = 0; i < n; ++i) I[i][i] = 1;
    return I;
}

ZMat zidentity(int n) {
    ZMat I(n, ZVec(n, Int(0)));
    for (int i = 0; i < n; ++i) I[i][i] = 1;
    return I;
}

std::string vec_str(const QVec& v) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) os << ",";
        os << rat_str(v[i]);
    }
    os << ")";
    return os.str();
}

std::string vec_str_z(const ZVec& v) {
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) os << ",";
        os << v[i].str();
    }
    os << ")";
    return os.str();
}

} // namespace tropfm
