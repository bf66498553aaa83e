#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <vector>

#include "bms/error.hpp"

namespace bms {

// Exact arbitrary-precision rational scalar. All values are kept canonical
// (lowest terms, positive denominator); arithmetic never rounds.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

using RVec = std::vector<Rational>;
using RMatrix = std::vector<RVec>;

inline Rational rat(long long num, long long den = 1) {
    if (den == 0) throw Error(ErrorCode::BadRational, "zero denominator");
    Rational r;
    mpq_set_si(r.backend().data(), num, 1);
    Rational d;
    mpq_set_si(d.backend().data(), den, 1);
    r /= d;
    return r;
}

inline Rational rat(const Integer& num, const Integer& den) {
    if (den == 0) throw Error(ErrorCode::BadRational, "zero denominator");
    Rational r;
    mpq_set_num(r.backend().data(), num.backend().data());
    mpq_set_den(r.backend().data(), den.backend().data());
    mpq_canonicalize(r.backend().data());
    return r;
}

namespace detail {
inline bool is_integer_literal(const std::string& s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (s[i] < '0' || s[i] > '9') return false;
    return true;
}
}  // namespace detail

// Accepts "p", "p/q" and exact decimal strings such as "-2.5".
inline Rational parse_rational(const std::string& text) {
    const auto bad = [&] { return Error(ErrorCode::BadRational, "not a rational: '" + text + "'"); };
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        std::string p = text.substr(0, slash), q = text.substr(slash + 1);
        if (!detail::is_integer_literal(p) || !detail::is_integer_literal(q)) throw bad();
        Integer qi(q);
        if (qi == 0) throw Error(ErrorCode::BadRational, "zero denominator: '" + text + "'");
        return rat(Integer(p), qi);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) {
        if (!detail::is_integer_literal(text)) throw bad();
        return rat(Integer(text), Integer(1));
    }
    std::string head = text.substr(0, dot), frac = text.substr(dot + 1);
    bool neg = !head.empty() && head[0] == '-';
    if (!head.empty() && (head[0] == '+' || head[0] == '-')) head = head.substr(1);
    if (frac.empty() || (head.empty() && frac.empty())) throw bad();
    if (head.empty()) head = "0";
    if (!detail::is_integer_literal(head) || !detail::is_integer_literal(frac)) throw bad();
    Integer scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Integer num = Integer(head) * scale + Integer(frac);
    if (neg) num = -num;
    return rat(num, scale);
}

// Canonical form used by every serializer: always "p/q", including "/1".
inline std::string rational_to_string(const Rational& r) {
    return numerator(r).str() + "/" + denominator(r).str();
}

inline Rational dot(const RVec& a, const RVec& b) {
    if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "dot: length mismatch");
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline RVec add(const RVec& a, const RVec& b) {
    if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "add: length mismatch");
    RVec c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
    return c;
}

inline RVec sub(const RVec& a, const RVec& b) {
    if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "sub: length mismatch");
    RVec c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
    return c;
}

inline RVec scale(const Rational& k, const RVec& a) {
    RVec c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = k * a[i];
    return c;
}

// a + t*r
inline RVec ray_point(const RVec& a, const Rational& t, const RVec& r) {
    if (a.size() != r.size()) throw Error(ErrorCode::DimensionMismatch, "ray_point: length mismatch");
    RVec c(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + t * r[i];
    return c;
}

inline bool is_zero(const RVec& a) {
    for (const auto& x : a)
        if (x != 0) return false;
    return true;
}

inline RVec zero_vec(std::size_t n) { return RVec(n, Rational(0)); }

}  // namespace bms
