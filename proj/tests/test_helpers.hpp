#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <vector>

#include "bms/model.hpp"
#include "bms/polytope.hpp"
#include "bms/rational.hpp"

namespace bmstest {

using bms::HPolytope;
using bms::Problem;
using bms::Rational;
using bms::RVec;
using bms::System;

inline Rational q(long long num, long long den = 1) { return bms::rat(num, den); }

inline RVec rv(std::initializer_list<Rational> xs) { return RVec(xs); }

inline HPolytope unit_square() {
    return HPolytope{{{q(-1), q(0)}, {q(1), q(0)}, {q(0), q(-1)}, {q(0), q(1)}},
                     {q(0), q(1), q(0), q(1)}};
}

inline HPolytope box(int n, long long lo, long long hi) {
    HPolytope S;
    for (int i = 0; i < n; ++i) {
        RVec up = bms::zero_vec(n), down = bms::zero_vec(n);
        up[i] = 1;
        down[i] = -1;
        S.A.push_back(up);
        S.b.push_back(q(hi));
        S.A.push_back(down);
        S.b.push_back(q(-lo));
    }
    return S;
}

inline System example4_system() {
    return bms::make_system(2,
                            {bms::make_mode("m1", {rv({q(0), q(1)}), rv({q(0), q(3, 2)})}, 2),
                             bms::make_mode("m2", {rv({q(0), q(-1)}), rv({q(0), q(-3, 2)})}, 2)},
                            bms::Semantics::Polytope);
}

inline System example2_system() {
    return bms::make_system(2,
                            {bms::make_mode("m1", {rv({q(1, 2), q(1)}), rv({q(-1, 2), q(1)})}, 2),
                             bms::make_mode("m2", {rv({q(1, 2), q(-1)}), rv({q(-1, 2), q(-1)})}, 2)},
                            bms::Semantics::Polytope);
}

inline HPolytope fig4_safety() {
    return HPolytope{{{q(1), q(1)}, {q(1), q(0)}, {q(0), q(-1)}, {q(-1), q(0)}},
                     {q(0), q(1), q(2), q(2)}};
}

inline Problem example4_problem() {
    return bms::make_problem(example4_system(), fig4_safety(), rv({q(-1), q(-1, 2)}));
}

inline Problem example2_problem() {
    return bms::make_problem(example2_system(), box(2, -2, 2), rv({q(0), q(0)}));
}

// splitmix64; fixed seeds keep the randomized suites reproducible.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    long long range(long long lo, long long hi) {  // inclusive
        return lo + static_cast<long long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    Rational rational(long long lo, long long hi, long long max_den = 2) {
        long long den = range(1, max_den);
        return q(range(lo * den, hi * den), den);
    }
};

// Second arithmetic path for the exactness checks: dot products and
// comparisons evaluated over cpp_int numerator/denominator pairs, independent
// of the GMP-backed type used by the library.
struct SlowRat {
    boost::multiprecision::cpp_int num, den;  // den > 0
};

inline SlowRat slow_of(const Rational& r) {
    return SlowRat{boost::multiprecision::cpp_int(numerator(r).str()),
                   boost::multiprecision::cpp_int(denominator(r).str())};
}

inline SlowRat slow_add(const SlowRat& a, const SlowRat& b) {
    return SlowRat{a.num * b.den + b.num * a.den, a.den * b.den};
}

inline SlowRat slow_mul(const SlowRat& a, const SlowRat& b) {
    return SlowRat{a.num * b.num, a.den * b.den};
}

// a <=> b by cross-multiplication; returns -1, 0, +1
inline int slow_cmp(const SlowRat& a, const SlowRat& b) {
    auto lhs = a.num * b.den, rhs = b.num * a.den;
    return lhs < rhs ? -1 : lhs > rhs ? 1 : 0;
}

inline SlowRat slow_dot(const RVec& a, const RVec& b) {
    SlowRat s{0, 1};
    for (std::size_t i = 0; i < a.size(); ++i) s = slow_add(s, slow_mul(slow_of(a[i]), slow_of(b[i])));
    return s;
}

}  // namespace bmstest
