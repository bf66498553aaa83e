#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "bms/linprog.hpp"
#include "bms/rational.hpp"

namespace bms {

// {x : A x <= b}
struct HPolytope {
    RMatrix A;
    RVec b;

    int dim() const { return A.empty() ? 0 : static_cast<int>(A[0].size()); }
    int rows() const { return static_cast<int>(A.size()); }
};

// Convex hull of an explicit vertex list.
struct VPolytope {
    std::vector<RVec> vertices;
};

// Tight row indices (0-based, sorted ascending) of the safety set.
using FaceId = std::vector<int>;

enum class RateClass { External, Internal, Tangent };

inline bool face_subset(const FaceId& a, const FaceId& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline bool contains(const HPolytope& P, const RVec& x) {
    if (static_cast<int>(x.size()) != P.dim())
        throw Error(ErrorCode::DimensionMismatch, "contains: point/polytope dimension");
    for (int j = 0; j < P.rows(); ++j)
        if (dot(P.A[j], x) > P.b[j]) return false;
    return true;
}

inline Rational row_slack(const HPolytope& P, int j, const RVec& x) { return P.b[j] - dot(P.A[j], x); }

// Convex coefficients of x over V's vertices, or nullopt when x lies outside
// the hull. Solved by LP in fixed vertex order, so ties resolve the same way
// every run.
inline std::optional<RVec> hull_decompose(const VPolytope& V, const RVec& x) {
    if (V.vertices.empty()) throw Error(ErrorCode::DimensionMismatch, "hull_decompose: empty vertex list");
    const int k = static_cast<int>(V.vertices.size());
    const int n = static_cast<int>(x.size());
    for (const auto& v : V.vertices)
        if (static_cast<int>(v.size()) != n)
            throw Error(ErrorCode::DimensionMismatch, "hull_decompose: vertex dimension");
    LinearProgram lp = LinearProgram::feasibility(k);
    for (int t = 0; t < n; ++t) {
        RVec row(k);
        for (int i = 0; i < k; ++i) row[i] = V.vertices[i][t];
        lp.add_eq(std::move(row), x[t]);
    }
    lp.add_eq(RVec(k, Rational(1)), Rational(1));
    LpOutcome out = detail::lp_solve_impl(lp, false);
    if (out.status != LpStatus::Feasible) return std::nullopt;
    return out.point;
}

inline bool vcontains(const VPolytope& V, const RVec& x) { return hull_decompose(V, x).has_value(); }

// Keeps exactly the points that are not convex combinations of the remaining
// ones. Exact duplicates are merged first (keeping the first occurrence);
// output preserves input order.
inline VPolytope filter_vertices(const std::vector<RVec>& points) {
    if (points.empty()) throw Error(ErrorCode::DimensionMismatch, "filter_vertices: empty input");
    std::vector<RVec> distinct;
    for (const auto& p : points)
        if (std::find(distinct.begin(), distinct.end(), p) == distinct.end()) distinct.push_back(p);
    if (distinct.size() == 1) return VPolytope{distinct};
    VPolytope result;
    for (std::size_t k = 0; k < distinct.size(); ++k) {
        VPolytope others;
        for (std::size_t i = 0; i < distinct.size(); ++i)
            if (i != k) others.vertices.push_back(distinct[i]);
        if (!vcontains(others, distinct[k])) result.vertices.push_back(distinct[k]);
    }
    return result;
}

struct ExitTime {
    bool unbounded = false;
    Rational t = 0;
};

// max { t >= 0 : c + t r in P }. A zero rate never leaves P, reported as the
// distinguished unbounded value.
inline ExitTime exit_time(const VPolytope& P, const RVec& c, const RVec& r) {
    if (c.size() != r.size()) throw Error(ErrorCode::DimensionMismatch, "exit_time: point/rate dimension");
    if (is_zero(r)) {
        if (!vcontains(P, c)) throw Error(ErrorCode::PointOutsidePolytope, "exit_time: c outside P");
        return ExitTime{true, 0};
    }
    const int k = static_cast<int>(P.vertices.size());
    const int n = static_cast<int>(c.size());
    // vars: t, lambda_1..lambda_k, all nonnegative
    RVec obj(k + 1, Rational(0));
    obj[0] = 1;
    LinearProgram lp = LinearProgram::maximize(std::move(obj));
    for (int t = 0; t < n; ++t) {
        RVec row(k + 1);
        row[0] = -r[t];
        for (int i = 0; i < k; ++i) row[i + 1] = P.vertices[i][t];
        lp.add_eq(std::move(row), c[t]);
    }
    RVec ones(k + 1, Rational(1));
    ones[0] = 0;
    lp.add_eq(std::move(ones), Rational(1));
    LpOutcome out = detail::lp_solve_impl(lp, false);
    if (out.status == LpStatus::Infeasible)
        throw Error(ErrorCode::PointOutsidePolytope, "exit_time: c outside P");
    if (out.status != LpStatus::Optimal)
        throw Error(ErrorCode::Internal, "exit_time: unbounded over a bounded polytope");
    return ExitTime{false, out.value};
}

// max { t >= 0 : x + t r stays in the H-polytope }; nullopt when no row limits
// the ray.
inline std::optional<Rational> h_exit_time(const HPolytope& P, const RVec& x, const RVec& r) {
    if (!contains(P, x)) throw Error(ErrorCode::PointOutsidePolytope, "h_exit_time: x outside P");
    std::optional<Rational> best;
    for (int j = 0; j < P.rows(); ++j) {
        Rational adv = dot(P.A[j], r);
        if (adv <= 0) continue;
        Rational t = row_slack(P, j, x) / adv;
        if (!best || t < *best) best = t;
    }
    return best;
}

inline bool is_empty(const HPolytope& S) {
    LinearProgram lp = LinearProgram::feasibility(S.dim(), /*all_nonneg=*/false);
    for (int j = 0; j < S.rows(); ++j) lp.add_le(S.A[j], S.b[j]);
    return detail::lp_solve_impl(lp, false).status == LpStatus::Infeasible;
}

// Bounded iff every coordinate direction has a finite LP maximum.
inline bool is_bounded(const HPolytope& S) {
    for (int t = 0; t < S.dim(); ++t) {
        for (int sign = 0; sign < 2; ++sign) {
            RVec obj = zero_vec(S.dim());
            obj[t] = sign ? Rational(-1) : Rational(1);
            LinearProgram lp = LinearProgram::maximize(std::move(obj), /*all_nonneg=*/false);
            for (int j = 0; j < S.rows(); ++j) lp.add_le(S.A[j], S.b[j]);
            if (detail::lp_solve_impl(lp, false).status == LpStatus::Unbounded) return false;
        }
    }
    return true;
}

// The unique tight set of x in S.
inline FaceId face_of(const HPolytope& S, const RVec& x) {
    if (!contains(S, x)) throw Error(ErrorCode::PointOutsidePolytope, "face_of: x outside S");
    FaceId id;
    for (int j = 0; j < S.rows(); ++j)
        if (dot(S.A[j], x) == S.b[j]) id.push_back(j);
    return id;
}

struct Face {
    FaceId id;
    RVec witness;  // a relative-interior point: tight exactly on id
};

namespace detail {

// Live-face test: maximize a uniform slack on the non-tight rows (capped at 1
// to keep the LP bounded); the face is live iff the optimum is positive.
inline std::optional<RVec> face_witness(const HPolytope& S, const FaceId& I) {
    const int n = S.dim();
    RVec obj = zero_vec(n + 1);
    obj[n] = 1;
    LinearProgram lp = LinearProgram::maximize(std::move(obj), /*all_nonneg=*/false);
    lp.nonneg[n] = 1;
    std::vector<char> tight(S.rows(), 0);
    for (int j : I) tight[j] = 1;
    for (int j = 0; j < S.rows(); ++j) {
        RVec row = S.A[j];
        row.push_back(tight[j] ? Rational(0) : Rational(1));
        if (tight[j])
            lp.add_eq(std::move(row), S.b[j]);
        else
            lp.add_le(std::move(row), S.b[j]);
    }
    RVec cap = zero_vec(n + 1);
    cap[n] = 1;
    lp.add_le(std::move(cap), Rational(1));
    LpOutcome out = lp_solve_impl(lp, false);
    if (out.status != LpStatus::Optimal || out.value <= 0) return std::nullopt;
    RVec witness(out.point.begin(), out.point.begin() + n);
    return witness;
}

inline void subsets_of_size(int rows, int k, std::vector<FaceId>& out) {
    if (k == 0) {
        out.push_back({});
        return;
    }
    if (k > rows) return;
    FaceId cur(k);
    // standard lexicographic k-combinations
    for (int i = 0; i < k; ++i) cur[i] = i;
    for (;;) {
        out.push_back(cur);
        int i = k - 1;
        while (i >= 0 && cur[i] == rows - k + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
    }
}

}  // namespace detail

// All live faces of S, ordered by tight-set cardinality then lexicographically;
// any subset precedes its supersets. One relative-interior witness per face.
inline std::vector<Face> enumerate_faces(const HPolytope& S) {
    if (is_empty(S)) throw Error(ErrorCode::EmptySafetySet, "enumerate_faces: empty safety set");
    std::vector<Face> faces;
    for (int k = 0; k <= S.rows(); ++k) {
        std::vector<FaceId> candidates;
        detail::subsets_of_size(S.rows(), k, candidates);
        for (auto& I : candidates)
            if (auto w = detail::face_witness(S, I)) faces.push_back(Face{std::move(I), std::move(*w)});
    }
    return faces;
}

// External: some tight row strictly increases along r. Tangent: r is parallel
// to every tight row (vacuously so on the interior face). Internal otherwise.
inline RateClass classify_rate(const HPolytope& S, const FaceId& I, const RVec& r) {
    bool all_zero = true;
    for (int j : I) {
        Rational a = dot(S.A[j], r);
        if (a > 0) return RateClass::External;
        if (a != 0) all_zero = false;
    }
    return all_zero ? RateClass::Tangent : RateClass::Internal;
}

}  // namespace bms
