#pragma once

#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "bms/linprog.hpp"
#include "bms/model.hpp"
#include "bms/polytope.hpp"

namespace bms {

// Result of the zero-dwell feasibility check for one extreme-rate instance:
// either nonnegative dwell fractions summing to 1 whose rate-weighted sum is
// the zero vector, or a pushing vector with push . r >= 1 for every rate.
struct CmsResult {
    bool safe = false;
    RVec dwell;  // per rate, when safe
    RVec push;   // when unsafe
};

inline CmsResult cms_safe(const std::vector<RVec>& rates) {
    if (rates.empty()) throw Error(ErrorCode::SchemaViolation, "cms_safe: no rates");
    const int k = static_cast<int>(rates.size());
    const int n = static_cast<int>(rates[0].size());
    LinearProgram lp = LinearProgram::feasibility(k);
    for (int t = 0; t < n; ++t) {
        RVec row(k);
        for (int i = 0; i < k; ++i) row[i] = rates[i][t];
        lp.add_eq(std::move(row), Rational(0));
    }
    lp.add_eq(RVec(k, Rational(1)), Rational(1));
    LpOutcome out = detail::lp_solve_impl(lp, false);
    if (out.status == LpStatus::Feasible) return CmsResult{true, out.point, {}};

    // Infeasible exactly when 0 is outside the hull of the rates; a strictly
    // separating vector is then an LP-feasible push direction.
    LinearProgram sep = LinearProgram::feasibility(n, /*all_nonneg=*/false);
    for (int i = 0; i < k; ++i) sep.add_ge(rates[i], Rational(1));
    LpOutcome v = detail::lp_solve_impl(sep, false);
    if (v.status != LpStatus::Feasible)
        throw Error(ErrorCode::Internal, "no separating vector for an unsafe instance");
    return CmsResult{false, {}, v.point};
}

struct SafetyVerdict {
    bool safe = false;
    // Safe: dwell witness per instance, in lexicographic instance order.
    std::vector<std::pair<Instance, RVec>> witnesses;
    // Unsafe: the lexicographically first failing instance and its push vector.
    Instance instance;
    RVec push;
};

namespace detail {

template <typename Fn>
inline void parallel_for(long long count, int jobs, Fn fn) {
    if (jobs <= 1 || count <= 1) {
        for (long long i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    long long chunk = (count + jobs - 1) / jobs;
    for (int w = 0; w < jobs; ++w) {
        long long lo = w * chunk, hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (long long i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace detail

// Safe iff every extreme-rate instance admits a zero-sum dwell assignment.
// Instances are checked in lexicographic order; sequentially the scan stops at
// the first failure, in parallel all are checked and the least failing index
// wins, so the verdict is identical either way.
inline SafetyVerdict bms_safe(const System& sys, int jobs = 1) {
    std::vector<Instance> all = enumerate_instances(sys);
    SafetyVerdict verdict;
    if (jobs <= 1) {
        for (const auto& inst : all) {
            CmsResult r = cms_safe(instance_rates(sys, inst));
            if (!r.safe) return SafetyVerdict{false, {}, inst, r.push};
            verdict.witnesses.emplace_back(inst, r.dwell);
        }
        verdict.safe = true;
        return verdict;
    }
    std::vector<CmsResult> results(all.size());
    detail::parallel_for(static_cast<long long>(all.size()), jobs,
                         [&](long long i) { results[i] = cms_safe(instance_rates(sys, all[i])); });
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (!results[i].safe) return SafetyVerdict{false, {}, all[i], results[i].push};
        verdict.witnesses.emplace_back(all[i], results[i].dwell);
    }
    verdict.safe = true;
    return verdict;
}

// Polynomial 2-D decision: only perpendiculars of extreme rates need to be
// examined. Unsafe reports a witness instance plus a push vector obtained by
// tilting the perpendicular slightly towards the pivot rate.
inline SafetyVerdict bms_safe_2d(const System& sys) {
    if (sys.n != 2) throw Error(ErrorCode::DimensionMismatch, "bms_safe_2d: n != 2");
    for (const auto& pivot_mode : sys.modes) {
        for (const auto& r_perp : pivot_mode.rate_vertices) {
            if (is_zero(r_perp)) continue;
            for (int side = 0; side < 2; ++side) {
                RVec u = side == 0 ? RVec{-r_perp[1], r_perp[0]} : RVec{r_perp[1], -r_perp[0]};
                Instance chosen(sys.modes.size(), -1);
                bool all_modes_qualify = true;
                for (std::size_t mi = 0; mi < sys.modes.size() && all_modes_qualify; ++mi) {
                    const auto& verts = sys.modes[mi].rate_vertices;
                    int pick = -1;
                    for (std::size_t vi = 0; vi < verts.size(); ++vi) {
                        Rational du = dot(u, verts[vi]);
                        // collinear with r_perp and positively oriented, or strictly past u
                        if (du > 0 || (du == 0 && dot(verts[vi], r_perp) > 0)) {
                            pick = static_cast<int>(vi);
                            break;
                        }
                    }
                    if (pick < 0)
                        all_modes_qualify = false;
                    else
                        chosen[mi] = pick;
                }
                if (!all_modes_qualify) continue;

                // v = u + (tau / 2(|kappa|+1)) r_perp over the chosen rates;
                // when every chosen rate is collinear, r_perp itself pushes.
                std::vector<RVec> rates = instance_rates(sys, chosen);
                std::optional<Rational> tau;
                Rational kappa;
                bool kappa_set = false;
                for (const auto& r : rates) {
                    Rational du = dot(u, r);
                    if (du > 0 && (!tau || du < *tau)) tau = du;
                    Rational k = dot(r_perp, r);
                    if (!kappa_set || k < kappa) {
                        kappa = k;
                        kappa_set = true;
                    }
                }
                RVec push;
                if (!tau) {
                    push = r_perp;
                } else {
                    Rational coef = *tau / (2 * (abs(kappa) + 1));
                    push = add(u, scale(coef, r_perp));
                }
                for (const auto& r : rates)
                    if (dot(push, r) <= 0)
                        throw Error(ErrorCode::Internal, "2-D push vector fails re-check");
                return SafetyVerdict{false, {}, chosen, push};
            }
        }
    }
    return SafetyVerdict{true, {}, {}, {}};
}

// Environment's certificate: on face I every mode either exits immediately
// through an external rate or can be pushed along v by a tangent rate.
struct Falsifier {
    FaceId face;
    std::map<std::string, RVec> external_modes;  // mode -> external rate
    std::map<std::string, RVec> pushed_rates;    // mode -> tangent rate
    RVec push;
};

inline bool verify_falsifier(const Problem& prob, const Falsifier& f) {
    const System& sys = prob.system;
    for (const auto& [name, rate] : f.external_modes) mode_index(sys, name);
    for (const auto& [name, rate] : f.pushed_rates) mode_index(sys, name);
    for (const auto& mode : sys.modes) {
        bool ext = f.external_modes.count(mode.name) > 0;
        bool pushed = f.pushed_rates.count(mode.name) > 0;
        if (ext == pushed) return false;  // exactly one role per mode
    }
    FaceId start_face = face_of(prob.safety, prob.start);
    if (!face_subset(f.face, start_face)) return false;
    for (const auto& [name, rate] : f.external_modes)
        if (classify_rate(prob.safety, f.face, rate) != RateClass::External) return false;
    for (const auto& [name, rate] : f.pushed_rates) {
        if (classify_rate(prob.safety, f.face, rate) != RateClass::Tangent) return false;
        if (dot(f.push, rate) <= 0) return false;
    }
    return true;
}

// A static (environment-blind) strategy exists iff the single-rate modes alone
// form a safe system; dwell fractions are reported over all modes with zeros
// elsewhere.
inline std::optional<RVec> static_schedulable(const System& sys) {
    std::vector<int> singleton;
    for (std::size_t i = 0; i < sys.modes.size(); ++i)
        if (sys.modes[i].rate_vertices.size() == 1) singleton.push_back(static_cast<int>(i));
    if (singleton.empty()) return std::nullopt;
    std::vector<RVec> rates;
    for (int i : singleton) rates.push_back(sys.modes[i].rate_vertices[0]);
    CmsResult r = cms_safe(rates);
    if (!r.safe) return std::nullopt;
    RVec dwell(sys.modes.size(), Rational(0));
    for (std::size_t k = 0; k < singleton.size(); ++k) dwell[singleton[k]] = r.dwell[k];
    return dwell;
}

}  // namespace bms
