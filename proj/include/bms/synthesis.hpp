#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bms/model.hpp"
#include "bms/polytope.hpp"
#include "bms/safety.hpp"

namespace bms {

// Per-vertex entry of a closed polytope: the mode scheduled at that vertex and
// the dwell achievable for every rate of that mode without leaving the
// polytope.
struct VertexPlan {
    std::string mode;
    Rational dwell;
};

struct ClosedPolytope {
    VPolytope polytope;
    std::vector<VertexPlan> plans;  // aligned with polytope.vertices
};

namespace detail {

// A corner sum over subset T of the generators is a hull vertex iff some
// direction v has v.g strictly positive exactly on T; feasibility of the
// normalized system (>= 1 / <= -1) decides that exactly.
inline bool corner_is_vertex(const std::vector<RVec>& gens, unsigned long long mask, int n) {
    LinearProgram lp = LinearProgram::feasibility(n, /*all_nonneg=*/false);
    for (std::size_t i = 0; i < gens.size(); ++i) {
        if ((mask >> i) & 1ULL)
            lp.add_ge(gens[i], Rational(1));
        else
            lp.add_le(gens[i], Rational(-1));
    }
    return lp_solve_impl(lp, false).status == LpStatus::Feasible;
}

}  // namespace detail

// Builds the rate-zonotope certificate around x0: corners x0 + D * sum of a
// generator subset, with the exact largest D keeping every corner inside S,
// halved. Returns nullopt iff some extreme-rate instance is unsafe.
// tangent_rows lists the safety rows the whole construction is confined to;
// every rate of sys must be tangent on them.
inline std::optional<ClosedPolytope> build_closed_polytope(const System& sys, const RVec& x0,
                                                           const HPolytope& S,
                                                           const FaceId& tangent_rows, int jobs = 1) {
    if (!face_subset(face_of(S, x0), tangent_rows))
        throw Error(ErrorCode::StartOnExcludedBoundary,
                    "base point is tight on a row outside the tangent set");
    for (const auto& m : sys.modes)
        for (const auto& r : m.rate_vertices)
            if (classify_rate(S, tangent_rows, r) != RateClass::Tangent)
                throw Error(ErrorCode::Internal, "build_closed_polytope: non-tangent rate");

    if (!bms_safe(sys, jobs).safe) return std::nullopt;

    std::vector<RVec> gens;
    for (const auto& m : sys.modes)
        for (const auto& r : m.rate_vertices)
            if (!is_zero(r) && std::find(gens.begin(), gens.end(), r) == gens.end()) gens.push_back(r);

    VPolytope poly;
    if (gens.empty()) {
        poly.vertices.push_back(x0);
    } else {
        if (gens.size() > 24)
            throw Error(ErrorCode::Internal, "build_closed_polytope: too many distinct rates");
        // Largest D with all corners inside S: the worst corner for row j sums
        // the positive advances, so the bound is slack_j / sum_i max(0, A_j g_i).
        std::optional<Rational> d_max;
        for (int j = 0; j < S.rows(); ++j) {
            Rational denom = 0;
            for (const auto& g : gens) {
                Rational a = dot(S.A[j], g);
                if (a > 0) denom += a;
            }
            if (denom == 0) continue;
            Rational ratio = row_slack(S, j, x0) / denom;
            if (!d_max || ratio < *d_max) d_max = ratio;
        }
        if (!d_max || *d_max <= 0)
            throw Error(ErrorCode::Internal, "build_closed_polytope: no positive scale");
        Rational D = *d_max / 2;

        std::vector<RVec> corners;
        const int n = static_cast<int>(x0.size());
        for (unsigned long long mask = 0; mask < (1ULL << gens.size()); ++mask) {
            if (!detail::corner_is_vertex(gens, mask, n)) continue;
            RVec sum = zero_vec(n);
            for (std::size_t i = 0; i < gens.size(); ++i)
                if ((mask >> i) & 1ULL) sum = add(sum, gens[i]);
            RVec corner = ray_point(x0, D, sum);
            if (std::find(corners.begin(), corners.end(), corner) == corners.end())
                corners.push_back(std::move(corner));
        }
        poly = filter_vertices(corners);
    }

    ClosedPolytope cp;
    cp.polytope = std::move(poly);
    for (const auto& c : cp.polytope.vertices) {
        int best_mode = -1;
        std::optional<Rational> best;  // nullopt = unbounded dwell
        bool best_unbounded = false;
        for (std::size_t mi = 0; mi < sys.modes.size(); ++mi) {
            std::optional<Rational> mode_min;
            bool unbounded = true;
            for (const auto& r : sys.modes[mi].rate_vertices) {
                ExitTime et = exit_time(cp.polytope, c, r);
                if (et.unbounded) continue;
                unbounded = false;
                if (!mode_min || et.t < *mode_min) mode_min = et.t;
            }
            if (unbounded) {
                if (!best_unbounded) {
                    best_mode = static_cast<int>(mi);
                    best_unbounded = true;
                }
            } else if (!best_unbounded && (best_mode < 0 || *mode_min > *best)) {
                best_mode = static_cast<int>(mi);
                best = mode_min;
            }
        }
        Rational dwell = best_unbounded ? Rational(1) : *best;
        if (dwell <= 0)
            throw Error(ErrorCode::Internal, "build_closed_polytope: zero dwell at a vertex");
        cp.plans.push_back(VertexPlan{sys.modes[best_mode].name, dwell});
    }
    return cp;
}

inline bool verify_closed(const System& sys, const ClosedPolytope& cp) {
    if (cp.polytope.vertices.size() != cp.plans.size()) return false;
    for (std::size_t i = 0; i < cp.plans.size(); ++i) {
        const VertexPlan& plan = cp.plans[i];
        if (plan.dwell <= 0) return false;
        const Mode* mode = nullptr;
        for (const auto& m : sys.modes)
            if (m.name == plan.mode) mode = &m;
        if (!mode) return false;
        for (const auto& r : mode->rate_vertices)
            if (!vcontains(cp.polytope, ray_point(cp.polytope.vertices[i], plan.dwell, r)))
                return false;
    }
    return true;
}

struct StepChoice {
    std::string mode;
    Rational duration;
    int vertex = -1;
};

// One round of the dynamic strategy on a closed polytope: decompose x over the
// vertices and follow the plan of the vertex maximizing lambda * dwell (ties
// to the first vertex in stored order). The duration is at least
// min dwell / #vertices, so iterating the step is non-Zeno.
inline StepChoice polytope_step(const ClosedPolytope& cp, const RVec& x) {
    auto lambda = hull_decompose(cp.polytope, x);
    if (!lambda) throw Error(ErrorCode::PointOutsidePolytope, "polytope_step: x outside the polytope");
    int best = 0;
    Rational best_val = (*lambda)[0] * cp.plans[0].dwell;
    for (std::size_t i = 1; i < cp.plans.size(); ++i) {
        Rational val = (*lambda)[i] * cp.plans[i].dwell;
        if (val > best_val) {
            best = static_cast<int>(i);
            best_val = val;
        }
    }
    return StepChoice{cp.plans[best].mode, best_val, best};
}

enum class FaceStatus { SchedulableClosed, SchedulableInternal, Unschedulable };

struct FaceEntry {
    Face face;
    FaceStatus status = FaceStatus::Unschedulable;
    std::optional<ClosedPolytope> closed;  // SchedulableClosed
    std::optional<System> subsystem;       // the tangent subsystem the polytope certifies
    std::string internal_mode;             // SchedulableInternal
    std::optional<Falsifier> falsifier;    // Unschedulable (minimal recorded one)
};

struct FaceReport {
    std::vector<FaceEntry> entries;

    const FaceEntry* find(const FaceId& id) const {
        for (const auto& e : entries)
            if (e.face.id == id) return &e;
        return nullptr;
    }
};

// Face-lattice analysis. Faces arrive subset-monotone, so unschedulability
// propagates forward: any face containing an unschedulable tight set inherits
// its falsifier. On the remaining faces a mode with an external rate is
// unusable, an all-internal mode wins by stepping onto an already-analyzed
// face, and otherwise the tangent subsystem decides via the closed polytope.
inline FaceReport analyze_faces(const Problem& prob, int jobs = 1) {
    const System& sys = prob.system;
    const HPolytope& S = prob.safety;
    FaceReport report;
    for (Face& face : enumerate_faces(S)) {
        FaceEntry entry;
        entry.face = face;

        const FaceEntry* blocked = nullptr;
        for (const auto& prev : report.entries)
            if (prev.status == FaceStatus::Unschedulable && face_subset(prev.face.id, face.id)) {
                blocked = &prev;
                break;
            }
        if (blocked) {
            entry.status = FaceStatus::Unschedulable;
            entry.falsifier = blocked->falsifier;
            report.entries.push_back(std::move(entry));
            continue;
        }

        std::vector<int> usable;
        std::map<std::string, RVec> external;
        int internal_only = -1;
        for (std::size_t mi = 0; mi < sys.modes.size(); ++mi) {
            const Mode& m = sys.modes[mi];
            const RVec* first_external = nullptr;
            bool all_internal = true;
            for (const auto& r : m.rate_vertices) {
                RateClass c = classify_rate(S, face.id, r);
                if (c == RateClass::External && !first_external) first_external = &r;
                if (c != RateClass::Internal) all_internal = false;
            }
            if (first_external) {
                external[m.name] = *first_external;
            } else if (all_internal) {
                if (internal_only < 0) internal_only = static_cast<int>(mi);
            } else {
                usable.push_back(static_cast<int>(mi));
            }
        }

        if (internal_only >= 0) {
            entry.status = FaceStatus::SchedulableInternal;
            entry.internal_mode = sys.modes[internal_only].name;
            report.entries.push_back(std::move(entry));
            continue;
        }

        if (usable.empty()) {
            entry.status = FaceStatus::Unschedulable;
            entry.falsifier = Falsifier{face.id, external, {}, zero_vec(sys.n)};
            report.entries.push_back(std::move(entry));
            continue;
        }

        // Tangent subsystem: usable modes restricted to their tangent rates.
        std::vector<Mode> tangent_modes;
        for (int mi : usable) {
            std::vector<RVec> tangent;
            for (const auto& r : sys.modes[mi].rate_vertices)
                if (classify_rate(S, face.id, r) == RateClass::Tangent) tangent.push_back(r);
            tangent_modes.push_back(make_mode(sys.modes[mi].name, std::move(tangent), sys.n));
        }
        System face_sys = make_system(sys.n, std::move(tangent_modes), sys.semantics);
        SafetyVerdict v = bms_safe(face_sys, jobs);
        if (v.safe) {
            auto cp = build_closed_polytope(face_sys, face.witness, S, face.id, jobs);
            if (!cp) throw Error(ErrorCode::Internal, "safe tangent subsystem without polytope");
            entry.status = FaceStatus::SchedulableClosed;
            entry.closed = std::move(cp);
            entry.subsystem = face_sys;
        } else {
            std::map<std::string, RVec> pushed;
            for (std::size_t k = 0; k < face_sys.modes.size(); ++k)
                pushed[face_sys.modes[k].name] = face_sys.modes[k].rate_vertices[v.instance[k]];
            entry.status = FaceStatus::Unschedulable;
            entry.falsifier = Falsifier{face.id, external, std::move(pushed), v.push};
        }
        report.entries.push_back(std::move(entry));
    }
    return report;
}

// Live strategy data for one play of the game. Positional: each step depends
// only on the current point, re-anchoring on the stored report whenever the
// point leaves the active polytope.
class StrategyState {
  public:
    StrategyState(Problem prob, FaceReport report)
        : prob_(std::move(prob)), report_(std::move(report)) {
        anchor(prob_.start);
    }

    const Problem& problem() const { return prob_; }
    const FaceReport& report() const { return report_; }
    const std::optional<ClosedPolytope>& active() const { return active_; }
    const FaceId& anchor_face() const { return anchor_face_; }

    StepChoice step(const RVec& x) {
        if (!active_ || !vcontains(active_->polytope, x)) anchor(x);
        if (!active_) {
            // all-internal mode: half the exit time towards the nearest wall
            // keeps every rate of the mode strictly inside S.
            const Mode& m = prob_.system.modes[mode_index(prob_.system, internal_mode_)];
            std::optional<Rational> nearest;
            for (const auto& r : m.rate_vertices) {
                auto t = h_exit_time(prob_.safety, x, r);
                if (t && (!nearest || *t < *nearest)) nearest = *t;
            }
            return StepChoice{internal_mode_, nearest ? *nearest / 2 : Rational(1), -1};
        }
        StepChoice sc = polytope_step(*active_, x);
        if (!anchor_face_.empty()) {
            // The polytope only covers the tangent rates of the scheduled
            // mode; cap the dwell so that the mode's internal rates cannot
            // cross a wall outside the anchor face either.
            const Mode& m = prob_.system.modes[mode_index(prob_.system, sc.mode)];
            for (const auto& r : m.rate_vertices) {
                if (classify_rate(prob_.safety, anchor_face_, r) != RateClass::Internal) continue;
                auto t = h_exit_time(prob_.safety, x, r);
                if (t && *t / 2 < sc.duration) sc.duration = *t / 2;
            }
        }
        return sc;
    }

  private:
    void anchor(const RVec& x) {
        FaceId face = face_of(prob_.safety, x);
        const FaceEntry* entry = report_.find(face);
        if (!entry || entry->status == FaceStatus::Unschedulable)
            throw Error(ErrorCode::Internal, "strategy anchored on an unschedulable face");
        anchor_face_ = face;
        if (entry->status == FaceStatus::SchedulableInternal) {
            active_.reset();
            internal_mode_ = entry->internal_mode;
            return;
        }
        // Translate the stored polytope from its witness to x and rescale:
        // the largest factor keeping every vertex inside S, kept whole on the
        // interior face (no internal rates exist there) and halved on proper
        // faces so the rows outside the face keep strict slack.
        const ClosedPolytope& stored = *entry->closed;
        const RVec& w = entry->face.witness;
        std::optional<Rational> max_scale;
        for (const auto& v : stored.polytope.vertices) {
            RVec dir = sub(v, w);
            for (int j = 0; j < prob_.safety.rows(); ++j) {
                Rational adv = dot(prob_.safety.A[j], dir);
                if (adv <= 0) continue;
                Rational bound = row_slack(prob_.safety, j, x) / adv;
                if (!max_scale || bound < *max_scale) max_scale = bound;
            }
        }
        Rational k = max_scale ? *max_scale : Rational(1);
        if (!face.empty()) k /= 2;
        if (k <= 0) throw Error(ErrorCode::Internal, "degenerate anchoring scale");
        ClosedPolytope anchored;
        for (std::size_t i = 0; i < stored.polytope.vertices.size(); ++i) {
            anchored.polytope.vertices.push_back(
                add(x, scale(k, sub(stored.polytope.vertices[i], w))));
            anchored.plans.push_back(VertexPlan{stored.plans[i].mode, k * stored.plans[i].dwell});
        }
        active_ = std::move(anchored);
    }

    Problem prob_;
    FaceReport report_;
    std::optional<ClosedPolytope> active_;
    FaceId anchor_face_;
    std::string internal_mode_;
};

struct Decision {
    bool scheduler_wins = false;
    FaceReport report;
    std::optional<Falsifier> falsifier;       // environment's certificate
    std::optional<ClosedPolytope> strategy_polytope;  // anchored at start
};

// Winner plus machine-checkable certificate for the problem's start state.
inline Decision decide(const Problem& prob, int jobs = 1) {
    Decision d;
    d.report = analyze_faces(prob, jobs);
    FaceId start_face = face_of(prob.safety, prob.start);
    const FaceEntry* entry = d.report.find(start_face);
    if (!entry) throw Error(ErrorCode::Internal, "start face missing from the report");
    if (entry->status == FaceStatus::Unschedulable) {
        d.scheduler_wins = false;
        d.falsifier = entry->falsifier;
        if (!verify_falsifier(prob, *d.falsifier))
            throw Error(ErrorCode::Internal, "falsifier fails its own verifier");
        return d;
    }
    d.scheduler_wins = true;
    StrategyState st(prob, d.report);
    if (st.active()) d.strategy_polytope = *st.active();
    return d;
}

inline StrategyState make_strategy(const Problem& prob, const Decision& d) {
    if (!d.scheduler_wins) throw Error(ErrorCode::NotSchedulable, "no strategy: environment wins");
    return StrategyState(prob, d.report);
}

}  // namespace bms
