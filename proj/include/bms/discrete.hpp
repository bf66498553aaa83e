#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "bms/model.hpp"
#include "bms/polytope.hpp"
#include "bms/synthesis.hpp"

namespace bms {

// Points reachable from the start by single-period moves that stay inside S.
// Convexity makes longer moves pass through these points, so the BFS closure
// carries the whole game.
struct Grid {
    RVec origin;
    Rational delta;
    std::vector<RVec> points;  // discovery (BFS) order
};

struct GameAction {
    int mode = -1;        // index into system modes
    long long periods = 0;  // k >= 1; the move lasts k * delta
};

struct GameSolution {
    Rational delta;
    std::vector<RVec> winning;
    std::vector<GameAction> actions;  // aligned with winning
};

namespace detail {

inline long long rational_floor_nonneg(const Rational& r) {
    Integer q = numerator(r) / denominator(r);  // exact floor for nonnegative values
    return q.convert_to<long long>();
}

}  // namespace detail

inline Grid build_grid(const Problem& prob, const Rational& delta) {
    Grid grid{prob.start, delta, {}};
    std::map<RVec, int> seen;
    std::deque<RVec> frontier;
    seen[prob.start] = 0;
    grid.points.push_back(prob.start);
    frontier.push_back(prob.start);
    while (!frontier.empty()) {
        RVec x = std::move(frontier.front());
        frontier.pop_front();
        for (const auto& m : prob.system.modes) {
            for (const auto& r : m.rate_vertices) {
                if (is_zero(r)) continue;
                RVec y = ray_point(x, delta, r);
                if (!contains(prob.safety, y) || seen.count(y)) continue;
                seen[y] = static_cast<int>(grid.points.size());
                grid.points.push_back(y);
                frontier.push_back(y);
            }
        }
    }
    return grid;
}

// Solves the finite safety game on the delta-grid by greatest-fixpoint
// elimination: a point survives while some (mode, k periods) keeps every rate
// endpoint inside the surviving set. Returns the solution when the start
// survives, nullopt otherwise.
inline std::optional<GameSolution> discrete_schedulable(const Problem& prob, const Rational& delta) {
    if (prob.system.semantics != Semantics::VerticesOnly)
        throw Error(ErrorCode::BadDelta, "discrete game requires vertices-only semantics");
    if (delta <= 0) throw Error(ErrorCode::BadDelta, "clock period must be positive");

    Grid grid = build_grid(prob, delta);
    const int P = static_cast<int>(grid.points.size());
    const int M = static_cast<int>(prob.system.modes.size());
    std::map<RVec, int> index;
    for (int i = 0; i < P; ++i) index[grid.points[i]] = i;

    // K_max per (point, mode): largest k with every rate endpoint still in S;
    // a mode whose only rate is zero loops in place with k = 1.
    std::vector<std::vector<long long>> kmax(P, std::vector<long long>(M, 0));
    for (int i = 0; i < P; ++i) {
        for (int m = 0; m < M; ++m) {
            std::optional<Rational> tightest;
            bool all_zero = true;
            for (const auto& r : prob.system.modes[m].rate_vertices) {
                if (is_zero(r)) continue;
                all_zero = false;
                auto t = h_exit_time(prob.safety, grid.points[i], r);
                if (t && (!tightest || *t < *tightest)) tightest = *t;
            }
            if (all_zero)
                kmax[i][m] = 1;
            else if (!tightest)
                throw Error(ErrorCode::UnboundedSafetySet, "unbounded ray in the safety set");
            else
                kmax[i][m] = detail::rational_floor_nonneg(*tightest / delta);
        }
    }

    std::vector<char> alive(P, 1);
    auto find_action = [&](int i) -> std::optional<GameAction> {
        for (int m = 0; m < M; ++m) {
            for (long long k = 1; k <= kmax[i][m]; ++k) {
                bool ok = true;
                for (const auto& r : prob.system.modes[m].rate_vertices) {
                    RVec y = ray_point(grid.points[i], delta * k, r);
                    auto it = index.find(y);
                    if (it == index.end() || !alive[it->second]) {
                        ok = false;
                        break;
                    }
                }
                if (ok) return GameAction{m, k};
            }
        }
        return std::nullopt;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < P; ++i) {
            if (!alive[i]) continue;
            if (!find_action(i)) {
                alive[i] = 0;
                changed = true;
            }
        }
    }
    if (!alive[0]) return std::nullopt;

    GameSolution gs;
    gs.delta = delta;
    for (int i = 0; i < P; ++i) {
        if (!alive[i]) continue;
        gs.winning.push_back(grid.points[i]);
        gs.actions.push_back(*find_action(i));
    }
    return gs;
}

inline bool verify_game_solution(const Problem& prob, const GameSolution& gs) {
    std::map<RVec, int> winning;
    for (std::size_t i = 0; i < gs.winning.size(); ++i) winning[gs.winning[i]] = static_cast<int>(i);
    if (!winning.count(prob.start)) return false;
    if (gs.actions.size() != gs.winning.size()) return false;
    for (std::size_t i = 0; i < gs.winning.size(); ++i) {
        const GameAction& a = gs.actions[i];
        if (a.mode < 0 || a.mode >= static_cast<int>(prob.system.modes.size()) || a.periods < 1)
            return false;
        for (const auto& r : prob.system.modes[a.mode].rate_vertices) {
            RVec y = ray_point(gs.winning[i], gs.delta * a.periods, r);
            if (!contains(prob.safety, y) || !winning.count(y)) return false;
        }
    }
    return true;
}

struct MaxDeltaResult {
    bool unbounded = false;
    Rational value = 0;
    Rational gamma = 0;  // verified lower bound the candidate sweep started from
    int gamma_halvings = 0;
};

// Largest clock period that still admits a discrete winning strategy. The
// candidate set stretches every reachable grid point of the verified lower
// bound onto the safety boundary; the answer is the largest candidate the
// finite game accepts.
inline MaxDeltaResult max_delta(const Problem& prob, int jobs = 1) {
    if (prob.system.semantics != Semantics::VerticesOnly)
        throw Error(ErrorCode::BadDelta, "discrete game requires vertices-only semantics");
    Decision d = decide(prob, jobs);
    if (!d.scheduler_wins)
        throw Error(ErrorCode::NotSchedulable, "continuous game lost: no clock period works");

    for (const auto& m : prob.system.modes)
        if (m.rate_vertices.size() == 1 && is_zero(m.rate_vertices[0]))
            return MaxDeltaResult{true, 0, 0, 0};

    const ClosedPolytope* base = nullptr;
    if (d.strategy_polytope) {
        base = &*d.strategy_polytope;
    } else {
        const FaceEntry* interior = d.report.find({});
        if (!interior || interior->status != FaceStatus::SchedulableClosed)
            throw Error(ErrorCode::Internal, "schedulable problem without an interior polytope");
        base = &*interior->closed;
    }
    Rational gamma = base->plans[0].dwell;
    for (const auto& p : base->plans) gamma = std::min(gamma, p.dwell);
    gamma /= static_cast<long long>(base->plans.size());

    int halvings = 0;
    while (!discrete_schedulable(prob, gamma)) {
        gamma /= 2;
        if (++halvings > 200)
            throw Error(ErrorCode::Internal, "no verifiable lower bound for the clock period");
    }

    Grid grid = build_grid(prob, gamma);
    std::vector<Rational> candidates{gamma};
    for (const auto& z : grid.points) {
        RVec w = sub(z, prob.start);
        if (is_zero(w)) continue;
        auto stretch = h_exit_time(prob.safety, prob.start, w);
        if (!stretch) continue;  // never meets the boundary
        candidates.push_back(gamma * *stretch);
    }
    std::sort(candidates.begin(), candidates.end(), std::greater<Rational>());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    if (jobs > 1) {
        std::vector<char> ok(candidates.size(), 0);
        detail::parallel_for(static_cast<long long>(candidates.size()), jobs, [&](long long i) {
            ok[i] = discrete_schedulable(prob, candidates[i]).has_value() ? 1 : 0;
        });
        for (std::size_t i = 0; i < candidates.size(); ++i)
            if (ok[i]) return MaxDeltaResult{false, candidates[i], gamma, halvings};
    } else {
        for (const auto& c : candidates)
            if (discrete_schedulable(prob, c)) return MaxDeltaResult{false, c, gamma, halvings};
    }
    throw Error(ErrorCode::Internal, "verified lower bound vanished from the candidate set");
}

}  // namespace bms
