#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bms/discrete.hpp"
#include "bms/model.hpp"
#include "bms/synthesis.hpp"

namespace bms {

namespace detail {

// splitmix64: tiny, deterministic and platform-independent, unlike the
// standard distributions.
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

    std::uint64_t below(std::uint64_t n) { return next() % n; }
};

}  // namespace detail

// Environment policies. FixedInstance plays one chosen rate vertex per mode;
// RandomVertex samples a vertex; Pusher plays the vertex maximizing v . r;
// RandomInHull (polytope semantics only) samples a rational point of the rate
// polytope with denominators below 2^16.
struct EnvPolicy {
    enum class Kind { FixedInstance, RandomVertex, Pusher, RandomInHull };
    Kind kind = Kind::RandomVertex;
    Instance instance;
    RVec push;
    detail::Rng rng{0};

    static EnvPolicy fixed(Instance inst) {
        EnvPolicy p;
        p.kind = Kind::FixedInstance;
        p.instance = std::move(inst);
        return p;
    }
    static EnvPolicy random_vertex(std::uint64_t seed) {
        EnvPolicy p;
        p.kind = Kind::RandomVertex;
        p.rng = detail::Rng(seed);
        return p;
    }
    static EnvPolicy pusher(RVec v) {
        EnvPolicy p;
        p.kind = Kind::Pusher;
        p.push = std::move(v);
        return p;
    }
    static EnvPolicy random_in_hull(std::uint64_t seed) {
        EnvPolicy p;
        p.kind = Kind::RandomInHull;
        p.rng = detail::Rng(seed);
        return p;
    }

    RVec pick(const System& sys, int mode_idx) {
        const auto& verts = sys.modes[mode_idx].rate_vertices;
        switch (kind) {
            case Kind::FixedInstance:
                return verts[instance[mode_idx]];
            case Kind::RandomVertex:
                return verts[rng.below(verts.size())];
            case Kind::Pusher: {
                int best = 0;
                Rational best_val = dot(push, verts[0]);
                for (std::size_t i = 1; i < verts.size(); ++i) {
                    Rational v = dot(push, verts[i]);
                    if (v > best_val) {
                        best = static_cast<int>(i);
                        best_val = v;
                    }
                }
                return verts[best];
            }
            case Kind::RandomInHull: {
                std::vector<std::uint64_t> w(verts.size());
                std::uint64_t total = 0;
                for (auto& wi : w) total += (wi = rng.below(1ULL << 16));
                if (total == 0) {
                    w[0] = 1;
                    total = 1;
                }
                RVec r = zero_vec(sys.n);
                for (std::size_t i = 0; i < verts.size(); ++i)
                    r = add(r, scale(rat(static_cast<long long>(w[i]), static_cast<long long>(total)),
                                     verts[i]));
                return r;
            }
        }
        throw Error(ErrorCode::Internal, "unreachable");
    }
};

// "fixed:i,j,...", "random:seed", "pusher:x,y,...", "hull:seed"
inline EnvPolicy make_env_policy(const std::string& spec, const Problem& prob) {
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw Error(ErrorCode::BadPolicySpec, "expected '<kind>:<arg>', got '" + spec + "'");
    std::string kind = spec.substr(0, colon), arg = spec.substr(colon + 1);
    auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::size_t pos = 0;
        while (pos <= s.size()) {
            auto comma = s.find(',', pos);
            if (comma == std::string::npos) comma = s.size();
            parts.push_back(s.substr(pos, comma - pos));
            pos = comma + 1;
        }
        return parts;
    };
    if (kind == "fixed") {
        Instance inst;
        for (const auto& part : split(arg)) inst.push_back(static_cast<int>(std::stoll(part)));
        if (inst.size() != prob.system.modes.size())
            throw Error(ErrorCode::BadPolicySpec, "fixed: one vertex index per mode required");
        for (std::size_t i = 0; i < inst.size(); ++i)
            if (inst[i] < 0 || inst[i] >= static_cast<int>(prob.system.modes[i].rate_vertices.size()))
                throw Error(ErrorCode::BadPolicySpec, "fixed: vertex index out of range");
        return EnvPolicy::fixed(std::move(inst));
    }
    if (kind == "random") return EnvPolicy::random_vertex(std::stoull(arg));
    if (kind == "pusher") {
        RVec v;
        for (const auto& part : split(arg)) v.push_back(parse_rational(part));
        if (static_cast<int>(v.size()) != prob.system.n)
            throw Error(ErrorCode::BadPolicySpec, "pusher: vector dimension != n");
        return EnvPolicy::pusher(std::move(v));
    }
    if (kind == "hull") {
        if (prob.system.semantics != Semantics::Polytope)
            throw Error(ErrorCode::BadPolicySpec, "hull policy needs polytope semantics");
        return EnvPolicy::random_in_hull(std::stoull(arg));
    }
    throw Error(ErrorCode::BadPolicySpec, "unknown policy kind '" + kind + "'");
}

struct TraceStep {
    std::string mode;
    Rational duration;
    RVec rate;
    RVec landing;
};

struct Trace {
    RVec start;
    std::vector<TraceStep> steps;
    bool safe = true;
    Rational elapsed = 0;
    std::optional<int> exit_step;
};

// Cycles the modes with unit dwell; used to demonstrate falsifiers against a
// scheduler that keeps playing.
struct RoundRobinScheduler {
    int next = 0;
};

// Replays a discrete solution: at each winning grid point take the stored
// (mode, periods) action.
struct GameReplayScheduler {
    const GameSolution* solution;
    std::map<RVec, int> index;

    explicit GameReplayScheduler(const GameSolution& gs) : solution(&gs) {
        for (std::size_t i = 0; i < gs.winning.size(); ++i)
            index[gs.winning[i]] = static_cast<int>(i);
    }
};

using SchedulerRef = std::variant<StrategyState*, GameReplayScheduler*, RoundRobinScheduler*>;

// Runs the game for `rounds` rounds or until the first landing outside S
// (endpoint checks suffice on a convex safety set). Exact and reproducible.
inline Trace simulate(const Problem& prob, SchedulerRef scheduler, EnvPolicy env, long long rounds) {
    if (rounds < 0) throw Error(ErrorCode::SchemaViolation, "simulate: negative round count");
    Trace trace;
    trace.start = prob.start;
    RVec x = prob.start;
    for (long long round = 0; round < rounds; ++round) {
        std::string mode_name;
        Rational duration;
        if (auto** st = std::get_if<StrategyState*>(&scheduler)) {
            StepChoice sc = (*st)->step(x);
            mode_name = sc.mode;
            duration = sc.duration;
        } else if (auto** gr = std::get_if<GameReplayScheduler*>(&scheduler)) {
            auto it = (*gr)->index.find(x);
            if (it == (*gr)->index.end())
                throw Error(ErrorCode::Internal, "discrete replay left the winning set");
            const GameAction& a = (*gr)->solution->actions[it->second];
            mode_name = prob.system.modes[a.mode].name;
            duration = (*gr)->solution->delta * a.periods;
        } else {
            auto** rr = std::get_if<RoundRobinScheduler*>(&scheduler);
            mode_name = prob.system.modes[(*rr)->next].name;
            (*rr)->next = ((*rr)->next + 1) % static_cast<int>(prob.system.modes.size());
            duration = 1;
        }
        if (duration <= 0) throw Error(ErrorCode::Internal, "scheduler proposed a non-positive dwell");
        int mi = mode_index(prob.system, mode_name);
        RVec rate = env.pick(prob.system, mi);
        x = ray_point(x, duration, rate);
        trace.elapsed += duration;
        trace.steps.push_back(TraceStep{mode_name, duration, std::move(rate), x});
        if (!contains(prob.safety, x)) {
            trace.safe = false;
            trace.exit_step = static_cast<int>(round);
            break;
        }
    }
    return trace;
}

}  // namespace bms
