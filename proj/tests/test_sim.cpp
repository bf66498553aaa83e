#include <catch2/catch_amalgamated.hpp>

#include "bms/sim.hpp"
#include "test_helpers.hpp"

using namespace bms;
using bmstest::q;
using bmstest::rv;

TEST_CASE("policy specs parse and validate") {
    Problem prob = bmstest::example2_problem();
    EnvPolicy p = make_env_policy("pusher:1,0", prob);
    CHECK(p.kind == EnvPolicy::Kind::Pusher);
    CHECK(p.push == rv({q(1), q(0)}));
    CHECK(make_env_policy("random:42", prob).kind == EnvPolicy::Kind::RandomVertex);
    CHECK(make_env_policy("fixed:0,1", prob).kind == EnvPolicy::Kind::FixedInstance);
    CHECK(make_env_policy("hull:1", prob).kind == EnvPolicy::Kind::RandomInHull);

    Problem vertices_only =
        make_problem(make_system(1, {make_mode("m", {rv({q(1)}), rv({q(-1)})}, 1)},
                                 Semantics::VerticesOnly),
                     HPolytope{{{q(1)}, {q(-1)}}, {q(1), q(1)}}, rv({q(0)}));
    CHECK_THROWS_AS(make_env_policy("hull:1", vertices_only), Error);
    CHECK_THROWS_AS(make_env_policy("bogus:1", prob), Error);
    CHECK_THROWS_AS(make_env_policy("fixed:0", prob), Error);
    CHECK_THROWS_AS(make_env_policy("fixed:0,7", prob), Error);
}

TEST_CASE("zero rounds yields an empty safe trace") {
    Problem prob = bmstest::example4_problem();
    Decision d = decide(prob);
    StrategyState st = make_strategy(prob, d);
    Trace t = simulate(prob, &st, EnvPolicy::random_vertex(1), 0);
    CHECK(t.safe);
    CHECK(t.elapsed == 0);
    CHECK(t.steps.empty());
}

TEST_CASE("trace arithmetic re-checks exactly") {
    Problem prob = bmstest::example4_problem();
    Decision d = decide(prob);
    StrategyState st = make_strategy(prob, d);
    Trace t = simulate(prob, &st, EnvPolicy::random_in_hull(5), 200);
    CHECK(t.safe);
    RVec x = t.start;
    Rational elapsed = 0;
    for (const auto& s : t.steps) {
        x = ray_point(x, s.duration, s.rate);
        CHECK(x == s.landing);
        elapsed += s.duration;
    }
    CHECK(elapsed == t.elapsed);
}

TEST_CASE("the synthesized strategy survives adversarial vertex play") {
    Problem prob = bmstest::example4_problem();
    Decision d = decide(prob);
    Rational min_dwell = d.strategy_polytope->plans[0].dwell;
    for (const auto& p : d.strategy_polytope->plans) min_dwell = std::min(min_dwell, p.dwell);
    Rational bound = min_dwell / static_cast<long long>(d.strategy_polytope->plans.size());

    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        StrategyState st = make_strategy(prob, d);
        Trace t = simulate(prob, &st, EnvPolicy::random_vertex(seed), 500);
        CHECK(t.safe);
        for (const auto& s : t.steps) {
            CHECK(s.duration >= bound);
            CHECK(contains(prob.safety, s.landing));
        }
        CHECK(t.elapsed >= bound * 500);
    }
    StrategyState st = make_strategy(prob, d);
    Trace t = simulate(prob, &st, EnvPolicy::pusher(rv({q(0), q(1)})), 500);
    CHECK(t.safe);
}

TEST_CASE("closure invariance: play never leaves the anchored polytope") {
    Problem prob = bmstest::example4_problem();
    Decision d = decide(prob);
    StrategyState st = make_strategy(prob, d);
    Trace t = simulate(prob, &st, EnvPolicy::random_in_hull(11), 300);
    CHECK(t.safe);
    for (const auto& s : t.steps) CHECK(vcontains(d.strategy_polytope->polytope, s.landing));
}

TEST_CASE("the pusher policy realizes a falsifier against a round-robin scheduler") {
    Problem prob = bmstest::example2_problem();
    Decision d = decide(prob);
    REQUIRE_FALSE(d.scheduler_wins);
    const RVec& push = d.falsifier->push;

    // per-round progress lower bound: the least over modes of the best push
    // component the environment can always achieve
    Rational progress;
    bool first = true;
    for (const auto& m : prob.system.modes) {
        Rational best = dot(push, m.rate_vertices[0]);
        for (const auto& r : m.rate_vertices) best = std::max(best, dot(push, r));
        if (first || best < progress) progress = best, first = false;
    }
    REQUIRE(progress > 0);

    RoundRobinScheduler rr;
    Trace t = simulate(prob, &rr, EnvPolicy::pusher(push), 1000);
    CHECK_FALSE(t.safe);
    REQUIRE(t.exit_step);
    RVec prev = t.start;
    for (const auto& s : t.steps) {
        CHECK(dot(push, s.landing) - dot(push, prev) >= s.duration * progress);
        prev = s.landing;
    }
}

TEST_CASE("a naive alternating schedule loses example 2 against the fixed drift") {
    Problem prob = bmstest::example2_problem();
    RoundRobinScheduler rr;
    Trace t = simulate(prob, &rr, EnvPolicy::fixed({0, 0}), 1000);  // both (1/2, .) rates
    CHECK_FALSE(t.safe);
}

TEST_CASE("edge-start strategies survive internal-rate escapes") {
    // On the left edge m1 mixes a tangent rate with a steep internal one; the
    // strategy must cap dwells so the internal escape stays inside S, then
    // re-anchor on the face it lands on.
    System sys = make_system(2,
                             {make_mode("m1", {rv({q(0), q(1)}), rv({q(1), q(5)})}, 2),
                              make_mode("m2", {rv({q(0), q(-1)})}, 2),
                              make_mode("m3", {rv({q(-1), q(-5)})}, 2)},
                             Semantics::Polytope);
    Problem prob = make_problem(sys, bmstest::unit_square(), rv({q(0), q(1, 2)}));
    Decision d = decide(prob);
    REQUIRE(d.scheduler_wins);
    const FaceEntry* edge = d.report.find({0});
    REQUIRE(edge);
    CHECK(edge->status == FaceStatus::SchedulableClosed);

    for (std::uint64_t seed : {4ULL, 9ULL, 21ULL}) {
        StrategyState st = make_strategy(prob, d);
        Trace t = simulate(prob, &st, EnvPolicy::random_vertex(seed), 400);
        CHECK(t.safe);
        for (const auto& s : t.steps) CHECK(s.duration > 0);
        StrategyState st2 = make_strategy(prob, d);
        Trace t2 = simulate(prob, &st2, EnvPolicy::random_in_hull(seed), 400);
        CHECK(t2.safe);
    }
}

TEST_CASE("corner starts go through an all-internal mode and re-anchor inside") {
    System sys = make_system(2,
                             {make_mode("ne", {rv({q(1), q(1)})}, 2),
                              make_mode("sw", {rv({q(-1), q(-1)})}, 2)},
                             Semantics::VerticesOnly);
    Problem prob = make_problem(sys, bmstest::unit_square(), rv({q(0), q(0)}));
    Decision d = decide(prob);
    REQUIRE(d.scheduler_wins);
    const FaceEntry* corner = d.report.find({0, 2});
    REQUIRE(corner);
    CHECK(corner->status == FaceStatus::SchedulableInternal);
    CHECK_FALSE(d.strategy_polytope);  // no polytope on an internal-via start face

    StrategyState st = make_strategy(prob, d);
    Trace t = simulate(prob, &st, EnvPolicy::random_vertex(13), 300);
    CHECK(t.safe);

    // the discrete optimizer falls back to the interior polytope for its bound
    MaxDeltaResult md = max_delta(prob);
    CHECK_FALSE(md.unbounded);
    CHECK(md.value == q(1));
}

TEST_CASE("random won problems stay safe from every start face") {
    bmstest::Rng rng(3137);
    int simulated = 0;
    for (int iter = 0; iter < 220 && simulated < 12; ++iter) {
        int n = static_cast<int>(rng.range(1, 3));
        int modes = static_cast<int>(rng.range(1, 3));
        std::vector<Mode> ms;
        for (int m = 0; m < modes; ++m) {
            int verts = static_cast<int>(rng.range(1, 3));
            std::vector<RVec> rates;
            for (int v = 0; v < verts; ++v) {
                RVec r(n);
                for (auto& c : r) c = rng.rational(-5, 5);
                rates.push_back(std::move(r));
            }
            ms.push_back(make_mode("m" + std::to_string(m), std::move(rates), n));
        }
        RVec start(n);
        for (int t = 0; t < n; ++t) {
            long long pick = rng.range(0, 3);
            start[t] = pick == 0 ? q(-2) : pick == 1 ? q(2) : rng.rational(-1, 1);
        }
        Problem prob = make_problem(make_system(n, std::move(ms), Semantics::Polytope),
                                    bmstest::box(n, -2, 2), std::move(start));
        Decision d = decide(prob);
        if (!d.scheduler_wins) continue;
        ++simulated;
        StrategyState st = make_strategy(prob, d);
        Trace t1 = simulate(prob, &st, EnvPolicy::random_vertex(iter), 250);
        CHECK(t1.safe);
        StrategyState st2 = make_strategy(prob, d);
        Trace t2 = simulate(prob, &st2, EnvPolicy::random_in_hull(iter), 250);
        CHECK(t2.safe);
        for (const auto& s : t1.steps) CHECK(s.duration > 0);
    }
    CHECK(simulated >= 5);
}

TEST_CASE("discrete solutions replay through the simulator") {
    System sys = make_system(1, {make_mode("up", {rv({q(1)})}, 1), make_mode("down", {rv({q(-1)})}, 1)},
                             Semantics::VerticesOnly);
    Problem p = make_problem(std::move(sys), HPolytope{{{q(1)}, {q(-1)}}, {q(2), q(0)}}, rv({q(1)}));
    auto gs = discrete_schedulable(p, q(1));
    REQUIRE(gs);
    GameReplayScheduler replay(*gs);
    Trace t = simulate(p, &replay, EnvPolicy::random_vertex(3), 200);
    CHECK(t.safe);
    CHECK(t.elapsed >= 200);  // every move lasts at least one period
}
