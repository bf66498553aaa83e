#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "bms/discrete.hpp"
#include "bms/model.hpp"
#include "bms/safety.hpp"
#include "bms/sim.hpp"
#include "bms/synthesis.hpp"

namespace bms {

using nlohmann::json;

// Rationals travel as integers, exact decimal strings, or "p/q" strings; the
// canonical form written back is always "p/q". Face row indices are 1-based in
// every document.

inline Rational rational_from_json(const json& j) {
    if (j.is_number_integer()) return rat(static_cast<long long>(j.get<std::int64_t>()));
    if (j.is_string()) return parse_rational(j.get<std::string>());
    throw Error(ErrorCode::SchemaViolation, "expected an integer or a rational string, got " + j.dump());
}

inline json rational_to_json(const Rational& r) { return json(rational_to_string(r)); }

inline RVec rvec_from_json(const json& j) {
    if (!j.is_array()) throw Error(ErrorCode::SchemaViolation, "expected an array of rationals");
    RVec v;
    for (const auto& e : j) v.push_back(rational_from_json(e));
    return v;
}

inline json rvec_to_json(const RVec& v) {
    json a = json::array();
    for (const auto& r : v) a.push_back(rational_to_json(r));
    return a;
}

inline json face_to_json(const FaceId& id) {
    json a = json::array();
    for (int j : id) a.push_back(j + 1);
    return a;
}

inline FaceId face_from_json(const json& j) {
    FaceId id;
    for (const auto& e : j) id.push_back(e.get<int>() - 1);
    std::sort(id.begin(), id.end());
    return id;
}

// --- problems ---------------------------------------------------------------

inline Problem problem_from_json(const json& doc) {
    if (!doc.is_object()) throw Error(ErrorCode::SchemaViolation, "model document must be an object");
    for (const char* key : {"n", "semantics", "modes", "safety", "start"})
        if (!doc.contains(key))
            throw Error(ErrorCode::SchemaViolation, std::string("missing field '") + key + "'");
    int n = doc["n"].get<int>();
    std::string sem = doc["semantics"].get<std::string>();
    if (sem != "polytope" && sem != "vertices-only")
        throw Error(ErrorCode::SchemaViolation, "semantics must be 'polytope' or 'vertices-only'");
    std::vector<Mode> modes;
    for (const auto& mj : doc["modes"]) {
        std::vector<RVec> rates;
        for (const auto& rj : mj.at("rates")) rates.push_back(rvec_from_json(rj));
        modes.push_back(make_mode(mj.at("name").get<std::string>(), std::move(rates), n));
    }
    System sys = make_system(n, std::move(modes),
                             sem == "polytope" ? Semantics::Polytope : Semantics::VerticesOnly);
    HPolytope safety;
    for (const auto& row : doc["safety"].at("A")) {
        RVec r = rvec_from_json(row);
        if (static_cast<int>(r.size()) != n)
            throw Error(ErrorCode::DimensionMismatch, "safety row width != n");
        safety.A.push_back(std::move(r));
    }
    safety.b = rvec_from_json(doc["safety"].at("b"));
    if (safety.b.size() != safety.A.size())
        throw Error(ErrorCode::SchemaViolation, "safety b length != number of rows");
    return make_problem(std::move(sys), std::move(safety), rvec_from_json(doc["start"]));
}

inline json problem_to_json(const Problem& prob) {
    json doc;
    doc["n"] = prob.system.n;
    doc["semantics"] = prob.system.semantics == Semantics::Polytope ? "polytope" : "vertices-only";
    doc["modes"] = json::array();
    for (const auto& m : prob.system.modes) {
        json rates = json::array();
        for (const auto& r : m.rate_vertices) rates.push_back(rvec_to_json(r));
        doc["modes"].push_back({{"name", m.name}, {"rates", rates}});
    }
    json A = json::array();
    for (const auto& row : prob.safety.A) A.push_back(rvec_to_json(row));
    doc["safety"] = {{"A", A}, {"b", rvec_to_json(prob.safety.b)}};
    doc["start"] = rvec_to_json(prob.start);
    return doc;
}

inline Problem load_problem(std::istream& in) {
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaViolation, std::string("bad JSON: ") + e.what());
    }
    try {
        return problem_from_json(doc);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaViolation, std::string("bad model document: ") + e.what());
    }
}

inline Problem load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::SchemaViolation, "cannot open '" + path + "'");
    return load_problem(in);
}

inline void save_problem(std::ostream& out, const Problem& prob) {
    out << problem_to_json(prob).dump(2) << "\n";
}

// --- certificates and results ----------------------------------------------

inline json instance_to_json(const System& sys, const Instance& inst) {
    json rates = json::array();
    for (std::size_t i = 0; i < inst.size(); ++i)
        rates.push_back(rvec_to_json(sys.modes[i].rate_vertices[inst[i]]));
    return {{"indices", inst}, {"rates", rates}};
}

inline json verdict_to_json(const System& sys, const SafetyVerdict& v) {
    json doc;
    doc["safe"] = v.safe;
    if (v.safe) {
        json ws = json::array();
        for (const auto& [inst, dwell] : v.witnesses)
            ws.push_back({{"instance", instance_to_json(sys, inst)}, {"dwell", rvec_to_json(dwell)}});
        doc["witnesses"] = ws;
    } else {
        doc["instance"] = instance_to_json(sys, v.instance);
        doc["push"] = rvec_to_json(v.push);
    }
    return doc;
}

inline json falsifier_to_json(const Falsifier& f) {
    json ext = json::object(), pushed = json::object();
    for (const auto& [name, rate] : f.external_modes) ext[name] = rvec_to_json(rate);
    for (const auto& [name, rate] : f.pushed_rates) pushed[name] = rvec_to_json(rate);
    return {{"face", face_to_json(f.face)},
            {"external", ext},
            {"pushed", pushed},
            {"push", rvec_to_json(f.push)}};
}

inline Falsifier falsifier_from_json(const json& j) {
    Falsifier f;
    f.face = face_from_json(j.at("face"));
    for (auto it = j.at("external").begin(); it != j.at("external").end(); ++it)
        f.external_modes[it.key()] = rvec_from_json(it.value());
    for (auto it = j.at("pushed").begin(); it != j.at("pushed").end(); ++it)
        f.pushed_rates[it.key()] = rvec_from_json(it.value());
    f.push = rvec_from_json(j.at("push"));
    return f;
}

inline json closed_polytope_to_json(const ClosedPolytope& cp) {
    json vertices = json::array(), plans = json::array();
    for (const auto& v : cp.polytope.vertices) vertices.push_back(rvec_to_json(v));
    for (const auto& p : cp.plans)
        plans.push_back({{"mode", p.mode}, {"dwell", rational_to_json(p.dwell)}});
    return {{"vertices", vertices}, {"plans", plans}};
}

inline ClosedPolytope closed_polytope_from_json(const json& j) {
    ClosedPolytope cp;
    for (const auto& v : j.at("vertices")) cp.polytope.vertices.push_back(rvec_from_json(v));
    for (const auto& p : j.at("plans"))
        cp.plans.push_back(
            VertexPlan{p.at("mode").get<std::string>(), rational_from_json(p.at("dwell"))});
    return cp;
}

inline const char* face_status_name(FaceStatus s) {
    switch (s) {
        case FaceStatus::SchedulableClosed: return "schedulable-polytope";
        case FaceStatus::SchedulableInternal: return "schedulable-internal";
        case FaceStatus::Unschedulable: return "unschedulable";
    }
    return "unknown";
}

inline json face_report_to_json(const FaceReport& report) {
    json faces = json::array();
    for (const auto& e : report.entries) {
        json f;
        f["face"] = face_to_json(e.face.id);
        f["witness"] = rvec_to_json(e.face.witness);
        f["status"] = face_status_name(e.status);
        if (e.status == FaceStatus::SchedulableClosed) f["polytope"] = closed_polytope_to_json(*e.closed);
        if (e.status == FaceStatus::SchedulableInternal) f["internal_mode"] = e.internal_mode;
        if (e.status == FaceStatus::Unschedulable) f["falsifier"] = falsifier_to_json(*e.falsifier);
        faces.push_back(std::move(f));
    }
    return {{"faces", faces}};
}

inline json decision_to_json(const Problem& prob, const Decision& d) {
    json doc;
    doc["winner"] = d.scheduler_wins ? "scheduler" : "environment";
    doc["start_face"] = face_to_json(face_of(prob.safety, prob.start));
    if (d.scheduler_wins) {
        if (d.strategy_polytope) doc["strategy"] = closed_polytope_to_json(*d.strategy_polytope);
    } else {
        doc["falsifier"] = falsifier_to_json(*d.falsifier);
    }
    return doc;
}

inline json game_solution_to_json(const GameSolution& gs) {
    json winning = json::array(), actions = json::array();
    for (const auto& p : gs.winning) winning.push_back(rvec_to_json(p));
    for (const auto& a : gs.actions)
        actions.push_back({{"mode", a.mode}, {"periods", a.periods}});
    return {{"delta", rational_to_json(gs.delta)}, {"winning", winning}, {"actions", actions}};
}

inline GameSolution game_solution_from_json(const json& j) {
    GameSolution gs;
    gs.delta = rational_from_json(j.at("delta"));
    for (const auto& p : j.at("winning")) gs.winning.push_back(rvec_from_json(p));
    for (const auto& a : j.at("actions"))
        gs.actions.push_back(GameAction{a.at("mode").get<int>(), a.at("periods").get<long long>()});
    return gs;
}

inline json trace_to_json(const Trace& t) {
    json steps = json::array();
    for (const auto& s : t.steps)
        steps.push_back({{"mode", s.mode},
                         {"duration", rational_to_json(s.duration)},
                         {"rate", rvec_to_json(s.rate)},
                         {"to", rvec_to_json(s.landing)}});
    json doc = {{"start", rvec_to_json(t.start)},
                {"steps", steps},
                {"safe", t.safe},
                {"elapsed", rational_to_json(t.elapsed)}};
    doc["exit_step"] = t.exit_step ? json(*t.exit_step) : json(nullptr);
    return doc;
}

// step,mode,duration,rate...,x...
inline void trace_to_csv(std::ostream& out, const Trace& t) {
    const std::size_t n = t.start.size();
    out << "step,mode,duration";
    for (std::size_t i = 0; i < n; ++i) out << ",rate" << i;
    for (std::size_t i = 0; i < n; ++i) out << ",x" << i;
    out << "\n";
    for (std::size_t k = 0; k < t.steps.size(); ++k) {
        const TraceStep& s = t.steps[k];
        out << k << "," << s.mode << "," << rational_to_string(s.duration);
        for (const auto& r : s.rate) out << "," << rational_to_string(r);
        for (const auto& x : s.landing) out << "," << rational_to_string(x);
        out << "\n";
    }
}

}  // namespace bms
