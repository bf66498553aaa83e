// Command-line front end: decision procedures, strategy synthesis, adversarial
// simulation and the discrete clock-period tools, all emitting JSON on stdout.
// Exit codes: 0 scheduler-wins/safe/yes, 1 environment-wins/unsafe/no,
// 2 usage error, 3 input error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bms/bms.hpp"

namespace {

using bms::json;

bms::Problem load_model(const std::string& path) {
    if (path == "-") return bms::load_problem(std::cin);
    return bms::load_problem_file(path);
}

void emit(const json& doc) { std::cout << doc.dump(2) << "\n"; }

int emit_error(int code, const std::string& kind, const std::string& message) {
    emit(json{{"error", {{"code", kind}, {"message", message}}}});
    std::cerr << kind << ": " << message << "\n";
    return code;
}

// DIMACS CNF. Comment lines start with 'c', the header is "p cnf <vars> <clauses>".
std::pair<bms::Cnf, int> parse_dimacs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw bms::Error(bms::ErrorCode::SchemaViolation, "cannot open '" + path + "'");
    bms::Cnf cnf;
    bms::Clause clause;
    int vars = 0;
    std::string tok;
    bool have_header = false;
    while (in >> tok) {
        if (tok == "c") {
            std::string rest;
            std::getline(in, rest);
            continue;
        }
        if (tok == "p") {
            std::string fmt;
            int nclauses;
            if (!(in >> fmt >> vars >> nclauses) || fmt != "cnf")
                throw bms::Error(bms::ErrorCode::SchemaViolation, "bad DIMACS header");
            have_header = true;
            continue;
        }
        int lit = std::stoi(tok);
        if (lit == 0) {
            cnf.push_back(clause);
            clause.clear();
        } else {
            clause.push_back(lit);
        }
    }
    if (!clause.empty()) cnf.push_back(clause);
    if (!have_header) {
        for (const auto& c : cnf)
            for (int lit : c) vars = std::max(vars, lit > 0 ? lit : -lit);
    }
    return {cnf, vars};
}

bms::HPolytope box(int n, const bms::Rational& lo, const bms::Rational& hi) {
    bms::HPolytope S;
    for (int i = 0; i < n; ++i) {
        bms::RVec up = bms::zero_vec(n), down = bms::zero_vec(n);
        up[i] = 1;
        down[i] = -1;
        S.A.push_back(up);
        S.b.push_back(hi);
        S.A.push_back(down);
        S.b.push_back(-lo);
    }
    return S;
}

int run(int argc, char** argv) {
    CLI::App app{"Safe schedulability games on multi-mode systems with bounded rate uncertainty"};
    app.require_subcommand(1);
    int jobs = 1;
    app.add_option("--jobs", jobs, "parallel workers for instance/candidate sweeps")->capture_default_str();

    std::string model_path, env_spec = "", trace_path = "", format = "csv", delta_str = "";
    long long rounds = 100;
    unsigned long long seed = 0;

    auto* check = app.add_subcommand("check", "system-level safety over all extreme-rate instances");
    check->add_option("model", model_path, "model file or '-' for stdin")->required();

    auto* decide_cmd = app.add_subcommand("decide", "winner and certificate for the model's start state");
    decide_cmd->add_option("model", model_path)->required();

    auto* faces = app.add_subcommand("faces", "per-face schedulability report");
    faces->add_option("model", model_path)->required();

    auto* synth = app.add_subcommand("synthesize", "winning strategy tables (or the falsifier)");
    synth->add_option("model", model_path)->required();

    auto* sim = app.add_subcommand("simulate", "play the game against an environment policy");
    sim->add_option("model", model_path)->required();
    sim->add_option("--env", env_spec, "fixed:i,j,... | random:seed | pusher:x,y,... | hull:seed");
    sim->add_option("--rounds", rounds, "number of rounds")->capture_default_str();
    sim->add_option("--seed", seed, "seed for the default random environment")->capture_default_str();
    sim->add_option("--trace", trace_path, "write the trace to this file");
    sim->add_option("--format", format, "trace file format: csv or json")->capture_default_str();
    sim->add_option("--delta", delta_str, "replay the discrete solution for this clock period");

    auto* discrete = app.add_subcommand("discrete", "discrete schedulability for a fixed clock period");
    discrete->add_option("model", model_path)->required();
    discrete->add_option("--delta", delta_str, "clock period, e.g. 1/2")->required();

    auto* maxd = app.add_subcommand("max-delta", "maximal clock period with a discrete winning strategy");
    maxd->add_option("model", model_path)->required();

    auto* gen = app.add_subcommand("gen", "model generators");
    gen->require_subcommand(1);
    std::string cnf_path, config_path;
    auto* gen_sat_cmd = gen->add_subcommand("sat", "3-SAT reduction: satisfiable iff unschedulable");
    gen_sat_cmd->add_option("--cnf", cnf_path, "DIMACS CNF file")->required();
    auto* gen_green_cmd = gen->add_subcommand("green", "peak-bounded HVAC scheduling model");
    gen_green_cmd->add_option("--config", config_path, "zone/budget JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);  // prints the usage message
        return rc == 0 ? 0 : 2;
    }

    if (*check) {
        bms::Problem prob = load_model(model_path);
        bms::SafetyVerdict v = bms::bms_safe(prob.system, jobs);
        emit(bms::verdict_to_json(prob.system, v));
        return v.safe ? 0 : 1;
    }
    if (*decide_cmd) {
        bms::Problem prob = load_model(model_path);
        bms::Decision d = bms::decide(prob, jobs);
        emit(bms::decision_to_json(prob, d));
        return d.scheduler_wins ? 0 : 1;
    }
    if (*faces) {
        bms::Problem prob = load_model(model_path);
        bms::FaceReport report = bms::analyze_faces(prob, jobs);
        emit(bms::face_report_to_json(report));
        const bms::FaceEntry* entry = report.find(bms::face_of(prob.safety, prob.start));
        return entry && entry->status != bms::FaceStatus::Unschedulable ? 0 : 1;
    }
    if (*synth) {
        bms::Problem prob = load_model(model_path);
        bms::Decision d = bms::decide(prob, jobs);
        json doc = bms::decision_to_json(prob, d);
        if (d.scheduler_wins) doc["faces"] = bms::face_report_to_json(d.report)["faces"];
        emit(doc);
        return d.scheduler_wins ? 0 : 1;
    }
    if (*sim) {
        bms::Problem prob = load_model(model_path);
        bms::EnvPolicy env = env_spec.empty()
                                 ? bms::EnvPolicy::random_vertex(seed)
                                 : bms::make_env_policy(env_spec, prob);
        bms::Trace trace;
        if (!delta_str.empty()) {
            auto gs = bms::discrete_schedulable(prob, bms::parse_rational(delta_str));
            if (!gs) return emit_error(1, "NoDiscreteStrategy", "no winning strategy at this clock period");
            bms::GameReplayScheduler replay(*gs);
            trace = bms::simulate(prob, &replay, env, rounds);
        } else {
            bms::Decision d = bms::decide(prob, jobs);
            if (d.scheduler_wins) {
                bms::StrategyState st = bms::make_strategy(prob, d);
                trace = bms::simulate(prob, &st, env, rounds);
            } else {
                std::cerr << "environment wins; simulating a round-robin scheduler\n";
                bms::RoundRobinScheduler rr;
                trace = bms::simulate(prob, &rr, env, rounds);
            }
        }
        if (!trace_path.empty()) {
            std::ofstream out(trace_path);
            if (!out) return emit_error(3, "SchemaViolation", "cannot write '" + trace_path + "'");
            if (format == "json")
                out << bms::trace_to_json(trace).dump(2) << "\n";
            else
                bms::trace_to_csv(out, trace);
        }
        emit(bms::trace_to_json(trace));
        return trace.safe ? 0 : 1;
    }
    if (*discrete) {
        bms::Problem prob = load_model(model_path);
        auto gs = bms::discrete_schedulable(prob, bms::parse_rational(delta_str));
        json doc;
        doc["answer"] = gs ? "yes" : "no";
        doc["delta"] = bms::rational_to_json(bms::parse_rational(delta_str));
        if (gs) doc["solution"] = bms::game_solution_to_json(*gs);
        emit(doc);
        return gs ? 0 : 1;
    }
    if (*maxd) {
        bms::Problem prob = load_model(model_path);
        bms::MaxDeltaResult r;
        try {
            r = bms::max_delta(prob, jobs);
        } catch (const bms::Error& e) {
            if (e.code() == bms::ErrorCode::NotSchedulable)
                return emit_error(1, "NotSchedulable", e.what());
            throw;
        }
        json doc;
        if (r.unbounded) {
            doc["delta_max"] = "unbounded";
        } else {
            doc["delta_max"] = bms::rational_to_json(r.value);
            doc["gamma"] = bms::rational_to_json(r.gamma);
            doc["gamma_halvings"] = r.gamma_halvings;
        }
        emit(doc);
        return 0;
    }
    if (*gen_sat_cmd) {
        auto [cnf, vars] = parse_dimacs(cnf_path);
        bms::System sys = bms::gen_sat(cnf, vars);
        bms::Problem prob =
            bms::make_problem(std::move(sys), box(vars, bms::rat(-1), bms::rat(1)), bms::zero_vec(vars));
        emit(bms::problem_to_json(prob));
        return 0;
    }
    if (*gen_green_cmd) {
        std::ifstream in(config_path);
        if (!in) return emit_error(3, "SchemaViolation", "cannot open '" + config_path + "'");
        json cfg;
        in >> cfg;
        std::vector<bms::GreenZone> zones;
        for (const auto& zj : cfg.at("zones"))
            zones.push_back(bms::GreenZone{zj.value("name", "zone" + std::to_string(zones.size())),
                                           bms::rational_from_json(zj.at("on_rate")),
                                           bms::rational_from_json(zj.at("off_rate")),
                                           bms::rational_from_json(zj.at("on_usage")),
                                           bms::rational_from_json(zj.at("off_usage"))});
        bms::System sys = bms::gen_green(zones, bms::rational_from_json(cfg.at("budget")));
        bms::Rational lo = cfg.contains("low") ? bms::rational_from_json(cfg["low"]) : bms::rat(65);
        bms::Rational hi = cfg.contains("high") ? bms::rational_from_json(cfg["high"]) : bms::rat(75);
        bms::RVec start(zones.size(), (lo + hi) / 2);
        if (cfg.contains("start")) start = bms::rvec_from_json(cfg["start"]);
        bms::Problem prob = bms::make_problem(std::move(sys), box(static_cast<int>(zones.size()), lo, hi),
                                              std::move(start));
        emit(bms::problem_to_json(prob));
        return 0;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const bms::Error& e) {
        return emit_error(3, bms::error_code_name(e.code()), e.what());
    } catch (const std::exception& e) {
        return emit_error(3, "Internal", e.what());
    }
}
