#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "bms/json_io.hpp"

namespace {

struct CliResult {
    int exit_code;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    std::string cmd = std::string(BMS_CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    int status = pclose(pipe);
    return CliResult{WEXITSTATUS(status), out};
}

std::string model(const std::string& name) { return std::string(BMS_MODELS_DIR) + "/" + name; }

}  // namespace

TEST_CASE("decide: scheduler wins example 4, environment wins example 2") {
    CliResult won = run_cli("decide " + model("example4.json"));
    CHECK(won.exit_code == 0);
    auto doc = nlohmann::json::parse(won.out);
    CHECK(doc["winner"] == "scheduler");
    REQUIRE(doc.contains("strategy"));
    auto cp = bms::closed_polytope_from_json(doc["strategy"]);
    REQUIRE(cp.polytope.vertices.size() == 2);
    CHECK(cp.polytope.vertices[0] == bms::RVec{bms::rat(-1), bms::rat(1)});
    CHECK(cp.polytope.vertices[1] == bms::RVec{bms::rat(-1), bms::rat(-2)});

    CliResult lost = run_cli("decide " + model("example2.json"));
    CHECK(lost.exit_code == 1);
    auto doc2 = nlohmann::json::parse(lost.out);
    CHECK(doc2["winner"] == "environment");
    auto f = bms::falsifier_from_json(doc2["falsifier"]);
    CHECK(f.push[0] > 0);
    CHECK(f.pushed_rates.at("m1")[0] > 0);
    CHECK(f.pushed_rates.at("m2")[0] > 0);
}

TEST_CASE("check answers the system-level question with matching exit codes") {
    CliResult safe = run_cli("check " + model("example4.json"));
    CHECK(safe.exit_code == 0);
    CHECK(nlohmann::json::parse(safe.out)["safe"] == true);

    CliResult unsafe = run_cli("check " + model("example2.json"));
    CHECK(unsafe.exit_code == 1);
    CHECK(nlohmann::json::parse(unsafe.out)["safe"] == false);

    CHECK(run_cli("check " + model("example1.json")).exit_code == 0);
    CHECK(run_cli("check " + model("green.json")).exit_code == 0);
    CHECK(run_cli("check " + model("fig6-left.json")).exit_code == 1);
    CHECK(run_cli("check " + model("fig6-right.json")).exit_code == 0);
}

TEST_CASE("gen sat piped into check links satisfiability to unsafety") {
    CliResult sat = run_cli("gen sat --cnf " + model("fig5-left.cnf") + " | " + BMS_CLI_PATH + " check -");
    CHECK(sat.exit_code == 1);  // satisfiable <=> unsafe

    CliResult unsat =
        run_cli("gen sat --cnf " + model("fig5-right.cnf") + " | " + BMS_CLI_PATH + " check -");
    CHECK(unsat.exit_code == 0);
}

TEST_CASE("gen green emits the paper configuration as a loadable model") {
    CliResult green = run_cli("gen green --config " + model("green-config.json"));
    REQUIRE(green.exit_code == 0);
    auto prob = bms::problem_from_json(nlohmann::json::parse(green.out));
    REQUIRE(prob.system.modes.size() == 3);
    CHECK(prob.system.modes[0].name == "m00");
    CHECK(prob.system.modes[1].rate_vertices[0] == bms::RVec{bms::rat(2), bms::rat(-2)});
}

TEST_CASE("discrete and max-delta answer the line instances") {
    // a 1-D strip model written on the fly
    std::string path = std::string(BMS_MODELS_DIR) + "/../build_tmp_line.json";
    {
        std::ofstream out(path);
        out << R"({"n":1,"semantics":"vertices-only",
                   "modes":[{"name":"up","rates":[["1"]]},{"name":"down","rates":[["-1"]]}],
                   "safety":{"A":[["1"],["-1"]],"b":["2","0"]},"start":["1"]})";
    }
    CliResult yes = run_cli("discrete --delta 1 " + path);
    CHECK(yes.exit_code == 0);
    auto doc = nlohmann::json::parse(yes.out);
    CHECK(doc["answer"] == "yes");
    auto gs = bms::game_solution_from_json(doc["solution"]);
    CHECK(gs.winning.size() == 3);

    CliResult no = run_cli("discrete --delta 3/2 " + path);
    CHECK(no.exit_code == 1);
    CHECK(nlohmann::json::parse(no.out)["answer"] == "no");

    CliResult md = run_cli("max-delta " + path);
    CHECK(md.exit_code == 0);
    CHECK(nlohmann::json::parse(md.out)["delta_max"] == "1/1");

    CliResult replay = run_cli("simulate --delta 1 --env random:3 --rounds 20 " + path);
    CHECK(replay.exit_code == 0);
    CHECK(nlohmann::json::parse(replay.out)["safe"] == true);
    std::remove(path.c_str());
}

TEST_CASE("simulate writes exact traces and respects the exit-code contract") {
    std::string trace_path = std::string(BMS_MODELS_DIR) + "/../build_tmp_trace.csv";
    CliResult sim = run_cli("simulate --env random:7 --rounds 50 --trace " + trace_path + " " +
                            model("example4.json"));
    CHECK(sim.exit_code == 0);
    auto doc = nlohmann::json::parse(sim.out);
    CHECK(doc["safe"] == true);
    CHECK(doc["steps"].size() == 50);
    std::ifstream in(trace_path);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header == "step,mode,duration,rate0,rate1,x0,x1");
    std::remove(trace_path.c_str());

    // pusher against the losing example exits the safety set: exit code 1
    CliResult losing =
        run_cli("simulate --env pusher:1,0 --rounds 200 " + model("example2.json"));
    CHECK(losing.exit_code == 1);
    CHECK(nlohmann::json::parse(losing.out)["safe"] == false);
}

TEST_CASE("faces and synthesize expose the report") {
    CliResult faces = run_cli("faces " + model("example4.json"));
    CHECK(faces.exit_code == 0);
    auto doc = nlohmann::json::parse(faces.out);
    CHECK(doc["faces"].size() >= 9);

    CliResult synth = run_cli("synthesize " + model("example4.json"));
    CHECK(synth.exit_code == 0);
    CHECK(nlohmann::json::parse(synth.out).contains("strategy"));
}

TEST_CASE("usage and input errors use exit codes 2 and 3") {
    CHECK(run_cli("decide").exit_code == 2);
    CHECK(run_cli("frobnicate x").exit_code == 2);
    CHECK(run_cli("decide /nonexistent/model.json").exit_code == 3);

    std::string bad = std::string(BMS_MODELS_DIR) + "/../build_tmp_bad.json";
    {
        std::ofstream out(bad);
        out << R"({"n":2,"semantics":"polytope",
                   "modes":[{"name":"m","rates":[["1","0","0"]]}],
                   "safety":{"A":[["1","0"],["-1","0"],["0","1"],["0","-1"]],"b":["1","1","1","1"]},
                   "start":["0","0"]})";
    }
    CliResult dim = run_cli("decide " + bad);
    CHECK(dim.exit_code == 3);
    CHECK(nlohmann::json::parse(dim.out)["error"]["code"] == "DimensionMismatch");
    std::remove(bad.c_str());
}

TEST_CASE("cli outputs parse back through the library loaders") {
    CliResult decided = run_cli("decide " + model("example4.json"));
    auto doc = nlohmann::json::parse(decided.out);
    auto cp = bms::closed_polytope_from_json(doc["strategy"]);
    CHECK(cp.plans.size() == cp.polytope.vertices.size());

    CliResult gen = run_cli("gen sat --cnf " + model("fig5-left.cnf"));
    auto prob = bms::problem_from_json(nlohmann::json::parse(gen.out));
    CHECK(prob.system.modes.size() == 2);
}
