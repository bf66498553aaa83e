#pragma once

#include <string>
#include <vector>

#include "bms/polytope.hpp"
#include "bms/rational.hpp"

namespace bms {

// A mode's rate set, stored by the vertices of its rate polytope. The list is
// vertex-filtered on construction: duplicates and convex combinations of the
// other rates are dropped.
struct Mode {
    std::string name;
    std::vector<RVec> rate_vertices;
};

enum class Semantics { Polytope, VerticesOnly };

struct System {
    int n = 0;
    std::vector<Mode> modes;
    Semantics semantics = Semantics::Polytope;
};

struct Problem {
    System system;
    HPolytope safety;
    RVec start;
};

// One extreme-rate choice per mode: index into each mode's vertex list.
using Instance = std::vector<int>;

inline Mode make_mode(std::string name, std::vector<RVec> rates, int n) {
    for (const auto& r : rates)
        if (static_cast<int>(r.size()) != n)
            throw Error(ErrorCode::DimensionMismatch, "mode '" + name + "': rate dimension != n");
    if (rates.empty()) throw Error(ErrorCode::SchemaViolation, "mode '" + name + "' has no rates");
    return Mode{std::move(name), filter_vertices(rates).vertices};
}

inline System make_system(int n, std::vector<Mode> modes, Semantics semantics) {
    if (n <= 0) throw Error(ErrorCode::SchemaViolation, "n must be positive");
    if (modes.empty()) throw Error(ErrorCode::SchemaViolation, "system without modes");
    return System{n, std::move(modes), semantics};
}

inline int mode_index(const System& sys, const std::string& name) {
    for (std::size_t i = 0; i < sys.modes.size(); ++i)
        if (sys.modes[i].name == name) return static_cast<int>(i);
    throw Error(ErrorCode::UnknownMode, "unknown mode '" + name + "'");
}

inline Problem make_problem(System sys, HPolytope safety, RVec start) {
    if (safety.dim() != sys.n || static_cast<int>(start.size()) != sys.n)
        throw Error(ErrorCode::DimensionMismatch, "safety set / start dimension != n");
    if (!is_bounded(safety)) throw Error(ErrorCode::UnboundedSafetySet, "safety set is unbounded");
    if (!contains(safety, start)) throw Error(ErrorCode::StartOutsideSafety, "start outside safety set");
    return Problem{std::move(sys), std::move(safety), std::move(start)};
}

inline long long instance_count(const System& sys) {
    long long c = 1;
    for (const auto& m : sys.modes) c *= static_cast<long long>(m.rate_vertices.size());
    return c;
}

// Lexicographic successor over the per-mode vertex choices; begin with all
// zeros. Returns false when the product is exhausted.
inline bool next_instance(const System& sys, Instance& inst) {
    for (int i = static_cast<int>(inst.size()) - 1; i >= 0; --i) {
        if (inst[i] + 1 < static_cast<int>(sys.modes[i].rate_vertices.size())) {
            ++inst[i];
            for (std::size_t j = i + 1; j < inst.size(); ++j) inst[j] = 0;
            return true;
        }
    }
    return false;
}

inline std::vector<Instance> enumerate_instances(const System& sys) {
    std::vector<Instance> all;
    Instance inst(sys.modes.size(), 0);
    do {
        all.push_back(inst);
    } while (next_instance(sys, inst));
    return all;
}

inline std::vector<RVec> instance_rates(const System& sys, const Instance& inst) {
    std::vector<RVec> rates;
    rates.reserve(sys.modes.size());
    for (std::size_t i = 0; i < sys.modes.size(); ++i)
        rates.push_back(sys.modes[i].rate_vertices[inst[i]]);
    return rates;
}

// --- model generators -------------------------------------------------------

// 3-CNF clause: nonzero literals, +v for x_v, -v for the negation (1-based).
using Clause = std::vector<int>;
using Cnf = std::vector<Clause>;

// One mode per clause; a positive literal contributes the +unit rate of its
// variable's axis, a negative literal the -unit rate. Duplicate literals in a
// clause collapse to a single rate.
inline System gen_sat(const Cnf& formula, int num_vars) {
    if (num_vars <= 0) throw Error(ErrorCode::SchemaViolation, "gen_sat: no variables");
    std::vector<Mode> modes;
    for (std::size_t j = 0; j < formula.size(); ++j) {
        const Clause& clause = formula[j];
        if (clause.empty()) throw Error(ErrorCode::EmptyClause, "clause " + std::to_string(j + 1));
        std::vector<RVec> rates;
        for (int lit : clause) {
            int v = lit > 0 ? lit : -lit;
            if (lit == 0 || v > num_vars)
                throw Error(ErrorCode::SchemaViolation, "gen_sat: bad literal " + std::to_string(lit));
            RVec r = zero_vec(num_vars);
            r[v - 1] = lit > 0 ? 1 : -1;
            rates.push_back(std::move(r));
        }
        modes.push_back(make_mode("m" + std::to_string(j + 1), std::move(rates), num_vars));
    }
    return make_system(num_vars, std::move(modes), Semantics::VerticesOnly);
}

struct GreenZone {
    std::string name;
    Rational on_rate, off_rate;  // temperature change rates
    Rational on_usage, off_usage;
};

// One constant-rate mode per ON/OFF combination whose total energy usage fits
// the budget; the mode name encodes the combination (e.g. "m01").
inline System gen_green(const std::vector<GreenZone>& zones, const Rational& budget) {
    if (zones.empty()) throw Error(ErrorCode::SchemaViolation, "gen_green: no zones");
    const int z = static_cast<int>(zones.size());
    std::vector<Mode> modes;
    for (long long mask = 0; mask < (1LL << z); ++mask) {
        Rational usage = 0;
        RVec rate(z);
        std::string name = "m";
        for (int i = 0; i < z; ++i) {
            bool on = (mask >> (z - 1 - i)) & 1;
            usage += on ? zones[i].on_usage : zones[i].off_usage;
            rate[i] = on ? zones[i].on_rate : zones[i].off_rate;
            name += on ? '1' : '0';
        }
        if (usage <= budget) modes.push_back(make_mode(std::move(name), {std::move(rate)}, z));
    }
    if (modes.empty())
        throw Error(ErrorCode::NoModeWithinBudget, "no ON/OFF combination fits the budget");
    return make_system(z, std::move(modes), Semantics::VerticesOnly);
}

}  // namespace bms
