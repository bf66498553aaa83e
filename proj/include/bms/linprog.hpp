#pragma once

#include <cassert>
#include <optional>
#include <utility>
#include <vector>

#include "bms/rational.hpp"

namespace bms {

// Exact rational linear program over variables x:
//   maximize objective . x   (feasibility problem when objective is absent)
//   subject to  eq x == eq_rhs,  le x <= le_rhs,  x_j >= 0 where nonneg[j].
struct LinearProgram {
    int vars = 0;
    std::optional<RVec> objective;
    RMatrix eq;
    RVec eq_rhs;
    RMatrix le;
    RVec le_rhs;
    std::vector<char> nonneg;

    static LinearProgram feasibility(int vars, bool all_nonneg = true) {
        LinearProgram lp;
        lp.vars = vars;
        lp.nonneg.assign(vars, all_nonneg ? 1 : 0);
        return lp;
    }

    static LinearProgram maximize(RVec obj, bool all_nonneg = true) {
        LinearProgram lp = feasibility(static_cast<int>(obj.size()), all_nonneg);
        lp.objective = std::move(obj);
        return lp;
    }

    void add_eq(RVec row, Rational rhs) {
        if (static_cast<int>(row.size()) != vars)
            throw Error(ErrorCode::DimensionMismatch, "lp eq row width");
        eq.push_back(std::move(row));
        eq_rhs.push_back(std::move(rhs));
    }

    void add_le(RVec row, Rational rhs) {
        if (static_cast<int>(row.size()) != vars)
            throw Error(ErrorCode::DimensionMismatch, "lp le row width");
        le.push_back(std::move(row));
        le_rhs.push_back(std::move(rhs));
    }

    // >= rows are stored negated.
    void add_ge(RVec row, Rational rhs) {
        for (auto& c : row) c = -c;
        add_le(std::move(row), -rhs);
    }
};

enum class LpStatus { Optimal, Feasible, Infeasible, Unbounded };

// The infeasibility certificate is a nonnegative multiplier per row of the
// combined <=-system [le | eq | -eq | -x_j<=0 for flagged j]; the combination
// cancels every variable and leaves 0 <= negative.
struct LpOutcome {
    LpStatus status = LpStatus::Infeasible;
    RVec point;
    Rational value = 0;
    RVec farkas;
    RVec ray;
};

inline bool lp_point_feasible(const LinearProgram& lp, const RVec& x) {
    if (static_cast<int>(x.size()) != lp.vars) return false;
    for (int j = 0; j < lp.vars; ++j)
        if (lp.nonneg[j] && x[j] < 0) return false;
    for (std::size_t i = 0; i < lp.eq.size(); ++i)
        if (dot(lp.eq[i], x) != lp.eq_rhs[i]) return false;
    for (std::size_t i = 0; i < lp.le.size(); ++i)
        if (dot(lp.le[i], x) > lp.le_rhs[i]) return false;
    return true;
}

namespace detail {

struct CombinedRow {
    RVec coeffs;
    Rational rhs;
};

inline std::vector<CombinedRow> combined_le_system(const LinearProgram& lp) {
    std::vector<CombinedRow> rows;
    for (std::size_t i = 0; i < lp.le.size(); ++i) rows.push_back({lp.le[i], lp.le_rhs[i]});
    for (std::size_t i = 0; i < lp.eq.size(); ++i) rows.push_back({lp.eq[i], lp.eq_rhs[i]});
    for (std::size_t i = 0; i < lp.eq.size(); ++i) {
        RVec neg(lp.eq[i].size());
        for (std::size_t t = 0; t < neg.size(); ++t) neg[t] = -lp.eq[i][t];
        rows.push_back({std::move(neg), -lp.eq_rhs[i]});
    }
    for (int j = 0; j < lp.vars; ++j) {
        if (!lp.nonneg[j]) continue;
        RVec row = zero_vec(lp.vars);
        row[j] = -1;
        rows.push_back({std::move(row), Rational(0)});
    }
    return rows;
}

// Dense two-phase tableau simplex, Bland's rule throughout. All iteration
// orders are fixed, so outcomes are deterministic for a given program.
class Simplex {
  public:
    explicit Simplex(const LinearProgram& lp) : lp_(lp) {
        n_struct_ = 0;
        col_of_var_.resize(lp.vars);
        for (int j = 0; j < lp.vars; ++j) {
            col_of_var_[j] = n_struct_;
            n_struct_ += lp.nonneg[j] ? 1 : 2;
        }
        n_slack_ = static_cast<int>(lp.le.size());
        m_ = static_cast<int>(lp.eq.size() + lp.le.size());
        n_art_ = m_;
        ncols_ = n_struct_ + n_slack_ + n_art_;

        rows_.assign(m_, RVec(ncols_ + 1, Rational(0)));
        basis_.resize(m_);
        int r = 0;
        for (std::size_t i = 0; i < lp.eq.size(); ++i, ++r) fill_structural(r, lp.eq[i], lp.eq_rhs[i]);
        for (std::size_t i = 0; i < lp.le.size(); ++i, ++r) {
            fill_structural(r, lp.le[i], lp.le_rhs[i]);
            rows_[r][n_struct_ + static_cast<int>(i)] = 1;
        }
        for (int i = 0; i < m_; ++i) {
            if (rows_[i][ncols_] < 0)
                for (auto& v : rows_[i]) v = -v;
            rows_[i][n_struct_ + n_slack_ + i] = 1;
            basis_[i] = n_struct_ + n_slack_ + i;
        }
    }

    // Returns false when the constraint system is infeasible.
    bool phase1() {
        cost_.assign(ncols_ + 1, Rational(0));
        for (int j = 0; j <= ncols_; ++j) {
            if (j >= n_struct_ + n_slack_ && j < ncols_) continue;  // artificial: cost -1 + 1 = 0
            Rational s = 0;
            for (int i = 0; i < m_; ++i) s += rows_[i][j];
            cost_[j] = s;
        }
        run();
        if (-cost_[ncols_] != 0) return false;  // z = -cost[rhs]; infeasible when sum of artificials > 0
        cleanup_artificials();
        return true;
    }

    // Returns true on Optimal, false on Unbounded (ray_ set).
    bool phase2(const RVec& objective) {
        cost_.assign(ncols_ + 1, Rational(0));
        RVec col_cost(ncols_, Rational(0));
        for (int j = 0; j < lp_.vars; ++j) {
            col_cost[col_of_var_[j]] = objective[j];
            if (!lp_.nonneg[j]) col_cost[col_of_var_[j] + 1] = -objective[j];
        }
        for (int j = 0; j < ncols_; ++j) {
            Rational s = col_cost[j];
            for (int i = 0; i < m_; ++i) s -= col_cost[basis_[i]] * rows_[i][j];
            cost_[j] = s;
        }
        Rational z = 0;
        for (int i = 0; i < m_; ++i) z += col_cost[basis_[i]] * rows_[i][ncols_];
        cost_[ncols_] = -z;
        return run();
    }

    Rational objective_value() const { return -cost_[ncols_]; }

    RVec extract_point() const {
        RVec std_val(ncols_, Rational(0));
        for (int i = 0; i < m_; ++i) std_val[basis_[i]] = rows_[i][ncols_];
        return std_to_x(std_val);
    }

    RVec extract_ray() const {
        RVec d(ncols_, Rational(0));
        d[ray_col_] = 1;
        for (int i = 0; i < m_; ++i) d[basis_[i]] = -rows_[i][ray_col_];
        return std_to_x(d);
    }

  private:
    void fill_structural(int r, const RVec& coeffs, const Rational& rhs) {
        for (int j = 0; j < lp_.vars; ++j) {
            rows_[r][col_of_var_[j]] = coeffs[j];
            if (!lp_.nonneg[j]) rows_[r][col_of_var_[j] + 1] = -coeffs[j];
        }
        rows_[r][ncols_] = rhs;
    }

    RVec std_to_x(const RVec& std_val) const {
        RVec x(lp_.vars);
        for (int j = 0; j < lp_.vars; ++j) {
            x[j] = std_val[col_of_var_[j]];
            if (!lp_.nonneg[j]) x[j] -= std_val[col_of_var_[j] + 1];
        }
        return x;
    }

    // Bland: entering = lowest-index improving column; leaving = lowest basic
    // variable among minimum-ratio rows. Terminates without anti-cycling state.
    bool run() {
        for (;;) {
            int enter = -1;
            for (int j = 0; j < ncols_; ++j) {
                if (banned_artificials_ && j >= n_struct_ + n_slack_) break;
                if (cost_[j] > 0) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return true;
            int leave = -1;
            Rational best_ratio = 0;
            for (int i = 0; i < m_; ++i) {
                if (rows_[i][enter] <= 0) continue;
                Rational ratio = rows_[i][ncols_] / rows_[i][enter];
                if (leave < 0 || ratio < best_ratio ||
                    (ratio == best_ratio && basis_[i] < basis_[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave < 0) {
                ray_col_ = enter;
                return false;
            }
            pivot(leave, enter);
        }
    }

    void pivot(int pi, int pj) {
        RVec& prow = rows_[pi];
        Rational inv = prow[pj];
        for (auto& v : prow) v /= inv;
        for (int i = 0; i < m_; ++i) {
            if (i == pi) continue;
            Rational f = rows_[i][pj];
            if (f == 0) continue;
            RVec& row = rows_[i];
            for (int j = 0; j <= ncols_; ++j) row[j] -= f * prow[j];
        }
        Rational f = cost_[pj];
        if (f != 0)
            for (int j = 0; j <= ncols_; ++j) cost_[j] -= f * prow[j];
        basis_[pi] = pj;
    }

    void cleanup_artificials() {
        int art_begin = n_struct_ + n_slack_;
        for (int i = m_ - 1; i >= 0; --i) {
            if (basis_[i] < art_begin) continue;
            int enter = -1;
            for (int j = 0; j < art_begin; ++j)
                if (rows_[i][j] != 0) {
                    enter = j;
                    break;
                }
            if (enter >= 0) {
                pivot(i, enter);
            } else {
                rows_.erase(rows_.begin() + i);  // redundant row
                basis_.erase(basis_.begin() + i);
                --m_;
            }
        }
        banned_artificials_ = true;
    }

    const LinearProgram& lp_;
    int n_struct_ = 0, n_slack_ = 0, n_art_ = 0, m_ = 0, ncols_ = 0;
    std::vector<int> col_of_var_;
    RMatrix rows_;
    RVec cost_;
    std::vector<int> basis_;
    int ray_col_ = -1;
    bool banned_artificials_ = false;
};

inline LpOutcome lp_solve_impl(const LinearProgram& lp, bool want_farkas);

inline RVec farkas_certificate(const LinearProgram& lp) {
    auto rows = combined_le_system(lp);
    int K = static_cast<int>(rows.size());
    LinearProgram dual = LinearProgram::feasibility(K);
    for (int t = 0; t < lp.vars; ++t) {
        RVec row(K);
        for (int k = 0; k < K; ++k) row[k] = rows[k].coeffs[t];
        dual.add_eq(std::move(row), Rational(0));
    }
    RVec row(K);
    for (int k = 0; k < K; ++k) row[k] = rows[k].rhs;
    dual.add_eq(std::move(row), Rational(-1));
    LpOutcome out = lp_solve_impl(dual, false);
    if (out.status != LpStatus::Feasible)
        throw Error(ErrorCode::Internal, "Farkas system infeasible for an infeasible program");
    return out.point;
}

inline LpOutcome lp_solve_impl(const LinearProgram& lp, bool want_farkas) {
    if (lp.vars <= 0) throw Error(ErrorCode::DimensionMismatch, "lp without variables");
    if (lp.objective && static_cast<int>(lp.objective->size()) != lp.vars)
        throw Error(ErrorCode::DimensionMismatch, "lp objective width");

    Simplex simplex(lp);
    LpOutcome out;
    if (!simplex.phase1()) {
        out.status = LpStatus::Infeasible;
        if (want_farkas) out.farkas = farkas_certificate(lp);
        return out;
    }
    if (!lp.objective) {
        out.status = LpStatus::Feasible;
        out.point = simplex.extract_point();
        if (!lp_point_feasible(lp, out.point))
            throw Error(ErrorCode::Internal, "simplex produced an infeasible point");
        return out;
    }
    if (!simplex.phase2(*lp.objective)) {
        out.status = LpStatus::Unbounded;
        out.ray = simplex.extract_ray();
        return out;
    }
    out.status = LpStatus::Optimal;
    out.point = simplex.extract_point();
    out.value = simplex.objective_value();
    if (!lp_point_feasible(lp, out.point) || dot(*lp.objective, out.point) != out.value)
        throw Error(ErrorCode::Internal, "simplex optimum fails re-substitution");
    return out;
}

}  // namespace detail

inline LpOutcome lp_solve(const LinearProgram& lp) { return detail::lp_solve_impl(lp, true); }

inline bool lp_farkas_valid(const LinearProgram& lp, const RVec& y) {
    auto rows = detail::combined_le_system(lp);
    if (y.size() != rows.size()) return false;
    for (const auto& v : y)
        if (v < 0) return false;
    RVec combo = zero_vec(lp.vars);
    Rational rhs = 0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        for (int t = 0; t < lp.vars; ++t) combo[t] += y[k] * rows[k].coeffs[t];
        rhs += y[k] * rows[k].rhs;
    }
    return is_zero(combo) && rhs < 0;
}

inline bool lp_ray_valid(const LinearProgram& lp, const RVec& ray) {
    if (static_cast<int>(ray.size()) != lp.vars) return false;
    for (int j = 0; j < lp.vars; ++j)
        if (lp.nonneg[j] && ray[j] < 0) return false;
    for (std::size_t i = 0; i < lp.eq.size(); ++i)
        if (dot(lp.eq[i], ray) != 0) return false;
    for (std::size_t i = 0; i < lp.le.size(); ++i)
        if (dot(lp.le[i], ray) > 0) return false;
    return lp.objective && dot(*lp.objective, ray) > 0;
}

}  // namespace bms
