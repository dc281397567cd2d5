#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "stormrisk/common.hpp"

namespace stormrisk {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Linear program in bounded-variable form:
///   min c'x  s.t.  lo_r <= a_r'x <= hi_r  for each row r,  lb <= x <= ub.
/// Rows with lo == hi are equalities; one-sided rows use +-inf.
struct LpProblem {
    std::vector<double> cost;
    std::vector<double> lb, ub;
    struct Row {
        std::vector<std::pair<int, double>> terms;
        double lo = -kInf;
        double hi = kInf;
    };
    std::vector<Row> rows;

    int add_var(double l, double u, double c) {
        lb.push_back(l);
        ub.push_back(u);
        cost.push_back(c);
        return static_cast<int>(cost.size()) - 1;
    }
    void add_row(std::vector<std::pair<int, double>> terms, double lo, double hi) {
        rows.push_back(Row{std::move(terms), lo, hi});
    }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit };

struct LpResult {
    LpStatus status = LpStatus::IterLimit;
    double objective = 0.0;
    std::vector<double> x;
};

/// Dense bounded-variable primal simplex, two phases with artificial
/// variables. Sized for the desk-scale dispatch and enumeration LPs here
/// (a few thousand variables), not for production-scale programs.
class SimplexSolver {
  public:
    explicit SimplexSolver(const LpProblem& p) : p_(p) {}

    LpResult solve() {
        build();
        LpResult res;
        if (!phase1()) {
            res.status = iter_exceeded_ ? LpStatus::IterLimit : LpStatus::Infeasible;
            return res;
        }
        const LpStatus st = phase2();
        res.status = st;
        if (st != LpStatus::Optimal) return res;
        res.x.assign(static_cast<std::size_t>(n_struct_), 0.0);
        std::vector<double> full = current_values();
        for (int j = 0; j < n_struct_; ++j) res.x[static_cast<std::size_t>(j)] = full[static_cast<std::size_t>(j)];
        res.objective = 0.0;
        for (int j = 0; j < n_struct_; ++j) {
            res.objective += p_.cost[static_cast<std::size_t>(j)] * res.x[static_cast<std::size_t>(j)];
        }
        return res;
    }

  private:
    enum class NState : char { Basic, AtLower, AtUpper, FreeZero };

    const LpProblem& p_;
    int n_struct_ = 0;
    int n_total_ = 0;  // struct + slacks + artificials
    int m_ = 0;
    int art_begin_ = 0;
    std::vector<double> tab_;   // m x n_total row-major: B^-1 A
    std::vector<double> beta_;  // basic values
    std::vector<int> basic_;    // var index per row
    std::vector<NState> state_;
    std::vector<double> lb_, ub_;
    std::vector<double> cost2_;  // phase-2 costs over all columns
    bool iter_exceeded_ = false;
    double dual_tol_ = 1e-9;
    static constexpr double kPivotTol = 1e-9;
    static constexpr double kHarrisSlack = 1e-9;

    double& tab(int i, int j) { return tab_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_total_) + static_cast<std::size_t>(j)]; }
    double nb_value(int j) const {
        switch (state_[static_cast<std::size_t>(j)]) {
            case NState::AtLower: return lb_[static_cast<std::size_t>(j)];
            case NState::AtUpper: return ub_[static_cast<std::size_t>(j)];
            default: return 0.0;
        }
    }

    std::vector<double> current_values() const {
        std::vector<double> x(static_cast<std::size_t>(n_total_), 0.0);
        for (int j = 0; j < n_total_; ++j) {
            if (state_[static_cast<std::size_t>(j)] != NState::Basic) x[static_cast<std::size_t>(j)] = nb_value(j);
        }
        for (int i = 0; i < m_; ++i) x[static_cast<std::size_t>(basic_[static_cast<std::size_t>(i)])] = beta_[static_cast<std::size_t>(i)];
        return x;
    }

    void build() {
        n_struct_ = static_cast<int>(p_.cost.size());
        m_ = static_cast<int>(p_.rows.size());
        // Count slacks: one per non-equality row.
        int n_slack = 0;
        for (const auto& r : p_.rows) {
            if (!(r.lo == r.hi)) ++n_slack;
        }
        art_begin_ = n_struct_ + n_slack;
        n_total_ = art_begin_ + m_;

        lb_.assign(static_cast<std::size_t>(n_total_), 0.0);
        ub_.assign(static_cast<std::size_t>(n_total_), kInf);
        cost2_.assign(static_cast<std::size_t>(n_total_), 0.0);
        for (int j = 0; j < n_struct_; ++j) {
            lb_[static_cast<std::size_t>(j)] = p_.lb[static_cast<std::size_t>(j)];
            ub_[static_cast<std::size_t>(j)] = p_.ub[static_cast<std::size_t>(j)];
            cost2_[static_cast<std::size_t>(j)] = p_.cost[static_cast<std::size_t>(j)];
        }

        state_.assign(static_cast<std::size_t>(n_total_), NState::AtLower);
        for (int j = 0; j < n_total_; ++j) {
            if (std::isfinite(lb_[static_cast<std::size_t>(j)])) {
                state_[static_cast<std::size_t>(j)] = NState::AtLower;
            } else if (std::isfinite(ub_[static_cast<std::size_t>(j)])) {
                state_[static_cast<std::size_t>(j)] = NState::AtUpper;
            } else {
                state_[static_cast<std::size_t>(j)] = NState::FreeZero;
            }
        }

        tab_.assign(static_cast<std::size_t>(m_) * static_cast<std::size_t>(n_total_), 0.0);
        beta_.assign(static_cast<std::size_t>(m_), 0.0);
        basic_.assign(static_cast<std::size_t>(m_), 0);

        // Rows: a'x (- slack) = rhs, with slack in [lo, hi] for ranges.
        std::vector<double> rhs(static_cast<std::size_t>(m_), 0.0);
        int slack = n_struct_;
        for (int i = 0; i < m_; ++i) {
            const auto& r = p_.rows[static_cast<std::size_t>(i)];
            for (const auto& [j, a] : r.terms) tab(i, j) += a;
            if (r.lo == r.hi) {
                rhs[static_cast<std::size_t>(i)] = r.lo;
            } else {
                tab(i, slack) = -1.0;
                lb_[static_cast<std::size_t>(slack)] = r.lo;
                ub_[static_cast<std::size_t>(slack)] = r.hi;
                state_[static_cast<std::size_t>(slack)] =
                    std::isfinite(r.lo) ? NState::AtLower
                    : (std::isfinite(r.hi) ? NState::AtUpper : NState::FreeZero);
                rhs[static_cast<std::size_t>(i)] = 0.0;
                ++slack;
            }
        }

        // Residuals at the nonbasic start decide artificial signs.
        for (int i = 0; i < m_; ++i) {
            double ax = 0.0;
            for (int j = 0; j < art_begin_; ++j) {
                if (tab(i, j) != 0.0) ax += tab(i, j) * nb_value(j);
            }
            const double resid = rhs[static_cast<std::size_t>(i)] - ax;
            const int aj = art_begin_ + i;
            const double sign = resid >= 0.0 ? 1.0 : -1.0;
            tab(i, aj) = sign;
            lb_[static_cast<std::size_t>(aj)] = 0.0;
            ub_[static_cast<std::size_t>(aj)] = kInf;
            basic_[static_cast<std::size_t>(i)] = aj;
            state_[static_cast<std::size_t>(aj)] = NState::Basic;
            // Scale the row so the basic column is +1.
            if (sign < 0.0) {
                for (int j = 0; j < n_total_; ++j) tab(i, j) = -tab(i, j);
                tab(i, aj) = 1.0;
            }
            beta_[static_cast<std::size_t>(i)] = std::abs(resid);
        }

        double cmax = 1.0;
        for (double c : p_.cost) cmax = std::max(cmax, std::abs(c));
        dual_tol_ = 1e-9 * cmax;
    }

    /// One simplex run against a cost vector. Returns status.
    LpStatus iterate(const std::vector<double>& cost, bool allow_art_entering) {
        const long max_iter = 2000 + 200L * (m_ + n_total_);
        long degenerate_run = 0;
        for (long iter = 0; iter < max_iter; ++iter) {
            // Reduced costs d = c - c_B' T.
            std::vector<double> cb(static_cast<std::size_t>(m_));
            bool any_cb = false;
            for (int i = 0; i < m_; ++i) {
                cb[static_cast<std::size_t>(i)] = cost[static_cast<std::size_t>(basic_[static_cast<std::size_t>(i)])];
                any_cb = any_cb || cb[static_cast<std::size_t>(i)] != 0.0;
            }
            std::vector<double> d(cost);
            if (any_cb) {
                for (int i = 0; i < m_; ++i) {
                    const double c = cb[static_cast<std::size_t>(i)];
                    if (c == 0.0) continue;
                    const double* row = &tab_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_total_)];
                    for (int j = 0; j < n_total_; ++j) d[static_cast<std::size_t>(j)] -= c * row[j];
                }
            }

            const bool bland = degenerate_run > 60;
            int enter = -1;
            double best = dual_tol_;
            int dir = +1;
            for (int j = 0; j < n_total_; ++j) {
                if (state_[static_cast<std::size_t>(j)] == NState::Basic) continue;
                if (!allow_art_entering && j >= art_begin_) continue;
                if (lb_[static_cast<std::size_t>(j)] == ub_[static_cast<std::size_t>(j)]) continue;  // fixed
                const double dj = d[static_cast<std::size_t>(j)];
                double improve = 0.0;
                int this_dir = 0;
                switch (state_[static_cast<std::size_t>(j)]) {
                    case NState::AtLower:
                        if (dj < -dual_tol_) {
                            improve = -dj;
                            this_dir = +1;
                        }
                        break;
                    case NState::AtUpper:
                        if (dj > dual_tol_) {
                            improve = dj;
                            this_dir = -1;
                        }
                        break;
                    case NState::FreeZero:
                        if (std::abs(dj) > dual_tol_) {
                            improve = std::abs(dj);
                            this_dir = dj < 0 ? +1 : -1;
                        }
                        break;
                    default: break;
                }
                if (this_dir == 0) continue;
                if (bland) {
                    enter = j;
                    dir = this_dir;
                    break;
                }
                if (improve > best) {
                    best = improve;
                    enter = j;
                    dir = this_dir;
                }
            }
            if (enter < 0) return LpStatus::Optimal;

            // Ratio test.
            const double own_range = ub_[static_cast<std::size_t>(enter)] - lb_[static_cast<std::size_t>(enter)];
            double limit = state_[static_cast<std::size_t>(enter)] == NState::FreeZero ? kInf : own_range;
            int leave_row = -1;   // -1: own bound flip
            double leave_to = 0;  // bound the leaving var hits (lb: 0, ub: 1)
            double best_pivot = 0.0;
            for (int i = 0; i < m_; ++i) {
                const double y = tab(i, enter) * dir;
                const int bi = basic_[static_cast<std::size_t>(i)];
                double cap;
                double to;
                if (y > kPivotTol) {
                    cap = (beta_[static_cast<std::size_t>(i)] - lb_[static_cast<std::size_t>(bi)]) / y;
                    to = 0;
                } else if (y < -kPivotTol) {
                    cap = (ub_[static_cast<std::size_t>(bi)] - beta_[static_cast<std::size_t>(i)]) / (-y);
                    to = 1;
                } else {
                    continue;
                }
                if (!std::isfinite(cap)) continue;
                cap = std::max(cap, 0.0);
                if (cap < limit - kHarrisSlack) {
                    limit = cap;
                    leave_row = i;
                    leave_to = to;
                    best_pivot = std::abs(y);
                } else if (leave_row >= 0 && cap <= limit + kHarrisSlack &&
                           std::abs(y) > best_pivot) {
                    // Among near-ties prefer the largest pivot magnitude.
                    leave_row = i;
                    leave_to = to;
                    best_pivot = std::abs(y);
                }
            }

            if (!std::isfinite(limit)) return LpStatus::Unbounded;
            degenerate_run = limit <= 1e-12 ? degenerate_run + 1 : 0;

            if (leave_row < 0) {
                // Bound flip: entering variable crosses its own range.
                for (int i = 0; i < m_; ++i) {
                    beta_[static_cast<std::size_t>(i)] -= dir * limit * tab(i, enter);
                }
                state_[static_cast<std::size_t>(enter)] =
                    state_[static_cast<std::size_t>(enter)] == NState::AtLower ? NState::AtUpper
                                                                               : NState::AtLower;
                continue;
            }

            // Pivot on (leave_row, enter).
            const double enter_start = nb_value(enter);
            for (int i = 0; i < m_; ++i) {
                beta_[static_cast<std::size_t>(i)] -= dir * limit * tab(i, enter);
            }
            const int leaving = basic_[static_cast<std::size_t>(leave_row)];
            state_[static_cast<std::size_t>(leaving)] = leave_to == 0 ? NState::AtLower : NState::AtUpper;
            if (leaving >= art_begin_) {
                // Artificials never come back: pin them at zero.
                lb_[static_cast<std::size_t>(leaving)] = 0.0;
                ub_[static_cast<std::size_t>(leaving)] = 0.0;
                state_[static_cast<std::size_t>(leaving)] = NState::AtLower;
            }

            const double piv = tab(leave_row, enter);
            if (std::abs(piv) < kPivotTol) {
                throw InternalError("simplex: vanishing pivot");
            }
            double* prow = &tab_[static_cast<std::size_t>(leave_row) * static_cast<std::size_t>(n_total_)];
            const double inv = 1.0 / piv;
            for (int j = 0; j < n_total_; ++j) prow[j] *= inv;
            for (int i = 0; i < m_; ++i) {
                if (i == leave_row) continue;
                const double f = tab(i, enter);
                if (f == 0.0) continue;
                double* row = &tab_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_total_)];
                for (int j = 0; j < n_total_; ++j) row[j] -= f * prow[j];
                row[enter] = 0.0;  // exact
            }
            prow[enter] = 1.0;
            basic_[static_cast<std::size_t>(leave_row)] = enter;
            state_[static_cast<std::size_t>(enter)] = NState::Basic;
            beta_[static_cast<std::size_t>(leave_row)] = enter_start + dir * limit;
        }
        iter_exceeded_ = true;
        return LpStatus::IterLimit;
    }

    bool phase1() {
        std::vector<double> cost(static_cast<std::size_t>(n_total_), 0.0);
        for (int j = art_begin_; j < n_total_; ++j) cost[static_cast<std::size_t>(j)] = 1.0;
        const LpStatus st = iterate(cost, /*allow_art_entering=*/true);
        if (st == LpStatus::IterLimit) return false;
        double infeas = 0.0;
        for (int i = 0; i < m_; ++i) {
            if (basic_[static_cast<std::size_t>(i)] >= art_begin_) infeas += beta_[static_cast<std::size_t>(i)];
        }
        for (int j = art_begin_; j < n_total_; ++j) {
            if (state_[static_cast<std::size_t>(j)] != NState::Basic && nb_value(j) != 0.0) {
                infeas += nb_value(j);
            }
        }
        if (infeas > 1e-7) return false;

        // Pin all artificials to zero and try to pivot basic ones out.
        for (int j = art_begin_; j < n_total_; ++j) {
            if (state_[static_cast<std::size_t>(j)] != NState::Basic) {
                lb_[static_cast<std::size_t>(j)] = 0.0;
                ub_[static_cast<std::size_t>(j)] = 0.0;
                state_[static_cast<std::size_t>(j)] = NState::AtLower;
            }
        }
        for (int i = 0; i < m_; ++i) {
            if (basic_[static_cast<std::size_t>(i)] < art_begin_) continue;
            int enter = -1;
            for (int j = 0; j < art_begin_; ++j) {
                if (state_[static_cast<std::size_t>(j)] == NState::Basic) continue;
                if (std::abs(tab(i, j)) > 1e-7) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) continue;  // redundant row; artificial stays at 0
            const int leaving = basic_[static_cast<std::size_t>(i)];
            const double piv = tab(i, enter);
            // Near-degenerate swap: the artificial sits at beta ~ 0; move the
            // entering variable by exactly the delta that zeroes it out.
            const double delta = beta_[static_cast<std::size_t>(i)] / piv;
            for (int k = 0; k < m_; ++k) {
                beta_[static_cast<std::size_t>(k)] -= delta * tab(k, enter);
            }
            double* prow = &tab_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_total_)];
            const double inv = 1.0 / piv;
            for (int j = 0; j < n_total_; ++j) prow[j] *= inv;
            for (int k = 0; k < m_; ++k) {
                if (k == i) continue;
                const double f = tab(k, enter);
                if (f == 0.0) continue;
                double* row = &tab_[static_cast<std::size_t>(k) * static_cast<std::size_t>(n_total_)];
                for (int j = 0; j < n_total_; ++j) row[j] -= f * prow[j];
                row[enter] = 0.0;
            }
            prow[enter] = 1.0;
            basic_[static_cast<std::size_t>(i)] = enter;
            beta_[static_cast<std::size_t>(i)] = nb_value(enter) + delta;
            state_[static_cast<std::size_t>(enter)] = NState::Basic;
            lb_[static_cast<std::size_t>(leaving)] = 0.0;
            ub_[static_cast<std::size_t>(leaving)] = 0.0;
            state_[static_cast<std::size_t>(leaving)] = NState::AtLower;
        }
        return true;
    }

    LpStatus phase2() { return iterate(cost2_, /*allow_art_entering=*/false); }
};

inline LpResult solve_lp(const LpProblem& p) { return SimplexSolver(p).solve(); }

}  // namespace stormrisk
