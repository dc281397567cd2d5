#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "stormrisk/common.hpp"
#include "stormrisk/grid.hpp"
#include "stormrisk/milp.hpp"
#include "stormrisk/sampler.hpp"
#include "stormrisk/selection.hpp"
#include "stormrisk/simplex.hpp"

namespace stormrisk {

/// Line outage pattern of one scenario: first failure interval per line
/// index, -1 for lines that stay up.
struct ScenarioLineStates {
    std::vector<int> fail_t;

    bool live(std::size_t line, int t) const {
        const int ft = fail_t[line];
        return ft < 0 || t < ft;
    }
};

/// Input of the two-stage stochastic unit commitment: a grid plus weighted
/// line-outage scenarios over the full horizon.
struct UcInstance {
    const GridCase* grid = nullptr;
    std::string name = "suc";
    std::vector<ScenarioLineStates> scenarios;
    std::vector<double> weights;
    double reserve_fraction = 0.0;  // optional spinning-reserve baseline

    void validate() const {
        if (!grid) throw DataError("uc: no grid");
        if (scenarios.empty()) throw DataError("uc: no scenarios");
        if (scenarios.size() != weights.size()) {
            throw DataError("uc: scenario/weight count mismatch");
        }
        double wsum = 0.0;
        for (double w : weights) {
            if (!(w >= 0)) throw DataError("uc: negative scenario weight");
            wsum += w;
        }
        if (std::abs(wsum - 1.0) > 1e-9) {
            throw DataError("uc: scenario weights must sum to 1");
        }
        for (const auto& s : scenarios) {
            if (s.fail_t.size() != grid->lines.size()) {
                throw DataError("uc: scenario line-state length mismatch");
            }
        }
    }
};

/// Scenario line states from a pool restricted to a selection.
inline UcInstance make_instance(const GridCase& grid, const ScenarioPool& pool,
                                const WeightedSelection& sel) {
    UcInstance inst;
    inst.grid = &grid;
    inst.name = "suc_" + sel.rule;
    for (std::size_t i = 0; i < sel.scenarios.size(); ++i) {
        const auto fails = pool.line_fail_times(sel.scenarios[i]);
        ScenarioLineStates st;
        st.fail_t.assign(grid.lines.size(), -1);
        for (const auto& [line_id, t] : fails) {
            auto it = grid.line_index.find(line_id);
            if (it == grid.line_index.end()) {
                throw DataError("uc: pool references unknown line " +
                                std::to_string(line_id));
            }
            st.fail_t[it->second] = t;
        }
        inst.scenarios.push_back(std::move(st));
        inst.weights.push_back(sel.weights[i]);
    }
    inst.validate();
    return inst;
}

/// Deterministic baseline: one no-failure scenario, optionally with an x%
/// system spinning-reserve requirement.
inline UcInstance make_deterministic_instance(const GridCase& grid,
                                              double reserve_pct = 0.0) {
    UcInstance inst;
    inst.grid = &grid;
    inst.name = "ruc_res" + std::to_string(static_cast<int>(reserve_pct));
    ScenarioLineStates st;
    st.fail_t.assign(grid.lines.size(), -1);
    inst.scenarios.push_back(st);
    inst.weights.push_back(1.0);
    inst.reserve_fraction = reserve_pct / 100.0;
    inst.validate();
    return inst;
}

/// First-stage result: binary on/start/stop schedules.
struct CommitmentPlan {
    std::vector<std::vector<int>> on;     // [g][t]
    std::vector<std::vector<int>> start;  // [g][t]
    std::vector<std::vector<int>> stop;   // [g][t]
    double first_stage_cost = 0.0;        // startup + shutdown money

    int horizon() const { return on.empty() ? 0 : static_cast<int>(on[0].size()); }
};

/// Checks the commitment identities exactly: start/stop linking, start-stop
/// exclusivity, and the minimum up/down inequalities as modeled.
inline void validate_plan(const CommitmentPlan& plan, const GridCase& grid) {
    const int horizon = grid.horizon;
    if (plan.on.size() != grid.generators.size()) {
        throw InternalError("plan: generator count mismatch");
    }
    for (std::size_t g = 0; g < grid.generators.size(); ++g) {
        const auto& gen = grid.generators[g];
        for (int t = 0; t < horizon; ++t) {
            const std::size_t tt = static_cast<std::size_t>(t);
            const int u = plan.on[g][tt];
            const int y = plan.start[g][tt];
            const int z = plan.stop[g][tt];
            if ((u != 0 && u != 1) || (y != 0 && y != 1) || (z != 0 && z != 1)) {
                throw InternalError("plan: non-binary schedule entry");
            }
            const int uprev = t == 0 ? gen.initial_on : plan.on[g][tt - 1];
            if (u - uprev != y - z) throw InternalError("plan: start/stop linking violated");
            if (y + z > 1) throw InternalError("plan: simultaneous start and stop");
            int ysum = 0;
            for (int r = 1; r <= gen.min_up; ++r) {
                const int tau = t - r + 1;
                if (tau >= 0) ysum += plan.start[g][static_cast<std::size_t>(tau)];
            }
            if (u < ysum) throw InternalError("plan: minimum up time violated");
            int zsum = 0;
            for (int r = 1; r <= gen.min_down; ++r) {
                const int tau = t + r;
                if (tau < horizon) zsum += plan.stop[g][static_cast<std::size_t>(tau)];
            }
            if (u < zsum) throw InternalError("plan: pre-shutdown on-time violated");
        }
    }
}

/// Second-stage outcome for one scenario.
struct DispatchResult {
    double cost_lc = 0.0;    // load curtailment
    double cost_op = 0.0;    // energy
    double cost_og = 0.0;    // over-generation slack
    double cost_susd = 0.0;  // startup/shutdown, from the plan
    double total() const { return cost_lc + cost_op + cost_og + cost_susd; }

    double balance_residual_max = 0.0;
    std::vector<std::vector<double>> gen_mw;      // [g][t]
    std::vector<std::vector<double>> overgen_mw;  // [g][t]
    std::vector<std::vector<double>> served_mw;   // [n][t]
    std::vector<std::vector<double>> curtail_mw;  // [n][t]
    std::vector<std::vector<double>> angle;       // [n][t]
    std::vector<std::vector<double>> flow_mw;     // [l][t], NaN when out
};

namespace detail {

inline std::string idx2(const char* base, std::size_t a, std::size_t b) {
    return std::string(base) + "[" + std::to_string(a) + "," + std::to_string(b) + "]";
}
inline std::string idx3(const char* base, std::size_t a, std::size_t b, std::size_t c) {
    return std::string(base) + "[" + std::to_string(a) + "," + std::to_string(b) +
           "," + std::to_string(c) + "]";
}

/// Adds the second-stage constraint block for scenario s. When `plan` is
/// null the commitment variables must already exist in the model; otherwise
/// the fixed schedule is folded in as constants.
inline void add_second_stage(milp::Model& m, const UcInstance& inst, std::size_t s,
                             const CommitmentPlan* plan) {
    const GridCase& grid = *inst.grid;
    const int horizon = grid.horizon;
    const auto& st = inst.scenarios[s];
    const double w = inst.weights[s];
    const std::size_t slack = grid.bus_index.at(grid.slack_bus);

    // Variables.
    for (std::size_t g = 0; g < grid.generators.size(); ++g) {
        const auto& gen = grid.generators[g];
        for (int t = 0; t < horizon; ++t) {
            const std::size_t tt = static_cast<std::size_t>(t);
            double ub = gen.pmax;
            if (plan) ub = plan->on[g][tt] ? gen.pmax : 0.0;
            m.add_var(idx3("pG", s, g, tt), 0.0, ub, w * gen.cost_energy);
            m.add_var(idx3("pOG", s, g, tt), 0.0, kInf, w * gen.cost_overgen);
        }
    }
    for (std::size_t n = 0; n < grid.buses.size(); ++n) {
        const auto& bus = grid.buses[n];
        for (int t = 0; t < horizon; ++t) {
            const std::size_t tt = static_cast<std::size_t>(t);
            const double demand = bus.demand_mw[tt];
            m.add_var(idx3("pD", s, n, tt), 0.0, demand, 0.0);
            m.add_var(idx3("dpD", s, n, tt), 0.0, demand, w * bus.curtail_cost[tt]);
            const bool is_slack = n == slack;
            m.add_var(idx3("thN", s, n, tt), is_slack ? 0.0 : bus.theta_min,
                      is_slack ? 0.0 : bus.theta_max, 0.0);
        }
    }
    for (std::size_t l = 0; l < grid.lines.size(); ++l) {
        const auto& line = grid.lines[l];
        for (int t = 0; t < horizon; ++t) {
            if (!st.live(l, t)) continue;  // no flow variable on failed lines
            m.add_var(idx3("pL", s, l, static_cast<std::size_t>(t)),
                      -line.flow_limit, line.flow_limit, 0.0);
        }
    }

    // DC flow definition on live lines.
    for (std::size_t l = 0; l < grid.lines.size(); ++l) {
        const auto& line = grid.lines[l];
        const std::size_t nf = grid.bus_index.at(line.from_bus);
        const std::size_t nt = grid.bus_index.at(line.to_bus);
        for (int t = 0; t < horizon; ++t) {
            if (!st.live(l, t)) continue;
            const std::size_t tt = static_cast<std::size_t>(t);
            m.add_con(idx3("flow", s, l, tt),
                      {{m.var(idx3("pL", s, l, tt)), 1.0},
                       {m.var(idx3("thN", s, nf, tt)), -1.0 / line.reactance},
                       {m.var(idx3("thN", s, nt, tt)), 1.0 / line.reactance}},
                      0.0, 0.0);
        }
    }

    // Power balance and the demand split at every bus.
    for (std::size_t n = 0; n < grid.buses.size(); ++n) {
        for (int t = 0; t < horizon; ++t) {
            const std::size_t tt = static_cast<std::size_t>(t);
            std::vector<std::pair<int, double>> terms;
            for (std::size_t g = 0; g < grid.generators.size(); ++g) {
                if (grid.bus_index.at(grid.generators[g].bus) == n) {
                    terms.emplace_back(m.var(idx3("pG", s, g, tt)), 1.0);
                }
            }
            for (std::size_t l = 0; l < grid.lines.size(); ++l) {
                if (!st.live(l, t)) continue;
                const auto& line = grid.lines[l];
                if (grid.bus_index.at(line.from_bus) == n) {
                    terms.emplace_back(m.var(idx3("pL", s, l, tt)), -1.0);
                } else if (grid.bus_index.at(line.to_bus) == n) {
                    terms.emplace_back(m.var(idx3("pL", s, l, tt)), 1.0);
                }
            }
            terms.emplace_back(m.var(idx3("pD", s, n, tt)), -1.0);
            m.add_con(idx3("bal", s, n, tt), std::move(terms), 0.0, 0.0);
            m.add_con(idx3("dem", s, n, tt),
                      {{m.var(idx3("pD", s, n, tt)), 1.0},
                       {m.var(idx3("dpD", s, n, tt)), 1.0}},
                      grid.buses[n].demand_mw[tt], grid.buses[n].demand_mw[tt]);
        }
    }

    // Output limits gated by commitment.
    for (std::size_t g = 0; g < grid.generators.size(); ++g) {
        const auto& gen = grid.generators[g];
        for (int t = 0; t < horizon; ++t) {
            const std::size_t tt = static_cast<std::size_t>(t);
            const int pg = m.var(idx3("pG", s, g, tt));
            const int pog = m.var(idx3("pOG", s, g, tt));
            if (plan) {
                // Upper bound became the variable bound; only the minimum-
                // output side needs a row, and only when the unit is on.
                if (plan->on[g][tt]) {
                    m.add_con(idx3("pmin", s, g, tt), {{pg, 1.0}, {pog, 1.0}},
                              gen.pmin, kInf);
                }
            } else {
                const int u = m.var(idx2("uG", g, tt));
                m.add_con(idx3("pmax", s, g, tt), {{pg, 1.0}, {u, -gen.pmax}},
                          -kInf, 0.0);
                m.add_con(idx3("pmin", s, g, tt),
                          {{pg, 1.0}, {pog, 1.0}, {u, -gen.pmin}}, 0.0, kInf);
            }
        }
    }

    // Ramping between consecutive intervals (positive-magnitude down limit).
    for (std::size_t g = 0; g < grid.generators.size(); ++g) {
        const auto& gen = grid.generators[g];
        for (int t = 0; t < horizon; ++t) {
            const std::size_t tt = static_cast<std::size_t>(t);
            const int pg = m.var(idx3("pG", s, g, tt));
            if (t == 0) {
                if (!gen.initial_ramp_active) continue;
                m.add_con(idx3("rampup", s, g, tt), {{pg, 1.0}}, -kInf,
                          gen.initial_output + gen.ramp_up);
                m.add_con(idx3("rampdn", s, g, tt), {{pg, 1.0}},
                          gen.initial_output - gen.ramp_down, kInf);
            } else {
                const int pprev = m.var(idx3("pG", s, g, tt - 1));
                m.add_con(idx3("rampup", s, g, tt), {{pg, 1.0}, {pprev, -1.0}},
                          -kInf, gen.ramp_up);
                m.add_con(idx3("rampdn", s, g, tt), {{pg, 1.0}, {pprev, -1.0}},
                          -gen.ramp_down, kInf);
            }
        }
    }

    // Optional spinning reserve against total demand.
    if (inst.reserve_fraction > 0.0 && !plan) {
        for (int t = 0; t < horizon; ++t) {
            const std::size_t tt = static_cast<std::size_t>(t);
            std::vector<std::pair<int, double>> terms;
            for (std::size_t g = 0; g < grid.generators.size(); ++g) {
                terms.emplace_back(m.var(idx2("uG", g, tt)),
                                   grid.generators[g].pmax);
                terms.emplace_back(m.var(idx3("pG", s, g, tt)), -1.0);
            }
            m.add_con(idx3("resv", s, 0, tt), std::move(terms),
                      inst.reserve_fraction * grid.total_demand(t), kInf);
        }
    }
}

}  // namespace detail

/// Builds the extensive-form two-stage model: binary commitment schedules in
/// the first stage, weighted DC dispatch with curtailment and
/// over-generation slacks per scenario in the second.
inline milp::Model build_suc(const UcInstance& inst) {
    inst.validate();
    const GridCase& grid = *inst.grid;
    const int horizon = grid.horizon;
    milp::Model m;
    m.name = inst.name;

    using detail::idx2;
    for (std::size_t g = 0; g < grid.generators.size(); ++g) {
        for (int t = 0; t < horizon; ++t) {
            m.add_var(idx2("uG", g, static_cast<std::size_t>(t)), 0, 1, 0.0, true);
        }
    }
    for (std::size_t g = 0; g < grid.generators.size(); ++g) {
        const auto& gen = grid.generators[g];
        for (int t = 0; t < horizon; ++t) {
            m.add_var(idx2("yG", g, static_cast<std::size_t>(t)), 0, 1,
                      gen.cost_startup, true);
        }
    }
    for (std::size_t g = 0; g < grid.generators.size(); ++g) {
        const auto& gen = grid.generators[g];
        for (int t = 0; t < horizon; ++t) {
            m.add_var(idx2("zG", g, static_cast<std::size_t>(t)), 0, 1,
                      gen.cost_shutdown, true);
        }
    }

    for (std::size_t g = 0; g < grid.generators.size(); ++g) {
        const auto& gen = grid.generators[g];
        for (int t = 0; t < horizon; ++t) {
            const std::size_t tt = static_cast<std::size_t>(t);
            const int u = m.var(idx2("uG", g, tt));
            const int y = m.var(idx2("yG", g, tt));
            const int z = m.var(idx2("zG", g, tt));
            // u_t - u_{t-1} = y_t - z_t, with the initial state as constant.
            if (t == 0) {
                m.add_con(idx2("link", g, tt), {{u, 1.0}, {y, -1.0}, {z, 1.0}},
                          gen.initial_on, gen.initial_on);
            } else {
                const int uprev = m.var(idx2("uG", g, tt - 1));
                m.add_con(idx2("link", g, tt),
                          {{u, 1.0}, {uprev, -1.0}, {y, -1.0}, {z, 1.0}}, 0.0, 0.0);
            }
            m.add_con(idx2("excl", g, tt), {{y, 1.0}, {z, 1.0}}, -kInf, 1.0);

            std::vector<std::pair<int, double>> up_terms{{u, 1.0}};
            for (int r = 1; r <= gen.min_up; ++r) {
                const int tau = t - r + 1;
                if (tau >= 0) {
                    up_terms.emplace_back(
                        m.var(idx2("yG", g, static_cast<std::size_t>(tau))), -1.0);
                }
            }
            m.add_con(idx2("minup", g, tt), std::move(up_terms), 0.0, kInf);

            // As modeled upstream: a unit must be on for the min_down window
            // preceding any shutdown.
            std::vector<std::pair<int, double>> dn_terms{{u, 1.0}};
            for (int r = 1; r <= gen.min_down; ++r) {
                const int tau = t + r;
                if (tau < horizon) {
                    dn_terms.emplace_back(
                        m.var(idx2("zG", g, static_cast<std::size_t>(tau))), -1.0);
                }
            }
            m.add_con(idx2("mindn", g, tt), std::move(dn_terms), 0.0, kInf);
        }
    }

    for (std::size_t s = 0; s < inst.scenarios.size(); ++s) {
        detail::add_second_stage(m, inst, s, nullptr);
    }
    return m;
}

/// Indices of the commitment binaries, for enumeration backends.
inline std::vector<int> commitment_var_indices(const UcInstance& inst) {
    const std::size_t count =
        inst.grid->generators.size() * static_cast<std::size_t>(inst.grid->horizon);
    std::vector<int> idx(count);
    for (std::size_t j = 0; j < count; ++j) idx[j] = static_cast<int>(j);
    return idx;
}

/// Exhaustive backend over commitment patterns. Start/stop indicators are
/// functions of the on/off schedule, so each pattern fixes them exactly and
/// the remaining subproblem is a pure LP. Limited to |G|*T <= max_bits.
inline milp::EnumerationBackend make_enumeration_backend(const UcInstance& inst,
                                                         int max_bits = 16) {
    const std::size_t ngen = inst.grid->generators.size();
    const std::size_t horizon = static_cast<std::size_t>(inst.grid->horizon);
    std::vector<int> initial_on(ngen);
    for (std::size_t g = 0; g < ngen; ++g) {
        initial_on[g] = inst.grid->generators[g].initial_on;
    }
    const std::size_t gt = ngen * horizon;
    auto derive = [ngen, horizon, gt, initial_on](
                      const std::vector<double>& u,
                      std::vector<std::pair<int, double>>& fixes) {
        for (std::size_t g = 0; g < ngen; ++g) {
            for (std::size_t t = 0; t < horizon; ++t) {
                const double now = u[g * horizon + t];
                const double prev =
                    t == 0 ? initial_on[g] : u[g * horizon + t - 1];
                const double dy = now - prev;
                fixes.emplace_back(static_cast<int>(gt + g * horizon + t),
                                   dy > 0.5 ? 1.0 : 0.0);
                fixes.emplace_back(static_cast<int>(2 * gt + g * horizon + t),
                                   dy < -0.5 ? 1.0 : 0.0);
            }
        }
    };
    return milp::EnumerationBackend(commitment_var_indices(inst), max_bits, derive);
}

struct SolveOutcome {
    CommitmentPlan plan;
    std::vector<DispatchResult> dispatch;  // per scenario
    double objective = 0.0;
    double gap = 0.0;
};

namespace detail {

inline DispatchResult extract_dispatch(const milp::Model& m,
                                       const std::vector<double>& x,
                                       const UcInstance& inst, std::size_t s,
                                       double first_stage_cost) {
    const GridCase& grid = *inst.grid;
    const int horizon = grid.horizon;
    const auto& st = inst.scenarios[s];
    DispatchResult d;
    d.cost_susd = first_stage_cost;
    d.gen_mw.assign(grid.generators.size(), std::vector<double>(static_cast<std::size_t>(horizon), 0.0));
    d.overgen_mw = d.gen_mw;
    d.served_mw.assign(grid.buses.size(), std::vector<double>(static_cast<std::size_t>(horizon), 0.0));
    d.curtail_mw = d.served_mw;
    d.angle = d.served_mw;
    d.flow_mw.assign(grid.lines.size(),
                     std::vector<double>(static_cast<std::size_t>(horizon),
                                         std::nan("")));
    auto val = [&](const std::string& n) { return x[static_cast<std::size_t>(m.var(n))]; };
    for (std::size_t g = 0; g < grid.generators.size(); ++g) {
        const auto& gen = grid.generators[g];
        for (int t = 0; t < horizon; ++t) {
            const std::size_t tt = static_cast<std::size_t>(t);
            d.gen_mw[g][tt] = val(idx3("pG", s, g, tt));
            d.overgen_mw[g][tt] = val(idx3("pOG", s, g, tt));
            d.cost_op += gen.cost_energy * d.gen_mw[g][tt];
            d.cost_og += gen.cost_overgen * d.overgen_mw[g][tt];
        }
    }
    for (std::size_t n = 0; n < grid.buses.size(); ++n) {
        const auto& bus = grid.buses[n];
        for (int t = 0; t < horizon; ++t) {
            const std::size_t tt = static_cast<std::size_t>(t);
            d.served_mw[n][tt] = val(idx3("pD", s, n, tt));
            d.curtail_mw[n][tt] = val(idx3("dpD", s, n, tt));
            d.angle[n][tt] = val(idx3("thN", s, n, tt));
            d.cost_lc += bus.curtail_cost[tt] * d.curtail_mw[n][tt];
        }
    }
    for (std::size_t l = 0; l < grid.lines.size(); ++l) {
        for (int t = 0; t < horizon; ++t) {
            if (!st.live(l, t)) continue;
            d.flow_mw[l][static_cast<std::size_t>(t)] =
                val(idx3("pL", s, l, static_cast<std::size_t>(t)));
        }
    }
    // Balance residuals straight from the extracted values.
    for (std::size_t n = 0; n < grid.buses.size(); ++n) {
        for (int t = 0; t < horizon; ++t) {
            const std::size_t tt = static_cast<std::size_t>(t);
            double lhs = 0.0;
            for (std::size_t g = 0; g < grid.generators.size(); ++g) {
                if (grid.bus_index.at(grid.generators[g].bus) == n) lhs += d.gen_mw[g][tt];
            }
            for (std::size_t l = 0; l < grid.lines.size(); ++l) {
                if (!st.live(l, t)) continue;
                const auto& line = grid.lines[l];
                if (grid.bus_index.at(line.from_bus) == n) lhs -= d.flow_mw[l][tt];
                else if (grid.bus_index.at(line.to_bus) == n) lhs += d.flow_mw[l][tt];
            }
            d.balance_residual_max = std::max(
                d.balance_residual_max, std::abs(lhs - d.served_mw[n][tt]));
        }
    }
    return d;
}

}  // namespace detail

/// Solves the extensive form with the given backend and unpacks the plan and
/// per-scenario dispatch. The plan invariants are re-checked exactly.
inline SolveOutcome solve_suc(const UcInstance& inst, milp::Backend& backend,
                              double gap = 1e-6, double time_limit = 0.0) {
    inst.validate();
    const GridCase& grid = *inst.grid;
    const int horizon = grid.horizon;
    const milp::Model m = build_suc(inst);
    const milp::Solution sol = backend.solve(m, gap, time_limit);
    if (sol.status == milp::SolveStatus::Infeasible) {
        throw SolverError("suc: model infeasible (commitment constraints)");
    }
    if (sol.status != milp::SolveStatus::Optimal &&
        sol.status != milp::SolveStatus::Limit) {
        throw SolverError("suc: solve failed: " + sol.message);
    }

    SolveOutcome out;
    out.objective = sol.objective;
    out.gap = sol.gap;
    auto& plan = out.plan;
    plan.on.assign(grid.generators.size(),
                   std::vector<int>(static_cast<std::size_t>(horizon), 0));
    plan.start = plan.on;
    plan.stop = plan.on;
    for (std::size_t g = 0; g < grid.generators.size(); ++g) {
        const auto& gen = grid.generators[g];
        for (int t = 0; t < horizon; ++t) {
            const std::size_t tt = static_cast<std::size_t>(t);
            plan.on[g][tt] = static_cast<int>(
                std::lround(sol.x[static_cast<std::size_t>(m.var(detail::idx2("uG", g, tt)))]));
            plan.start[g][tt] = static_cast<int>(
                std::lround(sol.x[static_cast<std::size_t>(m.var(detail::idx2("yG", g, tt)))]));
            plan.stop[g][tt] = static_cast<int>(
                std::lround(sol.x[static_cast<std::size_t>(m.var(detail::idx2("zG", g, tt)))]));
            plan.first_stage_cost += gen.cost_startup * plan.start[g][tt] +
                                     gen.cost_shutdown * plan.stop[g][tt];
        }
    }
    validate_plan(plan, grid);
    for (std::size_t s = 0; s < inst.scenarios.size(); ++s) {
        out.dispatch.push_back(
            detail::extract_dispatch(m, sol.x, inst, s, plan.first_stage_cost));
    }
    return out;
}

/// Second-stage economic dispatch under a fixed commitment schedule. Always
/// feasible: curtailment and over-generation slacks relax every balance.
inline DispatchResult dispatch_fixed(const CommitmentPlan& plan,
                                     const ScenarioLineStates& scenario,
                                     const GridCase& grid) {
    if (plan.horizon() != grid.horizon) {
        throw DataError("dispatch_fixed: plan horizon mismatch");
    }
    UcInstance inst;
    inst.grid = &grid;
    inst.name = "dispatch";
    inst.scenarios.push_back(scenario);
    inst.weights.push_back(1.0);

    milp::Model m;
    m.name = inst.name;
    detail::add_second_stage(m, inst, 0, &plan);
    milp::SimplexBackend lp;
    const milp::Solution sol = lp.solve(m, 0, 0);
    if (sol.status != milp::SolveStatus::Optimal) {
        throw InternalError("dispatch_fixed: relaxed dispatch LP did not solve");
    }
    DispatchResult d = detail::extract_dispatch(m, sol.x, inst, 0,
                                                plan.first_stage_cost);
    if (d.balance_residual_max > 1e-6) {
        throw InternalError("dispatch_fixed: balance residual above tolerance");
    }
    return d;
}

/// Cost table of a plan over weighted test scenarios (expected LC / SU+SD /
/// OP / OG / total plus per-scenario rows).
struct EvalRow {
    int scenario = 0;
    double weight = 0.0;
    double cost_lc = 0.0, cost_susd = 0.0, cost_op = 0.0, cost_og = 0.0;
    double total = 0.0;
};

struct EvalTable {
    std::vector<EvalRow> rows;
    EvalRow expected;  // weighted means, scenario = -1
};

inline EvalTable evaluate_plan(const CommitmentPlan& plan, const GridCase& grid,
                               const std::vector<ScenarioLineStates>& scenarios,
                               const std::vector<double>& weights,
                               const std::vector<int>* labels = nullptr) {
    if (scenarios.size() != weights.size()) {
        throw DataError("evaluate_plan: scenario/weight mismatch");
    }
    EvalTable table;
    table.expected.scenario = -1;
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        const DispatchResult d = dispatch_fixed(plan, scenarios[i], grid);
        EvalRow row;
        row.scenario = labels ? (*labels)[i] : static_cast<int>(i);
        row.weight = weights[i];
        row.cost_lc = d.cost_lc;
        row.cost_susd = d.cost_susd;
        row.cost_op = d.cost_op;
        row.cost_og = d.cost_og;
        row.total = d.total();
        table.rows.push_back(row);
        table.expected.weight += row.weight;
        table.expected.cost_lc += row.weight * row.cost_lc;
        table.expected.cost_susd += row.weight * row.cost_susd;
        table.expected.cost_op += row.weight * row.cost_op;
        table.expected.cost_og += row.weight * row.cost_og;
        table.expected.total += row.weight * row.total;
    }
    return table;
}

/// Severity q(s): optimal objective of the preventive-control model run with
/// the single scenario at weight 1.
inline double severity(const ScenarioLineStates& scenario, const GridCase& grid,
                       milp::Backend& backend, double gap = 1e-6,
                       double time_limit = 0.0) {
    UcInstance inst;
    inst.grid = &grid;
    inst.name = "severity";
    inst.scenarios.push_back(scenario);
    inst.weights.push_back(1.0);
    return solve_suc(inst, backend, gap, time_limit).objective;
}

}  // namespace stormrisk
