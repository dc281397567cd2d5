#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "stormrisk/common.hpp"
#include "stormrisk/simplex.hpp"

namespace stormrisk::milp {

/// Shortest round-trip decimal rendering, used everywhere a double goes into
/// a text artifact so files are byte-stable and parse back exactly.
inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

struct Var {
    std::string name;
    double lb = 0.0;
    double ub = kInf;
    bool integer = false;
    double obj = 0.0;
};

struct Constraint {
    std::string name;
    std::vector<std::pair<int, double>> terms;
    double lo = -kInf;
    double hi = kInf;
};

/// Mixed-integer linear model with deterministic variable/constraint order.
struct Model {
    std::string name = "model";
    std::vector<Var> vars;
    std::vector<Constraint> cons;
    std::map<std::string, int> var_by_name;

    int add_var(const std::string& vname, double lb, double ub, double obj,
                bool integer = false) {
        if (var_by_name.count(vname)) {
            throw InternalError("milp: duplicate variable " + vname);
        }
        vars.push_back(Var{vname, lb, ub, integer, obj});
        var_by_name[vname] = static_cast<int>(vars.size()) - 1;
        return static_cast<int>(vars.size()) - 1;
    }
    void add_con(const std::string& cname,
                 std::vector<std::pair<int, double>> terms, double lo, double hi) {
        cons.push_back(Constraint{cname, std::move(terms), lo, hi});
    }
    int var(const std::string& vname) const {
        auto it = var_by_name.find(vname);
        if (it == var_by_name.end()) {
            throw InternalError("milp: unknown variable " + vname);
        }
        return it->second;
    }
    std::size_t n_integer() const {
        std::size_t k = 0;
        for (const auto& v : vars) k += v.integer;
        return k;
    }
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, Limit, Error };

struct Solution {
    SolveStatus status = SolveStatus::Error;
    double objective = 0.0;
    double gap = 0.0;
    std::vector<double> x;
    std::string message;
};

/// Free-format MPS emission. Ranged rows are split into L rows for the upper
/// and G rows for the lower side so the file needs no RANGES section.
/// Output is byte-identical across runs for identical models.
inline void write_mps(const Model& model, std::ostream& os) {
    os << "NAME " << model.name << "\n";
    os << "ROWS\n";
    os << " N OBJ\n";
    std::vector<std::pair<char, std::string>> row_kinds;  // per constraint
    for (const auto& c : model.cons) {
        if (c.lo == c.hi) {
            os << " E " << c.name << "\n";
        } else {
            if (std::isfinite(c.hi)) os << " L " << c.name << ".ub\n";
            if (std::isfinite(c.lo)) os << " G " << c.name << ".lb\n";
        }
    }
    // Column-major coefficient lists.
    std::vector<std::vector<std::pair<std::string, double>>> cols(model.vars.size());
    for (const auto& c : model.cons) {
        for (const auto& [j, a] : c.terms) {
            if (a == 0.0) continue;
            if (c.lo == c.hi) {
                cols[static_cast<std::size_t>(j)].emplace_back(c.name, a);
            } else {
                if (std::isfinite(c.hi)) {
                    cols[static_cast<std::size_t>(j)].emplace_back(c.name + ".ub", a);
                }
                if (std::isfinite(c.lo)) {
                    cols[static_cast<std::size_t>(j)].emplace_back(c.name + ".lb", a);
                }
            }
        }
    }
    os << "COLUMNS\n";
    bool in_int = false;
    int marker = 0;
    for (std::size_t j = 0; j < model.vars.size(); ++j) {
        const auto& v = model.vars[j];
        if (v.integer != in_int) {
            os << " M" << marker++ << " 'MARKER' "
               << (v.integer ? "'INTORG'" : "'INTEND'") << "\n";
            in_int = v.integer;
        }
        if (v.obj != 0.0) {
            os << " " << v.name << " OBJ " << format_double(v.obj) << "\n";
        }
        for (const auto& [row, a] : cols[j]) {
            os << " " << v.name << " " << row << " " << format_double(a) << "\n";
        }
        if (v.obj == 0.0 && cols[j].empty()) {
            os << " " << v.name << " OBJ 0\n";  // keep the column declared
        }
    }
    if (in_int) os << " M" << marker++ << " 'MARKER' 'INTEND'\n";
    os << "RHS\n";
    for (const auto& c : model.cons) {
        if (c.lo == c.hi) {
            if (c.lo != 0.0) os << " RHS " << c.name << " " << format_double(c.lo) << "\n";
        } else {
            if (std::isfinite(c.hi) && c.hi != 0.0) {
                os << " RHS " << c.name << ".ub " << format_double(c.hi) << "\n";
            }
            if (std::isfinite(c.lo) && c.lo != 0.0) {
                os << " RHS " << c.name << ".lb " << format_double(c.lo) << "\n";
            }
        }
    }
    os << "BOUNDS\n";
    for (const auto& v : model.vars) {
        const bool lb0 = v.lb == 0.0;
        const bool ubinf = !std::isfinite(v.ub);
        if (v.lb == v.ub) {
            os << " FX BND " << v.name << " " << format_double(v.lb) << "\n";
            continue;
        }
        if (!std::isfinite(v.lb) && ubinf) {
            os << " FR BND " << v.name << "\n";
            continue;
        }
        if (!std::isfinite(v.lb)) {
            os << " MI BND " << v.name << "\n";
        } else if (!lb0) {
            os << " LO BND " << v.name << " " << format_double(v.lb) << "\n";
        }
        if (!ubinf) {
            os << " UP BND " << v.name << " " << format_double(v.ub) << "\n";
        }
    }
    os << "ENDATA\n";
}

inline std::string to_mps(const Model& model) {
    std::ostringstream os;
    write_mps(model, os);
    return os.str();
}

/// LP relaxation of the model in simplex form.
inline LpProblem to_lp(const Model& model) {
    LpProblem p;
    for (const auto& v : model.vars) p.add_var(v.lb, v.ub, v.obj);
    for (const auto& c : model.cons) p.add_row(c.terms, c.lo, c.hi);
    return p;
}

class Backend {
  public:
    virtual ~Backend() = default;
    virtual Solution solve(const Model& model, double gap, double time_limit) = 0;
    virtual std::string name() const = 0;
};

/// Plain LP solve via the built-in simplex; integrality is ignored. Used for
/// dispatch subproblems that are naturally continuous.
class SimplexBackend : public Backend {
  public:
    Solution solve(const Model& model, double, double) override {
        Solution sol;
        const LpResult r = solve_lp(to_lp(model));
        switch (r.status) {
            case LpStatus::Optimal:
                sol.status = SolveStatus::Optimal;
                sol.objective = r.objective;
                sol.x = r.x;
                break;
            case LpStatus::Infeasible: sol.status = SolveStatus::Infeasible; break;
            case LpStatus::Unbounded: sol.status = SolveStatus::Unbounded; break;
            case LpStatus::IterLimit:
                sol.status = SolveStatus::Limit;
                sol.message = "simplex iteration limit";
                break;
        }
        return sol;
    }
    std::string name() const override { return "simplex-lp"; }
};

/// Exact enumeration backend: walks every assignment of the declared
/// enumeration binaries (or all integer variables when none are declared),
/// solving the LP that remains. Any other integer variables must come out
/// integral in the LP, which holds for start/stop indicators driven by
/// commitment patterns. Exponential by construction; guarded by a hard cap.
class EnumerationBackend : public Backend {
  public:
    /// Maps the enumerated 0/1 assignment to additional exact variable fixes
    /// (e.g. indicator variables that are functions of the enumerated ones).
    using DeriveFix = std::function<void(const std::vector<double>& enum_values,
                                         std::vector<std::pair<int, double>>& fixes)>;

    explicit EnumerationBackend(std::vector<int> enumerate_vars = {},
                                int max_bits = 20, DeriveFix derive = nullptr)
        : enumerate_(std::move(enumerate_vars)),
          max_bits_(max_bits),
          derive_(std::move(derive)) {}

    Solution solve(const Model& model, double, double) override {
        std::vector<int> bits = enumerate_;
        if (bits.empty()) {
            for (std::size_t j = 0; j < model.vars.size(); ++j) {
                if (model.vars[j].integer) bits.push_back(static_cast<int>(j));
            }
        }
        for (int j : bits) {
            const auto& v = model.vars[static_cast<std::size_t>(j)];
            if (!v.integer || v.lb < -1e-9 || v.ub > 1.0 + 1e-9) {
                throw SolverError("enumeration backend requires binary variables");
            }
        }
        if (static_cast<int>(bits.size()) > max_bits_) {
            throw SolverError("enumeration backend: too many binaries (" +
                              std::to_string(bits.size()) + ")");
        }
        LpProblem base = to_lp(model);
        Solution best;
        best.status = SolveStatus::Infeasible;
        const std::uint64_t count = 1ULL << bits.size();
        std::vector<double> enum_values(bits.size(), 0.0);
        std::vector<std::pair<int, double>> extra;
        for (std::uint64_t mask = 0; mask < count; ++mask) {
            LpProblem p = base;
            bool impossible = false;
            auto fix = [&](std::size_t j, double v) {
                if (v < model.vars[j].lb - 1e-9 || v > model.vars[j].ub + 1e-9) {
                    impossible = true;
                    return;
                }
                p.lb[j] = v;
                p.ub[j] = v;
            };
            for (std::size_t b = 0; b < bits.size(); ++b) {
                enum_values[b] = (mask >> b) & 1 ? 1.0 : 0.0;
                fix(static_cast<std::size_t>(bits[b]), enum_values[b]);
            }
            if (derive_) {
                extra.clear();
                derive_(enum_values, extra);
                for (const auto& [j, v] : extra) fix(static_cast<std::size_t>(j), v);
            }
            if (impossible) continue;
            const LpResult r = solve_lp(p);
            if (r.status == LpStatus::Unbounded) {
                Solution sol;
                sol.status = SolveStatus::Unbounded;
                return sol;
            }
            if (r.status != LpStatus::Optimal) continue;
            // Verify the relaxed integers landed on integers.
            bool integral = true;
            for (std::size_t j = 0; j < model.vars.size(); ++j) {
                if (!model.vars[j].integer) continue;
                if (std::abs(r.x[j] - std::round(r.x[j])) > 1e-6) {
                    integral = false;
                    break;
                }
            }
            if (!integral) continue;
            if (best.status != SolveStatus::Optimal || r.objective < best.objective) {
                best.status = SolveStatus::Optimal;
                best.objective = r.objective;
                best.x = r.x;
                for (std::size_t j = 0; j < model.vars.size(); ++j) {
                    if (model.vars[j].integer) best.x[j] = std::round(best.x[j]);
                }
            }
        }
        return best;
    }
    std::string name() const override { return "enumeration"; }

  private:
    std::vector<int> enumerate_;
    int max_bits_;
    DeriveFix derive_;
};

/// Solve-from-file backend: emits MPS, invokes an external command as
///   <command> <model.mps> <solution file> --gap G --time-limit T
/// and parses the solution file (status/objective lines followed by
/// name/value pairs).
class ExternalCommandBackend : public Backend {
  public:
    explicit ExternalCommandBackend(std::string command, std::string scratch_dir = "")
        : command_(std::move(command)), scratch_(std::move(scratch_dir)) {}

    Solution solve(const Model& model, double gap, double time_limit) override {
        namespace fs = std::filesystem;
        fs::path dir = scratch_.empty() ? fs::temp_directory_path() : fs::path(scratch_);
        fs::create_directories(dir);
        const fs::path mps = dir / (model.name + ".mps");
        const fs::path out = dir / (model.name + ".sol");
        {
            std::ofstream f(mps);
            if (!f) throw SolverError("cannot write " + mps.string());
            write_mps(model, f);
        }
        std::error_code ec;
        fs::remove(out, ec);
        std::ostringstream cmd;
        cmd << command_ << " " << mps << " " << out << " --gap "
            << format_double(gap) << " --time-limit " << format_double(time_limit);
        const int rc = std::system(cmd.str().c_str());
        if (rc != 0) {
            throw SolverError("external solver failed (exit " + std::to_string(rc) +
                              "): " + cmd.str());
        }
        std::ifstream f(out);
        if (!f) throw SolverError("external solver produced no solution file");
        Solution sol;
        sol.x.assign(model.vars.size(), 0.0);
        std::string key;
        bool have_status = false;
        while (f >> key) {
            if (key == "status") {
                std::string st;
                f >> st;
                have_status = true;
                if (st == "optimal") sol.status = SolveStatus::Optimal;
                else if (st == "infeasible") sol.status = SolveStatus::Infeasible;
                else if (st == "unbounded") sol.status = SolveStatus::Unbounded;
                else if (st == "limit") sol.status = SolveStatus::Limit;
                else sol.status = SolveStatus::Error;
            } else if (key == "objective") {
                f >> sol.objective;
            } else if (key == "gap") {
                f >> sol.gap;
            } else {
                double v;
                if (!(f >> v)) break;
                auto it = model.var_by_name.find(key);
                if (it != model.var_by_name.end()) {
                    sol.x[static_cast<std::size_t>(it->second)] = v;
                }
            }
        }
        if (!have_status) throw SolverError("external solver wrote no status");
        return sol;
    }
    std::string name() const override { return "external"; }

  private:
    std::string command_;
    std::string scratch_;
};

}  // namespace stormrisk::milp
