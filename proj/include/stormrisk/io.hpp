#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stormrisk/common.hpp"
#include "stormrisk/grid.hpp"
#include "stormrisk/milp.hpp"
#include "stormrisk/sampler.hpp"
#include "stormrisk/selection.hpp"
#include "stormrisk/stats.hpp"
#include "stormrisk/track.hpp"
#include "stormrisk/ucmodel.hpp"

namespace stormrisk {

using ordered_json = nlohmann::ordered_json;
inline constexpr int kSchemaVersion = 1;

using milp::format_double;

inline std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path);
    f << content;
}

/// FNV-1a 64 content hash, hex encoded. Stable across platforms; used to tie
/// artifacts to their inputs in manifests and pool headers.
inline std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

inline std::string file_hash(const std::string& path) {
    return fnv1a_hex(read_text_file(path));
}

namespace detail {

inline double parse_double(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError(where + ": expected a number, got '" + s + "'");
    }
}

inline long parse_long(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError(where + ": expected an integer, got '" + s + "'");
    }
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

/// Header block of '#key value' lines shared by the columnar formats.
struct HeaderBlock {
    std::map<std::string, std::string> kv;
    std::vector<std::string> body;

    const std::string& need(const std::string& key, const std::string& where) const {
        auto it = kv.find(key);
        if (it == kv.end()) throw DataError(where + ": missing header '" + key + "'");
        return it->second;
    }
};

inline HeaderBlock parse_header_block(const std::string& text, const std::string& where) {
    HeaderBlock hb;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto sp = line.find(' ', 2);
            if (line.size() < 3 || line[1] != ' ' || sp == std::string::npos) {
                throw DataError(where + ": malformed header line '" + line + "'");
            }
            hb.kv[line.substr(2, sp - 2)] = line.substr(sp + 1);
        } else {
            hb.body.push_back(line);
        }
    }
    return hb;
}

inline void check_schema(const HeaderBlock& hb, const std::string& kind,
                         const std::string& where) {
    if (parse_long(hb.need("schema_version", where), where) != kSchemaVersion) {
        throw DataError(where + ": unsupported schema_version");
    }
    if (hb.need("kind", where) != kind) {
        throw DataError(where + ": expected kind '" + kind + "', got '" +
                        hb.need("kind", where) + "'");
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Grid (JSON)

inline ordered_json grid_to_json(const GridCase& grid) {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "grid";
    j["name"] = grid.name;
    j["units"] = {{"power", "MW"},           {"cost", "currency/MWh"},
                  {"coordinates", "degrees"}, {"angle_bounds", "degrees"},
                  {"reactance", "pu"},        {"capacity_w0", "m/s"}};
    j["horizon"] = grid.horizon;
    j["slack_bus"] = grid.slack_bus;
    j["buses"] = ordered_json::array();
    for (const auto& b : grid.buses) {
        ordered_json jb;
        jb["id"] = b.id;
        jb["lat_deg"] = rad2deg(b.location.phi);
        jb["lon_deg"] = rad2deg(b.location.lambda);
        jb["theta_min_deg"] = rad2deg(b.theta_min);
        jb["theta_max_deg"] = rad2deg(b.theta_max);
        jb["demand_mw"] = b.demand_mw;
        jb["curtail_cost"] = b.curtail_cost;
        j["buses"].push_back(jb);
    }
    j["generators"] = ordered_json::array();
    for (const auto& g : grid.generators) {
        ordered_json jg;
        jg["id"] = g.id;
        jg["bus"] = g.bus;
        jg["cost_energy"] = g.cost_energy;
        jg["cost_startup"] = g.cost_startup;
        jg["cost_shutdown"] = g.cost_shutdown;
        jg["cost_overgen"] = g.cost_overgen;
        jg["pmax_mw"] = g.pmax;
        jg["pmin_mw"] = g.pmin;
        jg["ramp_up_mw"] = g.ramp_up;
        jg["ramp_down_mw"] = g.ramp_down;
        jg["min_up"] = g.min_up;
        jg["min_down"] = g.min_down;
        jg["initial_on"] = g.initial_on;
        jg["initial_output_mw"] = g.initial_output;
        jg["initial_ramp_active"] = g.initial_ramp_active;
        j["generators"].push_back(jg);
    }
    j["lines"] = ordered_json::array();
    for (const auto& l : grid.lines) {
        ordered_json jl;
        jl["id"] = l.id;
        jl["from"] = l.from_bus;
        jl["to"] = l.to_bus;
        jl["reactance"] = l.reactance;
        jl["flow_limit_mw"] = l.flow_limit;
        jl["segments"] = ordered_json::array();
        for (int sid : l.segments) {
            const auto& s = grid.segments[grid.segment_index.at(sid)];
            ordered_json js;
            js["id"] = s.id;
            js["lat_deg"] = rad2deg(s.location.phi);
            js["lon_deg"] = rad2deg(s.location.lambda);
            js["beta"] = s.fragility.beta;
            js["w0_mps"] = s.fragility.w0;
            jl["segments"].push_back(js);
        }
        j["lines"].push_back(jl);
    }
    return j;
}

inline GridCase grid_from_json(const ordered_json& j, const std::string& where) {
    auto ctx = [&](const std::string& field) { return where + ": " + field; };
    try {
        if (j.at("schema_version").get<int>() != kSchemaVersion) {
            throw DataError(ctx("schema_version") + ": unsupported version");
        }
        if (j.at("kind").get<std::string>() != "grid") {
            throw DataError(ctx("kind") + ": not a grid file");
        }
        GridCase grid;
        grid.name = j.at("name").get<std::string>();
        grid.horizon = j.at("horizon").get<int>();
        grid.slack_bus = j.at("slack_bus").get<int>();
        for (const auto& jb : j.at("buses")) {
            Bus b;
            b.id = jb.at("id").get<int>();
            b.location = GeoPoint::from_degrees(jb.at("lat_deg").get<double>(),
                                                jb.at("lon_deg").get<double>());
            b.theta_min = deg2rad(jb.at("theta_min_deg").get<double>());
            b.theta_max = deg2rad(jb.at("theta_max_deg").get<double>());
            b.demand_mw = jb.at("demand_mw").get<std::vector<double>>();
            const auto& cc = jb.at("curtail_cost");
            if (cc.is_number()) {
                b.curtail_cost.assign(static_cast<std::size_t>(grid.horizon),
                                      cc.get<double>());
            } else {
                b.curtail_cost = cc.get<std::vector<double>>();
            }
            grid.buses.push_back(std::move(b));
        }
        for (const auto& jg : j.at("generators")) {
            Generator g;
            g.id = jg.at("id").get<int>();
            g.bus = jg.at("bus").get<int>();
            g.cost_energy = jg.at("cost_energy").get<double>();
            g.cost_startup = jg.at("cost_startup").get<double>();
            g.cost_shutdown = jg.at("cost_shutdown").get<double>();
            g.cost_overgen = jg.at("cost_overgen").get<double>();
            g.pmax = jg.at("pmax_mw").get<double>();
            g.pmin = jg.at("pmin_mw").get<double>();
            g.ramp_up = jg.at("ramp_up_mw").get<double>();
            g.ramp_down = jg.at("ramp_down_mw").get<double>();
            g.min_up = jg.at("min_up").get<int>();
            g.min_down = jg.at("min_down").get<int>();
            g.initial_on = jg.value("initial_on", 0);
            g.initial_output = jg.value("initial_output_mw", 0.0);
            g.initial_ramp_active = jg.value("initial_ramp_active", false);
            grid.generators.push_back(std::move(g));
        }
        for (const auto& jl : j.at("lines")) {
            Line l;
            l.id = jl.at("id").get<int>();
            l.from_bus = jl.at("from").get<int>();
            l.to_bus = jl.at("to").get<int>();
            l.reactance = jl.at("reactance").get<double>();
            l.flow_limit = jl.at("flow_limit_mw").get<double>();
            for (const auto& js : jl.at("segments")) {
                Segment s;
                s.id = js.at("id").get<int>();
                s.line = l.id;
                s.location = GeoPoint::from_degrees(js.at("lat_deg").get<double>(),
                                                    js.at("lon_deg").get<double>());
                s.fragility.beta = js.at("beta").get<double>();
                s.fragility.w0 = js.at("w0_mps").get<double>();
                l.segments.push_back(s.id);
                grid.segments.push_back(std::move(s));
            }
            grid.lines.push_back(std::move(l));
        }
        grid.rebuild_indexes();
        grid.validate();
        return grid;
    } catch (const ordered_json::exception& e) {
        throw DataError(where + ": " + e.what());
    }
}

inline void save_grid(const GridCase& grid, const std::string& path) {
    write_text_file(path, grid_to_json(grid).dump(2) + "\n");
}

inline GridCase load_grid(const std::string& path) {
    ordered_json j;
    try {
        j = ordered_json::parse(read_text_file(path));
    } catch (const ordered_json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    return grid_from_json(j, path);
}

// ---------------------------------------------------------------------------
// Track (columnar text, angles in degrees)

inline std::string track_to_text(const HurricaneTrack& track) {
    std::ostringstream os;
    os << "# schema_version " << kSchemaVersion << "\n";
    os << "# kind track\n";
    os << "# name " << track.name << "\n";
    os << "# pn_hpa " << format_double(track.pn_hpa) << "\n";
    os << "# rho " << format_double(track.rho) << "\n";
    os << "t,pc_hpa,rmax_km,b,lat_deg,lon_deg,s_mps,alpha_deg,"
          "sig_pc_hpa,sig_rmax_km,sig_b,sig_lat_deg,sig_lon_deg,sig_s_mps,"
          "sig_alpha_deg\n";
    for (std::size_t t = 0; t < track.steps.size(); ++t) {
        const auto& st = track.steps[t];
        os << t << "," << format_double(st.params.pc_hpa) << ","
           << format_double(st.params.rmax_km) << "," << format_double(st.params.b)
           << "," << format_double(rad2deg(st.params.phi1)) << ","
           << format_double(rad2deg(st.params.lambda1)) << ","
           << format_double(st.params.s_mps) << ","
           << format_double(rad2deg(st.params.alpha)) << ","
           << format_double(st.sigma[0]) << "," << format_double(st.sigma[1]) << ","
           << format_double(st.sigma[2]) << "," << format_double(rad2deg(st.sigma[3]))
           << "," << format_double(rad2deg(st.sigma[4])) << ","
           << format_double(st.sigma[5]) << "," << format_double(rad2deg(st.sigma[6]))
           << "\n";
    }
    return os.str();
}

inline HurricaneTrack track_from_text(const std::string& text, const std::string& where) {
    const auto hb = detail::parse_header_block(text, where);
    detail::check_schema(hb, "track", where);
    HurricaneTrack track;
    track.name = hb.need("name", where);
    track.pn_hpa = detail::parse_double(hb.need("pn_hpa", where), where + ": pn_hpa");
    track.rho = detail::parse_double(hb.need("rho", where), where + ": rho");
    if (hb.body.empty()) throw DataError(where + ": no data rows");
    const std::string expected_header =
        "t,pc_hpa,rmax_km,b,lat_deg,lon_deg,s_mps,alpha_deg,sig_pc_hpa,"
        "sig_rmax_km,sig_b,sig_lat_deg,sig_lon_deg,sig_s_mps,sig_alpha_deg";
    if (hb.body.front() != expected_header) {
        throw DataError(where + ": unexpected column header");
    }
    for (std::size_t i = 1; i < hb.body.size(); ++i) {
        const auto cells = detail::split_csv(hb.body[i]);
        const std::string rowctx = where + ": row " + std::to_string(i);
        if (cells.size() != 15) throw DataError(rowctx + ": expected 15 columns");
        if (detail::parse_long(cells[0], rowctx) != static_cast<long>(i - 1)) {
            throw DataError(rowctx + ": timesteps must be consecutive from 0");
        }
        TrackStep st;
        st.params.pc_hpa = detail::parse_double(cells[1], rowctx);
        st.params.rmax_km = detail::parse_double(cells[2], rowctx);
        st.params.b = detail::parse_double(cells[3], rowctx);
        st.params.phi1 = deg2rad(detail::parse_double(cells[4], rowctx));
        st.params.lambda1 = deg2rad(detail::parse_double(cells[5], rowctx));
        st.params.s_mps = detail::parse_double(cells[6], rowctx);
        st.params.alpha = deg2rad(detail::parse_double(cells[7], rowctx));
        st.params.pn_hpa = track.pn_hpa;
        st.params.rho = track.rho;
        st.sigma[0] = detail::parse_double(cells[8], rowctx);
        st.sigma[1] = detail::parse_double(cells[9], rowctx);
        st.sigma[2] = detail::parse_double(cells[10], rowctx);
        st.sigma[3] = deg2rad(detail::parse_double(cells[11], rowctx));
        st.sigma[4] = deg2rad(detail::parse_double(cells[12], rowctx));
        st.sigma[5] = detail::parse_double(cells[13], rowctx);
        st.sigma[6] = deg2rad(detail::parse_double(cells[14], rowctx));
        track.steps.push_back(st);
    }
    track.validate();
    return track;
}

inline void save_track(const HurricaneTrack& track, const std::string& path) {
    write_text_file(path, track_to_text(track));
}

inline HurricaneTrack load_track(const std::string& path) {
    return track_from_text(read_text_file(path), path);
}

// ---------------------------------------------------------------------------
// Scenario pool (line-delimited records)

inline std::string pool_to_text(const ScenarioPool& pool) {
    std::ostringstream os;
    os << "# schema_version " << kSchemaVersion << "\n";
    os << "# kind pool\n";
    os << "# sampler " << pool.sampler_kind << "\n";
    os << "# seed " << pool.seed << "\n";
    os << "# n " << pool.n_scenarios << "\n";
    os << "# horizon " << pool.horizon << "\n";
    os << "# p_threshold " << format_double(pool.p_threshold) << "\n";
    os << "# track_hash " << pool.track_hash << "\n";
    for (int t = 0; t < pool.horizon; ++t) {
        for (int sid : pool.relevance[static_cast<std::size_t>(t)]) {
            os << "R," << t << "," << sid << "\n";
        }
    }
    for (const auto& e : pool.events) {
        os << "F," << e.scenario << "," << e.segment << "," << e.line << "," << e.t
           << "\n";
    }
    return os.str();
}

inline ScenarioPool pool_from_text(const std::string& text, const std::string& where) {
    const auto hb = detail::parse_header_block(text, where);
    detail::check_schema(hb, "pool", where);
    ScenarioPool pool;
    pool.sampler_kind = hb.need("sampler", where);
    if (pool.sampler_kind != "relevance" && pool.sampler_kind != "normal") {
        throw DataError(where + ": sampler must be 'relevance' or 'normal'");
    }
    pool.seed = static_cast<std::uint64_t>(
        std::stoull(hb.need("seed", where)));
    pool.n_scenarios = static_cast<int>(detail::parse_long(hb.need("n", where), where));
    pool.horizon = static_cast<int>(detail::parse_long(hb.need("horizon", where), where));
    pool.p_threshold = detail::parse_double(hb.need("p_threshold", where), where);
    pool.track_hash = hb.need("track_hash", where);
    if (pool.n_scenarios < 1 || pool.horizon < 1) {
        throw DataError(where + ": invalid n or horizon");
    }
    pool.relevance.assign(static_cast<std::size_t>(pool.horizon), {});
    for (std::size_t i = 0; i < hb.body.size(); ++i) {
        const std::string rowctx = where + ": record " + std::to_string(i);
        const auto cells = detail::split_csv(hb.body[i]);
        if (cells[0] == "R") {
            if (cells.size() != 3) throw DataError(rowctx + ": R records take 2 fields");
            const long t = detail::parse_long(cells[1], rowctx);
            if (t < 0 || t >= pool.horizon) throw DataError(rowctx + ": t out of range");
            pool.relevance[static_cast<std::size_t>(t)].push_back(
                static_cast<int>(detail::parse_long(cells[2], rowctx)));
        } else if (cells[0] == "F") {
            if (cells.size() != 5) throw DataError(rowctx + ": F records take 4 fields");
            FailureEvent e;
            e.scenario = static_cast<int>(detail::parse_long(cells[1], rowctx));
            e.segment = static_cast<int>(detail::parse_long(cells[2], rowctx));
            e.line = static_cast<int>(detail::parse_long(cells[3], rowctx));
            e.t = static_cast<int>(detail::parse_long(cells[4], rowctx));
            if (e.scenario < 0 || e.scenario >= pool.n_scenarios) {
                throw DataError(rowctx + ": scenario out of range");
            }
            if (e.t < 0 || e.t >= pool.horizon) throw DataError(rowctx + ": t out of range");
            pool.events.push_back(e);
        } else {
            throw DataError(rowctx + ": unknown record type '" + cells[0] + "'");
        }
    }
    return pool;
}

inline void save_pool(const ScenarioPool& pool, const std::string& path) {
    write_text_file(path, pool_to_text(pool));
}

inline ScenarioPool load_pool(const std::string& path) {
    return pool_from_text(read_text_file(path), path);
}

// ---------------------------------------------------------------------------
// Selection (CSV with header block)

inline std::string selection_to_text(const WeightedSelection& sel) {
    std::ostringstream os;
    os << "# schema_version " << kSchemaVersion << "\n";
    os << "# kind selection\n";
    os << "# rule " << sel.rule << "\n";
    os << "# n_requested " << sel.n_requested << "\n";
    os << "# seed " << sel.seed << "\n";
    os << "# truncated " << (sel.truncated ? 1 : 0) << "\n";
    os << "scenario,weight\n";
    for (std::size_t i = 0; i < sel.scenarios.size(); ++i) {
        os << sel.scenarios[i] << "," << format_double(sel.weights[i]) << "\n";
    }
    return os.str();
}

inline WeightedSelection selection_from_text(const std::string& text,
                                             const std::string& where) {
    const auto hb = detail::parse_header_block(text, where);
    detail::check_schema(hb, "selection", where);
    WeightedSelection sel;
    sel.rule = hb.need("rule", where);
    sel.n_requested = static_cast<int>(
        detail::parse_long(hb.need("n_requested", where), where));
    sel.seed = static_cast<std::uint64_t>(std::stoull(hb.need("seed", where)));
    sel.truncated = hb.need("truncated", where) == "1";
    if (hb.body.empty() || hb.body.front() != "scenario,weight") {
        throw DataError(where + ": expected 'scenario,weight' header row");
    }
    double wsum = 0.0;
    for (std::size_t i = 1; i < hb.body.size(); ++i) {
        const std::string rowctx = where + ": row " + std::to_string(i);
        const auto cells = detail::split_csv(hb.body[i]);
        if (cells.size() != 2) throw DataError(rowctx + ": expected 2 columns");
        sel.scenarios.push_back(static_cast<int>(detail::parse_long(cells[0], rowctx)));
        sel.weights.push_back(detail::parse_double(cells[1], rowctx));
        if (sel.weights.back() < 0) throw DataError(rowctx + ": negative weight");
        wsum += sel.weights.back();
    }
    if (sel.scenarios.empty()) throw DataError(where + ": empty selection");
    if (std::abs(wsum - 1.0) > 1e-9) {
        throw DataError(where + ": weights sum to " + format_double(wsum) +
                        ", expected 1");
    }
    return sel;
}

inline void save_selection(const WeightedSelection& sel, const std::string& path) {
    write_text_file(path, selection_to_text(sel));
}

inline WeightedSelection load_selection(const std::string& path) {
    return selection_from_text(read_text_file(path), path);
}

// ---------------------------------------------------------------------------
// Commitment plan (JSON)

inline ordered_json plan_to_json(const CommitmentPlan& plan,
                                 const GridCase& grid) {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["kind"] = "plan";
    j["grid"] = grid.name;
    j["horizon"] = plan.horizon();
    j["first_stage_cost"] = plan.first_stage_cost;
    j["generators"] = ordered_json::array();
    for (std::size_t g = 0; g < plan.on.size(); ++g) {
        ordered_json jg;
        jg["id"] = grid.generators[g].id;
        jg["on"] = plan.on[g];
        jg["start"] = plan.start[g];
        jg["stop"] = plan.stop[g];
        j["generators"].push_back(jg);
    }
    return j;
}

inline CommitmentPlan plan_from_json(const ordered_json& j, const GridCase& grid,
                                     const std::string& where) {
    try {
        if (j.at("schema_version").get<int>() != kSchemaVersion) {
            throw DataError(where + ": unsupported schema_version");
        }
        if (j.at("kind").get<std::string>() != "plan") {
            throw DataError(where + ": not a plan file");
        }
        CommitmentPlan plan;
        plan.first_stage_cost = j.at("first_stage_cost").get<double>();
        const auto& jgen = j.at("generators");
        if (jgen.size() != grid.generators.size()) {
            throw DataError(where + ": generator count mismatch with grid");
        }
        plan.on.resize(grid.generators.size());
        plan.start.resize(grid.generators.size());
        plan.stop.resize(grid.generators.size());
        for (std::size_t g = 0; g < grid.generators.size(); ++g) {
            const auto& jg = jgen[g];
            if (jg.at("id").get<int>() != grid.generators[g].id) {
                throw DataError(where + ": generators[" + std::to_string(g) +
                                "].id does not match the grid order");
            }
            plan.on[g] = jg.at("on").get<std::vector<int>>();
            plan.start[g] = jg.at("start").get<std::vector<int>>();
            plan.stop[g] = jg.at("stop").get<std::vector<int>>();
        }
        validate_plan(plan, grid);
        return plan;
    } catch (const ordered_json::exception& e) {
        throw DataError(where + ": " + e.what());
    }
}

inline void save_plan(const CommitmentPlan& plan, const GridCase& grid,
                      const std::string& path) {
    write_text_file(path, plan_to_json(plan, grid).dump(2) + "\n");
}

inline CommitmentPlan load_plan(const std::string& path, const GridCase& grid) {
    ordered_json j;
    try {
        j = ordered_json::parse(read_text_file(path));
    } catch (const ordered_json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    return plan_from_json(j, grid, path);
}

// ---------------------------------------------------------------------------
// Reports (CSV)

inline std::string opt_cell(const std::optional<double>& v) {
    return v ? format_double(*v) : "nan";
}

inline std::string tail_report_to_csv(const std::vector<TailRow>& rows,
                                      const std::string& label = "") {
    std::ostringstream os;
    os << (label.empty() ? "" : "sampler,") << "t,hill_alpha,excess_kurtosis,mmr,mean,median\n";
    for (const auto& r : rows) {
        if (!label.empty()) os << label << ",";
        os << r.t << "," << opt_cell(r.hill) << "," << opt_cell(r.kurtosis) << ","
           << opt_cell(r.mmr) << "," << format_double(r.mean) << ","
           << format_double(r.median) << "\n";
    }
    return os.str();
}

inline std::string compare_report_to_csv(const std::vector<TailRow>& a,
                                         const std::string& label_a,
                                         const std::vector<TailRow>& b,
                                         const std::string& label_b) {
    std::ostringstream os;
    os << "sampler,t,hill_alpha,excess_kurtosis,mmr,mean,median\n";
    auto emit = [&](const std::vector<TailRow>& rows, const std::string& label) {
        for (const auto& r : rows) {
            os << label << "," << r.t << "," << opt_cell(r.hill) << ","
               << opt_cell(r.kurtosis) << "," << opt_cell(r.mmr) << ","
               << format_double(r.mean) << "," << format_double(r.median) << "\n";
        }
    };
    emit(a, label_a);
    emit(b, label_b);
    return os.str();
}

inline std::string eval_table_to_csv(const EvalTable& table) {
    std::ostringstream os;
    os << "scenario,weight,cost_lc,cost_susd,cost_op,cost_og,total\n";
    auto emit = [&](const EvalRow& r) {
        os << r.scenario << "," << format_double(r.weight) << ","
           << format_double(r.cost_lc) << "," << format_double(r.cost_susd) << ","
           << format_double(r.cost_op) << "," << format_double(r.cost_og) << ","
           << format_double(r.total) << "\n";
    };
    for (const auto& r : table.rows) emit(r);
    emit(table.expected);
    return os.str();
}

}  // namespace stormrisk
