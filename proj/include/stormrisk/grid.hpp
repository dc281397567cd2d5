#pragma once

#include <cmath>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "stormrisk/common.hpp"
#include "stormrisk/fragility.hpp"
#include "stormrisk/geo.hpp"

namespace stormrisk {

struct Bus {
    int id = 0;
    GeoPoint location;
    double theta_min = -kPi / 2;
    double theta_max = kPi / 2;
    std::vector<double> demand_mw;  // per timestep
    std::vector<double> curtail_cost;  // $/MWh per timestep
};

struct Generator {
    int id = 0;
    int bus = 0;
    double cost_energy = 0.0;    // $/MWh, linear
    double cost_startup = 0.0;   // $ per start
    double cost_shutdown = 0.0;  // $ per stop
    double cost_overgen = 0.0;   // $/MWh on below-minimum slack
    double pmax = 0.0;           // MW
    double pmin = 0.0;           // MW
    double ramp_up = 0.0;        // MW per interval
    double ramp_down = 0.0;      // MW per interval, positive magnitude
    int min_up = 1;              // intervals
    int min_down = 1;            // intervals
    // Initial conditions; by default units start off with the first-interval
    // ramp limit inactive.
    int initial_on = 0;
    double initial_output = 0.0;
    bool initial_ramp_active = false;
};

/// Geolocated piece of a transmission line with its own fragility curve.
struct Segment {
    int id = 0;
    int line = 0;
    GeoPoint location;
    FragilityParams fragility;
};

struct Line {
    int id = 0;
    int from_bus = 0;
    int to_bus = 0;
    double reactance = 0.1;    // p.u.-style X in the DC flow relation
    double flow_limit = 0.0;   // MW
    std::vector<int> segments;  // segment ids, in order along the span
};

struct GridCase {
    std::string name;
    int horizon = 0;  // number of timesteps T
    int slack_bus = 0;
    std::vector<Bus> buses;
    std::vector<Generator> generators;
    std::vector<Line> lines;
    std::vector<Segment> segments;

    std::unordered_map<int, std::size_t> bus_index;
    std::unordered_map<int, std::size_t> line_index;
    std::unordered_map<int, std::size_t> segment_index;

    void rebuild_indexes() {
        bus_index.clear();
        line_index.clear();
        segment_index.clear();
        for (std::size_t i = 0; i < buses.size(); ++i) {
            if (!bus_index.emplace(buses[i].id, i).second) {
                throw DataError("grid: duplicate bus id " + std::to_string(buses[i].id));
            }
        }
        for (std::size_t i = 0; i < lines.size(); ++i) {
            if (!line_index.emplace(lines[i].id, i).second) {
                throw DataError("grid: duplicate line id " + std::to_string(lines[i].id));
            }
        }
        for (std::size_t i = 0; i < segments.size(); ++i) {
            if (!segment_index.emplace(segments[i].id, i).second) {
                throw DataError("grid: duplicate segment id " +
                                std::to_string(segments[i].id));
            }
        }
    }

    void validate() const {
        if (horizon < 1) throw DataError("grid: horizon must be >= 1");
        if (buses.empty()) throw DataError("grid: no buses");
        if (!bus_index.count(slack_bus)) {
            throw DataError("grid: slack bus " + std::to_string(slack_bus) +
                            " does not exist");
        }
        for (const auto& b : buses) {
            if (static_cast<int>(b.demand_mw.size()) != horizon) {
                throw DataError("grid: bus " + std::to_string(b.id) +
                                " demand length != horizon");
            }
            if (static_cast<int>(b.curtail_cost.size()) != horizon) {
                throw DataError("grid: bus " + std::to_string(b.id) +
                                " curtail_cost length != horizon");
            }
            if (!(b.theta_max > b.theta_min)) {
                throw DataError("grid: bus " + std::to_string(b.id) +
                                " has empty angle range");
            }
            for (double d : b.demand_mw) {
                if (!(d >= 0)) throw DataError("grid: negative demand at bus " +
                                               std::to_string(b.id));
            }
        }
        for (const auto& g : generators) {
            if (!bus_index.count(g.bus)) {
                throw DataError("grid: generator " + std::to_string(g.id) +
                                " references unknown bus " + std::to_string(g.bus));
            }
            if (!(g.pmax > 0) || !(g.pmin >= 0) || g.pmin > g.pmax) {
                throw DataError("grid: generator " + std::to_string(g.id) +
                                " has invalid output limits");
            }
            if (!(g.ramp_up >= 0) || !(g.ramp_down >= 0)) {
                throw DataError("grid: generator " + std::to_string(g.id) +
                                " has negative ramp limit");
            }
            if (g.min_up < 1 || g.min_down < 1) {
                throw DataError("grid: generator " + std::to_string(g.id) +
                                " min up/down must be >= 1");
            }
        }
        for (const auto& l : lines) {
            if (l.from_bus == l.to_bus) {
                throw DataError("grid: line " + std::to_string(l.id) +
                                " is a self-loop");
            }
            if (!bus_index.count(l.from_bus) || !bus_index.count(l.to_bus)) {
                throw DataError("grid: line " + std::to_string(l.id) +
                                " references unknown bus");
            }
            if (!(l.reactance > 0)) {
                throw DataError("grid: line " + std::to_string(l.id) +
                                " reactance must be > 0");
            }
            if (!(l.flow_limit > 0)) {
                throw DataError("grid: line " + std::to_string(l.id) +
                                " flow limit must be > 0");
            }
            if (l.segments.empty()) {
                throw DataError("grid: line " + std::to_string(l.id) +
                                " has no segments");
            }
            for (int sid : l.segments) {
                auto it = segment_index.find(sid);
                if (it == segment_index.end()) {
                    throw DataError("grid: line " + std::to_string(l.id) +
                                    " references unknown segment " + std::to_string(sid));
                }
                if (segments[it->second].line != l.id) {
                    throw DataError("grid: segment " + std::to_string(sid) +
                                    " does not point back to line " + std::to_string(l.id));
                }
            }
        }
        for (const auto& s : segments) {
            if (!line_index.count(s.line)) {
                throw DataError("grid: segment " + std::to_string(s.id) +
                                " references unknown line " + std::to_string(s.line));
            }
            s.fragility.validate();
            if (!s.location.valid()) {
                throw DataError("grid: segment " + std::to_string(s.id) +
                                " has invalid coordinates");
            }
        }
        if (!connected_without_failures()) {
            throw DataError("grid: graph is not connected on the no-failure topology");
        }
    }

    /// BFS connectivity over all lines.
    bool connected_without_failures() const {
        if (buses.empty()) return false;
        std::vector<std::vector<std::size_t>> adj(buses.size());
        for (const auto& l : lines) {
            const std::size_t a = bus_index.at(l.from_bus);
            const std::size_t b = bus_index.at(l.to_bus);
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
        std::vector<char> seen(buses.size(), 0);
        std::queue<std::size_t> q;
        q.push(0);
        seen[0] = 1;
        std::size_t count = 1;
        while (!q.empty()) {
            const std::size_t u = q.front();
            q.pop();
            for (std::size_t v : adj[u]) {
                if (!seen[v]) {
                    seen[v] = 1;
                    ++count;
                    q.push(v);
                }
            }
        }
        return count == buses.size();
    }

    double total_demand(int t) const {
        double d = 0.0;
        for (const auto& b : buses) d += b.demand_mw[static_cast<std::size_t>(t)];
        return d;
    }
};

/// Splits the straight span between two endpoints into segment midpoints at
/// most max_len_km long. Returns at least one point.
inline std::vector<GeoPoint> split_span(const GeoPoint& a, const GeoPoint& b,
                                        double max_len_km = 20.0) {
    const double len = haversine_distance(a, b);
    const int n = std::max(1, static_cast<int>(std::ceil(len / max_len_km)));
    std::vector<GeoPoint> mids;
    mids.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double f = (i + 0.5) / n;
        mids.push_back(GeoPoint{a.phi + f * (b.phi - a.phi),
                                a.lambda + f * (b.lambda - a.lambda)});
    }
    return mids;
}

}  // namespace stormrisk
