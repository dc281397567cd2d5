#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stormrisk/common.hpp"
#include "stormrisk/correlation.hpp"
#include "stormrisk/fragility.hpp"
#include "stormrisk/grid.hpp"
#include "stormrisk/holland.hpp"
#include "stormrisk/rng.hpp"
#include "stormrisk/track.hpp"

namespace stormrisk {

struct PoolConfig {
    /// Segments whose predicted per-interval failure probability is below
    /// this threshold are put in the non-fragile set and never sampled.
    double p_threshold = 1e-4;
    /// Locations with predicted wind below this speed (m/s) are treated as
    /// non-fragile outright; also guards the 1/w normalization.
    double min_wind = 0.1;
};

/// First failure of one segment in one scenario. line is the owning line's
/// id so pool files are self-contained for analysis.
struct FailureEvent {
    int scenario = 0;
    int segment = 0;
    int line = 0;
    int t = 0;

    friend bool operator==(const FailureEvent&, const FailureEvent&) = default;
};

/// Sparse scenario pool: only failure events are stored; line states are
/// reconstructed on demand. Scenario weights are uniform at pool level.
struct ScenarioPool {
    std::string sampler_kind;  // "relevance" or "normal"
    std::uint64_t seed = 0;
    int n_scenarios = 0;
    int horizon = 0;
    double p_threshold = 0.0;
    std::string track_hash;
    std::vector<std::vector<int>> relevance;  // per t: sorted segment ids
    std::vector<FailureEvent> events;         // sorted by (scenario, t, segment)

    friend bool operator==(const ScenarioPool&, const ScenarioPool&) = default;

    /// Earliest failure time per line for scenario s, as (line id -> t).
    std::unordered_map<int, int> line_fail_times(int s) const {
        std::unordered_map<int, int> out;
        for (const auto& e : events) {
            if (e.scenario != s) continue;
            auto it = out.find(e.line);
            if (it == out.end() || e.t < it->second) out[e.line] = e.t;
        }
        return out;
    }

    /// Per-scenario earliest line failure times in one pass over the pool.
    std::vector<std::unordered_map<int, int>> line_fail_times_all() const {
        std::vector<std::unordered_map<int, int>> out(
            static_cast<std::size_t>(n_scenarios));
        for (const auto& e : events) {
            auto& m = out[static_cast<std::size_t>(e.scenario)];
            auto it = m.find(e.line);
            if (it == m.end() || e.t < it->second) m[e.line] = e.t;
        }
        return out;
    }
};

/// Predicted wind with the exact-center degeneracy mapped to the
/// translation speed (the limit of the gradient term is 0 there).
inline double predicted_wind(const HollandParams& p, const GeoPoint& loc) {
    try {
        return total_wind_speed(p, loc);
    } catch (const std::domain_error&) {
        return std::abs(p.s_mps);
    }
}

/// Partition of all segment ids at timestep t into the relevance sampling
/// set and the non-fragile set, by thresholding the predicted failure
/// probability at the mean forecast.
inline std::pair<std::vector<int>, std::vector<int>> classify_segments(
    const GridCase& grid, const HurricaneTrack& track, int t,
    const PoolConfig& config = {}) {
    if (t < 0 || t >= track.horizon()) {
        throw DataError("classify_segments: timestep outside track");
    }
    const HollandParams& p = track.steps[static_cast<std::size_t>(t)].params;
    std::vector<int> relevant, nonfragile;
    for (const auto& seg : grid.segments) {
        const double w = predicted_wind(p, seg.location);
        const bool fragile = w >= config.min_wind &&
                             fragility_prob(seg.fragility, w) >= config.p_threshold;
        (fragile ? relevant : nonfragile).push_back(seg.id);
    }
    std::sort(relevant.begin(), relevant.end());
    std::sort(nonfragile.begin(), nonfragile.end());
    return {relevant, nonfragile};
}

namespace detail {

/// Shared per-timestep sampling state, computed once and read by all
/// scenario workers.
struct TimestepPlan {
    std::vector<std::size_t> seg_idx;   // indexes into grid.segments
    std::vector<double> mean_log_w;     // ln of predicted intensity
    std::vector<double> inv_beta;       // 1/beta per segment
    std::vector<double> log_w0;         // ln w0 per segment
    std::vector<int> line_of;           // line id per segment
    std::vector<int> seg_id;            // segment id per segment
    std::optional<CholeskyFactor> chol; // joint sampler only
    std::vector<double> marginal_sd;    // marginal sampler only
    CovarianceFactors cov;              // kept for optional debug dumps
};

inline TimestepPlan make_timestep_plan(const GridCase& grid,
                                       const HurricaneTrack& track, int t,
                                       const PoolConfig& config, bool joint) {
    TimestepPlan plan;
    const TrackStep& step = track.steps[static_cast<std::size_t>(t)];
    const auto [relevant, nonfragile] = classify_segments(grid, track, t, config);
    (void)nonfragile;
    plan.seg_idx.reserve(relevant.size());
    for (int sid : relevant) plan.seg_idx.push_back(grid.segment_index.at(sid));

    const std::size_t n = plan.seg_idx.size();
    plan.mean_log_w.resize(n);
    plan.inv_beta.resize(n);
    plan.log_w0.resize(n);
    plan.line_of.resize(n);
    plan.seg_id.resize(n);

    std::vector<SensitivityVector> sens(kNumHollandParams);
    for (int k = 0; k < kNumHollandParams; ++k) {
        sens[static_cast<std::size_t>(k)].param_index = k;
        sens[static_cast<std::size_t>(k)].timestep = t;
        sens[static_cast<std::size_t>(k)].entries.resize(n);
    }
    for (std::size_t j = 0; j < n; ++j) {
        const Segment& seg = grid.segments[plan.seg_idx[j]];
        const double w = predicted_wind(step.params, seg.location);
        plan.mean_log_w[j] = std::log(w);
        plan.inv_beta[j] = 1.0 / seg.fragility.beta;
        plan.log_w0[j] = std::log(seg.fragility.w0);
        plan.line_of[j] = seg.line;
        plan.seg_id[j] = seg.id;
        const auto grad = param_sensitivities(step.params, seg.location);
        for (int k = 0; k < kNumHollandParams; ++k) {
            sens[static_cast<std::size_t>(k)].entries[j] =
                grad[static_cast<std::size_t>(k)] / w;
        }
    }
    if (n == 0) return plan;

    ParamUncertainty sigma;
    sigma.sigma.assign(step.sigma.begin(), step.sigma.end());
    plan.cov = build_covariance(sens, sigma);
    if (joint) {
        plan.chol = cholesky_rank1(plan.cov);
    } else {
        plan.marginal_sd.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            plan.marginal_sd[j] = std::sqrt(plan.cov.implied_entry(j, j));
        }
    }
    return plan;
}

inline ScenarioPool sample_pool(const GridCase& grid, const HurricaneTrack& track,
                                int n_scenarios, std::uint64_t seed,
                                const PoolConfig& config, int workers, bool joint,
                                std::vector<TimestepPlan>* plans_out = nullptr) {
    if (n_scenarios < 1) throw DataError("sample_pool: require n_scenarios >= 1");
    if (track.horizon() != grid.horizon) {
        throw DataError("sample_pool: track horizon != grid horizon");
    }
    const int horizon = grid.horizon;

    std::vector<TimestepPlan> plans;
    plans.reserve(static_cast<std::size_t>(horizon));
    for (int t = 0; t < horizon; ++t) {
        plans.push_back(make_timestep_plan(grid, track, t, config, joint));
    }

    ScenarioPool pool;
    pool.sampler_kind = joint ? "relevance" : "normal";
    pool.seed = seed;
    pool.n_scenarios = n_scenarios;
    pool.horizon = horizon;
    pool.p_threshold = config.p_threshold;
    pool.relevance.resize(static_cast<std::size_t>(horizon));
    for (int t = 0; t < horizon; ++t) {
        auto& rel = pool.relevance[static_cast<std::size_t>(t)];
        rel = plans[static_cast<std::size_t>(t)].seg_id;
        std::sort(rel.begin(), rel.end());
    }

    // Draws for (t, s) come from a stream derived from (seed, t, s) only, so
    // the pool is independent of the worker split. Both samplers consume
    // draws in the same order (all normals, then all uniforms), which makes
    // them coincide exactly when all sigma_kt are zero.
    const int nworkers = std::max(1, std::min(workers, n_scenarios));
    std::vector<std::vector<FailureEvent>> worker_events(
        static_cast<std::size_t>(nworkers));

    auto run_chunk = [&](int w) {
        auto& out = worker_events[static_cast<std::size_t>(w)];
        std::vector<double> logw;
        for (int s = w; s < n_scenarios; s += nworkers) {
            std::unordered_map<int, char> seg_failed;
            for (int t = 0; t < horizon; ++t) {
                const TimestepPlan& plan = plans[static_cast<std::size_t>(t)];
                const std::size_t n = plan.seg_idx.size();
                if (n == 0) continue;
                Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t),
                                    static_cast<std::uint64_t>(s)));
                if (joint) {
                    logw = correlated_draw(*plan.chol, plan.mean_log_w, rng);
                } else {
                    logw.resize(n);
                    for (std::size_t j = 0; j < n; ++j) {
                        logw[j] = plan.mean_log_w[j] + plan.marginal_sd[j] * rng.normal();
                    }
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const double r = rng.uniform01();
                    const double wstar = (logw[j] - plan.log_w0[j]) * plan.inv_beta[j];
                    if (failure_indicator(wstar, r)) {
                        auto ins = seg_failed.emplace(plan.seg_id[j], 1);
                        if (ins.second) {
                            out.push_back(FailureEvent{s, plan.seg_id[j],
                                                       plan.line_of[j], t});
                        }
                    }
                }
            }
        }
    };

    if (nworkers == 1) {
        run_chunk(0);
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(nworkers));
        for (int w = 0; w < nworkers; ++w) threads.emplace_back(run_chunk, w);
        for (auto& th : threads) th.join();
    }

    for (auto& ev : worker_events) {
        pool.events.insert(pool.events.end(), ev.begin(), ev.end());
    }
    std::sort(pool.events.begin(), pool.events.end(),
              [](const FailureEvent& a, const FailureEvent& b) {
                  if (a.scenario != b.scenario) return a.scenario < b.scenario;
                  if (a.t != b.t) return a.t < b.t;
                  return a.segment < b.segment;
              });
    if (plans_out) *plans_out = std::move(plans);
    return pool;
}

}  // namespace detail

/// Spatially dependent sampler: per timestep, log-intensities over the
/// relevance set are drawn jointly from the covariance propagated out of the
/// forecast parameter uncertainty, then thresholded against independent
/// uniforms.
inline ScenarioPool sample_pool_sds(const GridCase& grid, const HurricaneTrack& track,
                                    int n_scenarios, std::uint64_t seed,
                                    const PoolConfig& config = {}, int workers = 1) {
    return detail::sample_pool(grid, track, n_scenarios, seed, config, workers, true);
}

/// Baseline sequential Monte Carlo sampler: each segment draws its intensity
/// independently from its marginal lognormal (same means and variances as
/// the joint sampler).
inline ScenarioPool sample_pool_smc(const GridCase& grid, const HurricaneTrack& track,
                                    int n_scenarios, std::uint64_t seed,
                                    const PoolConfig& config = {}, int workers = 1) {
    return detail::sample_pool(grid, track, n_scenarios, seed, config, workers, false);
}

/// Folds segment failures (segment id, first failure t) into per-line
/// failure times: a line fails at the earliest failure among its segments
/// and stays failed. Returns -1 for lines that never fail, indexed like
/// grid.lines.
inline std::vector<int> aggregate_line_states(
    const GridCase& grid, const std::vector<std::pair<int, int>>& segment_failures) {
    std::vector<int> fail_t(grid.lines.size(), -1);
    for (const auto& [seg_id, t] : segment_failures) {
        auto it = grid.segment_index.find(seg_id);
        if (it == grid.segment_index.end()) {
            throw DataError("aggregate_line_states: unknown segment id " +
                            std::to_string(seg_id));
        }
        const std::size_t li = grid.line_index.at(grid.segments[it->second].line);
        if (fail_t[li] < 0 || t < fail_t[li]) fail_t[li] = t;
    }
    return fail_t;
}

/// In-service indicator u for a line failure time: 1 before the failure
/// interval, 0 from it onward.
inline int line_in_service(int fail_t, int t) {
    return (fail_t >= 0 && t >= fail_t) ? 0 : 1;
}

}  // namespace stormrisk
