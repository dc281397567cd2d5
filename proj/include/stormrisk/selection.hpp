#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <unordered_set>
#include <vector>

#include "stormrisk/common.hpp"
#include "stormrisk/grid.hpp"
#include "stormrisk/rng.hpp"
#include "stormrisk/sampler.hpp"

namespace stormrisk {

enum class SelectionRule { Random, Stratified, Worst };

inline const char* to_string(SelectionRule r) {
    switch (r) {
        case SelectionRule::Random: return "random";
        case SelectionRule::Stratified: return "stratified";
        case SelectionRule::Worst: return "worst";
    }
    return "?";
}

inline SelectionRule selection_rule_from_string(const std::string& s) {
    if (s == "random") return SelectionRule::Random;
    if (s == "stratified") return SelectionRule::Stratified;
    if (s == "worst") return SelectionRule::Worst;
    throw DataError("unknown selection rule: " + s);
}

/// Weighted scenario subset. Weights are nonnegative and sum to 1.
struct WeightedSelection {
    std::string rule;
    int n_requested = 0;
    std::uint64_t seed = 0;
    bool truncated = false;  // pool was smaller than N
    std::vector<int> scenarios;
    std::vector<double> weights;
};

/// Ranking proxy: number of distinct lines failed at any point of the
/// horizon; optionally weighted by line flow limits (needs the grid).
inline double proxy_severity(const ScenarioPool& pool, int s,
                             bool capacity_weighted = false,
                             const GridCase* grid = nullptr) {
    const auto fails = pool.line_fail_times(s);
    if (!capacity_weighted) return static_cast<double>(fails.size());
    if (grid == nullptr) {
        throw DataError("proxy_severity: capacity weighting requires a grid");
    }
    double q = 0.0;
    for (const auto& [line, t] : fails) {
        q += grid->lines[grid->line_index.at(line)].flow_limit;
    }
    return q;
}

/// Proxy severity for every scenario in the pool.
inline std::vector<double> proxy_severities(const ScenarioPool& pool,
                                            bool capacity_weighted = false,
                                            const GridCase* grid = nullptr) {
    std::vector<double> q(static_cast<std::size_t>(pool.n_scenarios), 0.0);
    if (!capacity_weighted) {
        const auto by_scenario = pool.line_fail_times_all();
        for (int s = 0; s < pool.n_scenarios; ++s) {
            q[static_cast<std::size_t>(s)] =
                static_cast<double>(by_scenario[static_cast<std::size_t>(s)].size());
        }
        return q;
    }
    for (int s = 0; s < pool.n_scenarios; ++s) {
        q[static_cast<std::size_t>(s)] = proxy_severity(pool, s, true, grid);
    }
    return q;
}

namespace detail {

/// Uniform draw of k distinct indices from [0, n), deterministic in rng.
inline std::vector<int> sample_without_replacement(int n, int k, Rng& rng) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(k));
    return idx;
}

/// Largest-remainder apportionment of n picks across strata, proportional to
/// stratum masses, capped by stratum sizes.
inline std::vector<int> largest_remainder(const std::vector<int>& sizes, int n) {
    const double total = std::accumulate(sizes.begin(), sizes.end(), 0.0);
    std::vector<int> alloc(sizes.size(), 0);
    std::vector<std::pair<double, std::size_t>> rema;
    int assigned = 0;
    for (std::size_t h = 0; h < sizes.size(); ++h) {
        const double share = n * sizes[h] / total;
        alloc[h] = static_cast<int>(std::floor(share));
        alloc[h] = std::min(alloc[h], sizes[h]);
        assigned += alloc[h];
        rema.emplace_back(share - std::floor(share), h);
    }
    std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;  // deterministic tie-break
    });
    std::size_t cursor = 0;
    while (assigned < n && cursor < rema.size()) {
        const std::size_t h = rema[cursor].second;
        if (alloc[h] < sizes[h]) {
            ++alloc[h];
            ++assigned;
        }
        ++cursor;
        if (cursor == rema.size() && assigned < n) cursor = 0;
    }
    return alloc;
}

}  // namespace detail

/// Scenario selection with weights.
///   random:     uniform without replacement, pi = 1/N.
///   stratified: rank deciles of the proxy severity (ties by scenario id),
///               proportional allocation with largest-remainder rounding,
///               uniform draw within strata; pi = stratum share / picks.
///   worst:      top-N by proxy severity, ties by lower scenario id, pi = 1/N.
/// When N exceeds the pool size the selection truncates to the pool.
inline WeightedSelection select(const ScenarioPool& pool, SelectionRule rule, int n,
                                std::uint64_t seed,
                                const std::vector<double>* qhat_in = nullptr) {
    if (n < 1) throw DataError("select: require N >= 1");
    const int pool_n = pool.n_scenarios;
    WeightedSelection sel;
    sel.rule = to_string(rule);
    sel.n_requested = n;
    sel.seed = seed;
    if (n > pool_n) {
        sel.truncated = true;
        n = pool_n;
    }

    std::vector<double> qhat;
    if (rule != SelectionRule::Random) {
        qhat = qhat_in ? *qhat_in : proxy_severities(pool);
        if (static_cast<int>(qhat.size()) != pool_n) {
            throw DataError("select: proxy severity length mismatch");
        }
    }

    Rng rng(derive_seed(seed, 0xC0FFEE));
    if (rule == SelectionRule::Random) {
        auto idx = detail::sample_without_replacement(pool_n, n, rng);
        std::sort(idx.begin(), idx.end());
        sel.scenarios = idx;
        sel.weights.assign(static_cast<std::size_t>(n), 1.0 / n);
        return sel;
    }

    // Rank order by (qhat desc, id asc) for worst; (qhat asc, id asc) for strata.
    std::vector<int> order(static_cast<std::size_t>(pool_n));
    std::iota(order.begin(), order.end(), 0);

    if (rule == SelectionRule::Worst) {
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            const double qa = qhat[static_cast<std::size_t>(a)];
            const double qb = qhat[static_cast<std::size_t>(b)];
            if (qa != qb) return qa > qb;
            return a < b;
        });
        order.resize(static_cast<std::size_t>(n));
        std::sort(order.begin(), order.end());
        sel.scenarios = order;
        sel.weights.assign(static_cast<std::size_t>(n), 1.0 / n);
        return sel;
    }

    // Stratified: contiguous rank deciles, so strata are near-equal in mass
    // even when qhat ties heavily.
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double qa = qhat[static_cast<std::size_t>(a)];
        const double qb = qhat[static_cast<std::size_t>(b)];
        if (qa != qb) return qa < qb;
        return a < b;
    });
    const int n_strata = std::min(10, pool_n);
    std::vector<std::vector<int>> strata(static_cast<std::size_t>(n_strata));
    for (int i = 0; i < pool_n; ++i) {
        const std::size_t h = static_cast<std::size_t>(
            std::min<long long>(n_strata - 1,
                                static_cast<long long>(i) * n_strata / pool_n));
        strata[h].push_back(order[static_cast<std::size_t>(i)]);
    }
    std::vector<int> sizes;
    for (const auto& st : strata) sizes.push_back(static_cast<int>(st.size()));
    const auto alloc = detail::largest_remainder(sizes, n);

    std::vector<std::pair<int, double>> picked;
    for (std::size_t h = 0; h < strata.size(); ++h) {
        if (alloc[h] == 0 || strata[h].empty()) continue;
        const double stratum_share =
            static_cast<double>(strata[h].size()) / static_cast<double>(pool_n);
        const double w = stratum_share / alloc[h];
        auto local = detail::sample_without_replacement(
            static_cast<int>(strata[h].size()), alloc[h], rng);
        for (int li : local) {
            picked.emplace_back(strata[h][static_cast<std::size_t>(li)], w);
        }
    }
    // Allocation skips nothing silently: empty strata cannot occur with
    // contiguous rank deciles, and largest_remainder caps by size.
    double wsum = 0.0;
    for (auto& [sid, w] : picked) wsum += w;
    std::sort(picked.begin(), picked.end());
    for (auto& [sid, w] : picked) {
        sel.scenarios.push_back(sid);
        sel.weights.push_back(w / wsum);  // renormalize rounding residue
    }
    return sel;
}

/// Weighted average of a per-scenario metric over a selection.
inline double weighted_mean(const WeightedSelection& sel,
                            const std::vector<double>& metric) {
    double acc = 0.0;
    for (std::size_t i = 0; i < sel.scenarios.size(); ++i) {
        acc += sel.weights[i] * metric[static_cast<std::size_t>(sel.scenarios[i])];
    }
    return acc;
}

}  // namespace stormrisk
