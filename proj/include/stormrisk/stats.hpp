#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "stormrisk/common.hpp"
#include "stormrisk/sampler.hpp"

namespace stormrisk {

/// Per-scenario counts of lines failed at or before t.
inline std::vector<int> faulted_counts(const ScenarioPool& pool, int t) {
    if (t < 0 || t >= pool.horizon) {
        throw DataError("faulted_counts: timestep out of range");
    }
    std::vector<int> counts(static_cast<std::size_t>(pool.n_scenarios), 0);
    const auto by_scenario = pool.line_fail_times_all();
    for (int s = 0; s < pool.n_scenarios; ++s) {
        int c = 0;
        for (const auto& [line, ft] : by_scenario[static_cast<std::size_t>(s)]) {
            if (ft <= t) ++c;
        }
        counts[static_cast<std::size_t>(s)] = c;
    }
    return counts;
}

/// Histogram of per-scenario failed-line counts at t; values sum to the
/// scenario count.
inline std::map<int, int> faulted_count_distribution(const ScenarioPool& pool, int t) {
    std::map<int, int> hist;
    for (int c : faulted_counts(pool, t)) ++hist[c];
    return hist;
}

/// Hill tail-index estimate over the top k = ceil(k_frac * n) order
/// statistics. Count samples are shifted by +1 so zeros are admissible.
/// Returns nullopt when fewer than 20 samples lie strictly above the
/// threshold order statistic (the estimate would be meaningless).
inline std::optional<double> hill_alpha(const std::vector<double>& samples,
                                        double k_frac = 0.05) {
    const std::size_t n = samples.size();
    if (n < 2) return std::nullopt;
    std::vector<double> x(samples);
    for (double& v : x) v += 1.0;
    std::sort(x.begin(), x.end());
    const std::size_t k = static_cast<std::size_t>(
        std::ceil(k_frac * static_cast<double>(n)));
    if (k < 1 || k >= n) return std::nullopt;
    const double threshold = x[n - k - 1];
    std::size_t strictly_above = 0;
    for (std::size_t i = n - k; i < n; ++i) {
        if (x[i] > threshold) ++strictly_above;
    }
    if (strictly_above < 20) return std::nullopt;
    double sum = 0.0;
    for (std::size_t i = n - k; i < n; ++i) sum += std::log(x[i] / threshold);
    if (!(sum > 0)) return std::nullopt;
    return static_cast<double>(k) / sum;
}

inline std::optional<double> hill_alpha(const std::vector<int>& samples,
                                        double k_frac = 0.05) {
    std::vector<double> x(samples.begin(), samples.end());
    return hill_alpha(x, k_frac);
}

/// Plain moment estimator m4/m2^2 - 3. Returns nullopt for n < 4 or zero
/// variance.
inline std::optional<double> excess_kurtosis(const std::vector<double>& samples) {
    const std::size_t n = samples.size();
    if (n < 4) return std::nullopt;
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(n);
    double m2 = 0.0, m4 = 0.0;
    for (double v : samples) {
        const double d = v - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    if (!(m2 > 0)) return std::nullopt;
    return m4 / (m2 * m2) - 3.0;
}

inline double sample_mean(const std::vector<double>& samples) {
    double m = 0.0;
    for (double v : samples) m += v;
    return samples.empty() ? 0.0 : m / static_cast<double>(samples.size());
}

inline double sample_median(std::vector<double> samples) {
    if (samples.empty()) throw DataError("sample_median: empty sample");
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    return n % 2 == 1 ? samples[n / 2]
                      : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
}

/// Mean-to-median ratio; nullopt when the median is not positive.
inline std::optional<double> mean_median_ratio(const std::vector<double>& samples) {
    if (samples.empty()) return std::nullopt;
    const double med = sample_median(samples);
    if (!(med > 0)) return std::nullopt;
    return sample_mean(samples) / med;
}

/// Tail-heaviness metrics of the faulted-line-count distribution at one
/// timestep. Smaller Hill alpha, larger excess kurtosis and MMR > 1 all
/// indicate a heavier right tail.
struct TailRow {
    int t = 0;
    std::optional<double> hill;
    std::optional<double> kurtosis;
    std::optional<double> mmr;
    double mean = 0.0;
    double median = 0.0;
};

inline std::vector<TailRow> tail_report(const ScenarioPool& pool,
                                        double hill_k_frac = 0.05) {
    std::vector<TailRow> rows;
    rows.reserve(static_cast<std::size_t>(pool.horizon));
    for (int t = 0; t < pool.horizon; ++t) {
        const auto counts = faulted_counts(pool, t);
        std::vector<double> x(counts.begin(), counts.end());
        TailRow row;
        row.t = t;
        row.hill = hill_alpha(x, hill_k_frac);
        row.kurtosis = excess_kurtosis(x);
        row.mmr = mean_median_ratio(x);
        row.mean = sample_mean(x);
        row.median = sample_median(x);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace stormrisk
