#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "stormrisk/common.hpp"
#include "stormrisk/rng.hpp"

namespace stormrisk {

/// Standard normal CDF.
inline double stdnormal_cdf(double x) {
    return 0.5 * std::erfc(-x / 1.4142135623730950488);
}

/// Lognormal-capacity fragility curve parameters.
struct FragilityParams {
    double beta = 0.3;  // log-slope
    double w0 = 50.0;   // median-capacity intensity, m/s

    void validate() const {
        if (!(beta > 0)) throw DataError("FragilityParams: require beta > 0");
        if (!(w0 > 0)) throw DataError("FragilityParams: require w0 > 0");
    }
};

/// Intensity normalized against the fragility parameters; the fragility
/// curve in this variable is the standard normal CDF.
inline double normalized_intensity(const FragilityParams& fp, double w) {
    if (!(w > 0)) throw std::domain_error("normalized_intensity: require w > 0");
    return (std::log(w) - std::log(fp.w0)) / fp.beta;
}

/// Failure probability at intensity w, strictly increasing in w.
inline double fragility_prob(const FragilityParams& fp, double w) {
    return stdnormal_cdf(normalized_intensity(fp, w));
}

/// Bernoulli failure indicator: fails iff the uniform draw r in [0,1) lies
/// strictly below the fragility curve at the normalized intensity. Ties
/// resolve to non-failure.
inline bool failure_indicator(double wstar, double r) {
    return r < stdnormal_cdf(wstar);
}

/// Monte Carlo estimate of Corr(x_i, x_j) for two components whose
/// normalized intensities are bivariate normal with means (mi, mj), standard
/// deviations (si, sj) and correlation rho, using n joint draws. Returns
/// nullopt when either failure margin is constant in the sample, where the
/// Pearson correlation is undefined.
inline std::optional<double> two_component_corr(double mi, double mj, double si,
                                                double sj, double rho, int n,
                                                std::uint64_t seed) {
    if (!(si > 0) || !(sj > 0)) throw DataError("two_component_corr: require si, sj > 0");
    if (!(rho >= -1.0 && rho <= 1.0)) throw DataError("two_component_corr: require |rho| <= 1");
    if (n < 2) throw DataError("two_component_corr: require n >= 2");

    Rng rng(seed);
    const double tail = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    long long ci = 0, cj = 0, cij = 0;
    for (int it = 0; it < n; ++it) {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        const double wi = mi + si * z1;
        const double wj = mj + sj * (rho * z1 + tail * z2);
        const double ri = rng.uniform01();
        const double rj = rng.uniform01();
        const bool xi = failure_indicator(wi, ri);
        const bool xj = failure_indicator(wj, rj);
        ci += xi;
        cj += xj;
        cij += xi && xj;
    }
    const double pi = static_cast<double>(ci) / n;
    const double pj = static_cast<double>(cj) / n;
    const double pij = static_cast<double>(cij) / n;
    const double vi = pi * (1.0 - pi);
    const double vj = pj * (1.0 - pj);
    if (vi <= 0.0 || vj <= 0.0) return std::nullopt;
    return (pij - pi * pj) / std::sqrt(vi * vj);
}

/// One cell of the two-component sensitivity experiment.
struct SensitivityCell {
    double mi, mj, si, sj, rho;
    std::optional<double> corr;
    int n;
    std::uint64_t seed;
};

inline const std::vector<double>& sensitivity_mean_grid() {
    static const std::vector<double> v = {-1.0, 0.0, 1.0};
    return v;
}
inline const std::vector<double>& sensitivity_sigma_grid() {
    static const std::vector<double> v = {0.1, 1.0, 10.0, 100.0};
    return v;
}
inline const std::vector<double>& sensitivity_rho_grid() {
    static const std::vector<double> v = {-1.0, -2.0 / 3.0, -1.0 / 3.0, 0.0,
                                          1.0 / 3.0,  2.0 / 3.0,  1.0};
    return v;
}

/// Canned two-component experiment: means in {-1,0,1}^2, sigma on the decade
/// grid 1e-1..1e2, rho in {0, +-1/3, +-2/3, +-1}, 3000 scenarios per cell.
/// Cell seeds derive from `seed` and the grid position, so the table is
/// reproducible row by row.
inline std::vector<SensitivityCell> sensitivity_experiment(std::uint64_t seed,
                                                           int n_per_cell = 3000) {
    std::vector<SensitivityCell> out;
    const auto& means = sensitivity_mean_grid();
    const auto& sigmas = sensitivity_sigma_grid();
    const auto& rhos = sensitivity_rho_grid();
    std::uint64_t cell_index = 0;
    for (double mi : means)
        for (double mj : means)
            for (double si : sigmas)
                for (double sj : sigmas)
                    for (double rho : rhos) {
                        SensitivityCell cell;
                        cell.mi = mi;
                        cell.mj = mj;
                        cell.si = si;
                        cell.sj = sj;
                        cell.rho = rho;
                        cell.n = n_per_cell;
                        cell.seed = derive_seed(seed, cell_index++);
                        cell.corr = two_component_corr(mi, mj, si, sj, rho,
                                                       n_per_cell, cell.seed);
                        out.push_back(cell);
                    }
    return out;
}

}  // namespace stormrisk
