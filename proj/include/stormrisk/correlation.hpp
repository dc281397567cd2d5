#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <vector>

#include "stormrisk/common.hpp"
#include "stormrisk/rng.hpp"

namespace stormrisk {

/// Per-parameter relative sensitivity of log-intensity across the relevance
/// set: entry i is (1/w_i) dV_i/dtheta_k at timestep t.
struct SensitivityVector {
    std::vector<double> entries;
    int param_index = 0;
    int timestep = 0;
};

/// Per-parameter standard errors sigma_kt.
struct ParamUncertainty {
    std::vector<double> sigma;

    void validate() const {
        for (double s : sigma) {
            if (!(s >= 0)) throw DataError("ParamUncertainty: require sigma >= 0");
        }
    }
};

/// Factored covariance of log-intensities: the implied matrix is the sum of
/// outer products of the stored vectors sigma_k * V_k. The dense matrix is
/// never materialized here.
struct CovarianceFactors {
    std::vector<std::vector<double>> factors;
    std::size_t dim = 0;

    double implied_entry(std::size_t i, std::size_t j) const {
        double c = 0.0;
        for (const auto& f : factors) c += f[i] * f[j];
        return c;
    }
    double max_diag() const {
        double m = 0.0;
        for (std::size_t i = 0; i < dim; ++i) m = std::max(m, implied_entry(i, i));
        return m;
    }
    /// Dense row-major copy, for debugging dumps and cross-checks.
    std::vector<double> densify() const {
        std::vector<double> c(dim * dim, 0.0);
        for (const auto& f : factors)
            for (std::size_t i = 0; i < dim; ++i)
                for (std::size_t j = 0; j < dim; ++j) c[i * dim + j] += f[i] * f[j];
        return c;
    }
};

/// Lower-triangular factor with C + eps*I = L L^T.
struct CholeskyFactor {
    std::vector<double> lower;  // row-major dim x dim, upper strictly zero
    std::size_t dim = 0;
    double eps = 0.0;

    double at(std::size_t i, std::size_t j) const { return lower[i * dim + j]; }
};

/// Assembles the scaled factor list sigma_k * V_k from per-parameter
/// sensitivity vectors and standard errors.
inline CovarianceFactors build_covariance(const std::vector<SensitivityVector>& sens,
                                          const ParamUncertainty& sigma) {
    if (sens.size() != sigma.sigma.size()) {
        throw DataError("build_covariance: sensitivity/sigma length mismatch");
    }
    sigma.validate();
    CovarianceFactors out;
    out.dim = sens.empty() ? 0 : sens.front().entries.size();
    out.factors.reserve(sens.size());
    for (std::size_t k = 0; k < sens.size(); ++k) {
        if (sens[k].entries.size() != out.dim) {
            throw DataError("build_covariance: inconsistent vector lengths");
        }
        if (!sens.empty() && sens[k].timestep != sens.front().timestep) {
            throw DataError("build_covariance: mixed timesteps");
        }
        std::vector<double> f(out.dim);
        for (std::size_t i = 0; i < out.dim; ++i) {
            const double v = sigma.sigma[k] * sens[k].entries[i];
            if (!std::isfinite(v)) throw DataError("build_covariance: non-finite entry");
            f[i] = v;
        }
        out.factors.push_back(std::move(f));
    }
    return out;
}

namespace detail {
/// Dense Cholesky of a small symmetric PSD matrix (row-major k x k), with a
/// tiny ridge. Used only to factor parameter covariance matrices, whose size
/// is the parameter count.
inline std::vector<double> small_cholesky(const std::vector<double>& a, std::size_t k) {
    std::vector<double> l(k * k, 0.0);
    double maxd = 0.0;
    for (std::size_t i = 0; i < k; ++i) maxd = std::max(maxd, a[i * k + i]);
    const double ridge = 1e-14 * (1.0 + maxd);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i * k + j];
            if (i == j) s += ridge;
            for (std::size_t m = 0; m < j; ++m) s -= l[i * k + m] * l[j * k + m];
            if (i == j) {
                if (s < 0) {
                    if (s < -1e-8 * (1.0 + maxd)) {
                        throw DataError("parameter covariance is not PSD");
                    }
                    s = 0;
                }
                l[i * k + i] = std::sqrt(s);
            } else {
                l[i * k + j] = l[j * k + j] > 0 ? s / l[j * k + j] : 0.0;
            }
        }
    }
    return l;
}
}  // namespace detail

/// Generalized form accepting a full parameter covariance matrix
/// (row-major K x K): C = V Sigma V^T, refactored into K rank-1 terms via a
/// dense Cholesky of Sigma so the same downstream pipeline applies. The
/// default diagonal case is build_covariance.
inline CovarianceFactors build_covariance_general(
    const std::vector<SensitivityVector>& sens,
    const std::vector<double>& sigma_theta) {
    const std::size_t k = sens.size();
    if (sigma_theta.size() != k * k) {
        throw DataError("build_covariance_general: Sigma_theta must be KxK");
    }
    const std::size_t dim = sens.empty() ? 0 : sens.front().entries.size();
    for (const auto& s : sens) {
        if (s.entries.size() != dim) {
            throw DataError("build_covariance_general: inconsistent vector lengths");
        }
    }
    const auto m = detail::small_cholesky(sigma_theta, k);
    CovarianceFactors out;
    out.dim = dim;
    // Column c of V*M becomes one factor vector.
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<double> f(dim, 0.0);
        for (std::size_t kk = c; kk < k; ++kk) {
            const double w = m[kk * k + c];
            if (w == 0.0) continue;
            for (std::size_t i = 0; i < dim; ++i) f[i] += w * sens[kk].entries[i];
        }
        out.factors.push_back(std::move(f));
    }
    return out;
}

/// Cholesky factor of C + eps*I assembled by successive rank-1 updates, one
/// per stored factor vector: O(N^2 K) instead of a dense O(N^3)
/// factorization. The ridge eps = 1e-10 * (1 + max diag C) keeps the factor
/// well defined when K < N leaves C rank-deficient.
inline CholeskyFactor cholesky_rank1(const CovarianceFactors& cov) {
    if (cov.dim < 1) throw DataError("cholesky_rank1: require dim >= 1");
    const std::size_t n = cov.dim;
    CholeskyFactor out;
    out.dim = n;
    out.eps = 1e-10 * (1.0 + cov.max_diag());
    out.lower.assign(n * n, 0.0);
    const double d0 = std::sqrt(out.eps);
    for (std::size_t i = 0; i < n; ++i) out.lower[i * n + i] = d0;

    std::vector<double> x(n);
    for (const auto& f : cov.factors) {
        x = f;
        for (std::size_t k = 0; k < n; ++k) {
            const double lkk = out.lower[k * n + k];
            const double r = std::hypot(lkk, x[k]);
            if (!(r > 0) || !std::isfinite(r)) {
                throw SolverError("cholesky_rank1: corrupted pivot");
            }
            const double c = r / lkk;
            const double s = x[k] / lkk;
            out.lower[k * n + k] = r;
            for (std::size_t i = k + 1; i < n; ++i) {
                const double lik = (out.lower[i * n + k] + s * x[i]) / c;
                x[i] = c * x[i] - s * lik;
                out.lower[i * n + k] = lik;
            }
        }
    }
    return out;
}

/// One correlated draw of the log-intensity vector: means + L z with z
/// standard normal, consuming exactly dim normals from `rng`.
inline std::vector<double> correlated_draw(const CholeskyFactor& l,
                                           const std::vector<double>& means,
                                           Rng& rng) {
    const std::size_t n = l.dim;
    if (means.size() != n) throw DataError("correlated_draw: means length mismatch");
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = rng.normal();
    std::vector<double> out(means);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        const double* row = l.lower.data() + i * n;
        for (std::size_t j = 0; j <= i; ++j) acc += row[j] * z[j];
        out[i] += acc;
    }
    return out;
}

/// n joint draws; draw j uses an independent stream derived from (seed, j),
/// so results do not depend on evaluation order.
inline std::vector<std::vector<double>> correlated_normal_draws(
    const CholeskyFactor& l, const std::vector<double>& means, int n,
    std::uint64_t seed) {
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(j)));
        out.push_back(correlated_draw(l, means, rng));
    }
    return out;
}

/// MatrixMarket array dump of a dense row-major matrix, for external
/// cross-checking.
inline void write_matrix_market(std::ostream& os, const std::vector<double>& m,
                                std::size_t rows, std::size_t cols) {
    os << "%%MatrixMarket matrix array real general\n";
    os << rows << " " << cols << "\n";
    os.precision(17);
    for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t i = 0; i < rows; ++i) {
            os << m[i * cols + j] << "\n";
        }
    }
}

}  // namespace stormrisk
