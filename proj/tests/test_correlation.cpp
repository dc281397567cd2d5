#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <vector>

#include "stormrisk/correlation.hpp"
#include "stormrisk/rng.hpp"

using namespace stormrisk;

namespace {

CovarianceFactors random_factors(std::size_t n, std::size_t k, std::uint64_t seed,
                                 double scale = 1.0) {
    Rng rng(seed);
    std::vector<SensitivityVector> sens(k);
    ParamUncertainty sigma;
    for (std::size_t kk = 0; kk < k; ++kk) {
        sens[kk].param_index = static_cast<int>(kk);
        sens[kk].timestep = 0;
        sens[kk].entries.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            sens[kk].entries[i] = (rng.uniform01() - 0.5) * 2.0;
        }
        sigma.sigma.push_back(scale * rng.uniform01());
    }
    return build_covariance(sens, sigma);
}

Eigen::MatrixXd densify(const CovarianceFactors& cov) {
    const auto flat = cov.densify();
    Eigen::MatrixXd c(cov.dim, cov.dim);
    for (std::size_t i = 0; i < cov.dim; ++i)
        for (std::size_t j = 0; j < cov.dim; ++j)
            c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                flat[i * cov.dim + j];
    return c;
}

}  // namespace

TEST_CASE("single outer product covariance") {
    SensitivityVector v;
    v.entries = {1.0, 2.0};
    ParamUncertainty sigma;
    sigma.sigma = {1.0};
    const auto cov = build_covariance({v}, sigma);
    CHECK(cov.dim == 2);
    CHECK(cov.implied_entry(0, 0) == 1.0);
    CHECK(cov.implied_entry(0, 1) == 2.0);
    CHECK(cov.implied_entry(1, 0) == 2.0);
    CHECK(cov.implied_entry(1, 1) == 4.0);
}

TEST_CASE("zero sigma collapses the covariance") {
    SensitivityVector v;
    v.entries = {3.0, -1.0, 2.0};
    ParamUncertainty sigma;
    sigma.sigma = {0.0};
    const auto cov = build_covariance({v}, sigma);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(cov.implied_entry(i, j) == 0.0);
}

TEST_CASE("opposite-sign sensitivities cancel cross terms") {
    SensitivityVector v1, v2;
    v1.entries = {1.0, 1.0};
    v2.entries = {1.0, -1.0};
    ParamUncertainty sigma;
    sigma.sigma = {1.0, 1.0};
    const auto cov = build_covariance({v1, v2}, sigma);
    CHECK(cov.implied_entry(0, 0) == 2.0);
    CHECK(cov.implied_entry(1, 1) == 2.0);
    CHECK(cov.implied_entry(0, 1) == 0.0);
}

TEST_CASE("shape mismatches are rejected") {
    SensitivityVector v1, v2;
    v1.entries = {1.0, 1.0};
    v2.entries = {1.0};
    ParamUncertainty sigma;
    sigma.sigma = {1.0, 1.0};
    CHECK_THROWS_AS(build_covariance({v1, v2}, sigma), DataError);
    sigma.sigma = {1.0};
    CHECK_THROWS_AS(build_covariance({v1, v1}, sigma), DataError);
}

TEST_CASE("rank-1 cholesky of the hand-checked rank-1 matrix") {
    SensitivityVector v;
    v.entries = {1.0, 2.0};
    ParamUncertainty sigma;
    sigma.sigma = {1.0};
    const auto f = cholesky_rank1(build_covariance({v}, sigma));
    // L of [[1,2],[2,4]] is [[1,0],[2,0]] up to the ridge.
    CHECK_THAT(f.at(0, 0), Catch::Matchers::WithinAbs(1.0, 1e-4));
    CHECK_THAT(f.at(1, 0), Catch::Matchers::WithinAbs(2.0, 1e-4));
    CHECK(f.at(0, 1) == 0.0);
    CHECK(std::abs(f.at(1, 1)) < 1e-4);
}

TEST_CASE("identity covariance factors to the identity") {
    std::vector<SensitivityVector> sens(3);
    for (int k = 0; k < 3; ++k) {
        sens[k].entries = {0.0, 0.0, 0.0};
        sens[k].entries[k] = 1.0;
        sens[k].param_index = k;
    }
    ParamUncertainty sigma;
    sigma.sigma = {1.0, 1.0, 1.0};
    const auto f = cholesky_rank1(build_covariance(sens, sigma));
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK_THAT(f.at(i, j),
                       Catch::Matchers::WithinAbs(i == j ? 1.0 : 0.0, 1e-5));
        }
    }
}

TEST_CASE("rank-1 updates match the dense decomposition oracle") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const std::size_t n = 10 + seed * 4;
        const auto cov = random_factors(n, 5, seed);
        const auto f = cholesky_rank1(cov);
        Eigen::MatrixXd target = densify(cov);
        for (std::size_t i = 0; i < n; ++i)
            target(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += f.eps;
        Eigen::LLT<Eigen::MatrixXd> llt(target);
        REQUIRE(llt.info() == Eigen::Success);
        const Eigen::MatrixXd lref = llt.matrixL();
        const double tol = 1e-8 * (1.0 + cov.max_diag());
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                CHECK(std::abs(f.at(i, j) -
                               lref(static_cast<Eigen::Index>(i),
                                    static_cast<Eigen::Index>(j))) < tol);
            }
        }
    }
}

TEST_CASE("reconstruction and PSD invariants on random instances") {
    for (std::uint64_t seed = 20; seed < 26; ++seed) {
        const auto cov = random_factors(30, 4, seed, 2.0);
        const auto f = cholesky_rank1(cov);
        Eigen::MatrixXd c = densify(cov);
        Eigen::MatrixXd l(30, 30);
        for (std::size_t i = 0; i < 30; ++i)
            for (std::size_t j = 0; j < 30; ++j)
                l(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    f.at(i, j);
        const Eigen::MatrixXd recon = l * l.transpose();
        Eigen::MatrixXd target = c;
        for (int i = 0; i < 30; ++i) target(i, i) += f.eps;
        const double err = (recon - target).cwiseAbs().maxCoeff();
        CHECK(err <= 1e-8 * (1.0 + cov.max_diag()));

        // Symmetry is exact by construction; eigenvalues are near-nonnegative.
        CHECK((c - c.transpose()).cwiseAbs().maxCoeff() == 0.0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * c.trace());
    }
}

TEST_CASE("uniform sigma scaling leaves the correlation matrix unchanged") {
    const std::size_t n = 12;
    Rng rng(404);
    std::vector<SensitivityVector> sens(4);
    ParamUncertainty sigma;
    for (std::size_t k = 0; k < 4; ++k) {
        sens[k].entries.resize(n);
        for (auto& e : sens[k].entries) e = (rng.uniform01() - 0.5);
        sigma.sigma.push_back(0.3 + rng.uniform01());
    }
    const double c = 3.7;
    ParamUncertainty scaled;
    for (double s : sigma.sigma) scaled.sigma.push_back(c * s);

    const auto cov1 = build_covariance(sens, sigma);
    const auto cov2 = build_covariance(sens, scaled);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            CHECK_THAT(cov2.implied_entry(i, j),
                       Catch::Matchers::WithinRel(c * c * cov1.implied_entry(i, j),
                                                  1e-12));
            const double r1 = cov1.implied_entry(i, j) /
                              std::sqrt(cov1.implied_entry(i, i) *
                                        cov1.implied_entry(j, j));
            const double r2 = cov2.implied_entry(i, j) /
                              std::sqrt(cov2.implied_entry(i, i) *
                                        cov2.implied_entry(j, j));
            CHECK(std::abs(r1 - r2) < 1e-12);
        }
    }
}

TEST_CASE("generalized parameter covariance reduces to the diagonal case") {
    const std::size_t n = 9, k = 3;
    auto covd = random_factors(n, k, 77);
    // Rebuild through the general interface with a diagonal Sigma_theta.
    Rng rng(77);
    std::vector<SensitivityVector> sens(k);
    ParamUncertainty sigma;
    for (std::size_t kk = 0; kk < k; ++kk) {
        sens[kk].entries.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            sens[kk].entries[i] = (rng.uniform01() - 0.5) * 2.0;
        sigma.sigma.push_back(rng.uniform01());
    }
    std::vector<double> sigma_theta(k * k, 0.0);
    for (std::size_t kk = 0; kk < k; ++kk)
        sigma_theta[kk * k + kk] = sigma.sigma[kk] * sigma.sigma[kk];
    const auto covg = build_covariance_general(sens, sigma_theta);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            CHECK_THAT(covg.implied_entry(i, j),
                       Catch::Matchers::WithinAbs(covd.implied_entry(i, j), 1e-12));
}

TEST_CASE("degenerate factor gives deterministic draws") {
    std::vector<SensitivityVector> sens(2);
    sens[0].entries = {0.0, 0.0};
    sens[1].entries = {0.0, 0.0};
    ParamUncertainty sigma;
    sigma.sigma = {0.0, 0.0};
    const auto f = cholesky_rank1(build_covariance(sens, sigma));
    const std::vector<double> means = {3.5, -1.25};
    const auto draws = correlated_normal_draws(f, means, 50, 9);
    for (const auto& d : draws) {
        CHECK(std::abs(d[0] - 3.5) < 1e-4);
        CHECK(std::abs(d[1] + 1.25) < 1e-4);
    }
}

TEST_CASE("perfectly correlated construction yields near-unit sample correlation") {
    SensitivityVector v;
    v.entries = {1.0, 1.0};
    ParamUncertainty sigma;
    sigma.sigma = {1.0};
    const auto f = cholesky_rank1(build_covariance({v}, sigma));
    const auto draws = correlated_normal_draws(f, {0.0, 0.0}, 10000, 31);
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (const auto& d : draws) {
        sx += d[0];
        sy += d[1];
        sxx += d[0] * d[0];
        syy += d[1] * d[1];
        sxy += d[0] * d[1];
    }
    const double nn = static_cast<double>(draws.size());
    const double corr = (sxy / nn - sx / nn * sy / nn) /
                        std::sqrt((sxx / nn - sx / nn * sx / nn) *
                                  (syy / nn - sy / nn * sy / nn));
    CHECK(corr > 0.999);
}

TEST_CASE("diagonal covariance yields near-zero sample correlation") {
    std::vector<SensitivityVector> sens(2);
    sens[0].entries = {1.0, 0.0};
    sens[1].entries = {0.0, 1.0};
    ParamUncertainty sigma;
    sigma.sigma = {1.0, 1.0};
    const auto f = cholesky_rank1(build_covariance(sens, sigma));
    const auto draws = correlated_normal_draws(f, {0.0, 0.0}, 10000, 77);
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (const auto& d : draws) {
        sx += d[0];
        sy += d[1];
        sxx += d[0] * d[0];
        syy += d[1] * d[1];
        sxy += d[0] * d[1];
    }
    const double nn = static_cast<double>(draws.size());
    const double corr = (sxy / nn - sx / nn * sy / nn) /
                        std::sqrt((sxx / nn - sx / nn * sx / nn) *
                                  (syy / nn - sy / nn * sy / nn));
    CHECK(std::abs(corr) < 0.05);
}

TEST_CASE("sample covariance of many draws matches the implied matrix") {
    const std::size_t n = 6;
    const auto cov = random_factors(n, 3, 501);
    const auto f = cholesky_rank1(cov);
    const std::vector<double> means(n, 1.0);
    const int draws_n = 100000;
    const auto draws = correlated_normal_draws(f, means, draws_n, 5150);
    std::vector<double> mean(n, 0.0);
    for (const auto& d : draws)
        for (std::size_t i = 0; i < n; ++i) mean[i] += d[i];
    for (auto& m : mean) m /= draws_n;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double cij = 0.0;
            for (const auto& d : draws) cij += (d[i] - mean[i]) * (d[j] - mean[j]);
            cij /= draws_n - 1;
            const double truth = cov.implied_entry(i, j);
            const double se = std::sqrt((cov.implied_entry(i, i) *
                                             cov.implied_entry(j, j) +
                                         truth * truth) /
                                        draws_n);
            CHECK(std::abs(cij - truth) <= 5.0 * se + 1e-9);
        }
    }
}

TEST_CASE("draws are independent of evaluation order") {
    const auto cov = random_factors(8, 3, 61);
    const auto f = cholesky_rank1(cov);
    const std::vector<double> means(8, 0.0);
    const auto all = correlated_normal_draws(f, means, 20, 99);
    // Drawing only the 13th draw reproduces it exactly.
    Rng rng(derive_seed(99, 13));
    const auto one = correlated_draw(f, means, rng);
    CHECK(one == all[13]);
}

TEST_CASE("doubling N roughly quadruples rank-1 factorization time") {
    using clock = std::chrono::steady_clock;
    auto time_once = [](std::size_t n) {
        const auto cov = random_factors(n, 6, 881);
        const auto t0 = clock::now();
        const auto f = cholesky_rank1(cov);
        const auto t1 = clock::now();
        volatile double sink = f.at(n - 1, n - 1);
        (void)sink;
        return std::chrono::duration<double>(t1 - t0).count();
    };
    std::vector<double> r1, r2;
    for (int rep = 0; rep < 5; ++rep) {
        r1.push_back(time_once(512));
        r2.push_back(time_once(1024));
    }
    std::sort(r1.begin(), r1.end());
    std::sort(r2.begin(), r2.end());
    const double ratio = r2[2] / r1[2];
    CHECK(ratio < 5.5);
}
