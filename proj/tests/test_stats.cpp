#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "stormrisk/rng.hpp"
#include "stormrisk/stats.hpp"

using namespace stormrisk;

namespace {
ScenarioPool hand_pool() {
    ScenarioPool pool;
    pool.sampler_kind = "relevance";
    pool.n_scenarios = 3;
    pool.horizon = 4;
    pool.relevance.assign(4, {});
    // Scenario 1 loses line 10 at t=1; scenario 2 loses line 11 at t=2
    // through two segment failures on the same line.
    pool.events = {
        FailureEvent{1, 100, 10, 1},
        FailureEvent{2, 200, 11, 2},
        FailureEvent{2, 201, 11, 3},
    };
    return pool;
}
}  // namespace

TEST_CASE("faulted count histogram on a hand-built pool") {
    const auto pool = hand_pool();
    const auto h0 = faulted_count_distribution(pool, 0);
    CHECK(h0.at(0) == 3);
    const auto h3 = faulted_count_distribution(pool, 3);
    CHECK(h3.at(0) == 1);
    CHECK(h3.at(1) == 2);
    int total = 0;
    for (const auto& [k, v] : h3) total += v;
    CHECK(total == pool.n_scenarios);
    CHECK_THROWS_AS(faulted_count_distribution(pool, 4), DataError);
    CHECK_THROWS_AS(faulted_count_distribution(pool, -1), DataError);
}

TEST_CASE("empty-failure pool is a point mass at zero") {
    ScenarioPool pool;
    pool.n_scenarios = 5;
    pool.horizon = 2;
    pool.relevance.assign(2, {});
    const auto h = faulted_count_distribution(pool, 1);
    CHECK(h.size() == 1);
    CHECK(h.at(0) == 5);
}

TEST_CASE("hill estimator recovers pareto tail indices") {
    // Inverse-CDF Pareto samples: X = (1-U)^(-1/alpha).
    auto pareto_sample = [](double alpha, int n, std::uint64_t seed) {
        Rng rng(seed);
        std::vector<double> x(static_cast<std::size_t>(n));
        for (auto& v : x) v = std::pow(1.0 - rng.uniform01(), -1.0 / alpha) - 1.0;
        return x;  // shifted down 1; hill_alpha shifts back up
    };
    const auto a2 = hill_alpha(pareto_sample(2.0, 100000, 8), 0.05);
    REQUIRE(a2.has_value());
    CHECK(*a2 > 1.8);
    CHECK(*a2 < 2.2);
    const auto a1 = hill_alpha(pareto_sample(1.0, 100000, 9), 0.05);
    REQUIRE(a1.has_value());
    CHECK(*a1 > 0.9);
    CHECK(*a1 < 1.1);
}

TEST_CASE("hill estimator refuses degenerate samples") {
    std::vector<double> flat(1000, 3.0);
    CHECK_FALSE(hill_alpha(flat, 0.05).has_value());
    std::vector<double> tiny = {1.0, 2.0};
    CHECK_FALSE(hill_alpha(tiny, 0.05).has_value());
}

TEST_CASE("kurtosis and mmr on known distributions") {
    Rng rng(321);
    std::vector<double> normal(100000);
    for (auto& v : normal) v = rng.normal();
    const auto kn = excess_kurtosis(normal);
    REQUIRE(kn.has_value());
    CHECK(std::abs(*kn) < 0.1);

    std::vector<double> symmetric(10000);
    for (std::size_t i = 0; i < symmetric.size(); ++i)
        symmetric[i] = 5.0 + rng.normal();
    const auto mmr_sym = mean_median_ratio(symmetric);
    REQUIRE(mmr_sym.has_value());
    CHECK(std::abs(*mmr_sym - 1.0) < 0.02);

    // Exp(1): excess kurtosis 6, mean/median = 1/ln 2.
    std::vector<double> expo(100000);
    for (auto& v : expo) v = -std::log(1.0 - rng.uniform01());
    const auto ke = excess_kurtosis(expo);
    REQUIRE(ke.has_value());
    CHECK(std::abs(*ke - 6.0) < 0.5);
    const auto mmr_e = mean_median_ratio(expo);
    REQUIRE(mmr_e.has_value());
    CHECK(std::abs(*mmr_e - 1.0 / std::log(2.0)) < 0.02);
}

TEST_CASE("estimators report not-estimable markers") {
    std::vector<double> constant(100, 2.0);
    CHECK_FALSE(excess_kurtosis(constant).has_value());
    std::vector<double> three = {1.0, 2.0, 3.0};
    CHECK_FALSE(excess_kurtosis(three).has_value());
    std::vector<double> zeros(50, 0.0);
    CHECK_FALSE(mean_median_ratio(zeros).has_value());
}

TEST_CASE("tail report covers every timestep") {
    const auto pool = hand_pool();
    const auto rows = tail_report(pool);
    REQUIRE(rows.size() == 4);
    for (int t = 0; t < 4; ++t) {
        CHECK(rows[static_cast<std::size_t>(t)].t == t);
        if (rows[static_cast<std::size_t>(t)].kurtosis) {
            CHECK(*rows[static_cast<std::size_t>(t)].kurtosis >= -2.0);
        }
    }
    CHECK(rows[3].mean == Catch::Approx(2.0 / 3.0));
    CHECK(rows[3].median == 1.0);
}
