#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "arfit/acf.hpp"
#include "arfit/estimators.hpp"
#include "arfit/simulate.hpp"
#include "helpers.hpp"

using namespace arfit;

TEST_CASE("yule-walker order 1 equals the lag-1 autocorrelation") {
    SplitMix64 rng(200);
    const TimeSeries series = testutil::gaussian_series(500, rng);
    const EstimationResult result = estimate_yw(series, 1);
    CHECK(result.coefficients[0] == sample_acf(series, 1).lags[1]);
    CHECK(result.converged);
    CHECK(result.epochs == 0);
}

TEST_CASE("yule-walker on white noise is near zero") {
    SplitMix64 rng(201);
    const TimeSeries series = testutil::gaussian_series(100000, rng);
    const EstimationResult result = estimate_yw(series, 2);
    CHECK(std::abs(result.coefficients[0]) < 0.02);
    CHECK(std::abs(result.coefficients[1]) < 0.02);
}

TEST_CASE("yule-walker recovers AR(1) alpha=0.7 at large T") {
    ArProcess process;
    process.coefficients = {0.7};
    SplitMix64 rng(202);
    const TimeSeries series = generate_series(process, 100500, 500, rng);
    const EstimationResult result = estimate_yw(series, 1);
    CHECK(result.coefficients[0] > 0.69);
    CHECK(result.coefficients[0] < 0.71);
}

TEST_CASE("yule-walker output equals dl_forward of its own pacf") {
    SplitMix64 rng(203);
    const TimeSeries series = testutil::gaussian_series(400, rng);
    const EstimationResult result = estimate_yw(series, 4);
    CHECK(dl_forward(result.pacf) == result.coefficients);
    CHECK(is_stationary(result.coefficients));
}

TEST_CASE("constant series is rejected") {
    TimeSeries series;
    series.values.assign(50, 1.0);
    CHECK_THROWS_AS(estimate_yw(series, 1), std::domain_error);
}

TEST_CASE("gradient-descent estimator on an AR(1) series") {
    ArProcess process;
    process.coefficients = {0.5};
    SplitMix64 rng(204);
    const TimeSeries series = generate_series(process, 1500, 500, rng);

    const EstimationResult gd = estimate_gd(series, 1);
    REQUIRE(gd.converged);
    CHECK(std::abs(gd.coefficients[0] - 0.5) < 0.1);
    CHECK(gd.max_abs_inverse_root < 1.0);

    // descent from the Yule-Walker start
    const EstimationResult yw = estimate_yw(series, 1);
    CHECK(gd.final_mse <= yw.final_mse);

    // reported mse is the cost recomputed at the reported coefficients
    CHECK(gd.final_mse == mse_cost(series, gd.coefficients));
}

TEST_CASE("cml agrees with gd when both converge") {
    ArProcess process;
    process.coefficients = {0.5};
    SplitMix64 rng(205);
    const TimeSeries series = generate_series(process, 1500, 500, rng);

    const EstimationResult gd = estimate_gd(series, 1);
    const EstimationResult cml = estimate_cml(series, 1);
    REQUIRE(gd.converged);
    REQUIRE(cml.converged);
    CHECK(std::abs(cml.coefficients[0] - gd.coefficients[0]) < 1e-3);
}

TEST_CASE("cml on white noise converges near zero") {
    SplitMix64 rng(206);
    const TimeSeries series = testutil::gaussian_series(1000, rng);
    const EstimationResult cml = estimate_cml(series, 1);
    REQUIRE(cml.converged);
    CHECK(std::abs(cml.coefficients[0]) < 0.1);
}

TEST_CASE("estimators are deterministic") {
    SplitMix64 rng(207);
    const TimeSeries series = testutil::gaussian_series(600, rng);
    const EstimationResult a = estimate_gd(series, 2);
    const EstimationResult b = estimate_gd(series, 2);
    CHECK(a.coefficients == b.coefficients);
    CHECK(a.epochs == b.epochs);
    const EstimationResult c = estimate_cml(series, 2);
    const EstimationResult d = estimate_cml(series, 2);
    CHECK(c.coefficients == d.coefficients);
    CHECK(c.epochs == d.epochs);
}

TEST_CASE("compare_pair contracts") {
    ArProcess truth;
    truth.coefficients = {0.5, 0.2};
    SplitMix64 rng(208);
    const TimeSeries series = generate_series(truth, 1200, 200, rng);
    const EstimationResult gd = estimate_gd(series, 2);
    const EstimationResult cml = estimate_cml(series, 2);

    SECTION("identical estimates give zero deltas") {
        const PairedComparison cmp = compare_pair(series, truth, gd, gd);
        REQUIRE(cmp.delta_mse.has_value());
        CHECK(*cmp.delta_mse == 0.0);
        CHECK(*cmp.delta_perplexity == 0.0);
        REQUIRE(cmp.time_ratio.has_value());
        CHECK(*cmp.time_ratio > 0.0);
    }

    SECTION("delta signs agree with direct recomputation") {
        const PairedComparison cmp = compare_pair(series, truth, gd, cml);
        REQUIRE(cml.converged);
        REQUIRE(cmp.delta_mse.has_value());
        const double recomputed =
            mse_cost(series, cml.coefficients) - mse_cost(series, gd.coefficients);
        CHECK(*cmp.delta_mse == Catch::Approx(recomputed).margin(1e-18));
    }

    SECTION("failed cml leaves deltas absent but keeps gd metrics") {
        EstimationResult failed = cml;
        failed.converged = false;
        failed.failure_reason = FailureReason::line_search_failure;
        const PairedComparison cmp = compare_pair(series, truth, gd, failed);
        CHECK_FALSE(cmp.delta_mse.has_value());
        CHECK_FALSE(cmp.delta_perplexity.has_value());
        CHECK_FALSE(cmp.cml_converged);
        CHECK(cmp.gd_converged);
        REQUIRE(cmp.relative_errors_gd.size() == 2);
        CHECK(cmp.relative_errors_gd[0].has_value());
        CHECK(std::isfinite(cmp.r2_gd));
    }
}

TEST_CASE("gd estimates are always stationary over a sampler sweep") {
    SplitMix64 rng(209);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t p = 1 + rep % 5;
        SplitMix64 proc_rng(derive_stream(209, {static_cast<std::uint64_t>(rep), 1}));
        const ArProcess process = sample_stationary_process(p, proc_rng);
        SplitMix64 series_rng(derive_stream(209, {static_cast<std::uint64_t>(rep), 2}));
        const TimeSeries series = generate_series(process, 700, 200, series_rng);
        const EstimationResult gd = estimate_gd(series, p);
        REQUIRE(gd.max_abs_inverse_root < 1.0);
    }
}
