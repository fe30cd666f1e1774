#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "arfit/metrics.hpp"
#include "arfit/rng.hpp"
#include "helpers.hpp"

using namespace arfit;

TEST_CASE("relative_error worked examples") {
    const auto re = relative_error(std::vector<double>{0.5}, std::vector<double>{0.45});
    REQUIRE(re.size() == 1);
    CHECK(*re[0] == Catch::Approx(0.1).epsilon(1e-12));

    const auto zero = relative_error(std::vector<double>{0.3, -0.7},
                                     std::vector<double>{0.3, -0.7});
    CHECK(*zero[0] == 0.0);
    CHECK(*zero[1] == 0.0);

    const auto guarded = relative_error(std::vector<double>{0.0, 0.5},
                                        std::vector<double>{0.1, 0.5});
    CHECK_FALSE(guarded[0].has_value());
    CHECK(*guarded[1] == 0.0);
}

TEST_CASE("relative_error is scale invariant") {
    const std::vector<double> truth = {0.4, -0.8, 0.05};
    const std::vector<double> est = {0.35, -0.9, 0.02};
    const auto base = relative_error(truth, est);
    for (double c : {-3.0, 0.5, 100.0}) {
        std::vector<double> t2 = truth, e2 = est;
        for (double& v : t2) v *= c;
        for (double& v : e2) v *= c;
        const auto scaled = relative_error(t2, e2);
        for (std::size_t i = 0; i < truth.size(); ++i) {
            REQUIRE(*scaled[i] == Catch::Approx(*base[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("relative_error length mismatch") {
    CHECK_THROWS_AS(relative_error(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0}),
                    std::invalid_argument);
}

TEST_CASE("bland_altman worked examples") {
    SECTION("all-equal differences collapse the limits") {
        const std::vector<double> diffs(10, 0.7);
        const BlandAltman ba = bland_altman(diffs);
        CHECK(ba.mean_diff == Catch::Approx(0.7).epsilon(1e-15));
        CHECK(ba.sd_diff == 0.0);
        CHECK(ba.lower_limit == ba.upper_limit);
        CHECK(ba.outlier_ids.empty());
    }

    SECTION("a single large point is the outlier") {
        std::vector<double> diffs(99, 0.0);
        diffs.push_back(10.0);
        const BlandAltman ba = bland_altman(diffs);
        CHECK(ba.mean_diff == Catch::Approx(0.1).epsilon(1e-12));
        CHECK(ba.sd_diff == Catch::Approx(1.0).epsilon(1e-12));
        CHECK(ba.upper_limit == Catch::Approx(0.1 + 1.96).epsilon(1e-12));
        REQUIRE(ba.outlier_ids == std::vector<std::size_t>{99});
    }

    SECTION("symmetric differences have zero mean") {
        const BlandAltman ba = bland_altman(std::vector<double>{-1.0, 1.0});
        CHECK(ba.mean_diff == 0.0);
    }

    SECTION("fewer than two points is an error") {
        CHECK_THROWS_AS(bland_altman(std::vector<double>{1.0}), std::invalid_argument);
    }
}

TEST_CASE("bland_altman coverage on synthetic normal differences") {
    SplitMix64 rng(606);
    std::vector<double> diffs;
    const std::size_t n = 10000;
    for (std::size_t i = 0; i < n; ++i) diffs.push_back(rng.normal(0.3, 2.0));
    const BlandAltman ba = bland_altman(diffs);
    std::size_t inside = 0;
    for (double d : diffs) {
        if (d >= ba.lower_limit && d <= ba.upper_limit) ++inside;
    }
    const double expected = 0.95 * static_cast<double>(n);
    const double sigma = std::sqrt(static_cast<double>(n) * 0.95 * 0.05);
    CHECK(std::abs(static_cast<double>(inside) - expected) < 3.0 * sigma);
    CHECK(ba.outlier_ids.size() == n - inside);
}

namespace {

PairedComparison make_comparison(std::size_t order, bool cml_ok, double ratio, double dr2) {
    PairedComparison c;
    c.order = order;
    c.gd_converged = true;
    c.cml_converged = cml_ok;
    c.time_ratio = ratio;
    c.r2_gd = 0.5;
    c.r2_cml = 0.5 + dr2;
    c.relative_errors_gd = {0.1};
    c.relative_errors_cml = {0.12};
    return c;
}

}  // namespace

TEST_CASE("success_table counts and percentages") {
    std::vector<PairedComparison> comparisons;
    for (int i = 0; i < 8; ++i) comparisons.push_back(make_comparison(1, i < 6, 2.0, 0.0));
    for (int i = 0; i < 4; ++i) comparisons.push_back(make_comparison(2, true, 2.0, 0.0));

    const SuccessTable table = success_table(comparisons);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].order == 1);
    CHECK(table.rows[0].cml_success == 6);
    CHECK(table.rows[0].cml_failure == 2);
    CHECK(table.rows[0].gd_success == 8);
    CHECK(table.rows[1].cml_success == 4);
    CHECK(table.total.cml_success == 10);
    CHECK(table.total.cml_failure == 2);
    // counts partition the input per order
    CHECK(table.rows[0].cml_success + table.rows[0].cml_failure == 8);
    CHECK(table.rows[1].cml_success + table.rows[1].cml_failure == 4);
}

TEST_CASE("order_scaling_summary medians match a sort-based oracle") {
    SplitMix64 rng(707);
    std::vector<PairedComparison> comparisons;
    std::vector<double> ratios;
    for (int i = 0; i < 31; ++i) {
        const double ratio = rng.uniform(1.0, 40.0);
        ratios.push_back(ratio);
        comparisons.push_back(make_comparison(3, true, ratio, rng.uniform(-1e-3, 1e-3)));
    }
    const auto rows = order_scaling_summary(comparisons);
    REQUIRE(rows.size() == 1);

    // independent oracle: sort and index directly (odd count -> exact middle)
    std::sort(ratios.begin(), ratios.end());
    CHECK(rows[0].time_ratio.median == ratios[15]);
    CHECK(rows[0].n == 31);

    SECTION("permutation invariance") {
        std::reverse(comparisons.begin(), comparisons.end());
        const auto reversed = order_scaling_summary(comparisons);
        CHECK(reversed[0].time_ratio.median == rows[0].time_ratio.median);
        CHECK(reversed[0].delta_r2.median == rows[0].delta_r2.median);
    }
}

TEST_CASE("single comparison summarizes to itself") {
    const std::vector<PairedComparison> one = {make_comparison(2, true, 12.5, 1e-4)};
    const auto rows = order_scaling_summary(one);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].time_ratio.median == 12.5);
    CHECK(rows[0].delta_r2.median == Catch::Approx(1e-4).epsilon(1e-9));
}

TEST_CASE("quantile spot checks") {
    CHECK(quantile({1.0, 2.0, 3.0, 4.0}, 0.5) == 2.5);
    CHECK(quantile({3.0, 1.0, 2.0}, 0.5) == 2.0);
    CHECK(quantile({1.0, 2.0}, 0.25) == 1.25);
    CHECK(std::isnan(quantile({}, 0.5)));
}

TEST_CASE("fitted r-squared matches the closed form for AR(1)") {
    CHECK(fitted_r_squared(std::vector<double>{0.5}) == Catch::Approx(0.25).margin(1e-9));
    CHECK(std::isnan(fitted_r_squared(std::vector<double>{1.2})));
}
