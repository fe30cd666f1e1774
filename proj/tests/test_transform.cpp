#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "arfit/durbin_levinson.hpp"
#include "arfit/roots.hpp"
#include "arfit/transform.hpp"
#include "helpers.hpp"

using namespace arfit;

TEST_CASE("transform worked examples") {
    CHECK(transform(std::vector<double>{0.0}).values == std::vector<double>{0.0});
    CHECK(transform(std::vector<double>{0.7}).values[0] ==
          Catch::Approx(std::atanh(0.7)).epsilon(1e-12));
    CHECK(std::atanh(0.7) == Catch::Approx(0.867301).margin(1e-6));
}

TEST_CASE("transform rejects non-stationary input") {
    CHECK_THROWS_AS(transform(std::vector<double>{1.1}), std::domain_error);
    CHECK_THROWS_AS(transform(std::vector<double>{0.5, 0.6}), std::domain_error);
}

TEST_CASE("inverse_transform worked examples") {
    CHECK(inverse_transform(UnconstrainedWeights{{0.0, 0.0}}) == std::vector<double>(2, 0.0));

    const UnconstrainedWeights w{{std::atanh(0.7), std::atanh(0.2)}};
    const auto alpha = inverse_transform(w);
    CHECK(alpha[0] == Catch::Approx(0.56).margin(1e-12));  // 0.7 - 0.2 * 0.7
    CHECK(alpha[1] == Catch::Approx(0.2).margin(1e-12));
}

TEST_CASE("saturated weights still map into the stationary region") {
    const auto alpha = inverse_transform(UnconstrainedWeights{{1e6}});
    REQUIRE(alpha[0] < 1.0);
    CHECK(is_strictly_stationary(alpha));

    SplitMix64 rng(31337);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t p = 1 + rep % 5;
        UnconstrainedWeights w;
        for (std::size_t k = 0; k < p; ++k) {
            w.values.push_back(rng.uniform(-1.0, 1.0) * std::pow(10.0, rng.uniform(0.0, 3.0)));
        }
        const auto a = inverse_transform(w);
        const auto s = try_dl_inverse(a);
        REQUIRE(s.has_value());
        REQUIRE(s->valid());
    }
}

TEST_CASE("transform and inverse_transform are mutual inverses") {
    SplitMix64 rng(2);
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t p = 1 + rep % 10;
        const auto alpha = dl_forward(testutil::sample_pacf(p, rng));
        const auto back = inverse_transform(transform(alpha));
        for (std::size_t k = 0; k < p; ++k) {
            REQUIRE(std::abs(back[k] - alpha[k]) < 1e-10);
        }
    }
}

TEST_CASE("non-finite weights are rejected") {
    CHECK_THROWS_AS(inverse_transform(UnconstrainedWeights{{std::nan("")}}),
                    std::invalid_argument);
}
