#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "arfit/objectives.hpp"
#include "helpers.hpp"

using namespace arfit;

namespace {

double cost_only(const TimeSeries& series, const UnconstrainedWeights& w, Objective objective) {
    const auto alpha = inverse_transform(w);
    return objective == Objective::mse ? mse_cost(series, alpha)
                                       : conditional_nll(series, alpha);
}

/// Central finite differences of the implemented cost, the independent
/// oracle for the hand-coded reverse accumulation.
std::vector<double> fd_gradient(const TimeSeries& series, const UnconstrainedWeights& w,
                                Objective objective, double h = 1e-6) {
    std::vector<double> grad(w.size(), 0.0);
    for (std::size_t j = 0; j < w.size(); ++j) {
        UnconstrainedWeights wp = w, wm = w;
        wp.values[j] += h;
        wm.values[j] -= h;
        grad[j] = (cost_only(series, wp, objective) - cost_only(series, wm, objective)) /
                  (2.0 * h);
    }
    return grad;
}

double vector_rel_error(const std::vector<double>& got, const std::vector<double>& want) {
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        diff = std::max(diff, std::abs(got[i] - want[i]));
        scale = std::max(scale, std::abs(want[i]));
    }
    return diff / std::max(scale, 1e-8);
}

}  // namespace

TEST_CASE("order-1 gradient is the scalar chain rule") {
    SplitMix64 rng(21);
    const TimeSeries series = testutil::gaussian_series(100, rng);
    const UnconstrainedWeights w{{0.6}};
    const CostEvaluation eval = cost_and_gradient(series, w, Objective::mse);

    // dC/dalpha via finite differences on the coefficient directly
    const double alpha = std::tanh(0.6);
    const double h = 1e-7;
    const double up = mse_cost(series, std::vector<double>{alpha + h});
    const double dn = mse_cost(series, std::vector<double>{alpha - h});
    const double dc_dalpha = (up - dn) / (2.0 * h);

    const double expected = dc_dalpha * (1.0 - alpha * alpha);
    CHECK(std::abs(eval.gradient[0] - expected) / std::abs(expected) < 1e-6);
}

TEST_CASE("analytic gradient matches central differences") {
    SplitMix64 rng(22);
    for (Objective objective : {Objective::mse, Objective::nll}) {
        double worst = 0.0;
        for (int rep = 0; rep < 60; ++rep) {
            const std::size_t p = 1 + rep % 5;
            const TimeSeries series = testutil::gaussian_series(200, rng);
            UnconstrainedWeights w;
            for (std::size_t k = 0; k < p; ++k) w.values.push_back(rng.uniform(-2.5, 2.5));
            const CostEvaluation eval = cost_and_gradient(series, w, objective);
            worst = std::max(worst,
                             vector_rel_error(eval.gradient, fd_gradient(series, w, objective)));
        }
        REQUIRE(worst < 1e-5);
    }
}
