#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

#include "arfit/types.hpp"

namespace arfit {

/// Sample autocorrelation of the mean-centered series, lags 0..max_lag.
/// Uses the biased (divide-by-T) autocovariance, which keeps the implied
/// Toeplitz matrix positive definite for Yule-Walker fitting.
inline Acf sample_acf(const TimeSeries& series, std::size_t max_lag) {
    const auto& x = series.values;
    const std::size_t n = x.size();
    if (n == 0) throw std::invalid_argument("sample_acf: empty series");
    if (max_lag >= n) throw std::invalid_argument("sample_acf: max_lag must be < series length");

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);

    double c0 = 0.0;
    for (double v : x) c0 += (v - mean) * (v - mean);
    c0 /= static_cast<double>(n);
    if (!(c0 > 0.0) || !std::isfinite(c0)) {
        throw std::domain_error("sample_acf: series has zero variance");
    }

    Acf acf;
    acf.lags.assign(max_lag + 1, 0.0);
    acf.lags[0] = 1.0;
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double ck = 0.0;
        for (std::size_t t = 0; t + k < n; ++t) {
            ck += (x[t] - mean) * (x[t + k] - mean);
        }
        ck /= static_cast<double>(n);
        acf.lags[k] = ck / c0;
    }
    return acf;
}

}  // namespace arfit
