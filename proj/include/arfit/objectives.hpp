#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "arfit/transform.hpp"
#include "arfit/types.hpp"

namespace arfit {

enum class Objective { mse, nll };

/// Cost value and gradient with respect to the unconstrained weights.
struct CostEvaluation {
    double cost = 0.0;
    std::vector<double> gradient;
    double residual_sse = 0.0;
};

/// One-step-ahead predictions xhat_{p+1}..xhat_T from the sliding-window
/// lag construction: xhat_t = sum_{i=1}^p a_i x_{t-i}.
inline std::vector<double> predict(const TimeSeries& series,
                                   std::span<const double> coefficients) {
    const auto& x = series.values;
    const std::size_t p = coefficients.size();
    const std::size_t n = x.size();
    if (n <= p) throw std::invalid_argument("predict: series length must exceed order");

    std::vector<double> xhat(n - p, 0.0);
    for (std::size_t t = p; t < n; ++t) {
        double acc = 0.0;
        for (std::size_t i = 1; i <= p; ++i) {
            acc += coefficients[i - 1] * x[t - i];
        }
        xhat[t - p] = acc;
    }
    return xhat;
}

namespace detail {

inline double residual_sse(const TimeSeries& series, std::span<const double> coefficients) {
    const auto xhat = predict(series, coefficients);
    const auto& x = series.values;
    const std::size_t p = coefficients.size();
    double sse = 0.0;
    for (std::size_t t = p; t < x.size(); ++t) {
        const double e = x[t] - xhat[t - p];
        sse += e * e;
    }
    return sse;
}

}  // namespace detail

/// MSE cost sum_{t=p+1}^T (x_t - xhat_t)^2 / (T - p - 1). The denominator
/// is one less than the number of residuals; it rescales the cost without
/// moving the minimizer.
inline double mse_cost(const TimeSeries& series, std::span<const double> coefficients) {
    const std::size_t p = coefficients.size();
    if (series.length() <= p + 1) {
        throw std::invalid_argument("mse_cost: series length must exceed order + 1");
    }
    return detail::residual_sse(series, coefficients) /
           static_cast<double>(series.length() - p - 1);
}

/// Negative conditional Gaussian log-likelihood with the innovation variance
/// profiled out: (n/2) log(2 pi sse/n) + n/2 with n = T - p. Monotone in the
/// residual SSE, so its minimizer coincides with the MSE minimizer. A zero
/// SSE is degenerate and reported as -infinity.
inline double conditional_nll(const TimeSeries& series, std::span<const double> coefficients) {
    const std::size_t p = coefficients.size();
    if (series.length() <= p) {
        throw std::invalid_argument("conditional_nll: series length must exceed order");
    }
    const double sse = detail::residual_sse(series, coefficients);
    const double n = static_cast<double>(series.length() - p);
    if (!(sse > 0.0)) return -std::numeric_limits<double>::infinity();
    return 0.5 * n * std::log(2.0 * std::numbers::pi * sse / n) + 0.5 * n;
}

namespace detail {

/// Adjoint of the Durbin-Levinson recursion: given dC/dalpha at the order-p
/// row, accumulate dC/ds by walking the recursion in reverse. The forward
/// step a[k,j] = a[k-1,j] - s_k a[k-1,k-j] contributes
///   sbar_k   += -abar[k,j] * a[k-1,k-j]
///   abar[k-1,i] = abar[k,i] - s_k abar[k,k-i].
inline std::vector<double> dl_reverse_gradient(std::span<const double> pacf,
                                               std::span<const double> alpha_bar) {
    const std::size_t p = pacf.size();
    // Forward pass, keeping every intermediate row.
    std::vector<std::vector<double>> rows(p);
    std::vector<double> a(p, 0.0), prev(p, 0.0);
    for (std::size_t k = 1; k <= p; ++k) {
        const double sk = pacf[k - 1];
        for (std::size_t j = 1; j < k; ++j) prev[j - 1] = a[j - 1];
        a[k - 1] = sk;
        for (std::size_t j = 1; j < k; ++j) a[j - 1] = prev[j - 1] - sk * prev[k - j - 1];
        rows[k - 1].assign(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k));
    }

    std::vector<double> sbar(p, 0.0);
    std::vector<double> abar(alpha_bar.begin(), alpha_bar.end());
    for (std::size_t k = p; k >= 1; --k) {
        double sb = abar[k - 1];
        if (k > 1) {
            const auto& prev_row = rows[k - 2];
            for (std::size_t j = 1; j < k; ++j) {
                sb -= abar[j - 1] * prev_row[k - j - 1];
            }
            const double sk = pacf[k - 1];
            std::vector<double> next(k - 1, 0.0);
            for (std::size_t i = 1; i < k; ++i) {
                next[i - 1] = abar[i - 1] - sk * abar[k - i - 1];
            }
            abar = std::move(next);
        }
        sbar[k - 1] = sb;
    }
    return sbar;
}

}  // namespace detail

/// Cost and exact gradient at alpha = inverse_transform(w), propagated back
/// through the chain dC/dw = dC/dalpha * dalpha/ds * ds/dw with
/// ds_k/dw_k = 1 - tanh^2(w_k).
inline CostEvaluation cost_and_gradient(const TimeSeries& series,
                                        const UnconstrainedWeights& weights,
                                        Objective objective) {
    const std::size_t p = weights.size();
    const std::size_t n = series.length();
    if (n <= p + 1) {
        throw std::invalid_argument("cost_and_gradient: series length must exceed order + 1");
    }

    const Pacf pacf = weights_to_pacf(weights);
    const std::vector<double> alpha = dl_forward(pacf);
    const auto& x = series.values;

    // Residuals and SSE.
    double sse = 0.0;
    std::vector<double> resid(n - p, 0.0);
    for (std::size_t t = p; t < n; ++t) {
        double acc = 0.0;
        for (std::size_t i = 1; i <= p; ++i) acc += alpha[i - 1] * x[t - i];
        const double e = x[t] - acc;
        resid[t - p] = e;
        sse += e * e;
    }

    // dSSE/dalpha_j = -2 sum_t e_t x_{t-j}.
    std::vector<double> sse_grad(p, 0.0);
    for (std::size_t j = 1; j <= p; ++j) {
        double acc = 0.0;
        for (std::size_t t = p; t < n; ++t) acc += resid[t - p] * x[t - j];
        sse_grad[j - 1] = -2.0 * acc;
    }

    CostEvaluation eval;
    eval.residual_sse = sse;
    std::vector<double> alpha_bar(p, 0.0);
    if (objective == Objective::mse) {
        const double denom = static_cast<double>(n - p - 1);
        eval.cost = sse / denom;
        for (std::size_t j = 0; j < p; ++j) alpha_bar[j] = sse_grad[j] / denom;
    } else {
        const double m = static_cast<double>(n - p);
        if (!(sse > 0.0)) {
            eval.cost = -std::numeric_limits<double>::infinity();
            eval.gradient.assign(p, 0.0);
            return eval;
        }
        eval.cost = 0.5 * m * std::log(2.0 * std::numbers::pi * sse / m) + 0.5 * m;
        const double scale = 0.5 * m / sse;
        for (std::size_t j = 0; j < p; ++j) alpha_bar[j] = scale * sse_grad[j];
    }

    std::vector<double> sbar = detail::dl_reverse_gradient(pacf.values, alpha_bar);
    eval.gradient.assign(p, 0.0);
    for (std::size_t k = 0; k < p; ++k) {
        const double s = pacf.values[k];
        eval.gradient[k] = sbar[k] * (1.0 - s * s);
    }
    return eval;
}

}  // namespace arfit
