#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "arfit/acf.hpp"
#include "arfit/durbin_levinson.hpp"
#include "arfit/metrics.hpp"
#include "arfit/objectives.hpp"
#include "arfit/optimize.hpp"
#include "arfit/roots.hpp"
#include "arfit/spectrum.hpp"
#include "arfit/transform.hpp"
#include "arfit/types.hpp"

namespace arfit {

enum class EstimationMethod { yw, gd, cml };

inline const char* to_string(EstimationMethod method) {
    switch (method) {
        case EstimationMethod::yw: return "yw";
        case EstimationMethod::gd: return "gd";
        case EstimationMethod::cml: return "cml";
    }
    return "unknown";
}

struct EstimationResult {
    EstimationMethod method = EstimationMethod::yw;
    std::vector<double> coefficients;
    Pacf pacf;
    bool converged = false;
    std::optional<FailureReason> failure_reason;
    std::size_t epochs = 0;
    std::chrono::nanoseconds wall_time{0};
    double final_mse = std::numeric_limits<double>::quiet_NaN();
    double final_perplexity = std::numeric_limits<double>::quiet_NaN();
    double max_abs_inverse_root = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline void fill_fit_metrics(EstimationResult& result, const TimeSeries& series) {
    result.max_abs_inverse_root =
        characteristic_roots(std::span<const double>(result.coefficients)).max_abs_inverse_root;
    if (series.length() > result.coefficients.size() + 1) {
        result.final_mse = mse_cost(series, result.coefficients);
    }
    if (series.length() > result.coefficients.size()) {
        result.final_perplexity = conditional_nll(series, result.coefficients);
    }
}

inline UnconstrainedWeights weights_from_pacf(const Pacf& pacf) {
    UnconstrainedWeights w;
    w.values.reserve(pacf.values.size());
    for (double s : pacf.values) {
        w.values.push_back(std::atanh(clamp_pacf(s)));
    }
    return w;
}

}  // namespace detail

/// Yule-Walker estimate: biased sample acf, Levinson solve. The shared
/// starting point of both iterative estimators; always stationary.
inline EstimationResult estimate_yw(const TimeSeries& series, std::size_t order) {
    if (series.length() <= order) {
        throw std::invalid_argument("estimate_yw: series length must exceed order");
    }
    const auto start = std::chrono::steady_clock::now();
    const Acf acf = sample_acf(series, order);
    YuleWalkerSolution sol = yule_walker_solve(acf, order);
    const auto end = std::chrono::steady_clock::now();

    EstimationResult result;
    result.method = EstimationMethod::yw;
    result.coefficients = std::move(sol.coefficients);
    result.pacf = std::move(sol.pacf);
    result.converged = true;
    result.epochs = 0;
    result.wall_time = end - start;
    detail::fill_fit_metrics(result, series);
    return result;
}

/// Gradient-descent estimator: Yule-Walker start mapped through
/// arctanh(pacf), full-batch Adam on the MSE cost, estimate mapped back with
/// DL(tanh(w)). The reparameterization keeps every iterate stationary. Wall
/// time covers the whole procedure including initialization.
inline EstimationResult estimate_gd(const TimeSeries& series, std::size_t order,
                                    const OptimizerConfig& config = {},
                                    const StoppingCriterion& criterion = {}) {
    if (series.length() <= order + 1) {
        throw std::invalid_argument("estimate_gd: series length must exceed order + 1");
    }
    const auto start = std::chrono::steady_clock::now();
    const Acf acf = sample_acf(series, order);
    const YuleWalkerSolution init = yule_walker_solve(acf, order);
    const UnconstrainedWeights w0 = detail::weights_from_pacf(init.pacf);

    auto eval = [&series](const UnconstrainedWeights& w) {
        return cost_and_gradient(series, w, Objective::mse);
    };
    OptimRun run = adam_minimize(eval, w0, config, criterion);
    const auto end = std::chrono::steady_clock::now();

    EstimationResult result;
    result.method = EstimationMethod::gd;
    result.coefficients = inverse_transform(run.final_weights);
    result.pacf = weights_to_pacf(run.final_weights);
    result.converged = run.converged;
    result.failure_reason = run.failure_reason;
    result.epochs = run.epochs_used;
    result.wall_time = end - start;
    detail::fill_fit_metrics(result, series);
    return result;
}

/// Conditional-maximum-likelihood baseline: same Yule-Walker start, BFGS on
/// the profiled conditional negative log-likelihood in weight space. On
/// failure the best finite iterate is still reported, flagged not-converged,
/// so root-geometry forensics remain possible.
inline EstimationResult estimate_cml(const TimeSeries& series, std::size_t order,
                                     const OptimizerConfig& config = {},
                                     const StoppingCriterion& criterion = {}) {
    if (series.length() <= order + 1) {
        throw std::invalid_argument("estimate_cml: series length must exceed order + 1");
    }
    const auto start = std::chrono::steady_clock::now();
    const Acf acf = sample_acf(series, order);
    const YuleWalkerSolution init = yule_walker_solve(acf, order);
    const UnconstrainedWeights w0 = detail::weights_from_pacf(init.pacf);

    auto eval = [&series](const UnconstrainedWeights& w) {
        return cost_and_gradient(series, w, Objective::nll);
    };
    OptimRun run = bfgs_minimize(eval, w0, config, criterion);
    const auto end = std::chrono::steady_clock::now();

    EstimationResult result;
    result.method = EstimationMethod::cml;
    result.coefficients = inverse_transform(run.final_weights);
    result.pacf = weights_to_pacf(run.final_weights);
    result.converged = run.converged;
    result.failure_reason = run.failure_reason;
    result.epochs = run.epochs_used;
    result.wall_time = end - start;
    detail::fill_fit_metrics(result, series);
    return result;
}

/// Join a series' two estimates against the generating process into one
/// comparison row. Deltas are CML - GD and absent when CML failed.
inline PairedComparison compare_pair(const TimeSeries&, const ArProcess& truth,
                                     const EstimationResult& gd, const EstimationResult& cml) {
    PairedComparison cmp;
    cmp.order = truth.order();
    cmp.gd_converged = gd.converged;
    cmp.cml_converged = cml.converged;
    cmp.relative_errors_gd = relative_error(truth.coefficients, gd.coefficients);
    cmp.relative_errors_cml = relative_error(truth.coefficients, cml.coefficients);
    if (cml.converged) {
        cmp.delta_mse = cml.final_mse - gd.final_mse;
        cmp.delta_perplexity = cml.final_perplexity - gd.final_perplexity;
    }
    const auto gd_ns = gd.wall_time.count();
    const auto cml_ns = cml.wall_time.count();
    if (gd_ns > 0 && cml_ns > 0) {
        cmp.time_ratio = static_cast<double>(cml_ns) / static_cast<double>(gd_ns);
    }
    try {
        cmp.r2_truth = r_squared(truth);
    } catch (const std::exception&) {
        // near-unit-root truth: quadrature may not reach tolerance; leave NaN
    }
    cmp.r2_gd = fitted_r_squared(gd.coefficients);
    cmp.r2_cml = fitted_r_squared(cml.coefficients);
    return cmp;
}

}  // namespace arfit
