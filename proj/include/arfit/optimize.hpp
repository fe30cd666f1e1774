#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "arfit/objectives.hpp"
#include "arfit/transform.hpp"

namespace arfit {

/// Relative-tolerance stopping rule shared by both optimizers.
struct StoppingCriterion {
    double reltol = 1e-6;
    std::size_t max_epochs = 10000;
};

enum class OptimMethod { adam, bfgs };

enum class FailureReason { non_finite_value, line_search_failure, max_epochs };

inline const char* to_string(FailureReason reason) {
    switch (reason) {
        case FailureReason::non_finite_value: return "non_finite_value";
        case FailureReason::line_search_failure: return "line_search_failure";
        case FailureReason::max_epochs: return "max_epochs";
    }
    return "unknown";
}

struct OptimizerConfig {
    OptimMethod method = OptimMethod::adam;
    double learning_rate = 0.05;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    // Wolfe line search (BFGS only).
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
    std::size_t max_line_search_steps = 50;
};

struct OptimRun {
    UnconstrainedWeights final_weights;
    bool converged = false;
    std::optional<FailureReason> failure_reason;
    std::size_t epochs_used = 0;
    double final_cost = 0.0;
    std::chrono::nanoseconds wall_time{0};
};

/// Stop when |C_t - C_{t-1}| < reltol * (|C_{t-1}| + reltol).
inline bool should_stop(double prev_cost, double curr_cost, const StoppingCriterion& criterion) {
    return std::abs(curr_cost - prev_cost) <
           criterion.reltol * (std::abs(prev_cost) + criterion.reltol);
}

namespace detail {

inline bool finite(const CostEvaluation& eval) {
    if (!std::isfinite(eval.cost)) return false;
    for (double g : eval.gradient) {
        if (!std::isfinite(g)) return false;
    }
    return true;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace detail

/// Full-batch Adam: one cost/gradient evaluation per epoch, bias-corrected
/// moment estimates, update w -= lr * mhat / (sqrt(vhat) + eps). Converged
/// means the relative-tolerance rule fired before the epoch budget ran out.
template <typename EvalFn>
OptimRun adam_minimize(EvalFn&& eval, const UnconstrainedWeights& w0,
                       const OptimizerConfig& config, const StoppingCriterion& criterion) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t p = w0.size();

    UnconstrainedWeights w = w0;
    std::vector<double> m(p, 0.0), v(p, 0.0);
    double prev_cost = 0.0;

    OptimRun run;
    for (std::size_t epoch = 1; epoch <= criterion.max_epochs; ++epoch) {
        const CostEvaluation e = eval(w);
        run.epochs_used = epoch;
        run.final_cost = e.cost;
        run.final_weights = w;
        if (!detail::finite(e)) {
            run.failure_reason = FailureReason::non_finite_value;
            break;
        }
        if (epoch >= 2 && should_stop(prev_cost, e.cost, criterion)) {
            run.converged = true;
            break;
        }
        if (epoch == criterion.max_epochs) {
            run.failure_reason = FailureReason::max_epochs;
            break;
        }
        const double bc1 = 1.0 - std::pow(config.adam_beta1, static_cast<double>(epoch));
        const double bc2 = 1.0 - std::pow(config.adam_beta2, static_cast<double>(epoch));
        for (std::size_t i = 0; i < p; ++i) {
            const double g = e.gradient[i];
            m[i] = config.adam_beta1 * m[i] + (1.0 - config.adam_beta1) * g;
            v[i] = config.adam_beta2 * v[i] + (1.0 - config.adam_beta2) * g * g;
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            w.values[i] -= config.learning_rate * mhat / (std::sqrt(vhat) + config.adam_epsilon);
        }
        prev_cost = e.cost;
    }
    run.wall_time = std::chrono::steady_clock::now() - start;
    return run;
}

/// Dense BFGS with a strong-Wolfe line search. One epoch is one outer
/// iteration; line-search probes do not count. A non-finite cost or gradient
/// at any probe aborts with non_finite_value; a search that exhausts its
/// probe budget aborts with line_search_failure. Either way the best finite
/// iterate seen so far is returned, flagged not-converged.
template <typename EvalFn>
OptimRun bfgs_minimize(EvalFn&& eval, const UnconstrainedWeights& w0,
                       const OptimizerConfig& config, const StoppingCriterion& criterion) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t p = w0.size();

    OptimRun run;
    run.final_weights = w0;

    UnconstrainedWeights w = w0;
    CostEvaluation cur = eval(w);
    run.final_cost = cur.cost;
    if (!detail::finite(cur)) {
        run.failure_reason = FailureReason::non_finite_value;
        run.epochs_used = 0;
        run.wall_time = std::chrono::steady_clock::now() - start;
        return run;
    }

    UnconstrainedWeights best_w = w;
    double best_cost = cur.cost;

    // Inverse Hessian approximation, row-major p x p, starts as identity.
    std::vector<double> H(p * p, 0.0);
    auto reset_h = [&] {
        std::fill(H.begin(), H.end(), 0.0);
        for (std::size_t i = 0; i < p; ++i) H[i * p + i] = 1.0;
    };
    reset_h();

    auto fail = [&](FailureReason reason, std::size_t epochs) {
        run.failure_reason = reason;
        run.epochs_used = epochs;
        run.final_weights = best_w;
        run.final_cost = best_cost;
        run.wall_time = std::chrono::steady_clock::now() - start;
        return run;
    };

    std::vector<double> direction(p, 0.0);
    for (std::size_t epoch = 1; epoch <= criterion.max_epochs; ++epoch) {
        run.epochs_used = epoch;

        for (std::size_t i = 0; i < p; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < p; ++j) acc -= H[i * p + j] * cur.gradient[j];
            direction[i] = acc;
        }
        double slope = detail::dot(direction, cur.gradient);
        if (slope >= 0.0) {
            reset_h();
            for (std::size_t i = 0; i < p; ++i) direction[i] = -cur.gradient[i];
            slope = -detail::dot(cur.gradient, cur.gradient);
            if (slope == 0.0) {
                // Zero gradient: stationary point, nothing left to improve.
                run.converged = true;
                break;
            }
        }

        // Strong-Wolfe search along `direction` (bracket then bisect).
        const double phi0 = cur.cost;
        const double dphi0 = slope;
        auto probe = [&](double step, CostEvaluation& out_eval, double& out_dphi) {
            UnconstrainedWeights trial = w;
            for (std::size_t i = 0; i < p; ++i) trial.values[i] += step * direction[i];
            out_eval = eval(trial);
            if (!detail::finite(out_eval)) return false;
            out_dphi = detail::dot(out_eval.gradient, direction);
            if (out_eval.cost < best_cost) {
                best_cost = out_eval.cost;
                best_w = trial;
            }
            return true;
        };

        std::size_t probes_left = config.max_line_search_steps;
        double step = 1.0, step_prev = 0.0;
        double phi_prev = phi0, dphi_prev = dphi0;
        double lo = -1.0, hi = -1.0, phi_lo = 0.0;
        double accepted_step = -1.0;
        CostEvaluation trial_eval;
        bool nonfinite = false;

        while (probes_left-- > 0) {
            double dphi = 0.0;
            if (!probe(step, trial_eval, dphi)) {
                nonfinite = true;
                break;
            }
            if (trial_eval.cost > phi0 + config.wolfe_c1 * step * dphi0 ||
                (step_prev > 0.0 && trial_eval.cost >= phi_prev)) {
                lo = step_prev;
                phi_lo = phi_prev;
                hi = step;
                break;
            }
            if (std::abs(dphi) <= -config.wolfe_c2 * dphi0) {
                accepted_step = step;
                break;
            }
            if (dphi >= 0.0) {
                lo = step;
                phi_lo = trial_eval.cost;
                hi = step_prev;
                break;
            }
            step_prev = step;
            phi_prev = trial_eval.cost;
            dphi_prev = dphi;
            step *= 2.0;
        }
        (void)dphi_prev;

        if (nonfinite) return fail(FailureReason::non_finite_value, epoch);
        if (accepted_step < 0.0 && lo < 0.0) {
            return fail(FailureReason::line_search_failure, epoch);
        }
        if (accepted_step < 0.0) {
            // Zoom phase: bisect [lo, hi] keeping the sufficient-decrease end in lo.
            while (probes_left-- > 0) {
                const double mid = 0.5 * (lo + hi);
                double dphi = 0.0;
                if (!probe(mid, trial_eval, dphi)) {
                    nonfinite = true;
                    break;
                }
                if (trial_eval.cost > phi0 + config.wolfe_c1 * mid * dphi0 ||
                    trial_eval.cost >= phi_lo) {
                    hi = mid;
                } else {
                    if (std::abs(dphi) <= -config.wolfe_c2 * dphi0) {
                        accepted_step = mid;
                        break;
                    }
                    if (dphi * (hi - lo) >= 0.0) hi = lo;
                    lo = mid;
                    phi_lo = trial_eval.cost;
                }
            }
            if (nonfinite) return fail(FailureReason::non_finite_value, epoch);
            if (accepted_step < 0.0) return fail(FailureReason::line_search_failure, epoch);
        }

        // Accept the step; trial_eval holds the evaluation at accepted_step.
        std::vector<double> s(p, 0.0), y(p, 0.0);
        for (std::size_t i = 0; i < p; ++i) {
            s[i] = accepted_step * direction[i];
            y[i] = trial_eval.gradient[i] - cur.gradient[i];
        }
        const double prev_cost = cur.cost;
        for (std::size_t i = 0; i < p; ++i) w.values[i] += s[i];
        cur = trial_eval;
        run.final_cost = cur.cost;
        run.final_weights = w;

        if (should_stop(prev_cost, cur.cost, criterion)) {
            run.converged = true;
            break;
        }
        if (epoch == criterion.max_epochs) {
            return fail(FailureReason::max_epochs, epoch);
        }

        const double ys = detail::dot(y, s);
        if (ys > 1e-12 * std::sqrt(detail::dot(y, y) * detail::dot(s, s))) {
            // H <- (I - r s y^T) H (I - r y s^T) + r s s^T, r = 1/ys.
            const double rho = 1.0 / ys;
            std::vector<double> hy(p, 0.0);
            for (std::size_t i = 0; i < p; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < p; ++j) acc += H[i * p + j] * y[j];
                hy[i] = acc;
            }
            const double yhy = detail::dot(y, hy);
            for (std::size_t i = 0; i < p; ++i) {
                for (std::size_t j = 0; j < p; ++j) {
                    H[i * p + j] += -rho * (s[i] * hy[j] + hy[i] * s[j]) +
                                    rho * (1.0 + rho * yhy) * s[i] * s[j];
                }
            }
        }
    }

    if (run.converged) {
        run.final_weights = w;
        run.final_cost = cur.cost;
    }
    run.wall_time = std::chrono::steady_clock::now() - start;
    return run;
}

}  // namespace arfit
