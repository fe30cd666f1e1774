#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

#include "arfit/roots.hpp"
#include "arfit/types.hpp"

namespace arfit {

/// Result of the power-spectrum quadrature: the value of
/// integral_0^{1/2} |1 - sum_k a_k e^{-2 pi i k w}|^{-2} dw
/// together with the relative change of the last refinement.
struct QuadratureResult {
    double value = 0.0;
    double rel_change = 0.0;
    std::size_t nodes = 0;
    bool converged = false;
};

namespace detail {

inline double spectrum_integrand(std::span<const double> coeffs, double omega) {
    double re = 1.0;
    double im = 0.0;
    for (std::size_t k = 1; k <= coeffs.size(); ++k) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) * omega;
        re -= coeffs[k - 1] * std::cos(theta);
        im += coeffs[k - 1] * std::sin(theta);
    }
    return 1.0 / (re * re + im * im);
}

}  // namespace detail

/// Trapezoid rule on [0, 1/2] with interval doubling. The integrand is a
/// smooth periodic function, so the trapezoid sum converges spectrally once
/// the grid resolves the near-root peaks; refinement stops when the relative
/// change drops below rel_tol or the node budget (2^20 intervals) runs out.
inline QuadratureResult spectrum_integral(std::span<const double> coeffs,
                                          double rel_tol = 1e-10) {
    constexpr std::size_t kMaxIntervals = std::size_t{1} << 20;
    const double a = 0.0, b = 0.5;

    std::size_t n = 64;
    const double f0 = detail::spectrum_integrand(coeffs, a);
    const double f1 = detail::spectrum_integrand(coeffs, b);
    double h = (b - a) / static_cast<double>(n);
    double interior = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        interior += detail::spectrum_integrand(coeffs, a + h * static_cast<double>(i));
    }
    double estimate = h * (0.5 * (f0 + f1) + interior);

    QuadratureResult result;
    while (true) {
        // Add the midpoints of the current grid; previous evaluations are reused.
        double mids = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mids += detail::spectrum_integrand(coeffs, a + h * (static_cast<double>(i) + 0.5));
        }
        const double refined = 0.5 * estimate + 0.5 * h * mids;
        n *= 2;
        h *= 0.5;
        result.rel_change = std::abs(refined - estimate) /
                            std::max(std::abs(refined), std::numeric_limits<double>::min());
        estimate = refined;
        if (result.rel_change < rel_tol) {
            result.converged = true;
            break;
        }
        if (n >= kMaxIntervals) break;
    }
    result.value = estimate;
    result.nodes = n + 1;
    return result;
}

/// Process variance var(X_t) = sigma_eps^2 * 2 * integral of the inverse
/// squared transfer function over [0, 1/2]. Throws if the process is not
/// stationary or the quadrature cannot reach 1e-8 relative accuracy.
inline double theoretical_variance(const ArProcess& process) {
    process.innovation.validate();
    if (!is_strictly_stationary(process.coefficients)) {
        throw std::domain_error("theoretical_variance: process is not stationary");
    }
    const QuadratureResult q = spectrum_integral(process.coefficients);
    if (!q.converged || q.rel_change > 1e-8) {
        throw std::runtime_error(
            "theoretical_variance: quadrature did not converge (relative change " +
            std::to_string(q.rel_change) + " after " + std::to_string(q.nodes) + " nodes)");
    }
    return process.innovation.variance * 2.0 * q.value;
}

/// Coefficient of determination R^2 = 1 - sigma_eps^2 / var(X_t).
inline double r_squared(const ArProcess& process) {
    return 1.0 - process.innovation.variance / theoretical_variance(process);
}

}  // namespace arfit
