#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "arfit/types.hpp"

namespace arfit {

/// Map partial autocorrelations to AR coefficients via the Durbin-Levinson
/// recursion
///
///   a[k,k] = s_k,
///   a[k,j] = a[k-1,j] - s_k * a[k-1,k-j],   j = 1..k-1,
///
/// returning the order-p row a[p,1..p]. Any pacf with all |s_k| < 1 maps to
/// a stationary coefficient vector; this is the parameterization used to
/// train in an unconstrained space.
inline std::vector<double> dl_forward(const Pacf& pacf) {
    for (double s : pacf.values) {
        if (!(std::abs(s) < 1.0)) {
            throw std::domain_error("dl_forward: pacf value outside (-1, 1)");
        }
    }
    const std::size_t p = pacf.order();
    std::vector<double> a(p, 0.0);
    std::vector<double> prev(p, 0.0);
    for (std::size_t k = 1; k <= p; ++k) {
        const double sk = pacf.values[k - 1];
        for (std::size_t j = 1; j < k; ++j) prev[j - 1] = a[j - 1];
        a[k - 1] = sk;
        for (std::size_t j = 1; j < k; ++j) {
            a[j - 1] = prev[j - 1] - sk * prev[k - j - 1];
        }
    }
    return a;
}

/// Inverse recursion: recover the pacf from order-p coefficients using the
/// down-step a[k-1,j] = (a[k,j] + a[k,k] * a[k,k-j]) / (1 - a[k,k]^2).
/// Returns nullopt when some intermediate |a[k,k]| >= 1, i.e. the input is
/// not a stationary coefficient vector.
inline std::optional<Pacf> try_dl_inverse(std::span<const double> coefficients) {
    const std::size_t p = coefficients.size();
    Pacf out;
    out.values.assign(p, 0.0);
    std::vector<double> cur(coefficients.begin(), coefficients.end());
    std::vector<double> prev(p, 0.0);
    for (std::size_t k = p; k >= 1; --k) {
        const double sk = cur[k - 1];
        if (!(std::abs(sk) < 1.0) || !std::isfinite(sk)) return std::nullopt;
        out.values[k - 1] = sk;
        const double denom = 1.0 - sk * sk;
        for (std::size_t j = 1; j < k; ++j) {
            prev[j - 1] = (cur[j - 1] + sk * cur[k - j - 1]) / denom;
        }
        for (std::size_t j = 1; j < k; ++j) cur[j - 1] = prev[j - 1];
    }
    return out;
}

/// Throwing variant of try_dl_inverse for callers that require stationarity.
inline Pacf dl_inverse(std::span<const double> coefficients) {
    auto s = try_dl_inverse(coefficients);
    if (!s) {
        throw std::domain_error("dl_inverse: coefficients are not stationary");
    }
    return *std::move(s);
}

/// Solve the Yule-Walker system for rho_1..rho_p by Levinson recursion.
/// Returns both the order-p coefficients and the pacf sequence produced on
/// the way; with a biased (positive-definite) sample acf every |s_k| < 1.
struct YuleWalkerSolution {
    std::vector<double> coefficients;
    Pacf pacf;
};

inline YuleWalkerSolution yule_walker_solve(const Acf& acf, std::size_t order) {
    if (acf.lags.size() < order + 1) {
        throw std::invalid_argument("yule_walker_solve: acf too short for requested order");
    }
    const auto& rho = acf.lags;
    YuleWalkerSolution sol;
    sol.coefficients.assign(order, 0.0);
    sol.pacf.values.assign(order, 0.0);
    std::vector<double> prev(order, 0.0);
    double err = 1.0;  // prediction error of the order-(k-1) model, rho_0 units
    for (std::size_t k = 1; k <= order; ++k) {
        double num = rho[k];
        for (std::size_t j = 1; j < k; ++j) num -= sol.coefficients[j - 1] * rho[k - j];
        double sk = num / err;
        // A positive-definite Toeplitz system keeps |s_k| < 1; clamp guards
        // against degenerate numerical input so the contract always holds.
        constexpr double kBound = 1.0 - 1e-12;
        if (!std::isfinite(sk)) sk = 0.0;
        if (sk > kBound) sk = kBound;
        if (sk < -kBound) sk = -kBound;
        for (std::size_t j = 1; j < k; ++j) prev[j - 1] = sol.coefficients[j - 1];
        sol.coefficients[k - 1] = sk;
        for (std::size_t j = 1; j < k; ++j) {
            sol.coefficients[j - 1] = prev[j - 1] - sk * prev[k - j - 1];
        }
        sol.pacf.values[k - 1] = sk;
        err *= 1.0 - sk * sk;
    }
    return sol;
}

}  // namespace arfit
