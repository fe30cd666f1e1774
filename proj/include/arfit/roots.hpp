#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "arfit/types.hpp"

namespace arfit {

/// Classification margin: a coefficient vector counts as stationary only if
/// its largest inverse-root modulus stays below 1 by at least this much.
inline constexpr double kStationarityMargin = 1e-8;

/// Inverse characteristic roots, i.e. the zeros of
/// z^p - a_1 z^{p-1} - ... - a_p, computed as companion-matrix eigenvalues.
/// Stationary iff all moduli are < 1.
inline RootSet characteristic_roots(std::span<const double> coefficients) {
    RootSet out;
    const std::size_t p = coefficients.size();
    if (p == 0) return out;

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p),
                                                      static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i) {
        companion(0, static_cast<Eigen::Index>(i)) = coefficients[i];
    }
    for (std::size_t i = 1; i < p; ++i) {
        companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    }

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        out.solver_converged = false;
        out.max_abs_inverse_root = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    out.inverse_roots.reserve(p);
    double max_mod = 0.0;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const std::complex<double> z = solver.eigenvalues()(i);
        out.inverse_roots.push_back(z);
        max_mod = std::max(max_mod, std::abs(z));
    }
    out.max_abs_inverse_root = max_mod;
    return out;
}

inline RootSet characteristic_roots(const ArProcess& process) {
    return characteristic_roots(std::span<const double>(process.coefficients));
}

/// Largest inverse-root modulus, NaN if the eigensolver failed.
inline double max_abs_inverse_root(std::span<const double> coefficients) {
    return characteristic_roots(coefficients).max_abs_inverse_root;
}

/// Margin-based stationarity classification (see kStationarityMargin).
inline bool is_stationary(std::span<const double> coefficients) {
    const RootSet roots = characteristic_roots(coefficients);
    if (!roots.solver_converged) return false;
    return roots.max_abs_inverse_root < 1.0 - kStationarityMargin;
}

inline bool is_stationary(const ArProcess& process) {
    return is_stationary(std::span<const double>(process.coefficients));
}

/// Strict mathematical stationarity (no classification margin); used by
/// generation and spectral code, which only require moduli < 1.
inline bool is_strictly_stationary(std::span<const double> coefficients) {
    const RootSet roots = characteristic_roots(coefficients);
    return roots.solver_converged && roots.max_abs_inverse_root < 1.0;
}

}  // namespace arfit
