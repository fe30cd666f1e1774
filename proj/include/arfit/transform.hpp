#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "arfit/durbin_levinson.hpp"
#include "arfit/types.hpp"

namespace arfit {

/// Optimizer weights w in R^p; any finite value maps back to a stationary
/// coefficient vector through tanh followed by the Durbin-Levinson recursion.
struct UnconstrainedWeights {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
};

/// Pacf values are clamped to +/-(1 - 1e-12) before arctanh (and after tanh)
/// so boundary-touching inputs stay finite and the mapped process stays
/// strictly stationary under double rounding.
inline constexpr double kPacfClamp = 1.0 - 1e-12;

namespace detail {

inline double clamp_pacf(double s) {
    if (s > kPacfClamp) return kPacfClamp;
    if (s < -kPacfClamp) return -kPacfClamp;
    return s;
}

}  // namespace detail

/// w = arctanh(DL^{-1}(alpha)): stationary coefficients to unconstrained weights.
inline UnconstrainedWeights transform(std::span<const double> coefficients) {
    const Pacf pacf = dl_inverse(coefficients);  // throws on non-stationary input
    UnconstrainedWeights w;
    w.values.reserve(pacf.values.size());
    for (double s : pacf.values) {
        w.values.push_back(std::atanh(detail::clamp_pacf(s)));
    }
    return w;
}

/// alpha = DL(tanh(w)): unconstrained weights to stationary coefficients.
inline std::vector<double> inverse_transform(const UnconstrainedWeights& weights) {
    Pacf pacf;
    pacf.values.reserve(weights.size());
    for (double w : weights.values) {
        if (!std::isfinite(w)) {
            throw std::invalid_argument("inverse_transform: weight is not finite");
        }
        pacf.values.push_back(detail::clamp_pacf(std::tanh(w)));
    }
    return dl_forward(pacf);
}

/// The pacf underlying a weight vector (tanh of each component, clamped).
inline Pacf weights_to_pacf(const UnconstrainedWeights& weights) {
    Pacf pacf;
    pacf.values.reserve(weights.size());
    for (double w : weights.values) {
        pacf.values.push_back(detail::clamp_pacf(std::tanh(w)));
    }
    return pacf;
}

}  // namespace arfit
