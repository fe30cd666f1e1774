#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace arfit {

/// Gaussian innovation parameters of an AR process.
struct InnovationSpec {
    double mean = 0.0;
    double variance = 1.0;

    void validate() const {
        if (!(variance > 0.0)) {
            throw std::invalid_argument("InnovationSpec: variance must be positive");
        }
    }
};

/// A stationary autoregressive process x_t = sum_i alpha_i x_{t-i} + eps_t.
///
/// Stationarity (all inverse characteristic roots strictly inside the unit
/// circle) is required by the operations that consume a process; it is not
/// enforced at construction so that diagnostic code can hold non-stationary
/// candidates.
struct ArProcess {
    std::vector<double> coefficients;
    InnovationSpec innovation{};

    std::size_t order() const { return coefficients.size(); }
};

/// Partial autocorrelations s_1..s_p. Valid iff every |s_k| < 1.
struct Pacf {
    std::vector<double> values;

    std::size_t order() const { return values.size(); }

    bool valid() const {
        for (double s : values) {
            if (!(std::abs(s) < 1.0)) return false;
        }
        return true;
    }
};

/// Inverse characteristic roots (zeros of z^p - a_1 z^{p-1} - ... - a_p).
/// The process is stationary iff max_abs_inverse_root < 1.
struct RootSet {
    std::vector<std::complex<double>> inverse_roots;
    double max_abs_inverse_root = 0.0;
    bool solver_converged = true;
};

/// Autocorrelation values rho_0..rho_K with rho_0 = 1.
struct Acf {
    std::vector<double> lags;
};

/// Where a simulated series came from, for reproducibility bookkeeping.
struct SeriesOrigin {
    ArProcess process;
    std::uint64_t seed = 0;
};

/// An observed sample x_1..x_T, optionally tagged with its generator.
struct TimeSeries {
    std::vector<double> values;
    std::optional<SeriesOrigin> origin;

    std::size_t length() const { return values.size(); }
};

}  // namespace arfit
