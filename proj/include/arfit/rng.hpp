#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace arfit {

namespace detail {

/// SplitMix64 finalizer (Stafford mix 13).
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

}  // namespace detail

/// Counter-based SplitMix64 generator. Cheap to construct, and substreams
/// derived with derive_stream are statistically independent, so any series
/// in a plan can be regenerated in isolation.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return detail::mix64(state_);
    }

    /// Uniform double in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in (0, 1) (never exactly 0, safe under log).
    double next_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    /// Standard normal via Box-Muller (two fresh uniforms per call).
    double normal() {
        const double u1 = next_open();
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Gamma(shape, 1) for shape >= 1, Marsaglia-Tsang squeeze method.
    double gamma(double shape) {
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        while (true) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = next_open();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Beta(a, b) as Ga / (Ga + Gb); requires a, b >= 1.
    double beta(double a, double b) {
        const double ga = gamma(a);
        const double gb = gamma(b);
        return ga / (ga + gb);
    }

private:
    std::uint64_t state_;
};

/// Derive a substream seed from a master seed and a list of stream
/// coordinates. Each coordinate is folded in as
///   s = mix64(s ^ (coordinate + 0x9E3779B97F4A7C15)),
/// so the result is a pure function of (seed, coordinates) and unrelated
/// streams never collide in practice.
inline std::uint64_t derive_stream(std::uint64_t seed,
                                   std::initializer_list<std::uint64_t> coordinates) {
    std::uint64_t s = seed;
    for (std::uint64_t w : coordinates) {
        s = detail::mix64(s ^ (w + 0x9E3779B97F4A7C15ULL));
    }
    return s;
}

}  // namespace arfit
