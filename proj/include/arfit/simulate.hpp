#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "arfit/csv.hpp"
#include "arfit/durbin_levinson.hpp"
#include "arfit/rng.hpp"
#include "arfit/roots.hpp"
#include "arfit/types.hpp"

namespace arfit {

/// One order's worth of simulation work: n_processes random stationary
/// processes, n_repetitions series each, raw_length points per series of
/// which the first burn_in are discarded.
struct SimulationPlan {
    std::size_t order = 1;
    std::size_t n_processes = 1;
    std::size_t n_repetitions = 1;
    std::size_t raw_length = 1500;
    std::size_t burn_in = 500;
    std::uint64_t seed = 0;
    InnovationSpec innovation{};

    std::size_t retained_length() const { return raw_length - burn_in; }
    std::size_t series_count() const { return n_processes * n_repetitions; }

    void validate() const {
        if (order < 1) throw std::invalid_argument("SimulationPlan: order must be >= 1");
        if (n_processes < 1 || n_repetitions < 1 || raw_length < 1) {
            throw std::invalid_argument("SimulationPlan: counts must be >= 1");
        }
        if (raw_length <= burn_in) {
            throw std::invalid_argument("SimulationPlan: raw_length must exceed burn_in");
        }
        innovation.validate();
    }
};

namespace detail {

// Stream tags keeping process draws and innovation draws on disjoint substreams.
inline constexpr std::uint64_t kProcessStreamTag = 0x70726F63;  // "proc"
inline constexpr std::uint64_t kSeriesStreamTag = 0x73657269;   // "seri"

}  // namespace detail

/// Draw a stationary AR(p) process uniformly over the stationarity region:
/// u_k ~ Beta((k+1)/2, k/2 + 1) mapped to the pacf s_k = 2 u_k - 1, then
/// converted to coefficients with the Durbin-Levinson recursion. The image
/// of (-1,1)^p under the recursion is exactly the stationary region, so no
/// rejection step is needed.
inline ArProcess sample_stationary_process(std::size_t order, SplitMix64& rng,
                                           InnovationSpec innovation = {}) {
    if (order < 1) throw std::invalid_argument("sample_stationary_process: order must be >= 1");
    Pacf pacf;
    pacf.values.reserve(order);
    for (std::size_t k = 1; k <= order; ++k) {
        const double u = rng.beta((static_cast<double>(k) + 1.0) / 2.0,
                                  static_cast<double>(k) / 2.0 + 1.0);
        pacf.values.push_back(2.0 * u - 1.0);
    }
    ArProcess process;
    process.coefficients = dl_forward(pacf);
    process.innovation = innovation;
    return process;
}

/// Simulate x_t = sum_i a_i x_{t-i} + eps_t with zero initial state,
/// dropping the first burn_in points. eps_t ~ N(mean, variance).
inline TimeSeries generate_series(const ArProcess& process, std::size_t raw_length,
                                  std::size_t burn_in, SplitMix64& rng) {
    process.innovation.validate();
    if (raw_length <= burn_in) {
        throw std::invalid_argument("generate_series: raw_length must exceed burn_in");
    }
    if (!is_strictly_stationary(process.coefficients)) {
        throw std::domain_error("generate_series: process is not stationary");
    }
    const std::size_t p = process.order();
    const double sd = std::sqrt(process.innovation.variance);

    std::vector<double> x(raw_length, 0.0);
    for (std::size_t t = 0; t < raw_length; ++t) {
        double acc = rng.normal(process.innovation.mean, sd);
        for (std::size_t i = 1; i <= p && i <= t; ++i) {
            acc += process.coefficients[i - 1] * x[t - i];
        }
        x[t] = acc;
    }
    TimeSeries series;
    series.values.assign(x.begin() + static_cast<std::ptrdiff_t>(burn_in), x.end());
    return series;
}

/// One (process, repetition) cell of a plan, regenerable in isolation.
struct PlanItem {
    std::size_t process_index = 0;
    std::size_t repetition_index = 0;
    std::uint64_t series_seed = 0;
    ArProcess process;
    TimeSeries series;
};

/// Generate plan cell (i, j). The process depends only on (seed, order, i);
/// the innovations only on (seed, order, i, j). Both are pure functions of
/// the plan, so parallel callers and isolated reruns agree bit for bit.
inline PlanItem plan_item(const SimulationPlan& plan, std::size_t process_index,
                          std::size_t repetition_index) {
    plan.validate();
    if (process_index >= plan.n_processes || repetition_index >= plan.n_repetitions) {
        throw std::invalid_argument("plan_item: index out of range");
    }
    PlanItem item;
    item.process_index = process_index;
    item.repetition_index = repetition_index;

    SplitMix64 process_rng(derive_stream(
        plan.seed, {plan.order, process_index, detail::kProcessStreamTag}));
    item.process = sample_stationary_process(plan.order, process_rng, plan.innovation);

    item.series_seed = derive_stream(
        plan.seed, {plan.order, process_index, repetition_index, detail::kSeriesStreamTag});
    SplitMix64 series_rng(item.series_seed);
    item.series = generate_series(item.process, plan.raw_length, plan.burn_in, series_rng);
    item.series.origin = SeriesOrigin{item.process, item.series_seed};
    return item;
}

/// Run a full plan in (process, repetition) order, invoking the sink for
/// each generated series.
inline void run_plan(const SimulationPlan& plan,
                     const std::function<void(const PlanItem&)>& sink) {
    plan.validate();
    for (std::size_t i = 0; i < plan.n_processes; ++i) {
        for (std::size_t j = 0; j < plan.n_repetitions; ++j) {
            sink(plan_item(plan, i, j));
        }
    }
}

/// Convenience variant collecting every item.
inline std::vector<PlanItem> run_plan(const SimulationPlan& plan) {
    std::vector<PlanItem> items;
    items.reserve(plan.series_count());
    run_plan(plan, [&](const PlanItem& item) { items.push_back(item); });
    return items;
}

/// Series dump format: one row per retained value, with the generating
/// coefficients repeated (semicolon-joined) so the file stands alone.
inline std::string series_dump_csv(const SimulationPlan& plan, std::span<const PlanItem> items) {
    std::string out = "series_id,order,process_coeffs,value_index,value\n";
    for (const PlanItem& item : items) {
        const std::uint64_t series_id =
            item.process_index * plan.n_repetitions + item.repetition_index;
        const std::string prefix = csv::format_u64(series_id) + ',' +
                                   csv::format_u64(plan.order) + ',' +
                                   csv::join_doubles(item.process.coefficients) + ',';
        for (std::size_t v = 0; v < item.series.values.size(); ++v) {
            out += prefix;
            out += csv::format_u64(v);
            out += ',';
            out += csv::format_double(item.series.values[v]);
            out += '\n';
        }
    }
    return out;
}

}  // namespace arfit
