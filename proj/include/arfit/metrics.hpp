#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "arfit/objectives.hpp"
#include "arfit/spectrum.hpp"
#include "arfit/types.hpp"

namespace arfit {

/// One (series x method-pair) comparison row; deltas are CML - GD and the
/// time ratio is CML/GD. Delta entries are absent when CML failed.
struct PairedComparison {
    std::uint64_t series_id = 0;
    std::size_t order = 0;
    std::vector<std::optional<double>> relative_errors_gd;
    std::vector<std::optional<double>> relative_errors_cml;
    std::optional<double> delta_mse;
    std::optional<double> delta_perplexity;
    std::optional<double> time_ratio;
    double r2_truth = std::numeric_limits<double>::quiet_NaN();
    double r2_gd = std::numeric_limits<double>::quiet_NaN();
    double r2_cml = std::numeric_limits<double>::quiet_NaN();
    bool gd_converged = false;
    bool cml_converged = false;
};

struct BlandAltman {
    double mean_diff = 0.0;
    double sd_diff = 0.0;
    double lower_limit = 0.0;
    double upper_limit = 0.0;
    std::vector<std::size_t> outlier_ids;  // indices into the input diff vector
};

namespace detail {

/// Neumaier compensated sum, so aggregation order cannot move the result.
class CompensatedSum {
public:
    void add(double value) {
        const double t = sum_ + value;
        if (std::abs(sum_) >= std::abs(value)) {
            comp_ += (sum_ - t) + value;
        } else {
            comp_ += (value - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace detail

/// Per-coefficient |(a_i - ahat_i) / a_i|. Entries with |a_i| < 1e-8 are
/// undefined (reported as nullopt), neither zero nor infinite.
inline std::vector<std::optional<double>> relative_error(std::span<const double> truth,
                                                         std::span<const double> estimate) {
    if (truth.size() != estimate.size()) {
        throw std::invalid_argument("relative_error: length mismatch");
    }
    std::vector<std::optional<double>> out(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (std::abs(truth[i]) < 1e-8) continue;
        out[i] = std::abs((truth[i] - estimate[i]) / truth[i]);
    }
    return out;
}

/// Mean, sample SD (n-1) and mean +/- 1.96 SD agreement limits of a set of
/// paired differences; outliers are exactly the points strictly outside the
/// limits.
inline BlandAltman bland_altman(std::span<const double> diffs) {
    if (diffs.size() < 2) {
        throw std::invalid_argument("bland_altman: need at least 2 differences");
    }
    detail::CompensatedSum sum;
    for (double d : diffs) sum.add(d);
    const double mean = sum.value() / static_cast<double>(diffs.size());

    detail::CompensatedSum sq;
    for (double d : diffs) sq.add((d - mean) * (d - mean));
    const double sd = std::sqrt(sq.value() / static_cast<double>(diffs.size() - 1));

    BlandAltman ba;
    ba.mean_diff = mean;
    ba.sd_diff = sd;
    ba.lower_limit = mean - 1.96 * sd;
    ba.upper_limit = mean + 1.96 * sd;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        if (diffs[i] < ba.lower_limit || diffs[i] > ba.upper_limit) {
            ba.outlier_ids.push_back(i);
        }
    }
    return ba;
}

struct SuccessRow {
    std::size_t order = 0;
    std::size_t cml_success = 0;
    std::size_t cml_failure = 0;
    std::size_t gd_success = 0;
    std::size_t gd_failure = 0;
};

struct SuccessTable {
    std::vector<SuccessRow> rows;  // ascending order, plus totals in `total`
    SuccessRow total;
};

/// Success/failure counts per order and method, plus a totals row.
inline SuccessTable success_table(std::span<const PairedComparison> comparisons) {
    if (comparisons.empty()) throw std::invalid_argument("success_table: no records");
    SuccessTable table;
    for (const auto& c : comparisons) {
        auto it = std::find_if(table.rows.begin(), table.rows.end(),
                               [&](const SuccessRow& r) { return r.order == c.order; });
        if (it == table.rows.end()) {
            table.rows.push_back(SuccessRow{c.order, 0, 0, 0, 0});
            it = table.rows.end() - 1;
        }
        (c.cml_converged ? it->cml_success : it->cml_failure) += 1;
        (c.gd_converged ? it->gd_success : it->gd_failure) += 1;
    }
    std::sort(table.rows.begin(), table.rows.end(),
              [](const SuccessRow& a, const SuccessRow& b) { return a.order < b.order; });
    for (const auto& r : table.rows) {
        table.total.cml_success += r.cml_success;
        table.total.cml_failure += r.cml_failure;
        table.total.gd_success += r.gd_success;
        table.total.gd_failure += r.gd_failure;
    }
    return table;
}

struct Quartiles {
    double q1 = std::numeric_limits<double>::quiet_NaN();
    double median = std::numeric_limits<double>::quiet_NaN();
    double q3 = std::numeric_limits<double>::quiet_NaN();
    std::size_t n = 0;
};

/// Linear-interpolation quantile (R type 7) of the finite entries.
inline double quantile(std::vector<double> values, double q) {
    values.erase(std::remove_if(values.begin(), values.end(),
                                [](double v) { return !std::isfinite(v); }),
                 values.end());
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * q;
    const std::size_t i = static_cast<std::size_t>(h);
    if (i + 1 >= values.size()) return values.back();
    const double frac = h - static_cast<double>(i);
    return values[i] + frac * (values[i + 1] - values[i]);
}

inline Quartiles quartiles(const std::vector<double>& values) {
    Quartiles out;
    std::size_t finite = 0;
    for (double v : values) {
        if (std::isfinite(v)) ++finite;
    }
    out.n = finite;
    if (finite == 0) return out;
    out.q1 = quantile(values, 0.25);
    out.median = quantile(values, 0.5);
    out.q3 = quantile(values, 0.75);
    return out;
}

struct OrderScalingRow {
    std::size_t order = 0;
    bool cml_converged = false;
    std::size_t n = 0;
    Quartiles time_ratio;
    Quartiles delta_r2;        // r2_cml - r2_gd
    Quartiles delta_rel_error; // per-series mean of (RE_cml - RE_gd) over defined entries
};

/// Per (order, CML status): quartiles of the time ratio, the paired R^2
/// difference and the paired relative-error difference.
inline std::vector<OrderScalingRow> order_scaling_summary(
    std::span<const PairedComparison> comparisons) {
    if (comparisons.empty()) throw std::invalid_argument("order_scaling_summary: no records");

    std::vector<std::pair<std::size_t, bool>> keys;
    for (const auto& c : comparisons) {
        const std::pair<std::size_t, bool> key{c.order, c.cml_converged};
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    std::sort(keys.begin(), keys.end());

    std::vector<OrderScalingRow> rows;
    for (const auto& [order, status] : keys) {
        OrderScalingRow row;
        row.order = order;
        row.cml_converged = status;
        std::vector<double> ratios, dr2, drel;
        for (const auto& c : comparisons) {
            if (c.order != order || c.cml_converged != status) continue;
            ++row.n;
            if (c.time_ratio) ratios.push_back(*c.time_ratio);
            if (c.cml_converged) {
                dr2.push_back(c.r2_cml - c.r2_gd);
                detail::CompensatedSum sum;
                std::size_t defined = 0;
                for (std::size_t i = 0; i < c.relative_errors_gd.size(); ++i) {
                    if (c.relative_errors_gd[i] && c.relative_errors_cml[i]) {
                        sum.add(*c.relative_errors_cml[i] - *c.relative_errors_gd[i]);
                        ++defined;
                    }
                }
                if (defined > 0) drel.push_back(sum.value() / static_cast<double>(defined));
            }
        }
        row.time_ratio = quartiles(ratios);
        row.delta_r2 = quartiles(dr2);
        row.delta_rel_error = quartiles(drel);
        rows.push_back(row);
    }
    return rows;
}

/// R^2 of a fitted model, with the innovation variance replaced by the
/// residual-based sigma-hat^2. That substitution cancels in the spectral
/// variance, leaving R^2 = 1 - 1/(2 I(alpha)), a function of the fitted
/// coefficients alone. NaN when the fit is non-stationary or the quadrature
/// cannot reach 1e-8.
inline double fitted_r_squared(std::span<const double> coefficients) {
    if (!is_strictly_stationary(coefficients)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const QuadratureResult q = spectrum_integral(coefficients);
    if (!q.converged || q.rel_change > 1e-8) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return 1.0 - 1.0 / (2.0 * q.value);
}

}  // namespace arfit
