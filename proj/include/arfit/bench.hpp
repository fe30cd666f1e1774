#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "arfit/csv.hpp"
#include "arfit/estimators.hpp"
#include "arfit/metrics.hpp"
#include "arfit/simulate.hpp"

namespace arfit {

/// Full benchmark configuration: one simulation plan template applied to
/// each order, shared optimizer settings, output location and worker count.
struct ExperimentConfig {
    std::vector<std::size_t> orders = {1, 2, 3, 4, 5};
    std::size_t n_processes = 50;
    std::size_t n_repetitions = 5;
    std::size_t raw_length = 1500;
    std::size_t burn_in = 500;
    InnovationSpec innovation{};
    std::uint64_t seed = 20260101;
    OptimizerConfig gd{};
    OptimizerConfig cml{};
    StoppingCriterion stopping{};
    std::filesystem::path output_dir = ".";
    std::size_t workers = 1;

    SimulationPlan plan_for(std::size_t order) const {
        SimulationPlan plan;
        plan.order = order;
        plan.n_processes = n_processes;
        plan.n_repetitions = n_repetitions;
        plan.raw_length = raw_length;
        plan.burn_in = burn_in;
        plan.seed = seed;
        plan.innovation = innovation;
        return plan;
    }

    std::size_t series_count() const { return orders.size() * n_processes * n_repetitions; }

    void validate() const {
        if (orders.empty()) throw std::invalid_argument("ExperimentConfig: orders is empty");
        if (workers < 1) throw std::invalid_argument("ExperimentConfig: workers must be >= 1");
        for (std::size_t order : orders) plan_for(order).validate();
    }
};

/// One method's slice of a benchmark row.
struct MethodRecord {
    std::vector<double> coefficients;
    bool converged = false;
    std::optional<FailureReason> failure_reason;
    std::size_t epochs = 0;
    std::int64_t wall_time_ns = 0;
    double mse = std::numeric_limits<double>::quiet_NaN();
    double perplexity = std::numeric_limits<double>::quiet_NaN();
    double max_abs_inverse_root = std::numeric_limits<double>::quiet_NaN();
    double r2 = std::numeric_limits<double>::quiet_NaN();
};

/// One self-contained benchmark row: per-series truth plus the Yule-Walker,
/// gradient-descent and CML results. Re-analysis needs no other file.
struct ExperimentRecord {
    std::uint64_t series_id = 0;
    std::size_t order = 0;
    std::uint64_t seed = 0;  // per-series substream seed
    std::vector<double> true_coefficients;
    double true_max_abs_inverse_root = std::numeric_limits<double>::quiet_NaN();
    double r2_truth = std::numeric_limits<double>::quiet_NaN();
    MethodRecord yw;
    MethodRecord gd;
    MethodRecord cml;
};

namespace detail {

inline const std::vector<std::string>& record_columns() {
    static const std::vector<std::string> columns = [] {
        std::vector<std::string> cols = {"series_id",  "order",   "seed",
                                         "true_coeffs", "true_max_abs_inv_root", "r2_truth"};
        for (const char* m : {"yw", "gd", "cml"}) {
            const std::string prefix(m);
            for (const char* f : {"coeffs", "converged", "failure_reason", "epochs",
                                  "wall_time_ns", "mse", "perplexity", "max_abs_inv_root",
                                  "r2"}) {
                cols.push_back(prefix + "_" + f);
            }
        }
        return cols;
    }();
    return columns;
}

inline std::string failure_to_field(const std::optional<FailureReason>& reason) {
    return reason ? std::string(to_string(*reason)) : std::string();
}

inline std::optional<FailureReason> failure_from_field(std::string_view field) {
    if (field.empty()) return std::nullopt;
    if (field == "non_finite_value") return FailureReason::non_finite_value;
    if (field == "line_search_failure") return FailureReason::line_search_failure;
    if (field == "max_epochs") return FailureReason::max_epochs;
    throw std::invalid_argument("unknown failure reason '" + std::string(field) + "'");
}

inline void append_method_fields(std::string& line, const MethodRecord& m) {
    line += ',' + csv::join_doubles(m.coefficients);
    line += m.converged ? ",1" : ",0";
    line += ',' + failure_to_field(m.failure_reason);
    line += ',' + csv::format_u64(m.epochs);
    line += ',' + csv::format_u64(static_cast<std::uint64_t>(m.wall_time_ns));
    line += ',' + csv::format_double(m.mse);
    line += ',' + csv::format_double(m.perplexity);
    line += ',' + csv::format_double(m.max_abs_inverse_root);
    line += ',' + csv::format_double(m.r2);
}

inline MethodRecord method_from_fields(std::span<const std::string_view> f) {
    MethodRecord m;
    m.coefficients = csv::parse_doubles(f[0]);
    m.converged = f[1] == "1";
    m.failure_reason = failure_from_field(f[2]);
    m.epochs = csv::parse_u64(f[3]);
    m.wall_time_ns = static_cast<std::int64_t>(csv::parse_u64(f[4]));
    m.mse = csv::parse_double(f[5]);
    m.perplexity = csv::parse_double(f[6]);
    m.max_abs_inverse_root = csv::parse_double(f[7]);
    m.r2 = csv::parse_double(f[8]);
    return m;
}

/// Write a whole file atomically: temp file in the same directory, then rename.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            out.close();
            std::filesystem::remove(tmp);
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace detail

inline std::string record_csv_header() {
    std::string line;
    const auto& cols = detail::record_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i > 0) line.push_back(',');
        line += cols[i];
    }
    return line;
}

inline std::string record_to_csv(const ExperimentRecord& r) {
    std::string line = csv::format_u64(r.series_id);
    line += ',' + csv::format_u64(r.order);
    line += ',' + csv::format_u64(r.seed);
    line += ',' + csv::join_doubles(r.true_coefficients);
    line += ',' + csv::format_double(r.true_max_abs_inverse_root);
    line += ',' + csv::format_double(r.r2_truth);
    detail::append_method_fields(line, r.yw);
    detail::append_method_fields(line, r.gd);
    detail::append_method_fields(line, r.cml);
    return line;
}

inline ExperimentRecord record_from_csv(std::string_view line) {
    const auto fields = csv::split(line, ',');
    const auto& cols = detail::record_columns();
    if (fields.size() != cols.size()) {
        throw std::invalid_argument("results row has " + std::to_string(fields.size()) +
                                    " fields, expected " + std::to_string(cols.size()));
    }
    ExperimentRecord r;
    r.series_id = csv::parse_u64(fields[0]);
    r.order = csv::parse_u64(fields[1]);
    r.seed = csv::parse_u64(fields[2]);
    r.true_coefficients = csv::parse_doubles(fields[3]);
    r.true_max_abs_inverse_root = csv::parse_double(fields[4]);
    r.r2_truth = csv::parse_double(fields[5]);
    r.yw = detail::method_from_fields(std::span(fields).subspan(6, 9));
    r.gd = detail::method_from_fields(std::span(fields).subspan(15, 9));
    r.cml = detail::method_from_fields(std::span(fields).subspan(24, 9));
    return r;
}

inline std::string records_to_csv(std::span<const ExperimentRecord> records) {
    std::string out = record_csv_header();
    out.push_back('\n');
    for (const auto& r : records) {
        out += record_to_csv(r);
        out.push_back('\n');
    }
    return out;
}

/// Parse a results CSV. Throws with the offending column name when the
/// header does not match the schema.
inline std::vector<ExperimentRecord> records_from_csv_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("results CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = csv::split(line, ',');
    const auto& cols = detail::record_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i >= header.size() || header[i] != cols[i]) {
            throw std::invalid_argument("results CSV is missing column '" + cols[i] + "'");
        }
    }
    if (header.size() != cols.size()) {
        throw std::invalid_argument("results CSV has unexpected extra columns");
    }
    std::vector<ExperimentRecord> records;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        records.push_back(record_from_csv(line));
    }
    return records;
}

inline std::vector<ExperimentRecord> read_records(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return records_from_csv_text(buf.str());
}

/// Rebuild the per-series comparison rows from persisted records alone.
inline std::vector<PairedComparison> comparisons_from_records(
    std::span<const ExperimentRecord> records) {
    std::vector<PairedComparison> comparisons;
    comparisons.reserve(records.size());
    for (const auto& r : records) {
        PairedComparison c;
        c.series_id = r.series_id;
        c.order = r.order;
        c.gd_converged = r.gd.converged;
        c.cml_converged = r.cml.converged;
        c.relative_errors_gd = relative_error(r.true_coefficients, r.gd.coefficients);
        c.relative_errors_cml = relative_error(r.true_coefficients, r.cml.coefficients);
        if (r.cml.converged) {
            c.delta_mse = r.cml.mse - r.gd.mse;
            c.delta_perplexity = r.cml.perplexity - r.gd.perplexity;
        }
        if (r.gd.wall_time_ns > 0 && r.cml.wall_time_ns > 0) {
            c.time_ratio = static_cast<double>(r.cml.wall_time_ns) /
                           static_cast<double>(r.gd.wall_time_ns);
        }
        c.r2_truth = r.r2_truth;
        c.r2_gd = r.gd.r2;
        c.r2_cml = r.cml.r2;
        comparisons.push_back(std::move(c));
    }
    return comparisons;
}

/// Bland-Altman over the both-converged subset of a per-record delta,
/// with outlier indices mapped back to series ids.
struct BlandAltmanReport {
    BlandAltman stats;
    std::size_t n = 0;
    std::vector<std::uint64_t> outlier_series_ids;
    bool available = false;
};

inline BlandAltmanReport bland_altman_report(std::span<const ExperimentRecord> records,
                                             bool use_perplexity) {
    std::vector<double> diffs;
    std::vector<std::uint64_t> ids;
    for (const auto& r : records) {
        if (!r.cml.converged || !r.gd.converged) continue;
        const double diff = use_perplexity ? r.cml.perplexity - r.gd.perplexity
                                           : r.cml.mse - r.gd.mse;
        if (!std::isfinite(diff)) continue;
        diffs.push_back(diff);
        ids.push_back(r.series_id);
    }
    BlandAltmanReport report;
    report.n = diffs.size();
    if (diffs.size() < 2) return report;
    report.stats = bland_altman(diffs);
    report.available = true;
    for (std::size_t idx : report.stats.outlier_ids) {
        report.outlier_series_ids.push_back(ids[idx]);
    }
    return report;
}

namespace detail {

inline std::string pct(std::size_t part, std::size_t whole) {
    char buf[32];
    const double v = whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) /
                                            static_cast<double>(whole);
    std::snprintf(buf, sizeof(buf), "%.1f%%", v);
    return buf;
}

inline std::string fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string quartile_cell(const Quartiles& q) {
    if (q.n == 0) return "-";
    return csv::format_double(q.q1) + " / " + csv::format_double(q.median) + " / " +
           csv::format_double(q.q3);
}

inline std::string quartile_csv(const Quartiles& q) {
    if (q.n == 0) return ",,";
    return csv::format_double(q.q1) + ',' + csv::format_double(q.median) + ',' +
           csv::format_double(q.q3);
}

/// Characteristic-root moduli (descending) of a coefficient vector, for the
/// forensics table; an inverse root at 0 has no finite counterpart root.
inline std::vector<double> abs_roots_desc(std::span<const double> coefficients) {
    const RootSet roots = characteristic_roots(coefficients);
    std::vector<double> mods;
    for (const auto& z : roots.inverse_roots) {
        const double m = std::abs(z);
        mods.push_back(m > 1e-300 ? 1.0 / m : std::numeric_limits<double>::infinity());
    }
    std::sort(mods.begin(), mods.end(), std::greater<>());
    return mods;
}

inline std::string joined_fixed2(std::span<const double> values) {
    std::string out = "(";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ", ";
        out += fixed2(values[i]);
    }
    out += ")";
    return out;
}

}  // namespace detail

/// Per-order distribution of the Yule-Walker max abs inverse root split by
/// CML status: the root-proximity analysis behind the failure geometry.
struct RootProximityRow {
    std::size_t order = 0;
    bool cml_converged = false;
    std::size_t n = 0;
    double min = std::numeric_limits<double>::quiet_NaN();
    Quartiles quartiles;
    double max = std::numeric_limits<double>::quiet_NaN();
};

inline std::vector<RootProximityRow> root_proximity_split(
    std::span<const ExperimentRecord> records) {
    std::vector<std::pair<std::size_t, bool>> keys;
    for (const auto& r : records) {
        const std::pair<std::size_t, bool> key{r.order, r.cml.converged};
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    std::sort(keys.begin(), keys.end());
    std::vector<RootProximityRow> rows;
    for (const auto& [order, status] : keys) {
        RootProximityRow row;
        row.order = order;
        row.cml_converged = status;
        std::vector<double> values;
        for (const auto& r : records) {
            if (r.order == order && r.cml.converged == status &&
                std::isfinite(r.yw.max_abs_inverse_root)) {
                values.push_back(r.yw.max_abs_inverse_root);
            }
        }
        row.n = values.size();
        if (!values.empty()) {
            row.min = quantile(values, 0.0);
            row.quartiles = quartiles(values);
            row.max = quantile(values, 1.0);
        }
        rows.push_back(row);
    }
    return rows;
}

/// Table-2-style drill-down of Bland-Altman outliers: truth and all three
/// estimates with their absolute characteristic roots, rounded to 2 decimals.
inline std::string outlier_forensics(std::span<const ExperimentRecord> records,
                                     const BlandAltmanReport& report) {
    std::string out;
    for (std::uint64_t id : report.outlier_series_ids) {
        const auto it = std::find_if(records.begin(), records.end(),
                                     [&](const ExperimentRecord& r) { return r.series_id == id; });
        if (it == records.end()) continue;
        const ExperimentRecord& r = *it;
        out += "series " + csv::format_u64(r.series_id) + " (order " +
               csv::format_u64(r.order) + ")\n";
        const std::pair<const char*, const std::vector<double>*> rows[] = {
            {"process", &r.true_coefficients},
            {"yw", &r.yw.coefficients},
            {"gd", &r.gd.coefficients},
            {"cml", &r.cml.coefficients},
        };
        for (const auto& [name, coeffs] : rows) {
            out += "  ";
            out += name;
            out += ": abs roots ";
            out += detail::joined_fixed2(detail::abs_roots_desc(*coeffs));
            out += ", coefficients ";
            out += detail::joined_fixed2(*coeffs);
            out += "\n";
        }
    }
    if (report.outlier_series_ids.empty()) out = "no outliers\n";
    return out;
}

inline std::string success_table_text(const SuccessTable& table) {
    std::string out;
    out += "order | CML success | CML failure | GD success | GD failure\n";
    auto row_line = [](const std::string& label, const SuccessRow& r) {
        const std::size_t cml_total = r.cml_success + r.cml_failure;
        const std::size_t gd_total = r.gd_success + r.gd_failure;
        std::string line = label;
        line += " | " + csv::format_u64(r.cml_success) + " (" +
                detail::pct(r.cml_success, cml_total) + ")";
        line += " | " + csv::format_u64(r.cml_failure) + " (" +
                detail::pct(r.cml_failure, cml_total) + ")";
        line += " | " + csv::format_u64(r.gd_success) + " (" +
                detail::pct(r.gd_success, gd_total) + ")";
        line += " | " + csv::format_u64(r.gd_failure) + " (" +
                detail::pct(r.gd_failure, gd_total) + ")";
        line += "\n";
        return line;
    };
    for (const auto& r : table.rows) out += row_line(csv::format_u64(r.order), r);
    out += row_line("total", table.total);
    return out;
}

/// The whole human-readable summary; a pure function of the records so that
/// regenerating it from the results CSV reproduces it byte for byte.
inline std::string summary_text(std::span<const ExperimentRecord> records) {
    if (records.empty()) return "no records\n";
    const auto comparisons = comparisons_from_records(records);

    std::string out;
    out += "== Success by order ==\n";
    out += success_table_text(success_table(comparisons));

    std::vector<double> ratios, dmse, dmse_abs, dperp, drel_coeff, drel_series;
    for (const auto& c : comparisons) {
        if (c.time_ratio) ratios.push_back(*c.time_ratio);
        if (!c.cml_converged || !c.gd_converged) continue;
        if (c.delta_mse) {
            dmse.push_back(*c.delta_mse);
            dmse_abs.push_back(std::abs(*c.delta_mse));
        }
        if (c.delta_perplexity && std::isfinite(*c.delta_perplexity)) {
            dperp.push_back(*c.delta_perplexity);
        }
        detail::CompensatedSum series_sum;
        std::size_t defined = 0;
        for (std::size_t i = 0; i < c.relative_errors_gd.size(); ++i) {
            if (c.relative_errors_gd[i] && c.relative_errors_cml[i]) {
                const double d = *c.relative_errors_cml[i] - *c.relative_errors_gd[i];
                drel_coeff.push_back(d);
                series_sum.add(d);
                ++defined;
            }
        }
        if (defined > 0) drel_series.push_back(series_sum.value() / static_cast<double>(defined));
    }
    auto med = [](const std::vector<double>& v) {
        return v.empty() ? std::string("-") : csv::format_double(quantile(v, 0.5));
    };
    out += "\n== Headline medians ==\n";
    out += "series total: " + csv::format_u64(records.size()) + "\n";
    out += "both-converged series: " + csv::format_u64(dmse.size()) + "\n";
    out += "median time ratio (CML/GD), all series: " + med(ratios) + "\n";
    out += "median delta MSE (CML-GD): " + med(dmse) + "\n";
    out += "median |delta MSE|: " + med(dmse_abs) + "\n";
    out += "median delta perplexity (CML-GD): " + med(dperp) + "\n";
    out += "median delta relative error, per coefficient: " + med(drel_coeff) + "\n";
    out += "median delta relative error, per series mean: " + med(drel_series) + "\n";

    out += "\n== Bland-Altman (CML-GD, both-converged) ==\n";
    for (bool use_perp : {false, true}) {
        const auto report = bland_altman_report(records, use_perp);
        out += use_perp ? "perplexity: " : "MSE: ";
        if (!report.available) {
            out += "insufficient data (n=" + csv::format_u64(report.n) + ")\n";
            continue;
        }
        out += "n=" + csv::format_u64(report.n);
        out += " mean=" + csv::format_double(report.stats.mean_diff);
        out += " sd=" + csv::format_double(report.stats.sd_diff);
        out += " limits=[" + csv::format_double(report.stats.lower_limit) + ", " +
               csv::format_double(report.stats.upper_limit) + "]";
        out += " outliers=" + csv::format_u64(report.outlier_series_ids.size());
        if (!report.outlier_series_ids.empty()) {
            out += " ids=";
            for (std::size_t i = 0; i < report.outlier_series_ids.size(); ++i) {
                if (i > 0) out += ";";
                out += csv::format_u64(report.outlier_series_ids[i]);
            }
        }
        out += "\n";
    }

    out += "\n== Root proximity (YW max abs inverse root by CML status) ==\n";
    out += "order | cml_status | n | min | q1 | median | q3 | max\n";
    for (const auto& row : root_proximity_split(records)) {
        out += csv::format_u64(row.order);
        out += row.cml_converged ? " | success" : " | failure";
        out += " | " + csv::format_u64(row.n);
        out += " | " + csv::format_double(row.min);
        out += " | " + csv::format_double(row.quartiles.q1);
        out += " | " + csv::format_double(row.quartiles.median);
        out += " | " + csv::format_double(row.quartiles.q3);
        out += " | " + csv::format_double(row.max);
        out += "\n";
    }

    out += "\n== Order scaling ==\n";
    out += "order | cml_status | n | time_ratio q1/med/q3 | delta_r2 q1/med/q3 | "
           "delta_rel_error q1/med/q3\n";
    for (const auto& row : order_scaling_summary(comparisons)) {
        out += csv::format_u64(row.order);
        out += row.cml_converged ? " | success" : " | failure";
        out += " | " + csv::format_u64(row.n);
        out += " | " + detail::quartile_cell(row.time_ratio);
        out += " | " + detail::quartile_cell(row.delta_r2);
        out += " | " + detail::quartile_cell(row.delta_rel_error);
        out += "\n";
    }

    out += "\n== Outlier forensics (Bland-Altman on delta MSE) ==\n";
    out += outlier_forensics(records, bland_altman_report(records, false));
    return out;
}

namespace detail {

inline std::string success_table_csv(const SuccessTable& table) {
    std::string out =
        "order,cml_success,cml_failure,cml_success_pct,gd_success,gd_failure,gd_success_pct\n";
    auto emit = [&](const std::string& label, const SuccessRow& r) {
        const std::size_t cml_total = r.cml_success + r.cml_failure;
        const std::size_t gd_total = r.gd_success + r.gd_failure;
        out += label;
        out += ',' + csv::format_u64(r.cml_success);
        out += ',' + csv::format_u64(r.cml_failure);
        out += ',' + csv::format_double(cml_total == 0
                                            ? 0.0
                                            : 100.0 * static_cast<double>(r.cml_success) /
                                                  static_cast<double>(cml_total));
        out += ',' + csv::format_u64(r.gd_success);
        out += ',' + csv::format_u64(r.gd_failure);
        out += ',' + csv::format_double(gd_total == 0
                                            ? 0.0
                                            : 100.0 * static_cast<double>(r.gd_success) /
                                                  static_cast<double>(gd_total));
        out += '\n';
    };
    for (const auto& r : table.rows) emit(csv::format_u64(r.order), r);
    emit("total", table.total);
    return out;
}

inline std::string order_scaling_csv(const std::vector<OrderScalingRow>& rows) {
    std::string out =
        "order,cml_status,n,time_ratio_q1,time_ratio_median,time_ratio_q3,"
        "delta_r2_q1,delta_r2_median,delta_r2_q3,"
        "delta_rel_error_q1,delta_rel_error_median,delta_rel_error_q3\n";
    for (const auto& row : rows) {
        out += csv::format_u64(row.order);
        out += row.cml_converged ? ",success" : ",failure";
        out += ',' + csv::format_u64(row.n);
        out += ',' + detail::quartile_csv(row.time_ratio);
        out += ',' + detail::quartile_csv(row.delta_r2);
        out += ',' + detail::quartile_csv(row.delta_rel_error);
        out += '\n';
    }
    return out;
}

inline std::string bland_altman_csv(std::span<const ExperimentRecord> records) {
    std::string out = "metric,n,mean_diff,sd_diff,lower_limit,upper_limit,outlier_series_ids\n";
    for (bool use_perp : {false, true}) {
        const auto report = bland_altman_report(records, use_perp);
        out += use_perp ? "perplexity" : "mse";
        out += ',' + csv::format_u64(report.n);
        if (report.available) {
            out += ',' + csv::format_double(report.stats.mean_diff);
            out += ',' + csv::format_double(report.stats.sd_diff);
            out += ',' + csv::format_double(report.stats.lower_limit);
            out += ',' + csv::format_double(report.stats.upper_limit);
            out += ',';
            for (std::size_t i = 0; i < report.outlier_series_ids.size(); ++i) {
                if (i > 0) out += ';';
                out += csv::format_u64(report.outlier_series_ids[i]);
            }
        } else {
            out += ",,,,,";
        }
        out += '\n';
    }
    return out;
}

inline std::string root_proximity_csv(std::span<const ExperimentRecord> records) {
    std::string out = "order,cml_status,n,min,q1,median,q3,max\n";
    for (const auto& row : root_proximity_split(records)) {
        out += csv::format_u64(row.order);
        out += row.cml_converged ? ",success" : ",failure";
        out += ',' + csv::format_u64(row.n);
        out += ',' + csv::format_double(row.min);
        out += ',' + csv::format_double(row.quartiles.q1);
        out += ',' + csv::format_double(row.quartiles.median);
        out += ',' + csv::format_double(row.quartiles.q3);
        out += ',' + csv::format_double(row.max);
        out += '\n';
    }
    return out;
}

}  // namespace detail

/// Write summary.txt plus the machine-readable summary CSV set; everything
/// derives from the records alone.
inline void write_summary(std::span<const ExperimentRecord> records,
                          const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    detail::atomic_write(dir / "summary.txt", summary_text(records));
    const auto comparisons = comparisons_from_records(records);
    detail::atomic_write(dir / "success_table.csv",
                         detail::success_table_csv(success_table(comparisons)));
    detail::atomic_write(dir / "order_scaling.csv",
                         detail::order_scaling_csv(order_scaling_summary(comparisons)));
    detail::atomic_write(dir / "bland_altman.csv", detail::bland_altman_csv(records));
    detail::atomic_write(dir / "root_proximity.csv", detail::root_proximity_csv(records));
}

namespace detail {

inline MethodRecord method_record(const EstimationResult& est) {
    MethodRecord m;
    m.coefficients = est.coefficients;
    m.converged = est.converged;
    m.failure_reason = est.failure_reason;
    m.epochs = est.epochs;
    m.wall_time_ns = std::max<std::int64_t>(1, est.wall_time.count());
    m.mse = est.final_mse;
    m.perplexity = est.final_perplexity;
    m.max_abs_inverse_root = est.max_abs_inverse_root;
    m.r2 = fitted_r_squared(est.coefficients);
    return m;
}

}  // namespace detail

/// Compute one benchmark row: generate plan cell (i, j) for the given order
/// and run all three estimators on it. Pure function of (config, indices).
inline ExperimentRecord compute_record(const ExperimentConfig& config, std::size_t order_index,
                                       std::size_t process_index, std::size_t repetition_index,
                                       std::uint64_t series_id) {
    const SimulationPlan plan = config.plan_for(config.orders[order_index]);
    const PlanItem item = plan_item(plan, process_index, repetition_index);

    ExperimentRecord record;
    record.series_id = series_id;
    record.order = plan.order;
    record.seed = item.series_seed;
    record.true_coefficients = item.process.coefficients;
    record.true_max_abs_inverse_root =
        characteristic_roots(item.process).max_abs_inverse_root;
    try {
        record.r2_truth = r_squared(item.process);
    } catch (const std::exception&) {
        // near-unit-root process: quadrature may not converge; leave NaN
    }

    auto guarded = [&](EstimationMethod method) {
        try {
            switch (method) {
                case EstimationMethod::yw:
                    return estimate_yw(item.series, plan.order);
                case EstimationMethod::gd:
                    return estimate_gd(item.series, plan.order, config.gd, config.stopping);
                case EstimationMethod::cml:
                default:
                    return estimate_cml(item.series, plan.order, config.cml, config.stopping);
            }
        } catch (const std::exception&) {
            EstimationResult failed;
            failed.method = method;
            failed.coefficients.assign(plan.order, 0.0);
            failed.converged = false;
            failed.failure_reason = FailureReason::non_finite_value;
            return failed;
        }
    };
    record.yw = detail::method_record(guarded(EstimationMethod::yw));
    record.gd = detail::method_record(guarded(EstimationMethod::gd));
    record.cml = detail::method_record(guarded(EstimationMethod::cml));
    return record;
}

/// Flat key=value config format ('#' comments, keys mirror ExperimentConfig;
/// see the README for the full key list). Unknown keys are rejected.
inline ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig config;
    std::istringstream in(text);
    std::string line;
    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
            s.remove_suffix(1);
        }
        return s;
    };
    while (std::getline(in, line)) {
        const std::string_view stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string_view::npos) {
            throw std::invalid_argument("config line has no '=': " + std::string(stripped));
        }
        const std::string_view key = trim(stripped.substr(0, eq));
        const std::string_view value = trim(stripped.substr(eq + 1));
        if (key == "orders") {
            config.orders.clear();
            for (auto field : csv::split(value, ',')) {
                config.orders.push_back(csv::parse_u64(trim(field)));
            }
        } else if (key == "processes") {
            config.n_processes = csv::parse_u64(value);
        } else if (key == "reps") {
            config.n_repetitions = csv::parse_u64(value);
        } else if (key == "raw_length") {
            config.raw_length = csv::parse_u64(value);
        } else if (key == "burn_in") {
            config.burn_in = csv::parse_u64(value);
        } else if (key == "sigma2") {
            config.innovation.variance = csv::parse_double(value);
        } else if (key == "mean") {
            config.innovation.mean = csv::parse_double(value);
        } else if (key == "seed") {
            config.seed = csv::parse_u64(value);
        } else if (key == "workers") {
            config.workers = csv::parse_u64(value);
        } else if (key == "learning_rate") {
            config.gd.learning_rate = csv::parse_double(value);
        } else if (key == "adam_beta1") {
            config.gd.adam_beta1 = csv::parse_double(value);
        } else if (key == "adam_beta2") {
            config.gd.adam_beta2 = csv::parse_double(value);
        } else if (key == "adam_epsilon") {
            config.gd.adam_epsilon = csv::parse_double(value);
        } else if (key == "wolfe_c1") {
            config.cml.wolfe_c1 = csv::parse_double(value);
        } else if (key == "wolfe_c2") {
            config.cml.wolfe_c2 = csv::parse_double(value);
        } else if (key == "max_line_search") {
            config.cml.max_line_search_steps = csv::parse_u64(value);
        } else if (key == "reltol") {
            config.stopping.reltol = csv::parse_double(value);
        } else if (key == "max_epochs") {
            config.stopping.max_epochs = csv::parse_u64(value);
        } else if (key == "out_dir") {
            config.output_dir = std::string(value);
        } else {
            throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
        }
    }
    config.gd.method = OptimMethod::adam;
    config.cml.method = OptimMethod::bfgs;
    return config;
}

inline ExperimentConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

struct ExperimentOutput {
    std::vector<ExperimentRecord> records;
    std::filesystem::path results_csv;
    std::string summary;
};

/// Run the configured experiment: every (order, process, repetition) cell is
/// an independent work item, so any worker count yields identical records up
/// to wall-time fields. Results and summaries are written atomically.
inline ExperimentOutput run_experiment(const ExperimentConfig& config) {
    config.validate();
    std::filesystem::create_directories(config.output_dir);

    const std::size_t per_order = config.n_processes * config.n_repetitions;
    const std::size_t total = config.series_count();
    std::vector<ExperimentRecord> records(total);

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= total) break;
            const std::size_t order_index = i / per_order;
            const std::size_t within = i % per_order;
            records[i] = compute_record(config, order_index, within / config.n_repetitions,
                                        within % config.n_repetitions, i);
        }
    };
    if (config.workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(config.workers);
        for (std::size_t t = 0; t < config.workers; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    ExperimentOutput output;
    output.results_csv = config.output_dir / "results.csv";
    detail::atomic_write(output.results_csv, records_to_csv(records));
    write_summary(records, config.output_dir);
    output.summary = summary_text(records);
    output.records = std::move(records);
    return output;
}

}  // namespace arfit
