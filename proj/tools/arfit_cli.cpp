// Command-line front end: simulate stationary AR processes, estimate
// coefficients from a series file, run the benchmark harness, and rebuild
// summaries from a results CSV.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "arfit/arfit.hpp"

namespace {

std::vector<double> read_series_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file " + path.string());
    std::vector<double> values;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        std::size_t start = 0;
        while (start < line.size() && line[start] == ' ') ++start;
        const std::string_view field = std::string_view(line).substr(start);
        if (field.empty()) continue;
        if (first) {
            first = false;
            try {
                values.push_back(arfit::csv::parse_double(field));
            } catch (const std::invalid_argument&) {
                // single optional header line
            }
            continue;
        }
        values.push_back(arfit::csv::parse_double(field));
    }
    if (values.empty()) throw std::invalid_argument("input file contains no numeric values");
    return values;
}

void print_estimate(const arfit::EstimationResult& result) {
    std::cout << "method: " << arfit::to_string(result.method) << "\n";
    std::cout << "coefficients: " << arfit::csv::join_doubles(result.coefficients, ' ') << "\n";
    std::cout << "pacf: " << arfit::csv::join_doubles(result.pacf.values, ' ') << "\n";
    std::cout << "max_abs_inverse_root: "
              << arfit::csv::format_double(result.max_abs_inverse_root) << "\n";
    std::cout << "mse: " << arfit::csv::format_double(result.final_mse) << "\n";
    std::cout << "perplexity: " << arfit::csv::format_double(result.final_perplexity) << "\n";
    std::cout << "epochs: " << result.epochs << "\n";
    std::cout << "wall_time_ns: " << result.wall_time.count() << "\n";
    std::cout << "converged: " << (result.converged ? "true" : "false") << "\n";
    if (result.failure_reason) {
        std::cout << "failure_reason: " << arfit::to_string(*result.failure_reason) << "\n";
    }
}

std::string estimate_csv(const arfit::EstimationResult& result, std::size_t order) {
    std::string out =
        "method,order,coefficients,pacf,converged,failure_reason,epochs,wall_time_ns,"
        "mse,perplexity,max_abs_inv_root\n";
    out += arfit::to_string(result.method);
    out += ',' + arfit::csv::format_u64(order);
    out += ',' + arfit::csv::join_doubles(result.coefficients);
    out += ',' + arfit::csv::join_doubles(result.pacf.values);
    out += result.converged ? ",1" : ",0";
    out += ',';
    if (result.failure_reason) out += arfit::to_string(*result.failure_reason);
    out += ',' + arfit::csv::format_u64(result.epochs);
    out += ',' + arfit::csv::format_u64(static_cast<std::uint64_t>(result.wall_time.count()));
    out += ',' + arfit::csv::format_double(result.final_mse);
    out += ',' + arfit::csv::format_double(result.final_perplexity);
    out += ',' + arfit::csv::format_double(result.max_abs_inverse_root);
    out += '\n';
    return out;
}

std::size_t default_workers() {
    if (const char* env = std::getenv("ARFIT_WORKERS")) {
        try {
            const std::size_t n = arfit::csv::parse_u64(env);
            if (n >= 1) return n;
        } catch (const std::invalid_argument&) {
        }
    }
    return 1;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stationarity-constrained AR(p) estimation toolkit"};
    app.require_subcommand(1);

    // --- simulate ---
    auto* sim = app.add_subcommand("simulate", "generate stationary AR(p) series");
    std::size_t sim_order = 1, sim_processes = 1, sim_reps = 1;
    std::size_t sim_length = 1500, sim_burn_in = 500;
    double sim_sigma2 = 1.0;
    std::uint64_t sim_seed = 1;
    std::string sim_out = "series.csv";
    sim->add_option("--order", sim_order, "AR order p")->required()->check(CLI::PositiveNumber);
    sim->add_option("--processes", sim_processes, "number of random processes")
        ->capture_default_str();
    sim->add_option("--reps", sim_reps, "series per process")->capture_default_str();
    sim->add_option("--length", sim_length, "raw series length before burn-in")
        ->capture_default_str();
    sim->add_option("--burn-in", sim_burn_in, "points discarded from the start")
        ->capture_default_str();
    sim->add_option("--sigma2", sim_sigma2, "innovation variance")->capture_default_str();
    sim->add_option("--seed", sim_seed, "master seed")->capture_default_str();
    sim->add_option("--out", sim_out, "output CSV path")->capture_default_str();

    // --- estimate ---
    auto* est = app.add_subcommand("estimate", "fit AR coefficients to a series file");
    std::string est_method;
    std::size_t est_order = 1;
    std::string est_input;
    std::string est_out;
    double est_lr = arfit::OptimizerConfig{}.learning_rate;
    double est_reltol = arfit::StoppingCriterion{}.reltol;
    std::size_t est_max_epochs = arfit::StoppingCriterion{}.max_epochs;
    est->add_option("--method", est_method, "yw, gd or cml")
        ->required()
        ->check(CLI::IsMember({"yw", "gd", "cml"}));
    est->add_option("--order", est_order, "AR order p")->required()->check(CLI::PositiveNumber);
    est->add_option("--input", est_input, "single-column numeric series file")->required();
    est->add_option("--out", est_out, "optional result CSV path");
    est->add_option("--learning-rate", est_lr, "Adam learning rate")->capture_default_str();
    est->add_option("--reltol", est_reltol, "relative stopping tolerance")->capture_default_str();
    est->add_option("--max-epochs", est_max_epochs, "epoch budget")->capture_default_str();

    // --- bench ---
    auto* bench = app.add_subcommand("bench", "run the estimator comparison experiment");
    std::string bench_config;
    std::string bench_orders;
    std::size_t bench_processes = 0, bench_reps = 0, bench_length = 0, bench_burn_in = 0;
    double bench_sigma2 = 0.0, bench_lr = 0.0, bench_reltol = 0.0;
    std::uint64_t bench_seed = 0;
    std::size_t bench_max_epochs = 0, bench_workers = 0;
    std::string bench_out_dir = "bench_out";
    bench->add_option("--config", bench_config, "flat key=value config file");
    bench->add_option("--orders", bench_orders, "comma-separated AR orders");
    bench->add_option("--processes", bench_processes, "processes per order");
    bench->add_option("--reps", bench_reps, "series per process");
    bench->add_option("--length", bench_length, "raw series length before burn-in");
    bench->add_option("--burn-in", bench_burn_in, "points discarded from the start");
    bench->add_option("--sigma2", bench_sigma2, "innovation variance");
    bench->add_option("--seed", bench_seed, "master seed");
    bench->add_option("--learning-rate", bench_lr, "Adam learning rate");
    bench->add_option("--reltol", bench_reltol, "relative stopping tolerance");
    bench->add_option("--max-epochs", bench_max_epochs, "epoch budget");
    bench->add_option("--workers", bench_workers,
                      "worker threads (default: ARFIT_WORKERS or 1)");
    bench->add_option("--out-dir", bench_out_dir, "output directory")->capture_default_str();

    // --- report ---
    auto* report = app.add_subcommand("report", "rebuild summaries from a results CSV");
    std::string report_input;
    std::string report_out_dir;
    report->add_option("--input", report_input, "results.csv from a bench run")->required();
    report->add_option("--out-dir", report_out_dir, "directory for regenerated summary files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed()) {
            arfit::SimulationPlan plan;
            plan.order = sim_order;
            plan.n_processes = sim_processes;
            plan.n_repetitions = sim_reps;
            plan.raw_length = sim_length;
            plan.burn_in = sim_burn_in;
            plan.seed = sim_seed;
            plan.innovation.variance = sim_sigma2;
            plan.validate();
            const auto items = arfit::run_plan(plan);
            write_file(sim_out, arfit::series_dump_csv(plan, items));
            for (std::size_t i = 0; i < plan.n_processes; ++i) {
                const auto& process = items[i * plan.n_repetitions].process;
                std::cout << "process " << i << ": "
                          << arfit::csv::join_doubles(process.coefficients, ' ') << "\n";
            }
            std::cout << "wrote " << items.size() << " series ("
                      << plan.retained_length() << " values each) to " << sim_out << "\n";
            return 0;
        }

        if (est->parsed()) {
            arfit::TimeSeries series;
            series.values = read_series_file(est_input);
            arfit::OptimizerConfig config;
            config.learning_rate = est_lr;
            arfit::StoppingCriterion criterion;
            criterion.reltol = est_reltol;
            criterion.max_epochs = est_max_epochs;

            arfit::EstimationResult result;
            if (est_method == "yw") {
                result = arfit::estimate_yw(series, est_order);
            } else if (est_method == "gd") {
                config.method = arfit::OptimMethod::adam;
                result = arfit::estimate_gd(series, est_order, config, criterion);
            } else {
                config.method = arfit::OptimMethod::bfgs;
                result = arfit::estimate_cml(series, est_order, config, criterion);
            }
            print_estimate(result);
            if (!est_out.empty()) write_file(est_out, estimate_csv(result, est_order));
            return 0;  // estimator failure is data, not a process error
        }

        if (bench->parsed()) {
            arfit::ExperimentConfig config;
            if (!bench_config.empty()) config = arfit::load_config_file(bench_config);
            if (bench->count("--orders") > 0) {
                config.orders.clear();
                for (auto field : arfit::csv::split(bench_orders, ',')) {
                    config.orders.push_back(arfit::csv::parse_u64(field));
                }
            }
            if (bench->count("--processes") > 0) config.n_processes = bench_processes;
            if (bench->count("--reps") > 0) config.n_repetitions = bench_reps;
            if (bench->count("--length") > 0) config.raw_length = bench_length;
            if (bench->count("--burn-in") > 0) config.burn_in = bench_burn_in;
            if (bench->count("--sigma2") > 0) config.innovation.variance = bench_sigma2;
            if (bench->count("--seed") > 0) config.seed = bench_seed;
            if (bench->count("--learning-rate") > 0) config.gd.learning_rate = bench_lr;
            if (bench->count("--reltol") > 0) config.stopping.reltol = bench_reltol;
            if (bench->count("--max-epochs") > 0) config.stopping.max_epochs = bench_max_epochs;
            config.workers = bench->count("--workers") > 0 ? bench_workers : default_workers();
            if (bench->count("--out-dir") > 0 || bench_config.empty()) {
                config.output_dir = bench_out_dir;
            }
            config.validate();  // config errors exit before any work

            const arfit::ExperimentOutput output = arfit::run_experiment(config);
            std::cout << output.summary;
            std::cout << "\nresults: " << output.results_csv.string() << "\n";
            return 0;
        }

        if (report->parsed()) {
            const auto records = arfit::read_records(report_input);
            std::cout << arfit::summary_text(records);
            if (!report_out_dir.empty()) {
                arfit::write_summary(records, report_out_dir);
            }
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
