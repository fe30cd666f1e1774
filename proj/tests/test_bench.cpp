#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "arfit/bench.hpp"
#include "helpers.hpp"

using namespace arfit;

namespace {

ExperimentConfig tiny_config(const std::filesystem::path& dir) {
    ExperimentConfig config;
    config.orders = {1};
    config.n_processes = 2;
    config.n_repetitions = 1;
    config.raw_length = 300;
    config.burn_in = 100;
    config.seed = 321;
    config.output_dir = dir;
    return config;
}

void zero_wall_times(std::vector<ExperimentRecord>& records) {
    for (auto& r : records) {
        r.yw.wall_time_ns = 0;
        r.gd.wall_time_ns = 0;
        r.cml.wall_time_ns = 0;
    }
}

}  // namespace

TEST_CASE("tiny experiment writes one row per series") {
    testutil::ScratchDir scratch("bench_tiny");
    const ExperimentOutput output = run_experiment(tiny_config(scratch.path()));
    REQUIRE(output.records.size() == 2);

    const std::string csv_text = testutil::read_file(output.results_csv);
    std::size_t lines = 0;
    for (char c : csv_text) {
        if (c == '\n') ++lines;
    }
    CHECK(lines == 3);  // header + 2 rows
    CHECK(std::filesystem::exists(scratch.path() / "summary.txt"));
    CHECK(std::filesystem::exists(scratch.path() / "success_table.csv"));
    CHECK(std::filesystem::exists(scratch.path() / "order_scaling.csv"));
    CHECK(std::filesystem::exists(scratch.path() / "bland_altman.csv"));
    CHECK(std::filesystem::exists(scratch.path() / "root_proximity.csv"));
}

TEST_CASE("records survive a CSV round trip exactly") {
    testutil::ScratchDir scratch("bench_roundtrip");
    ExperimentConfig config = tiny_config(scratch.path());
    config.orders = {1, 3};
    const ExperimentOutput output = run_experiment(config);

    const auto parsed = read_records(output.results_csv);
    REQUIRE(parsed.size() == output.records.size());
    CHECK(records_to_csv(parsed) == records_to_csv(output.records));
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        CHECK(parsed[i].true_coefficients == output.records[i].true_coefficients);
        CHECK(parsed[i].gd.mse == output.records[i].gd.mse);
        CHECK(parsed[i].cml.r2 == output.records[i].cml.r2);
        CHECK(parsed[i].seed == output.records[i].seed);
    }
}

TEST_CASE("worker count does not change results") {
    testutil::ScratchDir scratch("bench_workers");
    ExperimentConfig one = tiny_config(scratch.path() / "w1");
    one.orders = {1, 2};
    one.n_processes = 4;
    one.workers = 1;
    ExperimentConfig four = one;
    four.output_dir = scratch.path() / "w4";
    four.workers = 4;

    ExperimentOutput a = run_experiment(one);
    ExperimentOutput b = run_experiment(four);
    zero_wall_times(a.records);
    zero_wall_times(b.records);
    REQUIRE(records_to_csv(a.records) == records_to_csv(b.records));
}

TEST_CASE("summary regenerated from the CSV is byte-identical") {
    testutil::ScratchDir scratch("bench_summary");
    const ExperimentOutput output = run_experiment(tiny_config(scratch.path()));
    const auto parsed = read_records(output.results_csv);
    CHECK(summary_text(parsed) == output.summary);
    CHECK(summary_text(parsed) == testutil::read_file(scratch.path() / "summary.txt"));
}

TEST_CASE("schema violations name the missing column") {
    const std::string bad = "series_id,order\n1,2\n";
    try {
        records_from_csv_text(bad);
        FAIL("expected a schema error");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("seed") != std::string::npos);
    }

    testutil::ScratchDir scratch("bench_schema");
    const ExperimentOutput output = run_experiment(tiny_config(scratch.path()));
    std::string text = testutil::read_file(output.results_csv);
    // truncate the last row mid-field
    text.resize(text.size() - 20);
    CHECK_THROWS_AS(records_from_csv_text(text), std::invalid_argument);
}

TEST_CASE("outlier forensics lists every flagged series") {
    testutil::ScratchDir scratch("bench_forensics");
    ExperimentConfig config = tiny_config(scratch.path());
    config.n_processes = 12;
    ExperimentOutput output = run_experiment(config);

    // inject a synthetic disagreement large enough to breach the limits
    auto& victim = output.records[5];
    victim.cml.mse = victim.gd.mse + 10.0;
    victim.cml.converged = true;

    const BlandAltmanReport report = bland_altman_report(output.records, false);
    REQUIRE(report.available);
    REQUIRE_FALSE(report.outlier_series_ids.empty());
    const std::string forensics = outlier_forensics(output.records, report);
    CHECK(forensics.find("series 5 (order 1)") != std::string::npos);
    CHECK(forensics.find("process:") != std::string::npos);
    CHECK(forensics.find("yw:") != std::string::npos);
    CHECK(forensics.find("gd:") != std::string::npos);
    CHECK(forensics.find("cml:") != std::string::npos);

    SECTION("no outliers yields an explicit empty report") {
        BlandAltmanReport empty;
        CHECK(outlier_forensics(output.records, empty) == "no outliers\n");
    }
}

TEST_CASE("config text parsing") {
    const std::string text =
        "# benchmark setup\n"
        "orders = 1,2,3\n"
        "processes = 7\n"
        "reps = 2\n"
        "raw_length = 400\n"
        "burn_in = 150\n"
        "sigma2 = 2.5\n"
        "seed = 99\n"
        "workers = 3\n"
        "learning_rate = 0.01\n"
        "reltol = 1e-7\n"
        "max_epochs = 500\n"
        "out_dir = /tmp/somewhere\n";
    const ExperimentConfig config = parse_config_text(text);
    CHECK(config.orders == std::vector<std::size_t>{1, 2, 3});
    CHECK(config.n_processes == 7);
    CHECK(config.n_repetitions == 2);
    CHECK(config.raw_length == 400);
    CHECK(config.burn_in == 150);
    CHECK(config.innovation.variance == 2.5);
    CHECK(config.seed == 99);
    CHECK(config.workers == 3);
    CHECK(config.gd.learning_rate == 0.01);
    CHECK(config.stopping.reltol == 1e-7);
    CHECK(config.stopping.max_epochs == 500);
    CHECK(config.output_dir == std::filesystem::path("/tmp/somewhere"));

    CHECK_THROWS_AS(parse_config_text("bogus_key = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("no equals sign\n"), std::invalid_argument);
}

TEST_CASE("failed estimator rows keep best-iterate diagnostics") {
    testutil::ScratchDir scratch("bench_failed");
    ExperimentOutput output = run_experiment(tiny_config(scratch.path()));
    auto failed = output.records[0];
    failed.cml.converged = false;
    failed.cml.failure_reason = FailureReason::line_search_failure;

    const std::string line = record_to_csv(failed);
    const ExperimentRecord back = record_from_csv(line);
    CHECK_FALSE(back.cml.converged);
    REQUIRE(back.cml.failure_reason.has_value());
    CHECK(*back.cml.failure_reason == FailureReason::line_search_failure);
    CHECK(back.cml.coefficients == failed.cml.coefficients);
}
