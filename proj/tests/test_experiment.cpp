#include <algorithm>
#include <filesystem>
#include <map>
#include <unistd.h>

#include <catch2/catch_amalgamated.hpp>

#include "triage/experiment.hpp"
#include "triage/svg_plot.hpp"
#include "triage/synthetic.hpp"

using namespace triage;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("triage_exp_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    fs::path file(const std::string& name) const { return path / name; }
};

struct Bench {
    Dataset test;
    AgreementMatrix matrix;
};

Bench make_bench(double local_accuracy, std::size_t candidates, std::uint64_t seed) {
    SynthConfig config;
    config.n_candidates = candidates;
    config.items_per_candidate = 6;
    config.seed = seed;
    auto train_truth = generate_labels(config);
    auto train = apply_pseudo_model(train_truth, {local_accuracy, derive_seed(seed, 1)});
    std::vector<std::pair<int, int>> pairs;
    for (const auto& r : train.responses())
        pairs.emplace_back(*r.machine_label, *r.human_label);
    auto matrix = build_agreement_matrix(pairs, train.scale());

    config.seed = derive_seed(seed, 2);
    auto test_truth = generate_labels(config);
    auto test = apply_pseudo_model(test_truth, {local_accuracy, derive_seed(seed, 3)});
    return {std::move(test), std::move(matrix)};
}

} // namespace

TEST_CASE("full budget makes the system perfect", "[experiment]") {
    auto bench = make_bench(0.7, 60, 100);
    SweepConfig config;
    config.budgets = {1.0};
    config.trials = 2;
    config.seed = 1;
    auto rows = run_sweep(bench.test, bench.matrix, config);
    REQUIRE(rows.size() == 6);  // 3 methods x 1 budget x 2 trials
    for (const auto& row : rows) {
        CHECK(row.accuracy_after == 1.0);
        CHECK(row.qwk_after == 1.0);
    }
}

TEST_CASE("item-level accuracy never drops after corrections", "[experiment][property]") {
    auto bench = make_bench(0.66, 50, 200);
    auto weights = random_weights(bench.test);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto sample = draw_without_replacement(weights, 100, seed);
        auto corrected = apply_human_scores(bench.test, sample);
        std::size_t before = 0, after = 0;
        for (std::size_t i = 0; i < bench.test.size(); ++i) {
            if (bench.test.responses()[i].machine_label ==
                bench.test.responses()[i].human_label)
                ++before;
            if (corrected.responses()[i].machine_label ==
                corrected.responses()[i].human_label)
                ++after;
        }
        CHECK(after >= before);
    }
}

TEST_CASE("sweep rows come out in deterministic order", "[experiment]") {
    auto bench = make_bench(0.75, 40, 300);
    SweepConfig config;
    config.methods = {SamplingMethod::reward, SamplingMethod::random};
    config.budgets = {0.2, 0.5};
    config.trials = 3;
    config.seed = 7;
    auto rows = run_sweep(bench.test, bench.matrix, config);
    REQUIRE(rows.size() == 12);
    CHECK(rows[0].method == "reward");
    CHECK(rows[0].budget_fraction == 0.2);
    CHECK(rows[6].method == "random");
    auto again = run_sweep(bench.test, bench.matrix, config);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].accuracy_after == again[i].accuracy_after);
        CHECK(rows[i].qwk_after == again[i].qwk_after);
        CHECK(rows[i].trial_seed == again[i].trial_seed);
    }
}

TEST_CASE("trial-mean accuracy is monotone in budget", "[experiment][property]") {
    auto bench = make_bench(0.7, 150, 400);
    SweepConfig config;
    config.budgets = {0.1, 0.3, 0.6, 0.9};
    config.trials = 8;
    config.seed = 11;
    auto rows = run_sweep(bench.test, bench.matrix, config);
    for (auto method : config.methods) {
        std::map<double, std::pair<double, int>> by_budget;
        for (const auto& row : rows)
            if (row.method == to_string(method)) {
                by_budget[row.budget_fraction].first += row.accuracy_after;
                by_budget[row.budget_fraction].second += 1;
            }
        double last = rows.front().accuracy_before;  // gains start at the baseline
        for (const auto& [budget, acc] : by_budget) {
            const double mean = acc.first / acc.second;
            CHECK(mean >= last);
            last = mean;
        }
    }
}

TEST_CASE("sweep report CSV round trip", "[experiment][io]") {
    TempDir tmp;
    auto bench = make_bench(0.8, 30, 500);
    SweepConfig config;
    config.budgets = {0.25};
    config.trials = 2;
    config.seed = 3;
    config.model_tag = "pseudo-0.8";
    auto rows = run_sweep(bench.test, bench.matrix, config);
    save_sweep_csv(rows, tmp.file("sweep.csv"));
    auto loaded = load_sweep_csv(tmp.file("sweep.csv"));
    REQUIRE(loaded.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(loaded[i].model_tag == rows[i].model_tag);
        CHECK(loaded[i].method == rows[i].method);
        CHECK(loaded[i].budget_fraction == rows[i].budget_fraction);
        CHECK(loaded[i].trial_seed == rows[i].trial_seed);
        CHECK(loaded[i].accuracy_after == rows[i].accuracy_after);
        CHECK(loaded[i].qwk_before == rows[i].qwk_before);
    }
}

TEST_CASE("run_estimate produces a coherent report", "[experiment]") {
    auto bench = make_bench(0.7, 120, 600);
    EstimateConfig config;
    config.estimation_sample_size = 60;
    config.bootstrap_replicates = 200;
    config.seed = 13;
    auto result = run_estimate(bench.test, bench.matrix, config);
    CHECK(result.report.accuracy_lower_bound <= result.report.accuracy_point);
    CHECK(result.report.qwk_lower_bound <= result.report.qwk_point);
    CHECK(result.report.estimation_sample_size == 60);
    REQUIRE(result.truth.has_value());
    CHECK(result.truth->n == 120);
    CHECK(result.sample.size() == 60);
}

TEST_CASE("run_coverage emits two rows per replication", "[experiment]") {
    auto bench = make_bench(0.7, 80, 700);
    EstimateConfig config;
    config.estimation_sample_size = 40;
    config.bootstrap_replicates = 150;
    config.seed = 17;
    auto rows = run_coverage(bench.test, bench.matrix, config, 5);
    REQUIRE(rows.size() == 10);
    CHECK(rows[0].metric == "accuracy");
    CHECK(rows[1].metric == "qwk");
    for (const auto& row : rows) CHECK(row.bound <= row.point);
}

TEST_CASE("svg rendering", "[experiment][plot]") {
    auto bench = make_bench(0.7, 40, 800);

    SECTION("three methods give three polylines per panel") {
        SweepConfig config;
        config.budgets = {0.2, 0.5, 0.8};
        config.trials = 2;
        config.seed = 5;
        auto rows = run_sweep(bench.test, bench.matrix, config);
        auto svg = render_sweep_svg(rows);
        std::size_t polylines = 0, pos = 0;
        while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
            ++polylines;
            pos += 9;
        }
        CHECK(polylines == 6);
        CHECK(svg.find("reward") != std::string::npos);
        // identical input renders identical bytes
        CHECK(render_sweep_svg(rows) == svg);
    }
    SECTION("single-budget report degenerates to markers") {
        SweepConfig config;
        config.budgets = {0.4};
        config.trials = 2;
        config.seed = 5;
        auto rows = run_sweep(bench.test, bench.matrix, config);
        auto svg = render_sweep_svg(rows);
        CHECK(svg.find("<polyline") == std::string::npos);
        CHECK(svg.find("<circle") != std::string::npos);
    }
    SECTION("empty report is rejected") {
        CHECK_THROWS_AS(render_sweep_svg({}), validation_error);
    }
}
