// triage: allocate a human-rater budget over machine-scored test responses,
// simulate the resulting system metrics, and estimate them with lower-bound
// guarantees.

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "triage/triage.hpp"

namespace {

using namespace triage;

AggregationPolicy policy_from(const std::string& name) {
    auto policy = parse_policy(name);
    if (!policy) throw validation_error("unknown aggregation policy: " + name);
    return *policy;
}

SamplingMethod method_from(const std::string& name) {
    auto method = parse_method(name);
    if (!method) throw validation_error("unknown sampling method: " + name);
    return *method;
}

std::vector<SamplingMethod> methods_from(const std::vector<std::string>& names) {
    std::vector<SamplingMethod> methods;
    for (const auto& name : names) methods.push_back(method_from(name));
    return methods;
}

int run(int argc, char** argv) {
    CLI::App app{"human-rater budget triage for automatically scored tests"};
    app.require_subcommand(1);

    // --- synth -------------------------------------------------------------
    auto* synth = app.add_subcommand(
        "synth", "generate a synthetic human-labeled dataset (optionally with "
                 "pseudo-model predictions)");
    std::size_t synth_candidates = 1000;
    std::size_t synth_items = 6;
    int synth_classes = 6;
    std::vector<double> synth_dist;
    double synth_pseudo_acc = 0.0;
    std::uint64_t synth_seed = 0;
    std::string synth_out, synth_scale_out, synth_scale_in;
    synth->add_option("--candidates", synth_candidates, "number of candidates")
        ->capture_default_str();
    synth->add_option("--items", synth_items, "items per candidate")
        ->capture_default_str();
    synth->add_option("--classes", synth_classes, "number of score classes")
        ->capture_default_str();
    synth->add_option("--dist", synth_dist,
                      "per-class label probabilities (default: bell)");
    synth->add_option("--pseudo-acc", synth_pseudo_acc,
                      "also fill machine labels via a pseudo model of this "
                      "local accuracy");
    synth->add_option("--scale", synth_scale_in,
                      "existing scale JSON to use instead of the default");
    synth->add_option("--seed", synth_seed, "RNG seed")->required();
    synth->add_option("--out", synth_out, "output responses CSV")->required();
    synth->add_option("--scale-out", synth_scale_out, "output scale JSON");
    synth->callback([&] {
        SynthConfig config;
        config.n_candidates = synth_candidates;
        config.items_per_candidate = synth_items;
        config.num_classes = synth_classes;
        config.label_distribution = synth_dist;
        config.seed = synth_seed;
        ScoreScale scale = synth_scale_in.empty() ? default_scale(synth_classes)
                                                  : load_scale(synth_scale_in);
        config.num_classes = scale.num_classes();
        Dataset dataset = generate_labels(config, scale);
        if (synth_pseudo_acc > 0.0)
            dataset = apply_pseudo_model(
                dataset, {synth_pseudo_acc, derive_seed(synth_seed, 0x70736575ULL)});
        save_dataset(dataset, synth_out);
        if (!synth_scale_out.empty()) save_scale(scale, synth_scale_out);
        std::cout << "wrote " << dataset.size() << " responses for "
                  << dataset.candidate_ids().size() << " candidates to " << synth_out
                  << "\n";
    });

    // --- split -------------------------------------------------------------
    auto* split = app.add_subcommand(
        "split", "candidate-wise train/test split of a responses CSV");
    std::string split_in, split_scale, split_train_out, split_test_out;
    double split_fraction = 0.7;
    std::uint64_t split_seed = 0;
    split->add_option("--responses", split_in, "input responses CSV")->required();
    split->add_option("--scale", split_scale, "scale JSON")->required();
    split->add_option("--train-fraction", split_fraction,
                      "fraction of candidates in the train split")
        ->capture_default_str();
    split->add_option("--seed", split_seed, "RNG seed")->capture_default_str();
    split->add_option("--train-out", split_train_out, "train responses CSV")
        ->required();
    split->add_option("--test-out", split_test_out, "test responses CSV")->required();
    split->callback([&] {
        auto dataset = load_dataset(split_in, split_scale);
        auto [train, test] = split_by_candidate(dataset, split_fraction, split_seed);
        save_dataset(train, split_train_out);
        save_dataset(test, split_test_out);
        std::cout << "split " << dataset.candidate_ids().size() << " candidates into "
                  << train.candidate_ids().size() << " train / "
                  << test.candidate_ids().size() << " test\n";
    });

    // --- matrix ------------------------------------------------------------
    auto* matrix_cmd = app.add_subcommand(
        "matrix", "build the human-machine agreement matrix from double-scored data");
    std::string matrix_in, matrix_scale, matrix_out;
    double matrix_alpha = 0.0;
    matrix_cmd->add_option("--train", matrix_in, "training responses CSV")->required();
    matrix_cmd->add_option("--scale", matrix_scale, "scale JSON")->required();
    matrix_cmd->add_option("--alpha", matrix_alpha,
                           "optional add-alpha smoothing for small training sets")
        ->capture_default_str();
    matrix_cmd->add_option("--out", matrix_out, "output matrix JSON")->required();
    matrix_cmd->callback([&] {
        auto dataset = load_dataset(matrix_in, matrix_scale);
        std::vector<std::pair<int, int>> pairs;
        for (const auto& r : dataset.responses()) {
            if (!r.machine_label || !r.human_label)
                throw validation_error(
                    "matrix training data must be fully double-scored; (" +
                    r.candidate_id + ", " + r.item_id + ") is not");
            pairs.emplace_back(*r.machine_label, *r.human_label);
        }
        auto matrix = build_agreement_matrix(pairs, dataset.scale(), matrix_alpha);
        save_matrix(matrix, matrix_out);
        std::cout << "wrote agreement matrix from " << pairs.size() << " pairs to "
                  << matrix_out << "\n";
    });

    // --- simulate ----------------------------------------------------------
    auto* simulate = app.add_subcommand(
        "simulate", "budget sweep: draw samples, apply simulated expert scores, "
                    "report before/after global metrics");
    std::string sim_in, sim_scale, sim_matrix, sim_out, sim_tag = "model";
    std::string sim_policy = "rounded_mean";
    std::vector<std::string> sim_methods = {"random", "uncertainty", "reward"};
    std::vector<double> sim_budgets = {0.1, 0.2, 0.3, 0.4, 0.6, 0.8};
    std::size_t sim_trials = 20;
    std::uint64_t sim_seed = 0;
    simulate->add_option("--test", sim_in, "test responses CSV (fully human-labeled)")
        ->required();
    simulate->add_option("--scale", sim_scale, "scale JSON")->required();
    simulate->add_option("--matrix", sim_matrix, "agreement matrix JSON")->required();
    simulate->add_option("--methods", sim_methods, "sampling methods to compare")
        ->capture_default_str();
    simulate->add_option("--budgets", sim_budgets, "budget fractions in (0, 1]")
        ->capture_default_str();
    simulate->add_option("--trials", sim_trials, "trials per configuration")
        ->capture_default_str();
    simulate->add_option("--policy", sim_policy,
                         "aggregation policy: rounded_mean (half-up) or median")
        ->capture_default_str();
    simulate->add_option("--model-tag", sim_tag, "label for the report rows")
        ->capture_default_str();
    simulate->add_option("--seed", sim_seed, "RNG seed")->required();
    simulate->add_option("--out", sim_out, "output sweep CSV")->required();
    simulate->callback([&] {
        auto dataset = load_dataset(sim_in, sim_scale);
        auto matrix = load_matrix(sim_matrix);
        ensure_same_scale(matrix, dataset, "simulate");
        SweepConfig config;
        config.model_tag = sim_tag;
        config.methods = methods_from(sim_methods);
        config.budgets = sim_budgets;
        config.trials = sim_trials;
        config.seed = sim_seed;
        config.policy = policy_from(sim_policy);
        auto rows = run_sweep(dataset, matrix, config);
        save_sweep_csv(rows, sim_out);
        std::cout << "wrote " << rows.size() << " sweep rows to " << sim_out << "\n";
    });

    // --- estimate ----------------------------------------------------------
    auto* estimate = app.add_subcommand(
        "estimate", "triage then estimate post-triage metrics with lower-bound "
                    "guarantees from a confidence-weighted candidate sample");
    std::string est_in, est_scale, est_matrix, est_out;
    std::string est_method = "reward", est_policy = "rounded_mean";
    double est_budget = 0.8, est_level = 0.95;
    std::size_t est_n = 200, est_B = 1000;
    std::uint64_t est_seed = 0;
    bool est_weighted = false;
    estimate->add_option("--test", est_in, "test responses CSV")->required();
    estimate->add_option("--scale", est_scale, "scale JSON")->required();
    estimate->add_option("--matrix", est_matrix, "agreement matrix JSON")->required();
    estimate->add_option("--method", est_method, "triage sampling method")
        ->capture_default_str();
    estimate->add_option("--budget", est_budget, "triage budget fraction")
        ->capture_default_str();
    estimate->add_option("--n-est", est_n, "estimation sample size (candidates)")
        ->capture_default_str();
    estimate->add_option("--level", est_level, "confidence level")
        ->capture_default_str();
    estimate->add_option("--bootstrap", est_B, "bootstrap replicates")
        ->capture_default_str();
    estimate->add_option("--policy", est_policy, "aggregation policy")
        ->capture_default_str();
    estimate->add_flag("--weighted", est_weighted,
                       "use the 1/p-reweighted (Hajek) point estimator instead "
                       "of the unweighted one");
    estimate->add_option("--seed", est_seed, "RNG seed")->required();
    estimate->add_option("--out", est_out, "output report JSON")->required();
    estimate->callback([&] {
        auto dataset = load_dataset(est_in, est_scale);
        auto matrix = load_matrix(est_matrix);
        EstimateConfig config;
        config.method = method_from(est_method);
        config.budget_fraction = est_budget;
        config.estimation_sample_size = est_n;
        config.level = est_level;
        config.bootstrap_replicates = est_B;
        config.seed = est_seed;
        config.policy = policy_from(est_policy);
        config.estimator =
            est_weighted ? PointEstimator::hajek : PointEstimator::unweighted;
        auto result = run_estimate(dataset, matrix, config);
        nlohmann::json doc = report_to_json(result.report);
        doc["method"] = est_method;
        doc["budget_fraction"] = est_budget;
        if (result.truth) doc["true_metrics"] = metric_report_to_json(*result.truth);
        // effective shape of the candidate sampling distribution, so
        // near-uniformity on large datasets is visible in the report
        double min_p = 1.0, max_p = 0.0, sum_sq = 0.0;
        for (double p : result.confidences.probs) {
            min_p = std::min(min_p, p);
            max_p = std::max(max_p, p);
            sum_sq += p * p;
        }
        doc["confidence_distribution"] = {
            {"candidates", result.confidences.probs.size()},
            {"min_prob", min_p},
            {"max_prob", max_p},
            {"effective_candidates", 1.0 / sum_sq}};
        write_file(est_out, doc.dump(2) + "\n");
        std::cout << "accuracy " << fmt_double(result.report.accuracy_point)
                  << " (lower bound " << fmt_double(result.report.accuracy_lower_bound)
                  << "), qwk " << fmt_double(result.report.qwk_point)
                  << " (lower bound " << fmt_double(result.report.qwk_lower_bound)
                  << ")\n";
    });

    // --- coverage ----------------------------------------------------------
    auto* coverage = app.add_subcommand(
        "coverage", "Monte-Carlo check that guarantee bounds stay below the "
                    "known post-triage truth");
    std::string cov_in, cov_scale, cov_matrix, cov_out;
    std::string cov_method = "reward", cov_policy = "rounded_mean";
    double cov_budget = 0.8, cov_level = 0.95;
    std::size_t cov_n = 200, cov_B = 1000, cov_reps = 200;
    std::uint64_t cov_seed = 0;
    coverage->add_option("--test", cov_in, "test responses CSV")->required();
    coverage->add_option("--scale", cov_scale, "scale JSON")->required();
    coverage->add_option("--matrix", cov_matrix, "agreement matrix JSON")->required();
    coverage->add_option("--method", cov_method, "triage sampling method")
        ->capture_default_str();
    coverage->add_option("--budget", cov_budget, "triage budget fraction")
        ->capture_default_str();
    coverage->add_option("--n-est", cov_n, "estimation sample size")
        ->capture_default_str();
    coverage->add_option("--level", cov_level, "confidence level")
        ->capture_default_str();
    coverage->add_option("--bootstrap", cov_B, "bootstrap replicates")
        ->capture_default_str();
    coverage->add_option("--replications", cov_reps, "Monte-Carlo replications")
        ->capture_default_str();
    coverage->add_option("--policy", cov_policy, "aggregation policy")
        ->capture_default_str();
    coverage->add_option("--seed", cov_seed, "RNG seed")->capture_default_str();
    coverage->add_option("--out", cov_out, "output coverage CSV")->required();
    coverage->callback([&] {
        auto dataset = load_dataset(cov_in, cov_scale);
        auto matrix = load_matrix(cov_matrix);
        EstimateConfig config;
        config.method = method_from(cov_method);
        config.budget_fraction = cov_budget;
        config.estimation_sample_size = cov_n;
        config.level = cov_level;
        config.bootstrap_replicates = cov_B;
        config.seed = cov_seed;
        config.policy = policy_from(cov_policy);
        auto rows = run_coverage(dataset, matrix, config, cov_reps);
        save_coverage_csv(rows, cov_out);
        std::size_t acc_hits = 0, qwk_hits = 0;
        for (const auto& row : rows) {
            if (row.metric == "accuracy" && row.bound <= row.truth) ++acc_hits;
            if (row.metric == "qwk" && row.bound <= row.truth) ++qwk_hits;
        }
        std::cout << "coverage over " << cov_reps << " replications: accuracy "
                  << acc_hits << "/" << cov_reps << ", qwk " << qwk_hits << "/"
                  << cov_reps << "\n";
    });

    // --- plot --------------------------------------------------------------
    auto* plot = app.add_subcommand("plot", "render a sweep report as an SVG chart");
    std::string plot_in, plot_out;
    plot->add_option("--report", plot_in, "sweep CSV from simulate")->required();
    plot->add_option("--out", plot_out, "output SVG")->required();
    plot->callback([&] {
        auto rows = load_sweep_csv(plot_in);
        write_file(plot_out, render_sweep_svg(rows));
        std::cout << "wrote " << plot_out << "\n";
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // bad flags count as validation errors
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const triage::io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const triage::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
