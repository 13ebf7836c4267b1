#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "triage/aggregate.hpp"
#include "triage/agreement.hpp"
#include "triage/core.hpp"
#include "triage/estimator.hpp"
#include "triage/io.hpp"
#include "triage/metrics.hpp"
#include "triage/rng.hpp"
#include "triage/samplers.hpp"

namespace triage {

/// One sweep trial outcome: global metrics before and after spending
/// budget_fraction of the dataset on simulated expert rating.
struct SweepRow {
    std::string model_tag;
    std::string method;
    double budget_fraction = 0.0;
    std::uint64_t trial_seed = 0;
    double accuracy_after = 0.0;
    double qwk_after = 0.0;
    double accuracy_before = 0.0;
    double qwk_before = 0.0;
};

struct SweepConfig {
    std::string model_tag = "model";
    std::vector<SamplingMethod> methods = {SamplingMethod::random,
                                           SamplingMethod::uncertainty,
                                           SamplingMethod::reward};
    std::vector<double> budgets = {0.1, 0.2, 0.3, 0.4, 0.6, 0.8};
    std::size_t trials = 20;
    std::uint64_t seed = 0;
    AggregationPolicy policy = AggregationPolicy::rounded_mean;
};

/// Draws a budget-sized sample by the given method and replaces its machine
/// labels with the human labels.
inline Dataset run_triage(const Dataset& dataset, const AgreementMatrix& matrix,
                          SamplingMethod method, double budget_fraction,
                          std::uint64_t seed, AggregationPolicy policy) {
    const auto weights = weights_for(method, dataset, matrix, policy);
    const auto k = budget_sample_size(budget_fraction, dataset.size());
    const auto sample = draw_without_replacement(weights, k, seed);
    return apply_human_scores(dataset, sample);
}

/// Full budget sweep. Trial t reuses one key ranking per (method, trial) so
/// samples are nested across budgets; the trial seed is derived from
/// (seed, t) and shared across methods, pairing their trials. Rows come out
/// in (method, budget, trial) order.
inline std::vector<SweepRow> run_sweep(const Dataset& test,
                                       const AgreementMatrix& matrix,
                                       const SweepConfig& config) {
    if (test.size() == 0) throw validation_error("empty test dataset");
    if (config.trials < 1) throw validation_error("need at least 1 trial");
    if (config.methods.empty()) throw validation_error("no sampling methods given");
    if (config.budgets.empty()) throw validation_error("no budgets given");
    for (double b : config.budgets)
        if (!(b > 0.0 && b <= 1.0))
            throw validation_error("budget fraction must lie in (0, 1]");
    ensure_same_scale(matrix, test, "run_sweep");
    if (!test.fully_human_labeled())
        throw validation_error("sweep needs a fully human-labeled test set");

    const int k = test.scale().num_classes();
    const MetricReport before =
        report_from_table(aggregate_dataset(test, config.policy), k);

    std::vector<SweepRow> rows;
    rows.reserve(config.methods.size() * config.budgets.size() * config.trials);
    for (SamplingMethod method : config.methods) {
        const auto weights = weights_for(method, test, matrix, config.policy);
        std::vector<std::vector<std::size_t>> orders(config.trials);
        std::vector<std::uint64_t> trial_seeds(config.trials);
        for (std::size_t t = 0; t < config.trials; ++t) {
            trial_seeds[t] = derive_seed(config.seed, t);
            orders[t] = rank_by_weight(weights.probs, trial_seeds[t]);
        }
        for (double budget : config.budgets) {
            const auto sample_size = budget_sample_size(budget, test.size());
            for (std::size_t t = 0; t < config.trials; ++t) {
                std::vector<std::size_t> sample(orders[t].begin(),
                                                orders[t].begin() + static_cast<std::ptrdiff_t>(sample_size));
                for (auto& i : sample) i = weights.records[i];
                const Dataset corrected = apply_human_scores(test, sample);
                const MetricReport after =
                    report_from_table(aggregate_dataset(corrected, config.policy), k);
                SweepRow row;
                row.model_tag = config.model_tag;
                row.method = to_string(method);
                row.budget_fraction = budget;
                row.trial_seed = trial_seeds[t];
                row.accuracy_after = after.accuracy;
                row.qwk_after = after.qwk;
                row.accuracy_before = before.accuracy;
                row.qwk_before = before.qwk;
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

struct EstimateConfig {
    SamplingMethod method = SamplingMethod::reward;
    double budget_fraction = 0.8;
    std::size_t estimation_sample_size = 200;
    double level = 0.95;
    std::size_t bootstrap_replicates = 1000;
    std::uint64_t seed = 0;
    AggregationPolicy policy = AggregationPolicy::rounded_mean;
    PointEstimator estimator = PointEstimator::unweighted;
};

struct EstimateResult {
    GuaranteeReport report;
    CandidateConfidenceTable confidences;
    std::vector<std::string> sample;
    /// Full-population metrics of the triaged dataset (known here because the
    /// simulation holds all human labels; unavailable in production).
    std::optional<MetricReport> truth;
};

/// Triage followed by guarantee estimation: draw the confidence-weighted
/// candidate sample from the corrected dataset and bound its metrics.
inline EstimateResult run_estimate(const Dataset& test, const AgreementMatrix& matrix,
                                   const EstimateConfig& config) {
    ensure_same_scale(matrix, test, "run_estimate");
    const Dataset after =
        run_triage(test, matrix, config.method, config.budget_fraction,
                   derive_seed(config.seed, 0), config.policy);
    EstimateResult result;
    result.confidences = candidate_confidence(after, matrix);
    result.sample = draw_estimation_sample(result.confidences,
                                           config.estimation_sample_size,
                                           derive_seed(config.seed, 1));
    result.report = estimate_with_bound(
        after, result.sample, config.policy, config.level,
        config.bootstrap_replicates, derive_seed(config.seed, 2), config.estimator,
        &result.confidences);
    if (after.fully_human_labeled())
        result.truth = report_from_table(aggregate_dataset(after, config.policy),
                                         test.scale().num_classes());
    return result;
}

struct CoverageRow {
    std::size_t replication = 0;
    std::string metric;  // "accuracy" | "qwk"
    double point = 0.0;
    double bound = 0.0;
    double truth = 0.0;
};

/// Monte-Carlo check of the guarantee: triage once, then replicate the
/// estimation sampling + bootstrap and record each bound against the known
/// post-triage truth.
inline std::vector<CoverageRow> run_coverage(const Dataset& test,
                                             const AgreementMatrix& matrix,
                                             const EstimateConfig& config,
                                             std::size_t replications) {
    if (replications < 1) throw validation_error("need at least 1 replication");
    ensure_same_scale(matrix, test, "run_coverage");
    const Dataset after =
        run_triage(test, matrix, config.method, config.budget_fraction,
                   derive_seed(config.seed, 0), config.policy);
    const MetricReport truth = report_from_table(
        aggregate_dataset(after, config.policy), test.scale().num_classes());
    const CandidateConfidenceTable confidences = candidate_confidence(after, matrix);

    std::vector<CoverageRow> rows;
    rows.reserve(replications * 2);
    for (std::size_t rep = 0; rep < replications; ++rep) {
        const auto sample = draw_estimation_sample(
            confidences, config.estimation_sample_size,
            derive_seed(config.seed, 1000 + 2 * rep));
        const GuaranteeReport report = estimate_with_bound(
            after, sample, config.policy, config.level, config.bootstrap_replicates,
            derive_seed(config.seed, 1001 + 2 * rep), config.estimator, &confidences);
        rows.push_back({rep, "accuracy", report.accuracy_point,
                        report.accuracy_lower_bound, truth.accuracy});
        rows.push_back({rep, "qwk", report.qwk_point, report.qwk_lower_bound,
                        truth.qwk});
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Report file round trips.

inline void save_sweep_csv(const std::vector<SweepRow>& rows,
                           const std::filesystem::path& path) {
    std::string out =
        "model_tag,method,budget_fraction,trial_seed,accuracy_after,qwk_after,"
        "accuracy_before,qwk_before\n";
    for (const auto& row : rows) {
        out += csv::escape(row.model_tag);
        out += ',';
        out += row.method;
        out += ',';
        out += fmt_double(row.budget_fraction);
        out += ',';
        out += std::to_string(row.trial_seed);
        out += ',';
        out += fmt_double(row.accuracy_after);
        out += ',';
        out += fmt_double(row.qwk_after);
        out += ',';
        out += fmt_double(row.accuracy_before);
        out += ',';
        out += fmt_double(row.qwk_before);
        out += '\n';
    }
    write_file(path, out);
}

inline std::vector<SweepRow> load_sweep_csv(const std::filesystem::path& path) {
    const std::string context = path.string();
    CsvTable table = csv::parse(read_file(path), context);
    const std::vector<std::string> expected = {
        "model_tag", "method", "budget_fraction", "trial_seed",
        "accuracy_after", "qwk_after", "accuracy_before", "qwk_before"};
    if (table.header != expected)
        throw validation_error(context + ": unexpected sweep report header");
    std::vector<SweepRow> rows;
    rows.reserve(table.rows.size());
    for (const auto& fields : table.rows) {
        SweepRow row;
        row.model_tag = fields[0];
        row.method = fields[1];
        row.budget_fraction = parse_double(fields[2], context);
        try {
            row.trial_seed = std::stoull(fields[3]);
        } catch (const std::exception&) {
            throw validation_error("bad trial_seed '" + fields[3] + "' in " + context);
        }
        row.accuracy_after = parse_double(fields[4], context);
        row.qwk_after = parse_double(fields[5], context);
        row.accuracy_before = parse_double(fields[6], context);
        row.qwk_before = parse_double(fields[7], context);
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void save_coverage_csv(const std::vector<CoverageRow>& rows,
                              const std::filesystem::path& path) {
    std::string out = "replication,metric,point,bound,truth\n";
    for (const auto& row : rows) {
        out += std::to_string(row.replication);
        out += ',';
        out += row.metric;
        out += ',';
        out += fmt_double(row.point);
        out += ',';
        out += fmt_double(row.bound);
        out += ',';
        out += fmt_double(row.truth);
        out += '\n';
    }
    write_file(path, out);
}

} // namespace triage
