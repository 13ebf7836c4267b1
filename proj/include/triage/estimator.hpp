#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "triage/aggregate.hpp"
#include "triage/agreement.hpp"
#include "triage/core.hpp"
#include "triage/metrics.hpp"
#include "triage/rng.hpp"
#include "triage/samplers.hpp"

namespace triage {

/// Per-candidate confidence zeta = (1 - sum of the candidate's normalized
/// response uncertainties)^2, plus the Delta-smoothed sampling distribution
/// derived from it.
struct CandidateConfidenceTable {
    std::vector<std::string> candidate_ids;
    std::vector<double> confidence;  // raw zeta values
    std::vector<double> probs;       // normalized over candidates
};

/// How the estimation sample is turned into point estimates. The unweighted
/// estimator uses the sample means directly; hajek reweights each sampled
/// candidate by 1/p to undo non-uniform sampling.
enum class PointEstimator { unweighted, hajek };

inline std::string to_string(PointEstimator estimator) {
    return estimator == PointEstimator::unweighted ? "unweighted" : "hajek";
}

/// Response uncertainties are the class losses of the prediction classes,
/// normalized so they sum to 1 over the whole dataset (all zero when every
/// prediction class has zero loss). Candidate confidence aggregates them.
inline CandidateConfidenceTable candidate_confidence(const Dataset& dataset,
                                                     const AgreementMatrix& matrix) {
    if (dataset.size() == 0) throw validation_error("empty dataset");
    const auto loss = class_uncertainty(matrix);
    std::vector<double> u(dataset.size(), 0.0);
    double total = 0.0;
    for (std::size_t pos = 0; pos < dataset.size(); ++pos) {
        u[pos] = loss[static_cast<std::size_t>(detail::machine_label_at(dataset, pos))];
        total += u[pos];
    }
    if (total > 0.0)
        for (double& v : u) v /= total;
    else
        std::fill(u.begin(), u.end(), 0.0);

    CandidateConfidenceTable table;
    table.candidate_ids = dataset.candidate_ids();
    table.confidence.reserve(table.candidate_ids.size());
    double prob_total = 0.0;
    for (const auto& candidate : table.candidate_ids) {
        double sum_u = 0.0;
        for (std::size_t pos : dataset.responses_of(candidate)) sum_u += u[pos];
        const double zeta = (1.0 - sum_u) * (1.0 - sum_u);
        table.confidence.push_back(zeta);
        prob_total += zeta + kSmoothingDelta;
    }
    table.probs.reserve(table.confidence.size());
    for (double zeta : table.confidence)
        table.probs.push_back((zeta + kSmoothingDelta) / prob_total);
    return table;
}

/// Secondary sample of candidates for estimation, drawn without replacement
/// from the confidence distribution.
inline std::vector<std::string> draw_estimation_sample(
    const CandidateConfidenceTable& confidences, std::size_t n_est,
    std::uint64_t seed) {
    if (n_est > confidences.candidate_ids.size())
        throw validation_error("estimation sample size " + std::to_string(n_est) +
                               " exceeds candidate count " +
                               std::to_string(confidences.candidate_ids.size()));
    auto picked = draw_without_replacement(
        std::span<const double>(confidences.probs), n_est, seed);
    std::vector<std::string> ids;
    ids.reserve(picked.size());
    for (std::size_t i : picked) ids.push_back(confidences.candidate_ids[i]);
    return ids;
}

/// Point estimates plus one-sided lower confidence bounds for the global
/// accuracy and QWK of a triaged dataset.
struct GuaranteeReport {
    double accuracy_point = 0.0;
    double accuracy_lower_bound = 0.0;
    double qwk_point = 0.0;
    double qwk_lower_bound = 0.0;
    double confidence_level = 0.95;
    std::size_t estimation_sample_size = 0;
    std::size_t bootstrap_replicates = 0;
    PointEstimator estimator = PointEstimator::unweighted;
};

namespace detail {

struct SamplePoint {
    int machine = 0;
    int human = 0;
    double weight = 1.0;
};

inline double weighted_accuracy(std::span<const SamplePoint> points) {
    double hit = 0.0, total = 0.0;
    for (const auto& p : points) {
        total += p.weight;
        if (p.machine == p.human) hit += p.weight;
    }
    return hit / total;
}

inline double weighted_qwk(std::span<const SamplePoint> points, int num_classes) {
    const std::size_t k = static_cast<std::size_t>(num_classes);
    std::vector<std::vector<double>> counts(k, std::vector<double>(k, 0.0));
    for (const auto& p : points)
        counts[static_cast<std::size_t>(p.human)]
              [static_cast<std::size_t>(p.machine)] += p.weight;
    return qwk_from_counts(counts);
}

/// Empirical lower quantile: the floor((1-level)*B)-th order statistic.
inline double lower_quantile(std::vector<double> values, double level) {
    std::sort(values.begin(), values.end());
    auto idx = static_cast<std::size_t>((1.0 - level) *
                                        static_cast<double>(values.size()));
    idx = std::min(idx, values.size() - 1);
    return values[idx];
}

} // namespace detail

/// Estimates post-triage metrics from a candidate sample. Point estimates are
/// computed on the sample; lower bounds are the (1-level) quantile of B
/// percentile-bootstrap replicates (candidates resampled with replacement).
/// Replicate r derives its generator from (seed, r), so results do not depend
/// on evaluation order.
///
/// The hajek estimator needs the sampling distribution the sample was drawn
/// from (pass the confidence table used for draw_estimation_sample).
inline GuaranteeReport estimate_with_bound(
    const Dataset& dataset_after_triage, std::span<const std::string> sample,
    AggregationPolicy policy, double level, std::size_t bootstrap_replicates,
    std::uint64_t seed, PointEstimator estimator = PointEstimator::unweighted,
    const CandidateConfidenceTable* confidences = nullptr) {
    if (sample.empty()) throw validation_error("empty estimation sample");
    if (!(level > 0.5 && level < 1.0))
        throw validation_error("confidence level must lie in (0.5, 1)");
    if (bootstrap_replicates < 100)
        throw validation_error("bootstrap needs at least 100 replicates");
    if (estimator == PointEstimator::hajek && confidences == nullptr)
        throw validation_error("hajek estimator needs the sampling distribution");

    const int k = dataset_after_triage.scale().num_classes();
    std::vector<detail::SamplePoint> points;
    points.reserve(sample.size());
    std::vector<int> machine_scores, human_scores;
    for (const auto& candidate : sample) {
        machine_scores.clear();
        human_scores.clear();
        for (std::size_t pos : dataset_after_triage.responses_of(candidate)) {
            const auto& r = dataset_after_triage.responses()[pos];
            if (!r.machine_label)
                throw validation_error("candidate " + candidate +
                                       " lacks machine predictions");
            if (!r.human_label)
                throw validation_error("unlabeled candidate in sample: " + candidate);
            machine_scores.push_back(*r.machine_label);
            human_scores.push_back(*r.human_label);
        }
        detail::SamplePoint p;
        p.machine = global_score(machine_scores, policy);
        p.human = global_score(human_scores, policy);
        if (estimator == PointEstimator::hajek) {
            double prob = -1.0;
            for (std::size_t i = 0; i < confidences->candidate_ids.size(); ++i)
                if (confidences->candidate_ids[i] == candidate) {
                    prob = confidences->probs[i];
                    break;
                }
            if (prob <= 0.0)
                throw validation_error("sampled candidate missing from confidence table: " +
                                       candidate);
            p.weight = 1.0 / prob;
        }
        points.push_back(p);
    }

    GuaranteeReport report;
    report.confidence_level = level;
    report.estimation_sample_size = points.size();
    report.bootstrap_replicates = bootstrap_replicates;
    report.estimator = estimator;
    report.accuracy_point = detail::weighted_accuracy(points);
    report.qwk_point = detail::weighted_qwk(points, k);

    std::vector<double> acc_reps(bootstrap_replicates), qwk_reps(bootstrap_replicates);
    std::vector<detail::SamplePoint> resampled(points.size());
    for (std::size_t r = 0; r < bootstrap_replicates; ++r) {
        Rng rng(derive_seed(seed, r));
        for (auto& p : resampled) p = points[rng.uniform_index(points.size())];
        acc_reps[r] = detail::weighted_accuracy(resampled);
        qwk_reps[r] = detail::weighted_qwk(resampled, k);
    }
    report.accuracy_lower_bound = std::min(
        detail::lower_quantile(std::move(acc_reps), level), report.accuracy_point);
    report.qwk_lower_bound = std::min(
        detail::lower_quantile(std::move(qwk_reps), level), report.qwk_point);
    return report;
}

} // namespace triage
