#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "triage/aggregate.hpp"
#include "triage/core.hpp"

namespace triage {

/// Global-level agreement metrics over the candidates that have a human
/// global score.
struct MetricReport {
    double accuracy = 0.0;
    double qwk = 0.0;
    std::size_t n = 0;
};

inline void check_paired(std::span<const int> predictions, std::span<const int> labels) {
    if (predictions.size() != labels.size())
        throw validation_error("prediction/label length mismatch");
    if (predictions.empty())
        throw validation_error("empty prediction sequence");
}

inline double accuracy(std::span<const int> predictions, std::span<const int> labels) {
    check_paired(predictions, labels);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i)
        if (predictions[i] == labels[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

/// counts[label][prediction], entries summing to the sequence length.
inline std::vector<std::vector<std::int64_t>> confusion(
    std::span<const int> predictions, std::span<const int> labels, int num_classes) {
    check_paired(predictions, labels);
    const std::size_t k = static_cast<std::size_t>(num_classes);
    std::vector<std::vector<std::int64_t>> counts(k, std::vector<std::int64_t>(k, 0));
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= num_classes || predictions[i] < 0 ||
            predictions[i] >= num_classes)
            throw validation_error("confusion: class index out of range");
        ++counts[static_cast<std::size_t>(labels[i])]
                [static_cast<std::size_t>(predictions[i])];
    }
    return counts;
}

/// Quadratic weighted kappa over a (possibly fractionally weighted) confusion
/// matrix, counts[label][prediction].
///
///   QWK = 1 - sum(w .* O) / sum(w .* E),  w_ij = (i-j)^2 / (K-1)^2
///
/// with O the normalized matrix and E the outer product of its marginals.
/// The 0/0 case (both marginals a point mass on the same class) is defined
/// as 1.0: trivially perfect agreement.
inline double qwk_from_counts(const std::vector<std::vector<double>>& counts) {
    const std::size_t k = counts.size();
    if (k < 2) throw validation_error("qwk needs at least 2 classes");
    double total = 0.0;
    for (const auto& row : counts) {
        if (row.size() != k) throw validation_error("qwk: matrix not square");
        for (double c : row) total += c;
    }
    if (total <= 0.0) throw validation_error("qwk: empty confusion matrix");

    std::vector<double> label_marginal(k, 0.0), pred_marginal(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            label_marginal[i] += counts[i][j];
            pred_marginal[j] += counts[i][j];
        }

    const double denom_scale = static_cast<double>((k - 1) * (k - 1));
    double observed = 0.0, expected = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            const double d = static_cast<double>(i) - static_cast<double>(j);
            const double w = d * d / denom_scale;
            observed += w * counts[i][j] / total;
            expected += w * (label_marginal[i] / total) * (pred_marginal[j] / total);
        }
    if (expected == 0.0) return 1.0;
    return 1.0 - observed / expected;
}

inline double qwk(std::span<const int> predictions, std::span<const int> labels,
                  int num_classes) {
    auto counts = confusion(predictions, labels, num_classes);
    std::vector<std::vector<double>> dcounts(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        dcounts[i].assign(counts[i].begin(), counts[i].end());
    return qwk_from_counts(dcounts);
}

/// Metrics of machine vs human global scores over the labeled candidates.
inline MetricReport report_from_table(const GlobalTable& table, int num_classes) {
    std::vector<int> machine, human;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (!table.rows[i].human) continue;
        machine.push_back(table.rows[i].machine);
        human.push_back(*table.rows[i].human);
    }
    if (machine.empty())
        throw validation_error("no candidates with a human global score");
    MetricReport report;
    report.accuracy = accuracy(machine, human);
    report.qwk = qwk(machine, human, num_classes);
    report.n = machine.size();
    return report;
}

} // namespace triage
