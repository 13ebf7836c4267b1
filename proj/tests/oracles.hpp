#pragma once

// Independent reference implementations used to pin expected values in tests.
// Everything here is computed from first principles, never by calling the
// library code under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace oracles {

// Half-up rounded mean over ordinal indices, via plain floating arithmetic.
inline int rounded_mean(const std::vector<int>& scores) {
    double sum = 0.0;
    for (int s : scores) sum += s;
    return static_cast<int>(std::floor(sum / static_cast<double>(scores.size()) + 0.5));
}

inline int lower_median(std::vector<int> scores) {
    std::sort(scores.begin(), scores.end());
    return scores[(scores.size() - 1) / 2];
}

// Quadratic weighted kappa evaluated directly from the textbook formula.
inline double qwk(const std::vector<int>& predictions, const std::vector<int>& labels,
                  int num_classes) {
    const auto k = static_cast<std::size_t>(num_classes);
    const auto n = static_cast<double>(predictions.size());
    std::vector<std::vector<double>> observed(k, std::vector<double>(k, 0.0));
    std::vector<double> p_label(k, 0.0), p_pred(k, 0.0);
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        observed[static_cast<std::size_t>(labels[i])]
                [static_cast<std::size_t>(predictions[i])] += 1.0 / n;
        p_label[static_cast<std::size_t>(labels[i])] += 1.0 / n;
        p_pred[static_cast<std::size_t>(predictions[i])] += 1.0 / n;
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            const double d = static_cast<double>(i) - static_cast<double>(j);
            const double weight = d * d / static_cast<double>((k - 1) * (k - 1));
            num += weight * observed[i][j];
            den += weight * p_label[i] * p_pred[j];
        }
    if (den == 0.0) return 1.0;  // both raters constant on the same class
    return 1.0 - num / den;
}

// Cohen's kappa (unweighted), for the K=2 equivalence check.
inline double cohen_kappa(const std::vector<int>& predictions,
                          const std::vector<int>& labels, int num_classes) {
    const auto n = static_cast<double>(predictions.size());
    double po = 0.0;
    std::vector<double> p_label(static_cast<std::size_t>(num_classes), 0.0);
    std::vector<double> p_pred(static_cast<std::size_t>(num_classes), 0.0);
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] == labels[i]) po += 1.0 / n;
        p_label[static_cast<std::size_t>(labels[i])] += 1.0 / n;
        p_pred[static_cast<std::size_t>(predictions[i])] += 1.0 / n;
    }
    double pe = 0.0;
    for (std::size_t c = 0; c < p_label.size(); ++c) pe += p_label[c] * p_pred[c];
    if (pe == 1.0) return 1.0;
    return (po - pe) / (1.0 - pe);
}

// Expected reward of one record, rebuilt from scratch: for every
// class c, swap the record's prediction to c, recompute the candidate's
// global score, and weight |change| by p(c|m); then add the smoothing delta.
//
// candidate_scores: the machine scores of the record's candidate, with
// record_index pointing at the record being swapped. row: p(. | m).
inline double expected_reward(const std::vector<int>& candidate_scores,
                              std::size_t record_index,
                              const std::vector<double>& row, bool use_median,
                              double delta = 0.001) {
    auto aggregate = [&](const std::vector<int>& scores) {
        return use_median ? lower_median(scores) : rounded_mean(scores);
    };
    const int before = aggregate(candidate_scores);
    double total = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) {
        std::vector<int> swapped = candidate_scores;
        swapped[record_index] = static_cast<int>(c);
        total += row[c] * std::abs(aggregate(swapped) - before);
    }
    return total + delta;
}

// Exact record inclusion probabilities of k sequential weighted draws without
// replacement (draw proportional to weight, remove, renormalize, repeat),
// by enumerating every ordered draw sequence. Feasible for small N only.
inline std::vector<double> sequential_inclusion_probs(const std::vector<double>& weights,
                                                      std::size_t k) {
    const std::size_t n = weights.size();
    std::vector<double> inclusion(n, 0.0);
    std::vector<bool> taken(n, false);

    // depth-first over ordered sequences, carrying the sequence probability
    auto recurse = [&](auto&& self, std::size_t depth, double prob) -> void {
        if (depth == k) return;
        double remaining = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!taken[i]) remaining += weights[i];
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            const double p = prob * weights[i] / remaining;
            inclusion[i] += p;
            taken[i] = true;
            self(self, depth + 1, p);
            taken[i] = false;
        }
    };
    recurse(recurse, 0, 1.0);
    return inclusion;
}

} // namespace oracles
