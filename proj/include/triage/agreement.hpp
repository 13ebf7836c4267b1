#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "triage/core.hpp"

namespace triage {

inline constexpr double kRowSumTolerance = 1e-9;

/// Row-stochastic human-machine agreement matrix.
/// probs[m][h] = P(human boundary = h | machine predicted m).
/// row_counts holds the raw number of machine predictions behind each row;
/// a zero count marks a fallback row (class never predicted in the data).
class AgreementMatrix {
public:
    static AgreementMatrix from_rows(ScoreScale scale,
                                     std::vector<std::vector<double>> probs,
                                     std::vector<std::int64_t> row_counts) {
        const std::size_t k = static_cast<std::size_t>(scale.num_classes());
        if (probs.size() != k || row_counts.size() != k)
            throw validation_error("agreement matrix must be KxK with K row counts");
        for (std::size_t m = 0; m < k; ++m) {
            if (probs[m].size() != k)
                throw validation_error("agreement matrix row " + std::to_string(m) +
                                       " has wrong length");
            if (row_counts[m] < 0)
                throw validation_error("negative row count");
            double sum = 0.0;
            for (double p : probs[m]) {
                if (!(p >= 0.0 && p <= 1.0))
                    throw validation_error("agreement matrix entry outside [0, 1]");
                sum += p;
            }
            if (std::abs(sum - 1.0) > kRowSumTolerance)
                throw validation_error("matrix not row-stochastic: row " +
                                       std::to_string(m) + " sums to " +
                                       std::to_string(sum));
        }
        return AgreementMatrix(std::move(scale), std::move(probs), std::move(row_counts));
    }

    const ScoreScale& scale() const { return scale_; }
    int num_classes() const { return scale_.num_classes(); }
    const std::vector<std::vector<double>>& probs() const { return probs_; }
    const std::vector<std::int64_t>& row_counts() const { return row_counts_; }

    double prob(int machine, int human) const {
        if (!scale_.contains_index(machine) || !scale_.contains_index(human))
            throw validation_error("agreement matrix lookup out of range: (" +
                                   std::to_string(machine) + ", " +
                                   std::to_string(human) + ")");
        return probs_[static_cast<std::size_t>(machine)]
                     [static_cast<std::size_t>(human)];
    }

private:
    AgreementMatrix(ScoreScale scale, std::vector<std::vector<double>> probs,
                    std::vector<std::int64_t> row_counts)
        : scale_(std::move(scale)),
          probs_(std::move(probs)),
          row_counts_(std::move(row_counts)) {}

    ScoreScale scale_;
    std::vector<std::vector<double>> probs_;
    std::vector<std::int64_t> row_counts_;
};

/// P(human | machine) from (machine, human) label pairs.
///
/// Rows are count-normalized. With laplace_alpha > 0, add-alpha smoothing is
/// applied per row. A class never predicted gets the one-hot diagonal row
/// (alpha = 0) or the uniform smoothed row (alpha > 0); either way its
/// row_count stays 0 so callers can see the fallback.
inline AgreementMatrix build_agreement_matrix(
    const std::vector<std::pair<int, int>>& pairs, const ScoreScale& scale,
    double laplace_alpha = 0.0) {
    if (pairs.empty()) throw validation_error("no pairs");
    if (laplace_alpha < 0.0) throw validation_error("negative smoothing alpha");

    const std::size_t k = static_cast<std::size_t>(scale.num_classes());
    std::vector<std::vector<std::int64_t>> counts(k, std::vector<std::int64_t>(k, 0));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto [machine, human] = pairs[i];
        if (!scale.contains_index(machine) || !scale.contains_index(human))
            throw validation_error(
                "pair " + std::to_string(i) + " out of range: (" +
                std::to_string(machine) + ", " + std::to_string(human) + ")");
        ++counts[static_cast<std::size_t>(machine)][static_cast<std::size_t>(human)];
    }

    std::vector<std::vector<double>> probs(k, std::vector<double>(k, 0.0));
    std::vector<std::int64_t> row_counts(k, 0);
    for (std::size_t m = 0; m < k; ++m) {
        std::int64_t total = 0;
        for (std::int64_t c : counts[m]) total += c;
        row_counts[m] = total;
        if (total == 0 && laplace_alpha == 0.0) {
            probs[m][m] = 1.0;  // never predicted: assume the machine is right
            continue;
        }
        const double denom = static_cast<double>(total) +
                             laplace_alpha * static_cast<double>(k);
        for (std::size_t h = 0; h < k; ++h)
            probs[m][h] = (static_cast<double>(counts[m][h]) + laplace_alpha) / denom;
    }
    return AgreementMatrix::from_rows(scale, std::move(probs), std::move(row_counts));
}

/// probs[machine][human]; throws on out-of-range indices.
inline double lookup_prob(const AgreementMatrix& matrix, int machine, int human) {
    return matrix.prob(machine, human);
}

} // namespace triage
