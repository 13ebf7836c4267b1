#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "triage/aggregate.hpp"
#include "triage/agreement.hpp"
#include "triage/core.hpp"
#include "triage/rng.hpp"

namespace triage {

/// Additive smoothing applied to raw uncertainties and rewards so that every
/// record keeps a nonzero sampling probability.
inline constexpr double kSmoothingDelta = 0.001;

/// Floor for diagonal entries before taking the log in class_uncertainty.
inline constexpr double kDiagonalFloor = 1e-6;

enum class SamplingMethod { random, uncertainty, reward };

inline std::string to_string(SamplingMethod method) {
    switch (method) {
        case SamplingMethod::random: return "random";
        case SamplingMethod::uncertainty: return "uncertainty";
        case SamplingMethod::reward: return "reward";
    }
    return "random";
}

inline std::optional<SamplingMethod> parse_method(std::string_view name) {
    if (name == "random") return SamplingMethod::random;
    if (name == "uncertainty") return SamplingMethod::uncertainty;
    if (name == "reward") return SamplingMethod::reward;
    return std::nullopt;
}

/// Normalized sampling distribution over dataset record positions.
struct SamplingWeights {
    std::vector<std::size_t> records;  // positions into dataset.responses()
    std::vector<double> probs;         // strictly positive, sums to 1
};

/// Per-class loss: cross entropy between the one-hot target for class m and
/// the matrix row for m, which reduces to -ln p(m|m). The diagonal is floored
/// so a zero entry yields a large finite loss instead of infinity.
inline std::vector<double> class_uncertainty(const AgreementMatrix& matrix) {
    const int k = matrix.num_classes();
    std::vector<double> loss(static_cast<std::size_t>(k), 0.0);
    for (int m = 0; m < k; ++m)
        loss[static_cast<std::size_t>(m)] =
            -std::log(std::max(matrix.prob(m, m), kDiagonalFloor));
    return loss;
}

namespace detail {

inline int machine_label_at(const Dataset& dataset, std::size_t pos) {
    const auto& r = dataset.responses()[pos];
    if (!r.machine_label)
        throw validation_error("record (" + r.candidate_id + ", " + r.item_id +
                               ") has no machine prediction");
    return *r.machine_label;
}

inline SamplingWeights normalized(std::vector<double> raw) {
    double total = 0.0;
    for (double w : raw) total += w;
    SamplingWeights weights;
    weights.records.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) weights.records[i] = i;
    weights.probs = std::move(raw);
    for (double& w : weights.probs) w /= total;
    return weights;
}

} // namespace detail

/// Uniform distribution: the random-sampling baseline.
inline SamplingWeights random_weights(const Dataset& dataset) {
    if (dataset.size() == 0) throw validation_error("empty dataset");
    return detail::normalized(std::vector<double>(dataset.size(), 1.0));
}

/// Every record weighted by the loss of its prediction class, Delta-smoothed
/// and normalized over the dataset.
inline SamplingWeights uncertainty_weights(const Dataset& dataset,
                                           const AgreementMatrix& matrix) {
    if (dataset.size() == 0) throw validation_error("empty dataset");
    const auto loss = class_uncertainty(matrix);
    std::vector<double> raw(dataset.size());
    for (std::size_t pos = 0; pos < dataset.size(); ++pos)
        raw[pos] = loss[static_cast<std::size_t>(
                       detail::machine_label_at(dataset, pos))] +
                   kSmoothingDelta;
    return detail::normalized(std::move(raw));
}

/// |change in the candidate's global score| when this record's prediction is
/// swapped to new_class. The dataset itself is never mutated.
inline int reward_of_swap_at(const Dataset& dataset, std::size_t pos, int new_class,
                             AggregationPolicy policy) {
    if (pos >= dataset.size())
        throw validation_error("record position out of range");
    if (!dataset.scale().contains_index(new_class))
        throw validation_error("swap class out of range: " + std::to_string(new_class));
    const auto& record = dataset.responses()[pos];
    std::vector<int> scores;
    int swapped_index = -1;
    for (std::size_t p : dataset.responses_of(record.candidate_id)) {
        if (p == pos) swapped_index = static_cast<int>(scores.size());
        scores.push_back(detail::machine_label_at(dataset, p));
    }
    const int before = global_score(scores, policy);
    scores[static_cast<std::size_t>(swapped_index)] = new_class;
    const int after = global_score(scores, policy);
    return std::abs(after - before);
}

inline int reward_of_swap(const Dataset& dataset, const ItemResponse& record,
                          int new_class, AggregationPolicy policy) {
    auto pos = dataset.find(record.candidate_id, record.item_id);
    if (!pos)
        throw validation_error("record (" + record.candidate_id + ", " +
                               record.item_id + ") not in dataset");
    return reward_of_swap_at(dataset, *pos, new_class, policy);
}

/// Expected reward of a record: sum over classes c of p(c|m) * reward of
/// swapping to c, plus the smoothing Delta.
inline double expected_reward_at(const Dataset& dataset, std::size_t pos,
                                 const AgreementMatrix& matrix,
                                 AggregationPolicy policy) {
    const int m = detail::machine_label_at(dataset, pos);
    double total = 0.0;
    for (int c = 0; c < matrix.num_classes(); ++c)
        total += matrix.prob(m, c) *
                 static_cast<double>(reward_of_swap_at(dataset, pos, c, policy));
    return total + kSmoothingDelta;
}

inline double expected_reward(const Dataset& dataset, const ItemResponse& record,
                              const AgreementMatrix& matrix,
                              AggregationPolicy policy) {
    auto pos = dataset.find(record.candidate_id, record.item_id);
    if (!pos)
        throw validation_error("record (" + record.candidate_id + ", " +
                               record.item_id + ") not in dataset");
    return expected_reward_at(dataset, *pos, matrix, policy);
}

/// Records weighted by their expected reward, normalized over the dataset.
inline SamplingWeights reward_weights(const Dataset& dataset,
                                      const AgreementMatrix& matrix,
                                      AggregationPolicy policy) {
    if (dataset.size() == 0) throw validation_error("empty dataset");
    std::vector<double> raw(dataset.size());
    for (std::size_t pos = 0; pos < dataset.size(); ++pos)
        raw[pos] = expected_reward_at(dataset, pos, matrix, policy);
    return detail::normalized(std::move(raw));
}

inline SamplingWeights weights_for(SamplingMethod method, const Dataset& dataset,
                                   const AgreementMatrix& matrix,
                                   AggregationPolicy policy) {
    switch (method) {
        case SamplingMethod::random: return random_weights(dataset);
        case SamplingMethod::uncertainty: return uncertainty_weights(dataset, matrix);
        case SamplingMethod::reward: return reward_weights(dataset, matrix, policy);
    }
    throw validation_error("unknown sampling method");
}

/// Orders all indices by exponential race keys E_i / w_i with E_i ~ Exp(1).
///
/// Taking the first k of this order is weighted sampling without replacement:
/// the smallest key wins with probability w_i / sum(w), and conditioned on the
/// winner the remaining keys rerun the same race, which is exactly the
/// sequential renormalized draw. A prefix of the order is therefore a valid
/// sample for every k at once, and samples are nested across budgets.
/// Weights need not be normalized; scaling them leaves the order unchanged.
inline std::vector<std::size_t> rank_by_weight(std::span<const double> weights,
                                               std::uint64_t seed) {
    if (weights.empty()) throw validation_error("rank_by_weight: no weights");
    Rng rng(seed);
    std::vector<double> key(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] > 0.0))
            throw validation_error("sampling weights must be strictly positive");
        key[i] = -std::log1p(-rng.unit()) / weights[i];
    }
    std::vector<std::size_t> order(weights.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
    return order;
}

inline std::vector<std::size_t> draw_without_replacement(
    std::span<const double> weights, std::size_t k, std::uint64_t seed) {
    if (k == 0) throw validation_error("sample size must be at least 1");
    if (k > weights.size())
        throw validation_error("sample size " + std::to_string(k) +
                               " exceeds population " +
                               std::to_string(weights.size()));
    auto order = rank_by_weight(weights, seed);
    order.resize(k);
    return order;
}

/// Draws k record positions according to the weight distribution.
inline std::vector<std::size_t> draw_without_replacement(
    const SamplingWeights& weights, std::size_t k, std::uint64_t seed) {
    auto picked = draw_without_replacement(std::span<const double>(weights.probs),
                                           k, seed);
    for (auto& i : picked) i = weights.records[i];
    return picked;
}

/// Number of records a budget fraction buys: floor(budget * N), at least 1.
inline std::size_t budget_sample_size(double budget_fraction, std::size_t n_records) {
    if (!(budget_fraction > 0.0 && budget_fraction <= 1.0))
        throw validation_error("budget fraction must lie in (0, 1]");
    auto k = static_cast<std::size_t>(budget_fraction *
                                      static_cast<double>(n_records));
    return std::max<std::size_t>(k, 1);
}

/// Simulates expert rating of the sampled records: their machine labels are
/// replaced by the human labels. Everything else is copied untouched.
inline Dataset apply_human_scores(const Dataset& dataset,
                                  std::span<const std::size_t> sample) {
    std::vector<ItemResponse> responses = dataset.responses();
    for (std::size_t pos : sample) {
        if (pos >= responses.size())
            throw validation_error("sampled record position out of range");
        auto& r = responses[pos];
        if (!r.human_label)
            throw validation_error("unlabeled record in sample: (" +
                                   r.candidate_id + ", " + r.item_id + ")");
        r.machine_label = r.human_label;
    }
    return Dataset(dataset.scale(), std::move(responses));
}

} // namespace triage
