#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "triage/core.hpp"
#include "triage/rng.hpp"

namespace triage {

/// Synthetic dataset shape: candidates x items with human labels drawn iid
/// from label_distribution. Leave label_distribution empty for the default
/// bell over classes (mid-scale bands most frequent).
struct SynthConfig {
    std::size_t n_candidates = 0;
    std::size_t items_per_candidate = 6;
    int num_classes = 6;
    std::vector<double> label_distribution;
    std::uint64_t seed = 0;
};

/// Pseudo model: corrupts exactly floor((1 - local_accuracy) * N) ground
/// truth labels into predictions.
struct PseudoModelConfig {
    double local_accuracy = 1.0;
    std::uint64_t seed = 0;
};

/// Discretized Gaussian bell centered on the scale midpoint with
/// sigma = (K-1)/3: mid-scale classes dominate, extremes stay rare but not
/// negligible (for K = 6: 0.083, 0.171, 0.245, 0.245, 0.171, 0.083).
inline std::vector<double> default_label_distribution(int num_classes) {
    std::vector<double> dist(static_cast<std::size_t>(num_classes));
    const double mid = static_cast<double>(num_classes - 1) / 2.0;
    const double sigma = static_cast<double>(num_classes - 1) / 3.0;
    double total = 0.0;
    for (int c = 0; c < num_classes; ++c) {
        const double d = static_cast<double>(c) - mid;
        dist[static_cast<std::size_t>(c)] = std::exp(-d * d / (2.0 * sigma * sigma));
        total += dist[static_cast<std::size_t>(c)];
    }
    for (double& p : dist) p /= total;
    return dist;
}

/// CEFR-style band names for the usual 6-class scale, generic names otherwise.
inline ScoreScale default_scale(int num_classes) {
    if (num_classes == 6)
        return ScoreScale(
            {"A2", "Low B1", "High B1", "Low B2", "High B2", "C"});
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(num_classes));
    for (int c = 0; c < num_classes; ++c)
        labels.push_back("band" + std::to_string(c + 1));
    return ScoreScale(std::move(labels));
}

/// Human-labeled dataset with no machine predictions.
inline Dataset generate_labels(const SynthConfig& config, const ScoreScale& scale) {
    if (config.n_candidates < 1 || config.items_per_candidate < 1)
        throw validation_error("synthetic counts must be at least 1");
    if (scale.num_classes() != config.num_classes)
        throw validation_error("scale size does not match num_classes");
    std::vector<double> dist = config.label_distribution.empty()
                                   ? default_label_distribution(config.num_classes)
                                   : config.label_distribution;
    if (dist.size() != static_cast<std::size_t>(config.num_classes))
        throw validation_error("label distribution size must equal num_classes");
    double total = 0.0;
    for (double p : dist) {
        if (p < 0.0) throw validation_error("label distribution entry negative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw validation_error("label distribution must sum to 1");
    std::vector<double> cdf(dist.size());
    double acc = 0.0;
    for (std::size_t c = 0; c < dist.size(); ++c) {
        acc += dist[c];
        cdf[c] = acc;
    }
    cdf.back() = 1.0;

    Rng rng(config.seed);
    std::vector<ItemResponse> responses;
    responses.reserve(config.n_candidates * config.items_per_candidate);
    const int cand_width = static_cast<int>(
        std::to_string(config.n_candidates).size());
    for (std::size_t c = 0; c < config.n_candidates; ++c) {
        std::string num = std::to_string(c + 1);
        std::string candidate =
            "cand" + std::string(static_cast<std::size_t>(cand_width) - num.size(), '0') + num;
        for (std::size_t i = 0; i < config.items_per_candidate; ++i) {
            ItemResponse r;
            r.candidate_id = candidate;
            r.item_id = "item" + std::to_string(i + 1);
            const double u = rng.unit();
            int label = 0;
            while (u >= cdf[static_cast<std::size_t>(label)]) ++label;
            r.human_label = label;
            responses.push_back(std::move(r));
        }
    }
    return Dataset(scale, std::move(responses));
}

inline Dataset generate_labels(const SynthConfig& config) {
    return generate_labels(config, default_scale(config.num_classes));
}

/// Fills machine predictions by corrupting an exact-count random subset of the
/// human labels; replacement classes are uniform over the other K-1 classes,
/// so a corrupted prediction never equals the truth.
inline Dataset apply_pseudo_model(const Dataset& dataset,
                                  const PseudoModelConfig& config) {
    if (!(config.local_accuracy > 0.0 && config.local_accuracy <= 1.0))
        throw validation_error("local accuracy must lie in (0, 1]");
    if (dataset.size() == 0) throw validation_error("empty dataset");

    std::vector<ItemResponse> responses = dataset.responses();
    for (const auto& r : responses)
        if (!r.human_label)
            throw validation_error("pseudo model needs human labels on every response: (" +
                                   r.candidate_id + ", " + r.item_id + ")");

    const auto n = responses.size();
    const auto n_flip = static_cast<std::size_t>(
        (1.0 - config.local_accuracy) * static_cast<double>(n));
    Rng rng(config.seed);
    std::vector<std::size_t> positions(n);
    for (std::size_t i = 0; i < n; ++i) positions[i] = i;
    rng.shuffle(positions);

    const int k = dataset.scale().num_classes();
    for (auto& r : responses) r.machine_label = r.human_label;
    for (std::size_t i = 0; i < n_flip; ++i) {
        auto& r = responses[positions[i]];
        const int truth = *r.human_label;
        int other = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(k - 1)));
        if (other >= truth) ++other;
        r.machine_label = other;
    }
    return Dataset(dataset.scale(), std::move(responses));
}

/// Candidate-wise train/test partition: all of a candidate's responses land
/// on the same side. round(train_fraction * candidates) go to train.
inline std::pair<Dataset, Dataset> split_by_candidate(const Dataset& dataset,
                                                      double train_fraction,
                                                      std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw validation_error("train fraction must lie in (0, 1)");
    std::vector<std::string> candidates = dataset.candidate_ids();
    if (candidates.size() < 2)
        throw validation_error("need at least 2 candidates to split");
    const auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(candidates.size())));
    if (n_train == 0 || n_train == candidates.size())
        throw validation_error("train fraction yields an empty split side");

    Rng rng(seed);
    rng.shuffle(candidates);
    std::unordered_set<std::string> train_set(candidates.begin(),
                                              candidates.begin() + static_cast<std::ptrdiff_t>(n_train));

    std::vector<ItemResponse> train_rows, test_rows;
    for (const auto& r : dataset.responses()) {
        if (train_set.count(r.candidate_id))
            train_rows.push_back(r);
        else
            test_rows.push_back(r);
    }
    return {Dataset(dataset.scale(), std::move(train_rows)),
            Dataset(dataset.scale(), std::move(test_rows))};
}

} // namespace triage
