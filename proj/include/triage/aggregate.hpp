#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "triage/core.hpp"

namespace triage {

/// How a candidate's item scores collapse into one global score.
/// rounded_mean uses half-up rounding on ordinal indices (2.5 -> 3);
/// median is the lower median of the sorted indices.
enum class AggregationPolicy { rounded_mean, median };

inline std::string to_string(AggregationPolicy policy) {
    return policy == AggregationPolicy::rounded_mean ? "rounded_mean" : "median";
}

inline std::optional<AggregationPolicy> parse_policy(std::string_view name) {
    if (name == "rounded_mean") return AggregationPolicy::rounded_mean;
    if (name == "median") return AggregationPolicy::median;
    return std::nullopt;
}

/// Global score of one candidate from item-level class indices.
inline int global_score(std::span<const int> item_scores, AggregationPolicy policy) {
    if (item_scores.empty())
        throw validation_error("global_score: empty item score sequence");
    for (int s : item_scores)
        if (s < 0) throw validation_error("global_score: negative class index");

    if (policy == AggregationPolicy::rounded_mean) {
        // half-up rounding of sum/n in exact integer arithmetic
        long long sum = 0;
        for (int s : item_scores) sum += s;
        const long long n = static_cast<long long>(item_scores.size());
        return static_cast<int>((2 * sum + n) / (2 * n));
    }
    std::vector<int> sorted(item_scores.begin(), item_scores.end());
    std::sort(sorted.begin(), sorted.end());
    return sorted[(sorted.size() - 1) / 2];
}

struct GlobalRow {
    int machine = 0;
    std::optional<int> human;  // present iff every response was human-labeled
};

/// One global (machine, human) row per candidate, in dataset candidate order.
struct GlobalTable {
    std::vector<std::string> candidate_ids;
    std::vector<GlobalRow> rows;
};

/// Collapses every candidate's responses into global scores. The machine side
/// requires a prediction on every response; the human side is filled only for
/// fully human-labeled candidates.
inline GlobalTable aggregate_dataset(const Dataset& dataset, AggregationPolicy policy) {
    GlobalTable table;
    table.candidate_ids = dataset.candidate_ids();
    table.rows.reserve(table.candidate_ids.size());
    std::vector<int> machine, human;
    for (const auto& candidate : table.candidate_ids) {
        machine.clear();
        human.clear();
        bool human_complete = true;
        for (std::size_t pos : dataset.responses_of(candidate)) {
            const auto& r = dataset.responses()[pos];
            if (!r.machine_label)
                throw validation_error("candidate " + candidate +
                                       " has an unscored machine response");
            machine.push_back(*r.machine_label);
            if (r.human_label)
                human.push_back(*r.human_label);
            else
                human_complete = false;
        }
        GlobalRow row;
        row.machine = global_score(machine, policy);
        if (human_complete) row.human = global_score(human, policy);
        table.rows.push_back(row);
    }
    return table;
}

} // namespace triage
