#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace triage {

/// Raised when data violates a contract (bad labels, malformed rows, ...).
class validation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a file cannot be read or written.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ordered proficiency scale. Index 0 is the lowest band; all score
/// arithmetic happens on indices, labels are presentation only.
class ScoreScale {
public:
    explicit ScoreScale(std::vector<std::string> classes)
        : classes_(std::move(classes)) {
        if (classes_.size() < 2)
            throw validation_error("score scale needs at least 2 classes");
        std::unordered_set<std::string_view> seen;
        for (const auto& label : classes_) {
            if (label.empty())
                throw validation_error("score scale labels must be nonempty");
            if (!seen.insert(label).second)
                throw validation_error("duplicate scale label: " + label);
        }
    }

    int num_classes() const { return static_cast<int>(classes_.size()); }
    const std::vector<std::string>& classes() const { return classes_; }

    const std::string& label(int index) const {
        if (index < 0 || index >= num_classes())
            throw validation_error("class index out of range: " +
                                   std::to_string(index));
        return classes_[static_cast<std::size_t>(index)];
    }

    std::optional<int> index_of(std::string_view label) const {
        for (std::size_t i = 0; i < classes_.size(); ++i)
            if (classes_[i] == label) return static_cast<int>(i);
        return std::nullopt;
    }

    bool contains_index(int index) const {
        return index >= 0 && index < num_classes();
    }

    friend bool operator==(const ScoreScale&, const ScoreScale&) = default;

private:
    std::vector<std::string> classes_;
};

/// One (candidate, item) record. Labels are class indices into the scale;
/// either side may be absent (unscored).
struct ItemResponse {
    std::string candidate_id;
    std::string item_id;
    std::optional<int> machine_label;
    std::optional<int> human_label;
};

/// Immutable collection of responses plus a candidate lookup index.
/// Construction never throws on content problems; run validate_dataset()
/// to get a violation report, or ensure_valid() to enforce it.
class Dataset {
public:
    Dataset(ScoreScale scale, std::vector<ItemResponse> responses)
        : scale_(std::move(scale)), responses_(std::move(responses)) {
        for (std::size_t pos = 0; pos < responses_.size(); ++pos) {
            const auto& r = responses_[pos];
            auto [it, inserted] = by_candidate_.try_emplace(r.candidate_id);
            if (inserted) candidate_ids_.push_back(r.candidate_id);
            it->second.push_back(pos);
        }
    }

    const ScoreScale& scale() const { return scale_; }
    const std::vector<ItemResponse>& responses() const { return responses_; }
    std::size_t size() const { return responses_.size(); }

    /// Candidate ids in first-appearance order.
    const std::vector<std::string>& candidate_ids() const { return candidate_ids_; }

    const std::vector<std::size_t>& responses_of(const std::string& candidate_id) const {
        auto it = by_candidate_.find(candidate_id);
        if (it == by_candidate_.end())
            throw validation_error("unknown candidate: " + candidate_id);
        return it->second;
    }

    bool has_candidate(const std::string& candidate_id) const {
        return by_candidate_.count(candidate_id) > 0;
    }

    std::optional<std::size_t> find(const std::string& candidate_id,
                                    const std::string& item_id) const {
        auto it = by_candidate_.find(candidate_id);
        if (it == by_candidate_.end()) return std::nullopt;
        for (std::size_t pos : it->second)
            if (responses_[pos].item_id == item_id) return pos;
        return std::nullopt;
    }

    bool fully_machine_labeled() const {
        for (const auto& r : responses_)
            if (!r.machine_label) return false;
        return true;
    }

    bool fully_human_labeled() const {
        for (const auto& r : responses_)
            if (!r.human_label) return false;
        return true;
    }

private:
    ScoreScale scale_;
    std::vector<ItemResponse> responses_;
    std::vector<std::string> candidate_ids_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_candidate_;
};

struct Violation {
    std::string code;    // "duplicate key" | "label out of range" | "empty id"
    std::string message;
};

/// Reports every invariant violation; empty result means the dataset is valid.
inline std::vector<Violation> validate_dataset(const Dataset& dataset) {
    std::vector<Violation> out;
    const int k = dataset.scale().num_classes();
    std::unordered_map<std::string, std::unordered_set<std::string>> keys;
    for (std::size_t pos = 0; pos < dataset.size(); ++pos) {
        const auto& r = dataset.responses()[pos];
        const std::string where =
            "(" + r.candidate_id + ", " + r.item_id + ")";
        if (r.candidate_id.empty() || r.item_id.empty())
            out.push_back({"empty id", "response " + std::to_string(pos) +
                                           " has an empty candidate or item id"});
        if (!keys[r.candidate_id].insert(r.item_id).second)
            out.push_back({"duplicate key", "duplicate response key " + where});
        if (r.machine_label && (*r.machine_label < 0 || *r.machine_label >= k))
            out.push_back({"label out of range",
                           "machine_label " + std::to_string(*r.machine_label) +
                               " out of range at " + where});
        if (r.human_label && (*r.human_label < 0 || *r.human_label >= k))
            out.push_back({"label out of range",
                           "human_label " + std::to_string(*r.human_label) +
                               " out of range at " + where});
    }
    return out;
}

/// Throws validation_error describing the first few violations, if any.
inline void ensure_valid(const Dataset& dataset) {
    auto violations = validate_dataset(dataset);
    if (violations.empty()) return;
    std::string msg = "dataset invalid:";
    std::size_t shown = 0;
    for (const auto& v : violations) {
        if (shown++ == 5) {
            msg += " (+" + std::to_string(violations.size() - 5) + " more)";
            break;
        }
        msg += " [" + v.code + "] " + v.message + ";";
    }
    throw validation_error(msg);
}

} // namespace triage
