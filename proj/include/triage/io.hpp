#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "triage/aggregate.hpp"
#include "triage/agreement.hpp"
#include "triage/core.hpp"
#include "triage/estimator.hpp"
#include "triage/metrics.hpp"
#include "triage/samplers.hpp"

namespace triage {

/// Shortest decimal string that round-trips the double exactly.
inline std::string fmt_double(double value) {
    char buf[40];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc())
        throw io_error("double formatting failed");
    return std::string(buf, end);
}

inline double parse_double(std::string_view text, const std::string& context) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw validation_error("bad number '" + std::string(text) + "' in " + context);
    return value;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw io_error("read failed for " + path.string());
    return buffer.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open " + path.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw io_error("write failed for " + path.string());
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> row_offsets;  // byte offset of each data row
};

namespace csv {

inline std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

/// RFC 4180-style parser tracking byte offsets for error reporting.
inline CsvTable parse(std::string_view text, const std::string& context) {
    CsvTable table;
    std::vector<std::string> fields;
    std::string field;
    std::size_t row_start = 0;
    std::size_t i = 0;
    bool row_open = false;

    auto fail = [&](const std::string& what, std::size_t offset) {
        throw validation_error(context + ": " + what + " at byte offset " +
                               std::to_string(offset));
    };
    auto end_row = [&]() {
        fields.push_back(std::move(field));
        field.clear();
        if (table.header.empty()) {
            table.header = std::move(fields);
        } else {
            if (fields.size() != table.header.size())
                fail("row has " + std::to_string(fields.size()) + " fields, expected " +
                         std::to_string(table.header.size()),
                     row_start);
            table.rows.push_back(std::move(fields));
            table.row_offsets.push_back(row_start);
        }
        fields.clear();
        row_open = false;
    };

    while (i < text.size()) {
        if (!row_open) {
            row_start = i;
            row_open = true;
        }
        char c = text[i];
        if (c == '"') {
            if (!field.empty()) fail("unexpected quote inside unquoted field", i);
            ++i;
            bool closed = false;
            while (i < text.size()) {
                if (text[i] == '"') {
                    if (i + 1 < text.size() && text[i + 1] == '"') {
                        field += '"';
                        i += 2;
                    } else {
                        ++i;
                        closed = true;
                        break;
                    }
                } else {
                    field += text[i++];
                }
            }
            if (!closed) fail("unterminated quoted field", row_start);
            if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r')
                fail("garbage after closing quote", i);
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            ++i;
        } else if (c == '\n') {
            end_row();
            ++i;
        } else if (c == '\r') {
            if (i + 1 >= text.size() || text[i + 1] != '\n')
                fail("bare carriage return", i);
            end_row();
            i += 2;
        } else {
            field += c;
            ++i;
        }
    }
    if (row_open) end_row();
    if (table.header.empty()) fail("empty file", 0);
    return table;
}

} // namespace csv

// ---------------------------------------------------------------------------
// Scale files: a JSON array of ordered label strings.

inline ScoreScale load_scale(const std::filesystem::path& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw validation_error("scale file " + path.string() + ": " + e.what());
    }
    if (!doc.is_array())
        throw validation_error("scale file " + path.string() +
                               " must be a JSON array of labels");
    std::vector<std::string> labels;
    for (const auto& item : doc) {
        if (!item.is_string())
            throw validation_error("scale file " + path.string() +
                                   " contains a non-string label");
        labels.push_back(item.get<std::string>());
    }
    return ScoreScale(std::move(labels));
}

inline void save_scale(const ScoreScale& scale, const std::filesystem::path& path) {
    nlohmann::json doc = scale.classes();
    write_file(path, doc.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Response files: CSV candidate_id,item_id,machine_label,human_label with
// string labels; an empty label field means unscored.

inline const std::vector<std::string>& dataset_header() {
    static const std::vector<std::string> header = {"candidate_id", "item_id",
                                                    "machine_label", "human_label"};
    return header;
}

inline Dataset load_dataset(const std::filesystem::path& responses_path,
                            const ScoreScale& scale) {
    const std::string context = responses_path.string();
    CsvTable table = csv::parse(read_file(responses_path), context);
    if (table.header != dataset_header())
        throw validation_error(context +
                               ": header must be candidate_id,item_id,machine_label,human_label");

    std::vector<ItemResponse> responses;
    responses.reserve(table.rows.size());
    for (std::size_t row = 0; row < table.rows.size(); ++row) {
        const auto& fields = table.rows[row];
        auto label_of = [&](const std::string& text,
                            const char* column) -> std::optional<int> {
            if (text.empty()) return std::nullopt;
            auto index = scale.index_of(text);
            if (!index)
                throw validation_error(context + " row " + std::to_string(row + 2) +
                                       ": unknown " + column + " '" + text + "'");
            return *index;
        };
        ItemResponse r;
        r.candidate_id = fields[0];
        r.item_id = fields[1];
        r.machine_label = label_of(fields[2], "machine_label");
        r.human_label = label_of(fields[3], "human_label");
        responses.push_back(std::move(r));
    }
    Dataset dataset(scale, std::move(responses));
    ensure_valid(dataset);
    return dataset;
}

inline Dataset load_dataset(const std::filesystem::path& responses_path,
                            const std::filesystem::path& scale_path) {
    return load_dataset(responses_path, load_scale(scale_path));
}

/// Rows sorted by (candidate_id, item_id) so identical datasets always
/// serialize to identical bytes.
inline void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
    std::vector<std::size_t> order(dataset.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ra = dataset.responses()[a];
        const auto& rb = dataset.responses()[b];
        if (ra.candidate_id != rb.candidate_id) return ra.candidate_id < rb.candidate_id;
        return ra.item_id < rb.item_id;
    });
    std::string out = "candidate_id,item_id,machine_label,human_label\n";
    for (std::size_t pos : order) {
        const auto& r = dataset.responses()[pos];
        out += csv::escape(r.candidate_id);
        out += ',';
        out += csv::escape(r.item_id);
        out += ',';
        if (r.machine_label) out += csv::escape(dataset.scale().label(*r.machine_label));
        out += ',';
        if (r.human_label) out += csv::escape(dataset.scale().label(*r.human_label));
        out += '\n';
    }
    write_file(path, out);
}

// ---------------------------------------------------------------------------
// Agreement matrix files: JSON {"scale": [...], "probs": [[...]],
// "row_counts": [...]}, probabilities at full double precision.

inline void save_matrix(const AgreementMatrix& matrix,
                        const std::filesystem::path& path) {
    nlohmann::json doc;
    doc["scale"] = matrix.scale().classes();
    doc["probs"] = matrix.probs();
    doc["row_counts"] = matrix.row_counts();
    write_file(path, doc.dump(2) + "\n");
}

inline AgreementMatrix load_matrix(const std::filesystem::path& path) {
    const std::string context = path.string();
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw validation_error(context + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("scale") || !doc.contains("probs") ||
        !doc.contains("row_counts"))
        throw validation_error(context +
                               ": expected object with scale, probs, row_counts");
    ScoreScale scale(doc["scale"].get<std::vector<std::string>>());
    auto probs = doc["probs"].get<std::vector<std::vector<double>>>();
    auto row_counts = doc["row_counts"].get<std::vector<std::int64_t>>();
    try {
        return AgreementMatrix::from_rows(std::move(scale), std::move(probs),
                                          std::move(row_counts));
    } catch (const validation_error& e) {
        throw validation_error(context + ": " + e.what());
    }
}

/// The matrix must have been built on the same scale as the dataset it is
/// applied to.
inline void ensure_same_scale(const AgreementMatrix& matrix, const Dataset& dataset,
                              const std::string& context) {
    if (!(matrix.scale() == dataset.scale()))
        throw validation_error(context +
                               ": matrix scale does not match dataset scale");
}

// ---------------------------------------------------------------------------
// Audit CSVs for sampling weights and confidence tables.

inline void save_weights_csv(const Dataset& dataset, const SamplingWeights& weights,
                             const std::filesystem::path& path) {
    std::string out = "candidate_id,item_id,probability\n";
    for (std::size_t i = 0; i < weights.records.size(); ++i) {
        const auto& r = dataset.responses()[weights.records[i]];
        out += csv::escape(r.candidate_id);
        out += ',';
        out += csv::escape(r.item_id);
        out += ',';
        out += fmt_double(weights.probs[i]);
        out += '\n';
    }
    write_file(path, out);
}

/// Drawn sample audit: the selected records in draw order.
inline void save_sample_csv(const Dataset& dataset,
                            std::span<const std::size_t> sample,
                            const std::filesystem::path& path) {
    std::string out = "candidate_id,item_id\n";
    for (std::size_t pos : sample) {
        const auto& r = dataset.responses()[pos];
        out += csv::escape(r.candidate_id);
        out += ',';
        out += csv::escape(r.item_id);
        out += '\n';
    }
    write_file(path, out);
}

inline void save_confidence_csv(const CandidateConfidenceTable& table,
                                const std::filesystem::path& path) {
    std::string out = "candidate_id,confidence,probability\n";
    for (std::size_t i = 0; i < table.candidate_ids.size(); ++i) {
        out += csv::escape(table.candidate_ids[i]);
        out += ',';
        out += fmt_double(table.confidence[i]);
        out += ',';
        out += fmt_double(table.probs[i]);
        out += '\n';
    }
    write_file(path, out);
}

// ---------------------------------------------------------------------------
// Global table CSV: candidate_id,global_machine,global_human (label strings,
// empty when absent), sorted by candidate id.

inline void save_global_table_csv(const GlobalTable& table, const ScoreScale& scale,
                                  const std::filesystem::path& path) {
    std::vector<std::size_t> order(table.candidate_ids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return table.candidate_ids[a] < table.candidate_ids[b];
    });
    std::string out = "candidate_id,global_machine,global_human\n";
    for (std::size_t i : order) {
        out += csv::escape(table.candidate_ids[i]);
        out += ',';
        out += csv::escape(scale.label(table.rows[i].machine));
        out += ',';
        if (table.rows[i].human) out += csv::escape(scale.label(*table.rows[i].human));
        out += '\n';
    }
    write_file(path, out);
}

// ---------------------------------------------------------------------------
// Guarantee reports: JSON with full-precision doubles.

inline nlohmann::json report_to_json(const GuaranteeReport& report) {
    nlohmann::json doc;
    doc["accuracy_point"] = report.accuracy_point;
    doc["accuracy_lower_bound"] = report.accuracy_lower_bound;
    doc["qwk_point"] = report.qwk_point;
    doc["qwk_lower_bound"] = report.qwk_lower_bound;
    doc["confidence_level"] = report.confidence_level;
    doc["estimation_sample_size"] = report.estimation_sample_size;
    doc["bootstrap_replicates"] = report.bootstrap_replicates;
    doc["estimator"] = to_string(report.estimator);
    return doc;
}

inline nlohmann::json metric_report_to_json(const MetricReport& report) {
    nlohmann::json doc;
    doc["accuracy"] = report.accuracy;
    doc["qwk"] = report.qwk;
    doc["n"] = report.n;
    return doc;
}

} // namespace triage
