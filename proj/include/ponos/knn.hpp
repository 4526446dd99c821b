#pragma once
// Nearest-neighbor score prediction over text embeddings: an exact linear
// scan under cosine similarity with a configurable acceptance threshold.
// Embeddings are produced upstream; this module only stores and queries them.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "ponos/errors.hpp"
#include "ponos/metric.hpp"
#include "ponos/thread_model.hpp"
#include "ponos/util.hpp"

namespace ponos {

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionError("vectors have dimensions " + std::to_string(a.size()) + " and " +
                             std::to_string(b.size()));
    }
    if (a.empty()) throw DimensionError("vectors must have dimension >= 1");
    double dot = 0.0;
    double norm_a = 0.0;
    double norm_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        norm_a += a[i] * a[i];
        norm_b += b[i] * b[i];
    }
    if (norm_a == 0.0 || norm_b == 0.0) throw ZeroVectorError("cosine of a zero vector");
    // Clamp against rounding so results stay in [-1, 1].
    return std::clamp(dot / (std::sqrt(norm_a) * std::sqrt(norm_b)), -1.0, 1.0);
}

inline double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    return cosine_similarity(std::span<const double>(a), std::span<const double>(b));
}

struct EmbeddingRecord {
    std::string content_id;
    std::vector<double> vector;
    double norm = 0.0;  // cached Euclidean norm, always > 0
};

inline EmbeddingRecord make_embedding_record(std::string content_id, std::vector<double> vector) {
    if (vector.empty()) throw DimensionError("embedding must have dimension >= 1");
    double norm_sq = 0.0;
    for (double x : vector) norm_sq += x * x;
    if (norm_sq == 0.0) {
        throw ZeroVectorError("embedding for '" + content_id + "' is the zero vector");
    }
    EmbeddingRecord record;
    record.content_id = std::move(content_id);
    record.vector = std::move(vector);
    record.norm = std::sqrt(norm_sq);
    return record;
}

struct NeighborResult {
    std::string content_id;
    PonosScore score;
    double similarity = 0.0;
};

// Exact scan index. Construction is single-writer; queries are const and
// safe to run concurrently once built.
class NeighborIndex {
public:
    explicit NeighborIndex(double tau = 0.8) : tau_(tau) {
        if (!(tau >= -1.0 && tau <= 1.0)) {
            throw InvalidArgumentError("tau must lie in [-1, 1]");
        }
    }

    void insert(EmbeddingRecord record, PonosScore score) {
        if (record.norm <= 0.0) {
            throw ZeroVectorError("embedding for '" + record.content_id + "' has no norm");
        }
        if (!entries_.empty() && record.vector.size() != dimension_) {
            throw DimensionError("embedding for '" + record.content_id + "' has dimension " +
                                 std::to_string(record.vector.size()) + ", index has " +
                                 std::to_string(dimension_));
        }
        dimension_ = record.vector.size();
        entries_.push_back({std::move(record), std::move(score)});
    }

    std::size_t size() const { return entries_.size(); }
    std::size_t dimension() const { return dimension_; }
    double tau() const { return tau_; }

    // Highest cosine similarity wins; equal similarities break toward the
    // lexicographically smaller content id. Absent when the index is empty
    // or the best similarity falls below tau.
    std::optional<NeighborResult> query_nearest(std::span<const double> query) const {
        if (entries_.empty()) return std::nullopt;
        if (query.size() != dimension_) {
            throw DimensionError("query has dimension " + std::to_string(query.size()) +
                                 ", index has " + std::to_string(dimension_));
        }
        double query_norm_sq = 0.0;
        for (double x : query) query_norm_sq += x * x;
        if (query_norm_sq == 0.0) throw ZeroVectorError("query is the zero vector");
        double query_norm = std::sqrt(query_norm_sq);

        const Entry* best = nullptr;
        double best_similarity = 0.0;
        for (const Entry& entry : entries_) {
            double dot = 0.0;
            for (std::size_t i = 0; i < dimension_; ++i) dot += query[i] * entry.record.vector[i];
            double similarity = std::clamp(dot / (query_norm * entry.record.norm), -1.0, 1.0);
            if (best == nullptr || similarity > best_similarity ||
                (similarity == best_similarity &&
                 entry.record.content_id < best->record.content_id)) {
                best = &entry;
                best_similarity = similarity;
            }
        }
        if (best_similarity < tau_) return std::nullopt;
        return NeighborResult{best->record.content_id, best->score, best_similarity};
    }

    std::optional<NeighborResult> query_nearest(const std::vector<double>& query) const {
        return query_nearest(std::span<const double>(query));
    }

private:
    struct Entry {
        EmbeddingRecord record;
        PonosScore score;
    };

    std::vector<Entry> entries_;
    double tau_;
    std::size_t dimension_ = 0;
};

// Embedding file: one {"content_id", "vector"} JSON object per line.
inline std::vector<EmbeddingRecord> load_embedding_records(const std::string& content) {
    std::vector<EmbeddingRecord> records;
    int line_no = 0;
    for (const std::string& raw : util::split_lines(content)) {
        ++line_no;
        std::string_view line = util::trim(raw);
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw ParseError("embedding line " + std::to_string(line_no) +
                             " is not a JSON object");
        }
        std::string content_id;
        std::vector<double> vector;
        try {
            content_id = j.at("content_id").get<std::string>();
            vector = j.at("vector").get<std::vector<double>>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("embedding line " + std::to_string(line_no) + ": " + e.what());
        }
        EmbeddingRecord record = make_embedding_record(std::move(content_id), std::move(vector));
        if (!records.empty() && record.vector.size() != records.front().vector.size()) {
            throw DimensionError("embedding line " + std::to_string(line_no) + " has dimension " +
                                 std::to_string(record.vector.size()) + ", expected " +
                                 std::to_string(records.front().vector.size()));
        }
        records.push_back(std::move(record));
    }
    return records;
}

// A persisted index line: the embedding joined with its score report.
struct IndexRecord {
    EmbeddingRecord embedding;
    ScoreReportRecord score;
};

// Joins embeddings with score reports on content_id. Every embedding must
// find a score; unmatched embedding ids raise JoinError. Score records
// without an embedding are simply unused.
inline std::vector<IndexRecord> join_embeddings_with_scores(
    std::vector<EmbeddingRecord> embeddings, const std::vector<ScoreReportRecord>& scores) {
    std::unordered_map<std::string, const ScoreReportRecord*> by_id;
    for (const ScoreReportRecord& score : scores) by_id[score.content_id] = &score;
    std::vector<IndexRecord> joined;
    std::vector<std::string> unmatched;
    joined.reserve(embeddings.size());
    for (EmbeddingRecord& embedding : embeddings) {
        auto it = by_id.find(embedding.content_id);
        if (it == by_id.end()) {
            unmatched.push_back(embedding.content_id);
            continue;
        }
        joined.push_back({std::move(embedding), *it->second});
    }
    if (!unmatched.empty()) {
        std::string ids;
        for (const std::string& id : unmatched) {
            if (!ids.empty()) ids += ", ";
            ids += id;
        }
        throw JoinError("embeddings without scores: " + ids);
    }
    return joined;
}

inline std::string index_records_to_jsonl(const std::vector<IndexRecord>& records) {
    std::string out;
    for (const IndexRecord& record : records) {
        nlohmann::json j = to_json(record.score);
        j["vector"] = record.embedding.vector;
        out += j.dump();
        out += '\n';
    }
    return out;
}

inline std::vector<IndexRecord> index_records_from_jsonl(const std::string& content) {
    std::vector<IndexRecord> records;
    int line_no = 0;
    for (const std::string& raw : util::split_lines(content)) {
        ++line_no;
        std::string_view line = util::trim(raw);
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw ParseError("index line " + std::to_string(line_no) + " is not a JSON object");
        }
        IndexRecord record;
        record.score = score_report_from_json(j);
        std::vector<double> vector;
        try {
            vector = j.at("vector").get<std::vector<double>>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("index line " + std::to_string(line_no) + ": " + e.what());
        }
        record.embedding = make_embedding_record(record.score.content_id, std::move(vector));
        records.push_back(std::move(record));
    }
    return records;
}

inline NeighborIndex build_index(const std::vector<IndexRecord>& records, double tau = 0.8) {
    NeighborIndex index(tau);
    for (const IndexRecord& record : records) {
        index.insert(record.embedding, score_from_report(record.score));
    }
    return index;
}

}  // namespace ponos
