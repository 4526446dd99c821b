#pragma once
// Corpus ingestion and storage. Thread records arrive as one JSON object per
// line; the store keeps them queryable by id and by parent, flags orphan
// comments whose parent never resolves, and persists to a directory as the
// same JSONL schema plus a metadata sidecar, so ingest-then-export
// round-trips field-identically.

#include <algorithm>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ponos/errors.hpp"
#include "ponos/thread_model.hpp"
#include "ponos/util.hpp"

namespace ponos {

inline nlohmann::json thread_record_to_json(const ContentItem& item) {
    nlohmann::json j;
    j["id"] = item.id;
    j["kind"] = std::string(to_string(item.kind));
    j["parent_id"] = item.parent_id ? nlohmann::json(*item.parent_id) : nlohmann::json(nullptr);
    j["title"] = item.title ? nlohmann::json(*item.title) : nlohmann::json(nullptr);
    j["body"] = item.body;
    j["image_desc"] = item.image_desc ? nlohmann::json(*item.image_desc) : nlohmann::json(nullptr);
    j["score"] = item.score;
    j["created_utc"] = item.created_at;
    j["context"] = item.context.community_id;
    return j;
}

namespace detail {

inline std::optional<std::string> optional_string_field(const nlohmann::json& j,
                                                        const char* field) {
    if (!j.contains(field) || j[field].is_null()) return std::nullopt;
    if (!j[field].is_string()) {
        throw ParseError(std::string("field '") + field + "' must be a string or null");
    }
    return j[field].get<std::string>();
}

inline std::string required_string_field(const nlohmann::json& j, const char* field) {
    if (!j.contains(field)) throw ParseError(std::string("missing field '") + field + "'");
    if (!j[field].is_string()) {
        throw ParseError(std::string("field '") + field + "' must be a string");
    }
    return j[field].get<std::string>();
}

inline std::int64_t required_int_field(const nlohmann::json& j, const char* field) {
    if (!j.contains(field)) throw ParseError(std::string("missing field '") + field + "'");
    if (!j[field].is_number_integer()) {
        throw ParseError(std::string("field '") + field + "' must be an integer");
    }
    return j[field].get<std::int64_t>();
}

}  // namespace detail

inline const std::unordered_set<std::string>& thread_record_fields() {
    static const std::unordered_set<std::string> fields = {
        "id",   "kind",       "parent_id", "title",   "body",
        "image_desc", "score", "created_utc", "context"};
    return fields;
}

// Parses one thread record. Unknown fields are reported through `warnings`
// and ignored; structural problems throw ParseError.
inline ContentItem thread_record_from_json(const nlohmann::json& j,
                                           std::vector<std::string>* warnings = nullptr) {
    if (!j.is_object()) throw ParseError("thread record must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (thread_record_fields().count(it.key()) == 0 && warnings != nullptr) {
            warnings->push_back("unknown field '" + it.key() + "' ignored");
        }
    }
    ContentItem item;
    item.id = detail::required_string_field(j, "id");
    item.kind = item_kind_from_string(detail::required_string_field(j, "kind"));
    item.parent_id = detail::optional_string_field(j, "parent_id");
    item.title = detail::optional_string_field(j, "title");
    item.body = detail::required_string_field(j, "body");
    item.image_desc = detail::optional_string_field(j, "image_desc");
    item.score = detail::required_int_field(j, "score");
    item.created_at = detail::required_int_field(j, "created_utc");
    item.context.community_id = detail::required_string_field(j, "context");
    try {
        validate(item);
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
    return item;
}

struct IngestStats {
    std::size_t total_records = 0;  // non-blank input lines
    std::size_t posts = 0;
    std::size_t comments = 0;
    std::size_t orphans = 0;
    std::size_t parse_errors = 0;
    std::size_t duplicates = 0;
    std::vector<std::string> errors;    // one entry per failed line
    std::vector<std::string> warnings;  // duplicates, unknown fields, ...
};

// Read-only after ingestion; concurrent readers are safe.
class CorpusStore {
public:
    CorpusStore() = default;

    CorpusStore(ContextDescriptor context, std::int64_t ingested_at)
        : context_(std::move(context)), ingested_at_(ingested_at) {
        validate(context_);
    }

    const ContextDescriptor& context() const { return context_; }
    std::int64_t ingested_at() const { return ingested_at_; }

    // Last record for an id wins; earlier ones are replaced in place.
    bool upsert(ContentItem item) {
        auto it = items_.find(item.id);
        if (it == items_.end()) {
            order_.push_back(item.id);
            items_.emplace(item.id, std::move(item));
            return false;
        }
        it->second = std::move(item);
        return true;
    }

    // Builds the parent index and orphan flags; call once after the last upsert.
    void finalize() {
        children_.clear();
        orphans_.clear();
        for (const std::string& id : order_) {
            const ContentItem& item = items_.at(id);
            if (item.kind != ItemKind::comment) continue;
            if (items_.count(*item.parent_id) == 0) {
                orphans_.insert(id);
            } else {
                children_[*item.parent_id].push_back(id);
            }
        }
        for (auto& [parent, kids] : children_) {
            std::sort(kids.begin(), kids.end(), [&](const std::string& a, const std::string& b) {
                const ContentItem& ia = items_.at(a);
                const ContentItem& ib = items_.at(b);
                if (ia.created_at != ib.created_at) return ia.created_at < ib.created_at;
                return a < b;
            });
        }
    }

    const ContentItem* lookup(const std::string& id) const {
        auto it = items_.find(id);
        return it == items_.end() ? nullptr : &it->second;
    }

    std::vector<const ContentItem*> replies_of(const std::string& id) const {
        std::vector<const ContentItem*> out;
        auto it = children_.find(id);
        if (it == children_.end()) return out;
        out.reserve(it->second.size());
        for (const std::string& child : it->second) out.push_back(&items_.at(child));
        return out;
    }

    const std::vector<std::string>& ids() const { return order_; }
    std::size_t size() const { return items_.size(); }

    bool is_orphan(const std::string& id) const { return orphans_.count(id) != 0; }

    // True for an orphan comment and everything below it. Scoring skips
    // these subtrees since their thread context is incomplete.
    bool in_orphan_subtree(const std::string& id) const {
        std::unordered_set<std::string> seen;
        const std::string* current = &id;
        while (true) {
            if (orphans_.count(*current) != 0) return true;
            if (!seen.insert(*current).second) return false;  // cycle guard
            const ContentItem* item = lookup(*current);
            if (item == nullptr || !item->parent_id.has_value()) return false;
            const ContentItem* parent = lookup(*item->parent_id);
            if (parent == nullptr) return false;
            current = &parent->id;
        }
    }

    std::size_t n_posts() const {
        std::size_t n = 0;
        for (const auto& [id, item] : items_) n += item.kind == ItemKind::post ? 1 : 0;
        return n;
    }
    std::size_t n_comments() const { return items_.size() - n_posts(); }
    std::size_t n_orphans() const { return orphans_.size(); }

    void save(const std::filesystem::path& dir) const {
        std::filesystem::create_directories(dir);
        std::string lines;
        for (const std::string& id : order_) {
            lines += thread_record_to_json(items_.at(id)).dump();
            lines += '\n';
        }
        util::write_file_atomic(dir / "items.jsonl", lines);
        nlohmann::json meta;
        meta["context"] = context_.community_id;
        if (context_.locale) meta["locale"] = *context_.locale;
        meta["ingested_at"] = ingested_at_;
        meta["n_posts"] = n_posts();
        meta["n_comments"] = n_comments();
        meta["orphan_ids"] = std::vector<std::string>(orphans_.begin(), orphans_.end());
        util::write_file_atomic(dir / "meta.json", meta.dump(2) + "\n");
    }

    static CorpusStore load(const std::filesystem::path& dir) {
        nlohmann::json meta = nlohmann::json::parse(util::read_file(dir / "meta.json"));
        ContextDescriptor context;
        context.community_id = meta.at("context").get<std::string>();
        if (meta.contains("locale")) context.locale = meta["locale"].get<std::string>();
        CorpusStore store(context, meta.at("ingested_at").get<std::int64_t>());
        std::string content = util::read_file(dir / "items.jsonl");
        int line_no = 0;
        for (const std::string& raw : util::split_lines(content)) {
            ++line_no;
            std::string_view line = util::trim(raw);
            if (line.empty()) continue;
            nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
            if (j.is_discarded()) {
                throw ParseError("stored corpus line " + std::to_string(line_no) +
                                 " is not valid JSON");
            }
            store.upsert(thread_record_from_json(j));
        }
        store.finalize();
        return store;
    }

private:
    ContextDescriptor context_{"unknown", std::nullopt};
    std::int64_t ingested_at_ = 0;
    std::vector<std::string> order_;  // insertion order, drives export
    std::unordered_map<std::string, ContentItem> items_;
    std::unordered_map<std::string, std::vector<std::string>> children_;
    std::unordered_set<std::string> orphans_;
};

// Parses a JSONL stream of thread records into a store. Malformed lines are
// collected per line; more than 10% bad lines aborts with CorruptCorpus.
// Duplicate ids keep the last record and log a warning.
inline CorpusStore ingest_threads(std::istream& input, const ContextDescriptor& context,
                                  IngestStats* stats_out = nullptr) {
    validate(context);
    CorpusStore store(context, static_cast<std::int64_t>(std::time(nullptr)));
    IngestStats stats;
    std::string line;
    int line_no = 0;
    while (std::getline(input, line)) {
        ++line_no;
        std::string_view trimmed = util::trim(line);
        if (trimmed.empty()) continue;
        ++stats.total_records;
        nlohmann::json j = nlohmann::json::parse(trimmed, nullptr, false);
        if (j.is_discarded()) {
            ++stats.parse_errors;
            stats.errors.push_back("line " + std::to_string(line_no) + ": invalid JSON");
            continue;
        }
        ContentItem item;
        try {
            std::vector<std::string> field_warnings;
            item = thread_record_from_json(j, &field_warnings);
            for (const std::string& w : field_warnings) {
                stats.warnings.push_back("line " + std::to_string(line_no) + ": " + w);
            }
        } catch (const Error& e) {
            ++stats.parse_errors;
            stats.errors.push_back("line " + std::to_string(line_no) + ": " + e.what());
            continue;
        }
        if (store.upsert(std::move(item))) {
            ++stats.duplicates;
            stats.warnings.push_back("line " + std::to_string(line_no) + ": duplicate id '" +
                                     j["id"].get<std::string>() + "', last record wins");
        }
    }
    store.finalize();
    stats.posts = store.n_posts();
    stats.comments = store.n_comments();
    stats.orphans = store.n_orphans();
    if (stats.total_records > 0 &&
        10 * stats.parse_errors > stats.total_records) {
        if (stats_out != nullptr) *stats_out = stats;
        throw CorruptCorpusError(std::to_string(stats.parse_errors) + " of " +
                                 std::to_string(stats.total_records) +
                                 " records failed to parse (>10%)");
    }
    if (stats_out != nullptr) *stats_out = std::move(stats);
    return store;
}

// A scoring target with the replies retained for it.
struct TestSetEntry {
    ContentItem target;
    std::vector<ContentItem> replies;
};

// Keeps every non-orphaned item with at least min_replies direct replies.
// Above max_replies, the highest-score replies win; ties break by earlier
// created_at, then lexicographic id, so selection is deterministic under
// any input permutation.
inline std::vector<TestSetEntry> select_test_set(const CorpusStore& store,
                                                 std::size_t min_replies = 4,
                                                 std::size_t max_replies = 7) {
    if (min_replies < 1) throw InvalidArgumentError("min_replies must be >= 1");
    if (max_replies < min_replies) {
        throw InvalidArgumentError("max_replies must be >= min_replies");
    }
    std::vector<std::string> target_ids = store.ids();
    std::sort(target_ids.begin(), target_ids.end());
    std::vector<TestSetEntry> selected;
    for (const std::string& id : target_ids) {
        if (store.in_orphan_subtree(id)) continue;
        std::vector<const ContentItem*> replies = store.replies_of(id);
        if (replies.size() < min_replies) continue;
        std::sort(replies.begin(), replies.end(),
                  [](const ContentItem* a, const ContentItem* b) {
                      if (a->score != b->score) return a->score > b->score;
                      if (a->created_at != b->created_at) return a->created_at < b->created_at;
                      return a->id < b->id;
                  });
        if (replies.size() > max_replies) replies.resize(max_replies);
        TestSetEntry entry;
        entry.target = *store.lookup(id);
        entry.replies.reserve(replies.size());
        for (const ContentItem* reply : replies) entry.replies.push_back(*reply);
        selected.push_back(std::move(entry));
    }
    return selected;
}

// Loads assessor-labeled replies against a store: every (comment_id,
// reply_id) pair must resolve and be a real reply edge. Produces one
// ReactionRecord per entry with raw labels and their aggregated polarity.
inline std::vector<ReactionRecord> load_gold_labels(const std::string& content,
                                                    const CorpusStore& store) {
    nlohmann::json parsed = nlohmann::json::parse(content, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_array()) {
        throw ParseError("gold-label file must be a JSON array");
    }
    std::vector<ReactionRecord> records;
    std::unordered_set<std::string> seen_replies;
    for (const nlohmann::json& entry : parsed) {
        if (!entry.is_object()) throw ParseError("gold entry must be a JSON object");
        std::string comment_id = detail::required_string_field(entry, "comment_id");
        std::string reply_id = detail::required_string_field(entry, "reply_id");
        if (!entry.contains("labels") || !entry["labels"].is_array()) {
            throw ParseError("gold entry for reply '" + reply_id + "' needs a labels array");
        }
        const ContentItem* target = store.lookup(comment_id);
        if (target == nullptr) {
            throw MissingContentError("gold file references unknown comment '" + comment_id + "'");
        }
        const ContentItem* reply = store.lookup(reply_id);
        if (reply == nullptr) {
            throw MissingContentError("gold file references unknown reply '" + reply_id + "'");
        }
        if (!reply->parent_id || *reply->parent_id != comment_id) {
            throw ParseError("'" + reply_id + "' is not a reply to '" + comment_id + "'");
        }
        if (!seen_replies.insert(reply_id).second) {
            throw ParseError("duplicate gold entry for reply '" + reply_id + "'");
        }
        std::vector<AssessorLabel> labels;
        for (const nlohmann::json& label : entry["labels"]) {
            if (!label.is_string()) throw ParseError("labels must be strings");
            labels.push_back(assessor_label_from_string(label.get<std::string>()));
        }
        if (labels.empty()) {
            throw ParseError("gold entry for reply '" + reply_id + "' has no labels");
        }
        ReactionRecord record;
        record.reply = *reply;
        record.target_id = comment_id;
        record.raw_labels = labels;
        record.polarity = aggregate_assessor_labels(labels);
        records.push_back(std::move(record));
    }
    return records;
}

}  // namespace ponos
