#pragma once
// Evaluation harness: binary F1 on the negative class for reply
// classification, and MAE/MSE between classifier-derived and gold-derived
// PONOS per target. Partial reports are forbidden; any classifier failure
// aborts the evaluation.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "ponos/errors.hpp"
#include "ponos/ingest.hpp"
#include "ponos/metric.hpp"
#include "ponos/sentiment.hpp"
#include "ponos/thread_model.hpp"
#include "ponos/util.hpp"

namespace ponos {

// Binary F1 with negative as the positive class and {neutral, positive}
// pooled as the negative class. Defined as 0 when precision + recall = 0.
inline double f1_negative(std::span<const SentimentPolarity> predicted,
                          std::span<const SentimentPolarity> gold) {
    if (predicted.size() != gold.size()) {
        throw ShapeError("predicted has " + std::to_string(predicted.size()) + " labels, gold has " +
                         std::to_string(gold.size()));
    }
    if (predicted.empty()) throw ShapeError("label lists must be non-empty");
    std::size_t true_positive = 0;
    std::size_t false_positive = 0;
    std::size_t false_negative = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        bool predicted_negative = predicted[i] == SentimentPolarity::negative;
        bool gold_negative = gold[i] == SentimentPolarity::negative;
        if (predicted_negative && gold_negative) ++true_positive;
        if (predicted_negative && !gold_negative) ++false_positive;
        if (!predicted_negative && gold_negative) ++false_negative;
    }
    double denom = static_cast<double>(2 * true_positive + false_positive + false_negative);
    if (denom == 0.0) return 0.0;
    return 2.0 * static_cast<double>(true_positive) / denom;
}

inline double f1_negative(const std::vector<SentimentPolarity>& predicted,
                          const std::vector<SentimentPolarity>& gold) {
    return f1_negative(std::span<const SentimentPolarity>(predicted),
                       std::span<const SentimentPolarity>(gold));
}

// A score keyed by the content item it belongs to.
struct ScoredItem {
    std::string content_id;
    PonosScore score;
};

struct ErrorStats {
    double mae = 0.0;
    double mse = 0.0;
};

// MAE and MSE over pairs joined on content id. Ids unmatched on either side
// raise JoinError naming them; both sides must carry the same variant.
inline ErrorStats score_errors(std::span<const ScoredItem> predicted,
                               std::span<const ScoredItem> gold) {
    if (predicted.empty() || gold.empty()) {
        throw ShapeError("score lists must be non-empty");
    }
    std::map<std::string, const PonosScore*> gold_by_id;
    for (const ScoredItem& item : gold) {
        if (!gold_by_id.emplace(item.content_id, &item.score).second) {
            throw JoinError("duplicate gold score for '" + item.content_id + "'");
        }
    }
    std::vector<std::string> unmatched;
    std::map<std::string, bool> matched;
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    std::size_t joined = 0;
    for (const ScoredItem& item : predicted) {
        if (matched.count(item.content_id) != 0) {
            throw JoinError("duplicate predicted score for '" + item.content_id + "'");
        }
        auto it = gold_by_id.find(item.content_id);
        if (it == gold_by_id.end()) {
            unmatched.push_back(item.content_id + " (predicted only)");
            continue;
        }
        if (item.score.variant != it->second->variant) {
            throw ShapeError("variant mismatch for '" + item.content_id + "'");
        }
        matched[item.content_id] = true;
        double diff = item.score.value - it->second->value;
        abs_sum += std::abs(diff);
        sq_sum += diff * diff;
        ++joined;
    }
    for (const ScoredItem& item : gold) {
        if (matched.find(item.content_id) == matched.end()) {
            unmatched.push_back(item.content_id + " (gold only)");
        }
    }
    if (!unmatched.empty()) {
        std::string ids;
        for (const std::string& id : unmatched) {
            if (!ids.empty()) ids += ", ";
            ids += id;
        }
        throw JoinError("unmatched content ids: " + ids);
    }
    ErrorStats stats;
    stats.mae = abs_sum / static_cast<double>(joined);
    stats.mse = sq_sum / static_cast<double>(joined);
    return stats;
}

inline ErrorStats score_errors(const std::vector<ScoredItem>& predicted,
                               const std::vector<ScoredItem>& gold) {
    return score_errors(std::span<const ScoredItem>(predicted),
                        std::span<const ScoredItem>(gold));
}

struct TargetReport {
    std::string target_id;
    std::size_t n_replies = 0;
    double f1 = 0.0;
    double predicted_ponos = 0.0;
    double gold_ponos = 0.0;
    double abs_error = 0.0;
};

struct EvalReport {
    std::string classifier_id;
    std::size_t n_targets = 0;
    std::size_t n_replies = 0;
    double f1 = 0.0;   // pooled over all replies
    double mae = 0.0;  // macro over targets
    double mse = 0.0;
    std::vector<TargetReport> per_target;
};

struct EvalOptions {
    std::size_t parallel = 1;
};

namespace detail {

// Post context for a target: walk up to the root post when it resolves.
inline const ContentItem* root_post_of(const CorpusStore& store, const ContentItem& item) {
    const ContentItem* current = &item;
    std::size_t hops = 0;
    while (current->kind == ItemKind::comment && current->parent_id && hops < 10000) {
        const ContentItem* parent = store.lookup(*current->parent_id);
        if (parent == nullptr) return nullptr;
        current = parent;
        ++hops;
    }
    return current->kind == ItemKind::post ? current : nullptr;
}

inline ClassificationRequest request_for_target(const CorpusStore& store,
                                                const ContentItem& target,
                                                std::vector<ContentItem> replies) {
    ClassificationRequest request;
    request.target = target;
    request.replies = std::move(replies);
    request.context = target.context;
    if (const ContentItem* post = root_post_of(store, target)) {
        request.post_title = post->title;
        if (post->id != target.id) request.post_body = post->body;
        request.post_image_desc = post->image_desc;
    }
    return request;
}

}  // namespace detail

// Runs the classifier over every gold-covered target and compares both the
// per-reply labels (F1) and the per-target PONOS values (MAE/MSE, one pair
// per target) against the assessor-derived truth.
inline EvalReport evaluate_classifier(const CorpusStore& store,
                                      std::span<const ReactionRecord> gold,
                                      const SentimentClassifier& classifier,
                                      const EvalOptions& options = {}) {
    if (gold.empty()) throw InvalidArgumentError("gold set covers no targets");
    std::map<std::string, std::vector<const ReactionRecord*>> by_target;
    for (const ReactionRecord& record : gold) {
        by_target[record.target_id].push_back(&record);
    }
    struct TargetTask {
        const ContentItem* target;
        std::vector<const ReactionRecord*> gold_records;
    };
    std::vector<TargetTask> tasks;
    tasks.reserve(by_target.size());
    for (auto& [target_id, records] : by_target) {
        const ContentItem* target = store.lookup(target_id);
        if (target == nullptr) {
            throw MissingContentError("gold target '" + target_id + "' is not in the store");
        }
        // Stable reply order: by created_at then id, matching replies_of.
        std::sort(records.begin(), records.end(),
                  [](const ReactionRecord* a, const ReactionRecord* b) {
                      if (a->reply.created_at != b->reply.created_at) {
                          return a->reply.created_at < b->reply.created_at;
                      }
                      return a->reply.id < b->reply.id;
                  });
        tasks.push_back({target, std::move(records)});
    }

    std::vector<std::vector<ReactionRecord>> predicted(tasks.size());
    util::parallel_for(tasks.size(), options.parallel, [&](std::size_t i) {
        std::vector<ContentItem> replies;
        replies.reserve(tasks[i].gold_records.size());
        for (const ReactionRecord* record : tasks[i].gold_records) {
            replies.push_back(record->reply);
        }
        predicted[i] = classifier.classify_replies(
            detail::request_for_target(store, *tasks[i].target, std::move(replies)));
    });

    EvalReport report;
    report.classifier_id = classifier.config().classifier_id;
    report.n_targets = tasks.size();
    std::vector<SentimentPolarity> all_predicted;
    std::vector<SentimentPolarity> all_gold;
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const TargetTask& task = tasks[i];
        std::vector<SentimentPolarity> predicted_labels;
        std::vector<SentimentPolarity> gold_labels;
        std::vector<ReactionRecord> gold_records;
        for (std::size_t r = 0; r < task.gold_records.size(); ++r) {
            predicted_labels.push_back(predicted[i][r].polarity);
            gold_labels.push_back(task.gold_records[r]->polarity);
            gold_records.push_back(*task.gold_records[r]);
        }
        all_predicted.insert(all_predicted.end(), predicted_labels.begin(),
                             predicted_labels.end());
        all_gold.insert(all_gold.end(), gold_labels.begin(), gold_labels.end());

        TargetReport target_report;
        target_report.target_id = task.target->id;
        target_report.n_replies = gold_labels.size();
        target_report.f1 = f1_negative(predicted_labels, gold_labels);
        target_report.predicted_ponos =
            ponos_basic(predicted[i], classifier.config().classifier_id).value;
        target_report.gold_ponos = ponos_basic(gold_records, "gold").value;
        target_report.abs_error =
            std::abs(target_report.predicted_ponos - target_report.gold_ponos);
        abs_sum += target_report.abs_error;
        sq_sum += target_report.abs_error * target_report.abs_error;
        report.n_replies += gold_labels.size();
        report.per_target.push_back(std::move(target_report));
    }
    report.f1 = f1_negative(all_predicted, all_gold);
    report.mae = abs_sum / static_cast<double>(tasks.size());
    report.mse = sq_sum / static_cast<double>(tasks.size());
    return report;
}

inline nlohmann::json to_json(const EvalReport& report) {
    nlohmann::json per_target = nlohmann::json::array();
    for (const TargetReport& t : report.per_target) {
        per_target.push_back({{"target_id", t.target_id},
                              {"n_replies", t.n_replies},
                              {"f1", t.f1},
                              {"predicted_ponos", t.predicted_ponos},
                              {"gold_ponos", t.gold_ponos},
                              {"abs_error", t.abs_error}});
    }
    return nlohmann::json{{"classifier_id", report.classifier_id},
                          {"n_targets", report.n_targets},
                          {"n_replies", report.n_replies},
                          {"f1", report.f1},
                          {"mae", report.mae},
                          {"mse", report.mse},
                          {"per_target", per_target}};
}

// Plain-text report with aligned columns.
inline std::string render_table(const EvalReport& report) {
    std::size_t id_width = std::string("target").size();
    for (const TargetReport& t : report.per_target) {
        id_width = std::max(id_width, t.target_id.size());
    }
    auto pad = [](const std::string& text, std::size_t width) {
        std::string out = text;
        while (out.size() < width) out.push_back(' ');
        return out;
    };
    auto num = [](double value) {
        char buffer[32];
        std::snprintf(buffer, sizeof(buffer), "%8.4f", value);
        return std::string(buffer);
    };
    std::string out;
    out += "classifier: " + report.classifier_id + "\n";
    out += pad("target", id_width) + "  n_replies      gold predicted   abs_err        f1\n";
    for (const TargetReport& t : report.per_target) {
        char count[16];
        std::snprintf(count, sizeof(count), "%9zu", t.n_replies);
        out += pad(t.target_id, id_width) + "  " + count + "  " + num(t.gold_ponos) + "  " +
               num(t.predicted_ponos) + "  " + num(t.abs_error) + "  " + num(t.f1) + "\n";
    }
    char summary[160];
    std::snprintf(summary, sizeof(summary),
                  "targets=%zu replies=%zu F1=%.4f MAE=%.4f MSE=%.4f\n", report.n_targets,
                  report.n_replies, report.f1, report.mae, report.mse);
    out += summary;
    return out;
}

}  // namespace ponos
