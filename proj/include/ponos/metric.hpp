#pragma once
// PONOS scoring: proportion of negative reactions among the replies to a
// content item, plus the weighted and net variants, the half-division
// measurement error, and pooling rules for duplicate content. All operations
// are pure functions over reaction lists.

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "ponos/errors.hpp"
#include "ponos/thread_model.hpp"

namespace ponos {

// Half the instrument's division value: with N replies the score moves in
// steps of 1/N, so the reading is uncertain by 1/(2N).
inline double measurement_error(std::size_t n_replies) {
    if (n_replies == 0) throw NoRepliesError("measurement error is undefined for zero replies");
    return 1.0 / (2.0 * static_cast<double>(n_replies));
}

inline PonosScore ponos_basic(std::span<const ReactionRecord> reactions,
                              const std::string& classifier_id) {
    if (reactions.empty()) throw NoRepliesError("PONOS is undefined for an empty reply set");
    std::size_t negatives = 0;
    for (const ReactionRecord& r : reactions) {
        if (r.polarity == SentimentPolarity::negative) ++negatives;
    }
    PonosScore score;
    score.value = static_cast<double>(negatives) / static_cast<double>(reactions.size());
    score.n_replies = reactions.size();
    score.error = measurement_error(score.n_replies);
    score.variant = PonosVariant::basic;
    score.classifier_id = classifier_id;
    return score;
}

inline PonosScore ponos_basic(const std::vector<ReactionRecord>& reactions,
                              const std::string& classifier_id) {
    return ponos_basic(std::span<const ReactionRecord>(reactions), classifier_id);
}

// w = exp(-lambda * (reference_time - reply_time)), time difference in seconds.
inline double time_decay_weight(std::int64_t reply_time, std::int64_t reference_time,
                                double lambda) {
    if (lambda < 0.0 || !std::isfinite(lambda)) {
        throw InvalidArgumentError("lambda must be a finite non-negative real");
    }
    if (reply_time > reference_time) {
        throw InvalidTimestampError("reply_time " + std::to_string(reply_time) +
                                    " is after reference_time " + std::to_string(reference_time));
    }
    return std::exp(-lambda * static_cast<double>(reference_time - reply_time));
}

struct WeightedReaction {
    ReactionRecord reaction;
    double weight = 1.0;
};

inline PonosScore ponos_weighted(std::span<const WeightedReaction> reactions,
                                 const std::string& classifier_id,
                                 std::optional<double> lambda = std::nullopt) {
    if (reactions.empty()) throw NoRepliesError("PONOS is undefined for an empty reply set");
    double weight_sum = 0.0;
    double negative_weight_sum = 0.0;
    for (const WeightedReaction& wr : reactions) {
        if (wr.weight < 0.0 || !std::isfinite(wr.weight)) {
            throw InvalidArgumentError("reaction weights must be finite and non-negative");
        }
        weight_sum += wr.weight;
        if (wr.reaction.polarity == SentimentPolarity::negative) negative_weight_sum += wr.weight;
    }
    if (weight_sum == 0.0) throw ZeroWeightError("all reaction weights are zero");
    PonosScore score;
    score.value = negative_weight_sum / weight_sum;
    score.n_replies = reactions.size();
    score.error = measurement_error(score.n_replies);
    score.variant = PonosVariant::weighted;
    score.lambda = lambda;
    score.classifier_id = classifier_id;
    return score;
}

inline PonosScore ponos_weighted(const std::vector<WeightedReaction>& reactions,
                                 const std::string& classifier_id,
                                 std::optional<double> lambda = std::nullopt) {
    return ponos_weighted(std::span<const WeightedReaction>(reactions), classifier_id, lambda);
}

// Weighted PONOS with recency weights relative to reference_time.
inline PonosScore ponos_time_weighted(std::span<const ReactionRecord> reactions,
                                      std::int64_t reference_time, double lambda,
                                      const std::string& classifier_id) {
    if (reactions.empty()) throw NoRepliesError("PONOS is undefined for an empty reply set");
    std::vector<WeightedReaction> weighted;
    weighted.reserve(reactions.size());
    for (const ReactionRecord& r : reactions) {
        weighted.push_back({r, time_decay_weight(r.reply.created_at, reference_time, lambda)});
    }
    return ponos_weighted(weighted, classifier_id, lambda);
}

// Net variant: positive replies offset negative ones. +1 positive, -1
// negative, 0 neutral, divided by the full reply count. Higher value means
// a more positive reception; orientation is opposite to the basic variant.
inline PonosScore ponos_net(std::span<const ReactionRecord> reactions,
                            const std::string& classifier_id) {
    if (reactions.empty()) throw NoRepliesError("PONOS is undefined for an empty reply set");
    std::int64_t sum = 0;
    for (const ReactionRecord& r : reactions) {
        switch (r.polarity) {
            case SentimentPolarity::positive: sum += 1; break;
            case SentimentPolarity::negative: sum -= 1; break;
            case SentimentPolarity::neutral: break;
        }
    }
    PonosScore score;
    score.value = static_cast<double>(sum) / static_cast<double>(reactions.size());
    score.n_replies = reactions.size();
    score.error = measurement_error(score.n_replies);
    score.variant = PonosVariant::net;
    score.classifier_id = classifier_id;
    return score;
}

inline PonosScore ponos_net(const std::vector<ReactionRecord>& reactions,
                            const std::string& classifier_id) {
    return ponos_net(std::span<const ReactionRecord>(reactions), classifier_id);
}

enum class DuplicateMode { micro, macro };

// Scoring for content that occurs several times in the same context.
// micro pools every reply before taking the proportion; macro averages the
// per-occurrence proportions. Both report the pooled reply count and the
// error derived from it.
inline PonosScore aggregate_duplicates(std::span<const std::vector<ReactionRecord>> occurrences,
                                       DuplicateMode mode, const std::string& classifier_id) {
    if (occurrences.empty()) throw NoRepliesError("no occurrences to aggregate");
    std::size_t pooled = 0;
    for (std::size_t i = 0; i < occurrences.size(); ++i) {
        if (occurrences[i].empty()) {
            throw NoRepliesError("occurrence " + std::to_string(i) + " has no replies");
        }
        pooled += occurrences[i].size();
    }
    PonosScore score;
    if (mode == DuplicateMode::micro) {
        std::vector<ReactionRecord> all;
        all.reserve(pooled);
        for (const auto& occurrence : occurrences) {
            all.insert(all.end(), occurrence.begin(), occurrence.end());
        }
        score = ponos_basic(all, classifier_id);
    } else {
        double sum = 0.0;
        for (const auto& occurrence : occurrences) {
            sum += ponos_basic(occurrence, classifier_id).value;
        }
        score.value = sum / static_cast<double>(occurrences.size());
        score.n_replies = pooled;
        score.error = measurement_error(pooled);
        score.variant = PonosVariant::basic;
        score.classifier_id = classifier_id;
    }
    return score;
}

inline PonosScore aggregate_duplicates(const std::vector<std::vector<ReactionRecord>>& occurrences,
                                       DuplicateMode mode, const std::string& classifier_id) {
    return aggregate_duplicates(std::span<const std::vector<ReactionRecord>>(occurrences), mode,
                                classifier_id);
}

// One line of a score report file: a scored content item in its context.
struct ScoreReportRecord {
    std::string content_id;
    std::string context;
    PonosVariant variant = PonosVariant::basic;
    double value = 0.0;
    std::size_t n_replies = 0;
    double error = 0.0;
    std::optional<double> lambda;
    std::string classifier_id;
};

inline ScoreReportRecord make_score_report(const std::string& content_id,
                                           const std::string& context, const PonosScore& score) {
    ScoreReportRecord record;
    record.content_id = content_id;
    record.context = context;
    record.variant = score.variant;
    record.value = score.value;
    record.n_replies = score.n_replies;
    record.error = score.error;
    record.lambda = score.lambda;
    record.classifier_id = score.classifier_id.value_or("");
    return record;
}

inline nlohmann::json to_json(const ScoreReportRecord& record) {
    nlohmann::json j{{"content_id", record.content_id},
                     {"context", record.context},
                     {"variant", std::string(to_string(record.variant))},
                     {"value", record.value},
                     {"n_replies", record.n_replies},
                     {"error", record.error},
                     {"classifier_id", record.classifier_id}};
    if (record.lambda.has_value()) j["lambda"] = *record.lambda;
    return j;
}

inline ScoreReportRecord score_report_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("score report record must be a JSON object");
    ScoreReportRecord record;
    try {
        record.content_id = j.at("content_id").get<std::string>();
        record.context = j.at("context").get<std::string>();
        record.variant = variant_from_string(j.at("variant").get<std::string>());
        record.value = j.at("value").get<double>();
        record.n_replies = j.at("n_replies").get<std::size_t>();
        record.error = j.at("error").get<double>();
        record.classifier_id = j.at("classifier_id").get<std::string>();
        if (j.contains("lambda") && !j["lambda"].is_null()) {
            record.lambda = j["lambda"].get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad score report record: ") + e.what());
    }
    return record;
}

inline PonosScore score_from_report(const ScoreReportRecord& record) {
    PonosScore score;
    score.value = record.value;
    score.n_replies = record.n_replies;
    score.error = record.error;
    score.variant = record.variant;
    score.lambda = record.lambda;
    score.classifier_id = record.classifier_id;
    return score;
}

}  // namespace ponos
