#pragma once
// Core domain types for threaded community content: posts and comments, the
// community context they live in, reply reactions with sentiment polarity,
// and the PONOS score record produced from them. All types are immutable
// value objects after construction and safe to share across threads.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ponos/errors.hpp"

namespace ponos {

enum class ItemKind { post, comment };
enum class SentimentPolarity { negative, neutral, positive };
enum class PonosVariant { basic, weighted, net };

// The five reaction labels assessors choose from. Approval/condemnation are
// split by what they aim at: the comment itself or the subject it discusses.
enum class AssessorLabel {
    approval_comment,
    approval_subject,
    neutral,
    condemnation_comment,
    condemnation_subject,
};

inline std::string_view to_string(ItemKind kind) {
    return kind == ItemKind::post ? "post" : "comment";
}

inline ItemKind item_kind_from_string(std::string_view text) {
    if (text == "post") return ItemKind::post;
    if (text == "comment") return ItemKind::comment;
    throw ParseError("unknown item kind '" + std::string(text) + "'");
}

inline std::string_view to_string(SentimentPolarity polarity) {
    switch (polarity) {
        case SentimentPolarity::negative: return "negative";
        case SentimentPolarity::neutral: return "neutral";
        case SentimentPolarity::positive: return "positive";
    }
    return "neutral";
}

inline SentimentPolarity polarity_from_string(std::string_view text) {
    if (text == "negative") return SentimentPolarity::negative;
    if (text == "neutral") return SentimentPolarity::neutral;
    if (text == "positive") return SentimentPolarity::positive;
    throw ParseError("unknown polarity '" + std::string(text) + "'");
}

inline std::string_view to_string(PonosVariant variant) {
    switch (variant) {
        case PonosVariant::basic: return "basic";
        case PonosVariant::weighted: return "weighted";
        case PonosVariant::net: return "net";
    }
    return "basic";
}

inline PonosVariant variant_from_string(std::string_view text) {
    if (text == "basic") return PonosVariant::basic;
    if (text == "weighted") return PonosVariant::weighted;
    if (text == "net") return PonosVariant::net;
    throw ParseError("unknown variant '" + std::string(text) + "'");
}

// Label strings as they appear in gold-label files and model output.
inline std::string_view to_string(AssessorLabel label) {
    switch (label) {
        case AssessorLabel::approval_comment: return "approval (comment)";
        case AssessorLabel::approval_subject: return "approval (subject)";
        case AssessorLabel::neutral: return "neutral";
        case AssessorLabel::condemnation_comment: return "condemnation (comment)";
        case AssessorLabel::condemnation_subject: return "condemnation (subject)";
    }
    return "neutral";
}

inline AssessorLabel assessor_label_from_string(std::string_view text) {
    if (text == "approval (comment)") return AssessorLabel::approval_comment;
    if (text == "approval (subject)") return AssessorLabel::approval_subject;
    if (text == "neutral") return AssessorLabel::neutral;
    if (text == "condemnation (comment)") return AssessorLabel::condemnation_comment;
    if (text == "condemnation (subject)") return AssessorLabel::condemnation_subject;
    throw ParseError("unknown assessor label '" + std::string(text) + "'");
}

// The community whose norms frame the reactions, e.g. a subreddit name.
struct ContextDescriptor {
    std::string community_id;
    std::optional<std::string> locale;
};

struct ContentItem {
    std::string id;
    ItemKind kind = ItemKind::post;
    std::optional<std::string> parent_id;  // present iff kind == comment
    std::optional<std::string> title;
    std::string body;
    std::optional<std::string> image_desc;  // pre-computed description text
    std::int64_t score = 0;                 // community vote score, may be negative
    std::int64_t created_at = 0;            // seconds since epoch
    ContextDescriptor context;
};

inline void validate(const ContextDescriptor& context) {
    if (context.community_id.empty()) {
        throw InvalidArgumentError("context community_id must be non-empty");
    }
}

inline void validate(const ContentItem& item) {
    if (item.id.empty()) throw InvalidArgumentError("content item id must be non-empty");
    if (item.kind == ItemKind::post && item.parent_id.has_value()) {
        throw InvalidArgumentError("post '" + item.id + "' must not have a parent_id");
    }
    if (item.kind == ItemKind::comment && !item.parent_id.has_value()) {
        throw InvalidArgumentError("comment '" + item.id + "' must have a parent_id");
    }
    if (item.created_at < 0) {
        throw InvalidArgumentError("item '" + item.id + "' has negative created_at");
    }
    validate(item.context);
}

// A reply to some content item together with its classified polarity.
// raw_labels holds the per-assessor gold labels when they are known.
struct ReactionRecord {
    ContentItem reply;
    std::string target_id;
    SentimentPolarity polarity = SentimentPolarity::neutral;
    std::optional<std::vector<AssessorLabel>> raw_labels;
    std::optional<std::string> classifier_id;
};

struct PonosScore {
    double value = 0.0;
    std::size_t n_replies = 0;
    double error = 0.0;  // half-division measurement error, 1/(2N)
    PonosVariant variant = PonosVariant::basic;
    std::optional<double> lambda;  // set only by time-decay weighting
    std::optional<std::string> classifier_id;
};

inline SentimentPolarity map_assessor_label(AssessorLabel label) {
    switch (label) {
        case AssessorLabel::condemnation_comment:
            return SentimentPolarity::negative;
        case AssessorLabel::approval_comment:
        case AssessorLabel::approval_subject:
        // Shared disdain toward the comment's subject signals agreement with
        // the comment, so it counts as approval of the comment.
        case AssessorLabel::condemnation_subject:
            return SentimentPolarity::positive;
        case AssessorLabel::neutral:
            return SentimentPolarity::neutral;
    }
    return SentimentPolarity::neutral;
}

// Majority polarity after mapping each label; ties resolve to neutral.
inline SentimentPolarity aggregate_assessor_labels(std::span<const AssessorLabel> labels) {
    if (labels.empty()) throw EmptyInputError("no assessor labels to aggregate");
    std::size_t negative = 0;
    std::size_t neutral = 0;
    std::size_t positive = 0;
    for (AssessorLabel label : labels) {
        switch (map_assessor_label(label)) {
            case SentimentPolarity::negative: ++negative; break;
            case SentimentPolarity::neutral: ++neutral; break;
            case SentimentPolarity::positive: ++positive; break;
        }
    }
    std::size_t best = std::max({negative, neutral, positive});
    int winners = int(negative == best) + int(neutral == best) + int(positive == best);
    if (winners > 1) return SentimentPolarity::neutral;
    if (negative == best) return SentimentPolarity::negative;
    if (positive == best) return SentimentPolarity::positive;
    return SentimentPolarity::neutral;
}

inline SentimentPolarity aggregate_assessor_labels(const std::vector<AssessorLabel>& labels) {
    return aggregate_assessor_labels(std::span<const AssessorLabel>(labels));
}

}  // namespace ponos
