#pragma once
// Shared fixture builders for the test suites.

#include <cstdint>
#include <string>
#include <vector>

#include "ponos/thread_model.hpp"

namespace test {

inline ponos::ContextDescriptor ctx(const std::string& community = "testville") {
    return ponos::ContextDescriptor{community, std::nullopt};
}

inline ponos::ContentItem post(const std::string& id, const std::string& body = "post body",
                               std::int64_t score = 0, std::int64_t created_at = 1000) {
    ponos::ContentItem item;
    item.id = id;
    item.kind = ponos::ItemKind::post;
    item.body = body;
    item.score = score;
    item.created_at = created_at;
    item.context = ctx();
    return item;
}

inline ponos::ContentItem comment(const std::string& id, const std::string& parent,
                                  const std::string& body = "comment body",
                                  std::int64_t score = 0, std::int64_t created_at = 1000) {
    ponos::ContentItem item;
    item.id = id;
    item.kind = ponos::ItemKind::comment;
    item.parent_id = parent;
    item.body = body;
    item.score = score;
    item.created_at = created_at;
    item.context = ctx();
    return item;
}

inline ponos::ReactionRecord reaction(ponos::SentimentPolarity polarity,
                                      const std::string& target = "t1",
                                      const std::string& reply_id = "r1",
                                      std::int64_t created_at = 1000) {
    ponos::ReactionRecord record;
    record.reply = comment(reply_id, target, "reply body", 0, created_at);
    record.target_id = target;
    record.polarity = polarity;
    return record;
}

inline std::vector<ponos::ReactionRecord> reactions(
    const std::vector<ponos::SentimentPolarity>& polarities, const std::string& target = "t1") {
    std::vector<ponos::ReactionRecord> records;
    for (std::size_t i = 0; i < polarities.size(); ++i) {
        records.push_back(reaction(polarities[i], target, "r" + std::to_string(i + 1)));
    }
    return records;
}

}  // namespace test
