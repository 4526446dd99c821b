#pragma once
// Deterministic word-list sentiment rule. This is a testing baseline, not an
// accuracy claim: it exists so pipelines can run offline with a pure backend.
// The shipped lists live in data/lexicon/ and mirror the built-ins below.

#include <array>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ponos/thread_model.hpp"
#include "ponos/util.hpp"

namespace ponos {

inline constexpr std::array<std::string_view, 30> kDefaultNegativeWords = {
    "angry",   "annoying", "awful",    "bad",     "cringe", "disaster",
    "disgusting", "dumb",  "garbage",  "gross",   "hate",   "hateful",
    "horrible", "idiot",   "insult",   "mess",    "nasty",  "offensive",
    "pathetic", "rude",    "sad",      "shame",   "stupid", "terrible",
    "toxic",   "trash",    "ugly",     "worse",   "worst",  "wrong",
};

inline constexpr std::array<std::string_view, 30> kDefaultPositiveWords = {
    "agree",   "amazing",  "awesome",  "beautiful", "best",    "brilliant",
    "cool",    "excellent", "fantastic", "fun",     "funny",   "good",
    "great",   "happy",    "helpful",  "kind",      "love",    "lovely",
    "nice",    "perfect",  "positive", "right",     "smart",   "support",
    "sweet",   "thank",    "win",      "wholesome", "wonderful", "wow",
};

class Lexicon {
public:
    Lexicon() {
        for (std::string_view w : kDefaultNegativeWords) negative_.emplace(w);
        for (std::string_view w : kDefaultPositiveWords) positive_.emplace(w);
    }

    Lexicon(std::vector<std::string> negative_words, std::vector<std::string> positive_words) {
        for (auto& w : negative_words) negative_.insert(util::to_lower(w));
        for (auto& w : positive_words) positive_.insert(util::to_lower(w));
    }

    // More negative token hits than positive ones reads as negative, the
    // reverse as positive, and an exact tie (including zero hits) as neutral.
    SentimentPolarity classify(std::string_view text) const {
        std::size_t negative_hits = 0;
        std::size_t positive_hits = 0;
        for (const std::string& token : util::tokenize_lower(text)) {
            if (negative_.count(token) != 0) ++negative_hits;
            if (positive_.count(token) != 0) ++positive_hits;
        }
        if (negative_hits > positive_hits) return SentimentPolarity::negative;
        if (positive_hits > negative_hits) return SentimentPolarity::positive;
        return SentimentPolarity::neutral;
    }

    std::size_t negative_size() const { return negative_.size(); }
    std::size_t positive_size() const { return positive_.size(); }
    bool is_negative_word(std::string_view token) const {
        return negative_.count(std::string(token)) != 0;
    }
    bool is_positive_word(std::string_view token) const {
        return positive_.count(std::string(token)) != 0;
    }

private:
    std::unordered_set<std::string> negative_;
    std::unordered_set<std::string> positive_;
};

// One lower-cased word per line; blank lines and '#' comments are skipped.
inline std::vector<std::string> load_word_list(const std::string& content) {
    std::vector<std::string> words;
    for (const std::string& raw : util::split_lines(content)) {
        std::string_view line = util::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        words.push_back(util::to_lower(line));
    }
    return words;
}

}  // namespace ponos
