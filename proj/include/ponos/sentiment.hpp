#pragma once
// Reply-sentiment classification behind a pluggable backend: a pure word-list
// rule for offline runs, a gold-label passthrough for evaluation, and a
// remote chat-completions model. The remote backend sends all replies to one
// target in a single request and parses one "<index>: <label>" line per reply.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "ponos/chat_client.hpp"
#include "ponos/config.hpp"
#include "ponos/errors.hpp"
#include "ponos/lexicon.hpp"
#include "ponos/thread_model.hpp"
#include "ponos/util.hpp"

namespace ponos {

enum class BackendKind { lexicon, gold_passthrough, remote };

inline std::string_view to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::lexicon: return "lexicon";
        case BackendKind::gold_passthrough: return "gold_passthrough";
        case BackendKind::remote: return "remote";
    }
    return "lexicon";
}

inline BackendKind backend_from_string(std::string_view text) {
    if (text == "lexicon") return BackendKind::lexicon;
    if (text == "gold_passthrough") return BackendKind::gold_passthrough;
    if (text == "remote") return BackendKind::remote;
    throw ConfigError("unknown backend '" + std::string(text) + "'");
}

struct FewShotExample {
    std::string input;
    std::string label;  // one of the five assessor label strings
};

// reply id -> per-assessor labels, the data behind the gold_passthrough backend.
using GoldLabelMap = std::unordered_map<std::string, std::vector<AssessorLabel>>;

inline constexpr std::string_view kDefaultSystemMessage =
    "You label the reaction expressed by each reply to a target comment from an online "
    "community discussion. Judge each reply by the norms of the named community.\n"
    "Pick exactly one label per reply:\n"
    "- \"approval (comment)\": the reply agrees with or supports the target comment.\n"
    "- \"approval (subject)\": the reply speaks favorably of the subject the target comment "
    "discusses.\n"
    "- \"neutral\": the reply takes no clear stance either way.\n"
    "- \"condemnation (comment)\": the reply criticizes or rejects the target comment.\n"
    "- \"condemnation (subject)\": the reply shares the target comment's criticism of the "
    "subject it discusses.\n"
    "Answer with one line per reply in the form \"<reply index>: <label>\" and nothing else.";

inline constexpr std::string_view kDefaultPromptTemplate =
    "Community: {{community}}\n"
    "{{post_title_section}}{{post_content_section}}Target comment:\n"
    "{{target_body}}\n"
    "\n"
    "Replies to classify:\n"
    "{{replies}}"
    "\n"
    "Allowed labels: {{labels}}\n"
    "{{few_shot_section}}";

struct ClassifierConfig {
    BackendKind backend = BackendKind::lexicon;
    std::string classifier_id;  // recorded in every score this model produces
    std::optional<std::string> endpoint_url;
    std::optional<std::string> model_name;
    std::string system_message{kDefaultSystemMessage};
    std::string prompt_template{kDefaultPromptTemplate};
    std::vector<FewShotExample> few_shot_examples;
    std::chrono::milliseconds timeout{30000};
    int max_retries = 3;
    int max_parallel_requests = 4;
    std::chrono::milliseconds base_backoff{100};
    std::uint64_t seed = 0;
    Lexicon lexicon;
    GoldLabelMap gold_labels;
};

inline void validate(const ClassifierConfig& config) {
    if (config.classifier_id.empty()) throw ConfigError("classifier_id must be non-empty");
    if (config.backend == BackendKind::remote) {
        if (!config.endpoint_url || config.endpoint_url->empty()) {
            throw ConfigError("remote backend requires endpoint_url");
        }
        if (!config.model_name || config.model_name->empty()) {
            throw ConfigError("remote backend requires model_name");
        }
    }
    if (config.max_parallel_requests < 1) {
        throw ConfigError("max_parallel_requests must be >= 1");
    }
    if (config.max_retries < 0) throw ConfigError("max_retries must be >= 0");
    for (const FewShotExample& example : config.few_shot_examples) {
        assessor_label_from_string(example.label);  // throws on an unknown label
    }
}

// The batch of replies to one target, plus the enclosing post's context.
struct ClassificationRequest {
    ContentItem target;
    std::vector<ContentItem> replies;
    std::optional<std::string> post_title;
    std::optional<std::string> post_body;
    std::optional<std::string> post_image_desc;
    ContextDescriptor context;
};

inline void validate(const ClassificationRequest& request) {
    validate(request.context);
    if (request.replies.empty()) throw InvalidArgumentError("classification request has no replies");
    for (const ContentItem& reply : request.replies) {
        if (!reply.parent_id || *reply.parent_id != request.target.id) {
            throw InvalidArgumentError("reply '" + reply.id + "' is not a reply to target '" +
                                       request.target.id + "'");
        }
    }
}

inline std::string allowed_label_line() {
    std::string out;
    const AssessorLabel all[] = {AssessorLabel::approval_comment, AssessorLabel::approval_subject,
                                 AssessorLabel::neutral, AssessorLabel::condemnation_comment,
                                 AssessorLabel::condemnation_subject};
    for (AssessorLabel label : all) {
        if (!out.empty()) out += ", ";
        out += "\"";
        out += to_string(label);
        out += "\"";
    }
    return out;
}

// Renders the user prompt: community id, post title, post body or image
// description, the target comment, the indexed replies, the allowed labels,
// and any few-shot examples, in that order. Pure function of its inputs.
inline std::string build_prompt(const ClassificationRequest& request,
                                const ClassifierConfig& config) {
    validate(request);
    std::unordered_map<std::string, std::string> values;
    values["community"] = request.context.community_id;
    values["post_title_section"] =
        request.post_title ? "Post title: " + util::collapse_newlines(*request.post_title) + "\n"
                           : "";
    if (request.post_body && !request.post_body->empty()) {
        values["post_content_section"] =
            "Post content: " + util::collapse_newlines(*request.post_body) + "\n";
    } else if (request.post_image_desc && !request.post_image_desc->empty()) {
        values["post_content_section"] =
            "Post image: " + util::collapse_newlines(*request.post_image_desc) + "\n";
    } else {
        values["post_content_section"] = "";
    }
    values["target_body"] = util::collapse_newlines(request.target.body);
    std::string replies;
    for (std::size_t i = 0; i < request.replies.size(); ++i) {
        replies += std::to_string(i + 1) + ": " +
                   util::collapse_newlines(request.replies[i].body) + "\n";
    }
    values["replies"] = replies;
    values["labels"] = allowed_label_line();
    std::string few_shot;
    if (!config.few_shot_examples.empty()) {
        few_shot = "\nLabeled examples:\n";
        for (const FewShotExample& example : config.few_shot_examples) {
            few_shot += example.input + "\nLabel: " + example.label + "\n";
        }
    }
    values["few_shot_section"] = few_shot;
    return util::render_template(config.prompt_template, values);
}

// Parses "<index>: <label>" lines, one per reply, indices 1-based. Lines that
// do not start with an integer and a colon are ignored so model preambles do
// not break parsing, but every reply must end up with exactly one valid
// label; anything else is an UnparseableLabelError, never a silent default.
inline std::vector<AssessorLabel> parse_label_lines(const std::string& content,
                                                    std::size_t n_replies) {
    std::vector<std::optional<AssessorLabel>> parsed(n_replies);
    for (const std::string& raw : util::split_lines(content)) {
        std::string_view line = util::trim(raw);
        if (line.empty()) continue;
        std::size_t digits = 0;
        while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits]))) {
            ++digits;
        }
        if (digits == 0) continue;
        std::size_t colon = digits;
        while (colon < line.size() && std::isspace(static_cast<unsigned char>(line[colon]))) ++colon;
        if (colon >= line.size() || line[colon] != ':') continue;
        unsigned long index = std::stoul(std::string(line.substr(0, digits)));
        if (index < 1 || index > n_replies) {
            throw UnparseableLabelError("reply index " + std::to_string(index) +
                                        " out of range 1.." + std::to_string(n_replies));
        }
        std::string_view label_text = util::trim(line.substr(colon + 1));
        AssessorLabel label;
        try {
            label = assessor_label_from_string(label_text);
        } catch (const ParseError&) {
            throw UnparseableLabelError("reply " + std::to_string(index) + ": '" +
                                        std::string(label_text) + "' is not an allowed label");
        }
        if (parsed[index - 1].has_value()) {
            throw UnparseableLabelError("reply " + std::to_string(index) + " labeled twice");
        }
        parsed[index - 1] = label;
    }
    std::vector<AssessorLabel> labels;
    labels.reserve(n_replies);
    for (std::size_t i = 0; i < n_replies; ++i) {
        if (!parsed[i]) {
            throw UnparseableLabelError("no label line for reply " + std::to_string(i + 1));
        }
        labels.push_back(*parsed[i]);
    }
    return labels;
}

// Model M of a PONOS score. Thread-safe: classify_replies is const and the
// transport contract requires concurrent-call safety.
class SentimentClassifier {
public:
    explicit SentimentClassifier(ClassifierConfig config,
                                 std::shared_ptr<ChatTransport> transport = nullptr)
        : config_(std::move(config)), transport_(std::move(transport)) {
        validate(config_);
        if (config_.backend == BackendKind::remote && !transport_) {
            transport_ =
                std::make_shared<HttpChatTransport>(*config_.endpoint_url, config_.timeout);
        }
    }

    const ClassifierConfig& config() const { return config_; }

    std::vector<ReactionRecord> classify_replies(const ClassificationRequest& request) const {
        validate(request);
        switch (config_.backend) {
            case BackendKind::lexicon: return classify_lexicon(request);
            case BackendKind::gold_passthrough: return classify_gold(request);
            case BackendKind::remote: return classify_remote(request);
        }
        throw ConfigError("unreachable backend kind");
    }

private:
    ReactionRecord make_record(const ContentItem& reply, const std::string& target_id,
                               SentimentPolarity polarity) const {
        ReactionRecord record;
        record.reply = reply;
        record.target_id = target_id;
        record.polarity = polarity;
        record.classifier_id = config_.classifier_id;
        return record;
    }

    std::vector<ReactionRecord> classify_lexicon(const ClassificationRequest& request) const {
        std::vector<ReactionRecord> records;
        records.reserve(request.replies.size());
        for (const ContentItem& reply : request.replies) {
            records.push_back(
                make_record(reply, request.target.id, config_.lexicon.classify(reply.body)));
        }
        return records;
    }

    std::vector<ReactionRecord> classify_gold(const ClassificationRequest& request) const {
        std::vector<ReactionRecord> records;
        records.reserve(request.replies.size());
        for (const ContentItem& reply : request.replies) {
            auto it = config_.gold_labels.find(reply.id);
            if (it == config_.gold_labels.end() || it->second.empty()) {
                throw MissingGoldError("no assessor labels for reply '" + reply.id + "'");
            }
            ReactionRecord record =
                make_record(reply, request.target.id, aggregate_assessor_labels(it->second));
            record.raw_labels = it->second;
            records.push_back(std::move(record));
        }
        return records;
    }

    std::vector<ReactionRecord> classify_remote(const ClassificationRequest& request) const {
        ChatRequest chat;
        chat.model = *config_.model_name;
        chat.messages.push_back({"system", config_.system_message});
        chat.messages.push_back({"user", build_prompt(request, config_)});
        RetryPolicy policy{config_.max_retries, config_.base_backoff, config_.seed};
        std::string content = complete_with_retry(*transport_, chat, policy);
        std::vector<AssessorLabel> labels = parse_label_lines(content, request.replies.size());
        std::vector<ReactionRecord> records;
        records.reserve(request.replies.size());
        for (std::size_t i = 0; i < request.replies.size(); ++i) {
            records.push_back(make_record(request.replies[i], request.target.id,
                                          map_assessor_label(labels[i])));
        }
        return records;
    }

    ClassifierConfig config_;
    std::shared_ptr<ChatTransport> transport_;
};

// Reads the gold-label file shape (a JSON array of {comment_id, reply_id,
// labels}) into the lookup the gold_passthrough backend needs. Referential
// checks against a corpus live in the ingest module's load_gold_labels.
inline GoldLabelMap load_gold_label_map(const std::string& content) {
    nlohmann::json parsed = nlohmann::json::parse(content, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_array()) {
        throw ParseError("gold-label file must be a JSON array");
    }
    GoldLabelMap map;
    for (const nlohmann::json& entry : parsed) {
        if (!entry.is_object() || !entry.contains("reply_id") || !entry.contains("labels")) {
            throw ParseError("gold entry must be an object with reply_id and labels");
        }
        std::string reply_id = entry.at("reply_id").get<std::string>();
        std::vector<AssessorLabel> labels;
        for (const nlohmann::json& label : entry.at("labels")) {
            labels.push_back(assessor_label_from_string(label.get<std::string>()));
        }
        if (labels.empty()) {
            throw ParseError("gold entry for reply '" + reply_id + "' has no labels");
        }
        map[reply_id] = std::move(labels);
    }
    return map;
}

inline std::vector<FewShotExample> load_few_shot_examples(const std::string& content) {
    std::vector<FewShotExample> examples;
    int line_no = 0;
    for (const std::string& raw : util::split_lines(content)) {
        ++line_no;
        std::string_view line = util::trim(raw);
        if (line.empty()) continue;
        nlohmann::json parsed = nlohmann::json::parse(line, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object()) {
            throw ParseError("few-shot line " + std::to_string(line_no) + " is not a JSON object");
        }
        FewShotExample example;
        try {
            example.input = parsed.at("input").get<std::string>();
            example.label = parsed.at("label").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("few-shot line " + std::to_string(line_no) + ": " + e.what());
        }
        assessor_label_from_string(example.label);
        examples.push_back(std::move(example));
    }
    return examples;
}

// Builds a ClassifierConfig from a flat toml-like file. File paths inside
// the config resolve relative to the config file's directory. Environment
// variables (PONOS_ENDPOINT_URL, PONOS_MODEL_NAME, PONOS_TIMEOUT_MS,
// PONOS_MAX_RETRIES, PONOS_MAX_PARALLEL_REQUESTS) override file values.
inline ClassifierConfig classifier_config_from_file(const std::string& path) {
    config::ConfigMap map = config::parse_config_file(path);
    map.require_known_keys({"backend", "classifier_id", "endpoint_url", "model_name",
                            "system_message_file", "prompt_template_file", "few_shot_file",
                            "gold_file", "negative_words_file", "positive_words_file",
                            "timeout_ms", "max_retries", "max_parallel_requests", "backoff_ms"});
    std::filesystem::path base = std::filesystem::path(path).parent_path();
    auto resolve_path = [&](const std::string& p) {
        std::filesystem::path candidate(p);
        return candidate.is_absolute() ? candidate : base / candidate;
    };

    ClassifierConfig config;
    if (auto backend = map.get_string("backend")) config.backend = backend_from_string(*backend);
    config.classifier_id = map.get_string("classifier_id").value_or("");
    if (auto url = config::resolve_string(map, "endpoint_url")) config.endpoint_url = *url;
    if (auto model = config::resolve_string(map, "model_name")) config.model_name = *model;
    if (auto file = map.get_string("system_message_file")) {
        config.system_message = util::read_file(resolve_path(*file));
    }
    if (auto file = map.get_string("prompt_template_file")) {
        config.prompt_template = util::read_file(resolve_path(*file));
    }
    if (auto file = map.get_string("few_shot_file")) {
        config.few_shot_examples = load_few_shot_examples(util::read_file(resolve_path(*file)));
    }
    if (auto file = map.get_string("gold_file")) {
        config.gold_labels = load_gold_label_map(util::read_file(resolve_path(*file)));
    }
    auto negative_file = map.get_string("negative_words_file");
    auto positive_file = map.get_string("positive_words_file");
    if (negative_file.has_value() != positive_file.has_value()) {
        throw ConfigError("negative_words_file and positive_words_file come as a pair");
    }
    if (negative_file && positive_file) {
        config.lexicon = Lexicon(load_word_list(util::read_file(resolve_path(*negative_file))),
                                 load_word_list(util::read_file(resolve_path(*positive_file))));
    }
    if (auto timeout = config::resolve_int(map, "timeout_ms")) {
        config.timeout = std::chrono::milliseconds(*timeout);
    }
    if (auto retries = config::resolve_int(map, "max_retries")) {
        config.max_retries = static_cast<int>(*retries);
    }
    if (auto parallel = config::resolve_int(map, "max_parallel_requests")) {
        config.max_parallel_requests = static_cast<int>(*parallel);
    }
    if (auto backoff = config::resolve_int(map, "backoff_ms")) {
        config.base_backoff = std::chrono::milliseconds(*backoff);
    }
    validate(config);
    return config;
}

}  // namespace ponos
