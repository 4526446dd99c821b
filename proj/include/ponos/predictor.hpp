#pragma once
// Predicted-reception scoring for unseen content: ask a generative model for
// the k replies the community would most plausibly post, classify their
// sentiments, and report the resulting PONOS. Generated replies never mix
// with observed ones in a single score.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ponos/chat_client.hpp"
#include "ponos/config.hpp"
#include "ponos/errors.hpp"
#include "ponos/metric.hpp"
#include "ponos/sentiment.hpp"
#include "ponos/thread_model.hpp"
#include "ponos/util.hpp"

namespace ponos {

// A retrieved thread used as a generation exemplar.
struct ExemplarThread {
    ContentItem content;
    std::vector<ContentItem> replies;
};

inline constexpr std::string_view kDefaultGeneratorSystemMessage =
    "You write the replies that members of the named online community would most plausibly "
    "post in response to the given text. Match the community's tone and norms.\n"
    "Answer with one line per reply in the form \"<index>: <reply text>\" and nothing else.";

inline constexpr std::string_view kDefaultGeneratorTemplate =
    "Community: {{community}}\n"
    "{{exemplars_section}}"
    "Text:\n"
    "{{candidate_body}}\n"
    "\n"
    "Write the {{k}} most plausible replies.\n";

struct GeneratorConfig {
    std::string endpoint_url;
    std::string model_name;
    std::size_t k_replies = 5;
    std::string system_message{kDefaultGeneratorSystemMessage};
    std::string prompt_template{kDefaultGeneratorTemplate};
    std::vector<ExemplarThread> retrieved_neighbors;
    std::chrono::milliseconds timeout{60000};
    int max_retries = 3;
    std::chrono::milliseconds base_backoff{100};
    std::uint64_t seed = 0;
};

inline void validate(const GeneratorConfig& config) {
    if (config.k_replies < 1) throw ConfigError("k_replies must be >= 1");
    if (config.max_retries < 0) throw ConfigError("max_retries must be >= 0");
}

inline std::string render_exemplars(const std::vector<ExemplarThread>& exemplars) {
    if (exemplars.empty()) return "";
    std::string out = "Example threads from this community:\n";
    for (const ExemplarThread& exemplar : exemplars) {
        out += "Text: " + util::collapse_newlines(exemplar.content.body) + "\n";
        for (std::size_t i = 0; i < exemplar.replies.size(); ++i) {
            out += std::to_string(i + 1) + ": " +
                   util::collapse_newlines(exemplar.replies[i].body) + "\n";
        }
        out += "\n";
    }
    return out;
}

inline std::string build_generation_prompt(const ContentItem& candidate,
                                           const ContextDescriptor& context,
                                           const GeneratorConfig& config) {
    std::unordered_map<std::string, std::string> values;
    values["community"] = context.community_id;
    values["candidate_body"] = util::collapse_newlines(candidate.body);
    values["k"] = std::to_string(config.k_replies);
    values["exemplars_section"] = render_exemplars(config.retrieved_neighbors);
    return util::render_template(config.prompt_template, values);
}

// Parses "<index>: <text>" lines for indices 1..k. The first line for an
// index wins; lines without the index prefix are ignored. Fewer than k
// parsed replies raises GenerationIncompleteError with the obtained count.
inline std::vector<std::string> parse_generated_replies(const std::string& content,
                                                        std::size_t k) {
    std::vector<std::optional<std::string>> parsed(k);
    std::size_t obtained = 0;
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
        if (index < 1 || index > k) continue;
        std::string_view text = util::trim(line.substr(colon + 1));
        if (text.empty()) continue;
        if (!parsed[index - 1].has_value()) {
            parsed[index - 1] = std::string(text);
            ++obtained;
        }
    }
    if (obtained < k) throw GenerationIncompleteError(obtained, k);
    std::vector<std::string> replies;
    replies.reserve(k);
    for (auto& text : parsed) replies.push_back(std::move(*text));
    return replies;
}

// The generative model that predicts community reactions.
class ReplyGenerator {
public:
    explicit ReplyGenerator(GeneratorConfig config,
                            std::shared_ptr<ChatTransport> transport = nullptr)
        : config_(std::move(config)), transport_(std::move(transport)) {
        validate(config_);
        if (!transport_) {
            if (config_.endpoint_url.empty() || config_.model_name.empty()) {
                throw ConfigError("reply generator requires endpoint_url and model_name");
            }
            transport_ = std::make_shared<HttpChatTransport>(config_.endpoint_url,
                                                             config_.timeout);
        }
    }

    const GeneratorConfig& config() const { return config_; }

    // Returns exactly k synthetic comments with parent_id = candidate.id.
    std::vector<ContentItem> predict_replies(const ContentItem& candidate,
                                             const ContextDescriptor& context) const {
        validate(context);
        if (candidate.body.empty()) {
            throw InvalidArgumentError("candidate body must be non-empty");
        }
        ChatRequest chat;
        chat.model = config_.model_name;
        chat.messages.push_back({"system", config_.system_message});
        chat.messages.push_back({"user", build_generation_prompt(candidate, context, config_)});
        RetryPolicy policy{config_.max_retries, config_.base_backoff, config_.seed};
        std::string content = complete_with_retry(*transport_, chat, policy);
        std::vector<std::string> texts = parse_generated_replies(content, config_.k_replies);
        std::vector<ContentItem> replies;
        replies.reserve(texts.size());
        for (std::size_t i = 0; i < texts.size(); ++i) {
            ContentItem reply;
            reply.id = candidate.id + "/predicted-" + std::to_string(i + 1);
            reply.kind = ItemKind::comment;
            reply.parent_id = candidate.id;
            reply.body = std::move(texts[i]);
            reply.score = 0;
            reply.created_at = candidate.created_at;
            reply.context = context;
            replies.push_back(std::move(reply));
        }
        return replies;
    }

private:
    GeneratorConfig config_;
    std::shared_ptr<ChatTransport> transport_;
};

// Two-stage pipeline: generate expected replies, classify them, score the
// proportion. Either stage's failure aborts the whole prediction; there are
// no partial scores.
inline PonosScore predict_ponos(const ContentItem& candidate, const ContextDescriptor& context,
                                const ReplyGenerator& generator,
                                const SentimentClassifier& classifier) {
    std::vector<ContentItem> replies = generator.predict_replies(candidate, context);
    ClassificationRequest request;
    request.target = candidate;
    request.replies = std::move(replies);
    request.post_title = candidate.title;
    request.post_image_desc = candidate.image_desc;
    request.context = context;
    std::vector<ReactionRecord> records = classifier.classify_replies(request);
    return ponos_basic(records, classifier.config().classifier_id);
}

// GeneratorConfig from a flat toml-like file, mirroring the classifier
// loader: relative paths resolve against the config file's directory and
// PONOS_* environment variables override file values.
inline GeneratorConfig generator_config_from_file(const std::string& path) {
    config::ConfigMap map = config::parse_config_file(path);
    map.require_known_keys({"endpoint_url", "model_name", "k_replies", "system_message_file",
                            "prompt_template_file", "timeout_ms", "max_retries", "backoff_ms"});
    std::filesystem::path base = std::filesystem::path(path).parent_path();
    auto resolve_path = [&](const std::string& p) {
        std::filesystem::path candidate(p);
        return candidate.is_absolute() ? candidate : base / candidate;
    };

    GeneratorConfig config;
    if (auto url = config::resolve_string(map, "endpoint_url")) config.endpoint_url = *url;
    if (auto model = config::resolve_string(map, "model_name")) config.model_name = *model;
    if (auto k = config::resolve_int(map, "k_replies")) {
        if (*k < 1) throw ConfigError("k_replies must be >= 1");
        config.k_replies = static_cast<std::size_t>(*k);
    }
    if (auto file = map.get_string("system_message_file")) {
        config.system_message = util::read_file(resolve_path(*file));
    }
    if (auto file = map.get_string("prompt_template_file")) {
        config.prompt_template = util::read_file(resolve_path(*file));
    }
    if (auto timeout = config::resolve_int(map, "timeout_ms")) {
        config.timeout = std::chrono::milliseconds(*timeout);
    }
    if (auto retries = config::resolve_int(map, "max_retries")) {
        config.max_retries = static_cast<int>(*retries);
    }
    if (auto backoff = config::resolve_int(map, "backoff_ms")) {
        config.base_backoff = std::chrono::milliseconds(*backoff);
    }
    validate(config);
    return config;
}

// Batch input line for the predict command: {"id", "body", "context"}.
struct PredictionInput {
    std::string id;
    std::string body;
    std::string context;
};

inline std::vector<PredictionInput> load_prediction_inputs(const std::string& content) {
    std::vector<PredictionInput> inputs;
    int line_no = 0;
    for (const std::string& raw : util::split_lines(content)) {
        ++line_no;
        std::string_view line = util::trim(raw);
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw ParseError("prediction input line " + std::to_string(line_no) +
                             " is not a JSON object");
        }
        PredictionInput input;
        try {
            input.id = j.at("id").get<std::string>();
            input.body = j.at("body").get<std::string>();
            input.context = j.at("context").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("prediction input line " + std::to_string(line_no) + ": " + e.what());
        }
        inputs.push_back(std::move(input));
    }
    return inputs;
}

}  // namespace ponos
