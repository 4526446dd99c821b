#pragma once
// Chat-completions wire client. Any model server that accepts
//   POST {"model", "messages": [{"role","content"}...], "temperature": 0}
// and answers {"choices":[{"message":{"content": "..."}}]} can back the
// remote classifier and the reply generator. Transport failures are retried
// with exponential backoff plus seedable jitter.

#include <chrono>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "ponos/errors.hpp"

namespace ponos {

struct ChatMessage {
    std::string role;  // "system" or "user"
    std::string content;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
};

inline nlohmann::json to_json(const ChatRequest& request) {
    nlohmann::json messages = nlohmann::json::array();
    for (const ChatMessage& m : request.messages) {
        messages.push_back({{"role", m.role}, {"content", m.content}});
    }
    return nlohmann::json{{"model", request.model}, {"messages", messages}, {"temperature", 0}};
}

// Single-attempt transport. complete() returns the assistant text or throws
// TransportError; retrying is the caller's concern. Implementations must be
// safe to call from several threads at once.
class ChatTransport {
public:
    virtual ~ChatTransport() = default;
    virtual std::string complete(const ChatRequest& request) = 0;
};

struct HttpEndpoint {
    std::string host;
    int port = 80;
    std::string path = "/";
};

inline HttpEndpoint parse_http_url(const std::string& url) {
    const std::string scheme = "http://";
    if (url.rfind("https://", 0) == 0) {
        throw ConfigError("https endpoints are not supported; use http");
    }
    if (url.rfind(scheme, 0) != 0) {
        throw ConfigError("endpoint url must start with http://, got '" + url + "'");
    }
    std::string rest = url.substr(scheme.size());
    HttpEndpoint endpoint;
    std::size_t slash = rest.find('/');
    std::string authority = slash == std::string::npos ? rest : rest.substr(0, slash);
    endpoint.path = slash == std::string::npos ? "/" : rest.substr(slash);
    std::size_t colon = authority.find(':');
    if (colon == std::string::npos) {
        endpoint.host = authority;
    } else {
        endpoint.host = authority.substr(0, colon);
        try {
            endpoint.port = std::stoi(authority.substr(colon + 1));
        } catch (const std::exception&) {
            throw ConfigError("bad port in endpoint url '" + url + "'");
        }
    }
    if (endpoint.host.empty()) throw ConfigError("missing host in endpoint url '" + url + "'");
    if (endpoint.port <= 0 || endpoint.port > 65535) {
        throw ConfigError("bad port in endpoint url '" + url + "'");
    }
    return endpoint;
}

class HttpChatTransport : public ChatTransport {
public:
    HttpChatTransport(const std::string& endpoint_url, std::chrono::milliseconds timeout)
        : endpoint_(parse_http_url(endpoint_url)), timeout_(timeout) {}

    std::string complete(const ChatRequest& request) override {
        // A fresh client per call keeps concurrent use trivially safe.
        httplib::Client client(endpoint_.host, endpoint_.port);
        auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
        auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - seconds);
        client.set_connection_timeout(seconds.count(), micros.count());
        client.set_read_timeout(seconds.count(), micros.count());
        client.set_write_timeout(seconds.count(), micros.count());

        auto result = client.Post(endpoint_.path, to_json(request).dump(), "application/json");
        if (!result) {
            throw TransportError("POST " + endpoint_.host + ":" + std::to_string(endpoint_.port) +
                                 endpoint_.path + " failed: " + httplib::to_string(result.error()));
        }
        if (result->status != 200) {
            throw TransportError("HTTP " + std::to_string(result->status) + " from " +
                                 endpoint_.host + endpoint_.path);
        }
        return extract_content(result->body);
    }

    static std::string extract_content(const std::string& body) {
        nlohmann::json parsed = nlohmann::json::parse(body, nullptr, false);
        if (parsed.is_discarded()) throw TransportError("response body is not valid JSON");
        try {
            return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw TransportError(std::string("response missing choices[0].message.content: ") +
                                 e.what());
        }
    }

private:
    HttpEndpoint endpoint_;
    std::chrono::milliseconds timeout_;
};

struct RetryPolicy {
    int max_retries = 3;  // retries after the first attempt
    std::chrono::milliseconds base_backoff{100};
    std::uint64_t seed = 0;  // drives the jitter; set from PONOS_SEED by the CLI
};

// Deterministic given (policy.seed, attempt): base * 2^attempt plus jitter
// uniform over [0, base/2].
inline std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int attempt) {
    long long base = policy.base_backoff.count();
    for (int i = 0; i < attempt && base < (1LL << 40); ++i) base *= 2;
    std::mt19937_64 rng(policy.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(attempt + 1)));
    std::uniform_int_distribution<long long> jitter(0, std::max<long long>(base / 2, 1));
    return std::chrono::milliseconds(base + jitter(rng));
}

inline std::string complete_with_retry(ChatTransport& transport, const ChatRequest& request,
                                       const RetryPolicy& policy) {
    std::string last_error;
    int attempts = std::max(policy.max_retries, 0) + 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        try {
            return transport.complete(request);
        } catch (const TransportError& e) {
            last_error = e.what();
        }
        if (attempt + 1 < attempts) std::this_thread::sleep_for(backoff_delay(policy, attempt));
    }
    throw BackendUnavailableError("giving up after " + std::to_string(attempts) +
                                  " attempts; last error: " + last_error);
}

}  // namespace ponos
