// Wire-protocol contract tests against an in-process mock server speaking
// the chat-completions shape.

#include <atomic>
#include <chrono>
#include <memory>
#include <thread>

#include <catch2/catch_amalgamated.hpp>

#include "httplib.h"
#include "json.hpp"
#include "ponos/chat_client.hpp"

using namespace ponos;

namespace {

// Serves POST /v1/chat/completions with a handler and stops on destruction.
class MockServer {
public:
    explicit MockServer(httplib::Server::Handler handler) {
        server_.Post("/v1/chat/completions", std::move(handler));
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~MockServer() {
        server_.stop();
        thread_.join();
    }

    int port() const { return port_; }
    std::string url() const {
        return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
    }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
};

std::string content_response(const std::string& content) {
    nlohmann::json choice{{"message", nlohmann::json{{"content", content}}}};
    return nlohmann::json{{"choices", nlohmann::json::array({choice})}}.dump();
}

ChatRequest sample_request() {
    ChatRequest request;
    request.model = "test-model";
    request.messages = {{"system", "sys text"}, {"user", "user text"}};
    return request;
}

}  // namespace

TEST_CASE("http url parsing") {
    HttpEndpoint endpoint = parse_http_url("http://example.test:8080/v1/chat/completions");
    CHECK(endpoint.host == "example.test");
    CHECK(endpoint.port == 8080);
    CHECK(endpoint.path == "/v1/chat/completions");

    endpoint = parse_http_url("http://example.test/x");
    CHECK(endpoint.port == 80);

    endpoint = parse_http_url("http://example.test");
    CHECK(endpoint.path == "/");

    CHECK_THROWS_AS(parse_http_url("https://secure.test/x"), ConfigError);
    CHECK_THROWS_AS(parse_http_url("ftp://example.test/x"), ConfigError);
    CHECK_THROWS_AS(parse_http_url("http://:8080/x"), ConfigError);
    CHECK_THROWS_AS(parse_http_url("http://host:notaport/x"), ConfigError);
}

TEST_CASE("chat request serializes to the wire shape") {
    nlohmann::json j = to_json(sample_request());
    CHECK(j["model"] == "test-model");
    CHECK(j["temperature"] == 0);
    REQUIRE(j["messages"].size() == 2);
    CHECK(j["messages"][0]["role"] == "system");
    CHECK(j["messages"][0]["content"] == "sys text");
    CHECK(j["messages"][1]["role"] == "user");
}

TEST_CASE("transport posts the wire shape and parses the response") {
    nlohmann::json seen;
    MockServer server([&](const httplib::Request& req, httplib::Response& res) {
        seen = nlohmann::json::parse(req.body);
        res.set_content(content_response("hello back"), "application/json");
    });
    HttpChatTransport transport(server.url(), std::chrono::milliseconds(2000));
    std::string content = transport.complete(sample_request());
    CHECK(content == "hello back");
    CHECK(seen["model"] == "test-model");
    CHECK(seen["temperature"] == 0);
    CHECK(seen["messages"][1]["content"] == "user text");
}

TEST_CASE("non-200 responses are transport errors") {
    MockServer server([](const httplib::Request&, httplib::Response& res) {
        res.status = 500;
        res.set_content("boom", "text/plain");
    });
    HttpChatTransport transport(server.url(), std::chrono::milliseconds(2000));
    CHECK_THROWS_AS(transport.complete(sample_request()), TransportError);
}

TEST_CASE("malformed response bodies are transport errors") {
    MockServer server([](const httplib::Request&, httplib::Response& res) {
        res.set_content("{\"unexpected\": true}", "application/json");
    });
    HttpChatTransport transport(server.url(), std::chrono::milliseconds(2000));
    CHECK_THROWS_AS(transport.complete(sample_request()), TransportError);
    CHECK_THROWS_AS(HttpChatTransport::extract_content("not json"), TransportError);
}

TEST_CASE("unreachable endpoints are transport errors") {
    // Port 1 is reserved and closed.
    HttpChatTransport transport("http://127.0.0.1:1/v1/chat/completions",
                                std::chrono::milliseconds(200));
    CHECK_THROWS_AS(transport.complete(sample_request()), TransportError);
}

TEST_CASE("complete_with_retry recovers from transient failures") {
    std::atomic<int> calls{0};
    MockServer server([&](const httplib::Request&, httplib::Response& res) {
        if (calls.fetch_add(1) < 2) {
            res.status = 503;
            return;
        }
        res.set_content(content_response("eventually"), "application/json");
    });
    HttpChatTransport transport(server.url(), std::chrono::milliseconds(2000));
    RetryPolicy policy;
    policy.max_retries = 3;
    policy.base_backoff = std::chrono::milliseconds(1);
    policy.seed = 42;
    CHECK(complete_with_retry(transport, sample_request(), policy) == "eventually");
    CHECK(calls.load() == 3);
}

TEST_CASE("complete_with_retry gives up after max_retries") {
    std::atomic<int> calls{0};
    MockServer server([&](const httplib::Request&, httplib::Response& res) {
        calls.fetch_add(1);
        res.status = 503;
    });
    HttpChatTransport transport(server.url(), std::chrono::milliseconds(2000));
    RetryPolicy policy;
    policy.max_retries = 2;
    policy.base_backoff = std::chrono::milliseconds(1);
    CHECK_THROWS_AS(complete_with_retry(transport, sample_request(), policy),
                    BackendUnavailableError);
    CHECK(calls.load() == 3);  // one attempt plus two retries
}

TEST_CASE("backoff delays grow and are deterministic for a seed") {
    RetryPolicy policy;
    policy.base_backoff = std::chrono::milliseconds(100);
    policy.seed = 7;
    auto d0 = backoff_delay(policy, 0);
    auto d1 = backoff_delay(policy, 1);
    auto d2 = backoff_delay(policy, 2);
    CHECK(d0.count() >= 100);
    CHECK(d0.count() <= 150);
    CHECK(d1.count() >= 200);
    CHECK(d1.count() <= 300);
    CHECK(d2.count() >= 400);
    CHECK(d2.count() <= 600);
    CHECK(backoff_delay(policy, 1) == d1);
    RetryPolicy other = policy;
    other.seed = 8;
    // Different seeds may jitter differently but stay within the window.
    CHECK(backoff_delay(other, 1).count() >= 200);
    CHECK(backoff_delay(other, 1).count() <= 300);
}
