#include "arcadia/llm_client.hpp"

#include <doctest.h>
#include <httplib.h>

#include <cstdlib>
#include <deque>
#include <thread>

using namespace arcadia;

namespace {

std::string envelope(const std::string& content) {
    return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

const std::string kGood = R"({"reasoning":"...","assumptions":"...","edges":[["a","b"]]})";

/// Replays canned responses; a response with status < 0 throws TransportError.
class FakeTransport final : public ChatTransport {
public:
    explicit FakeTransport(std::deque<TransportResponse> replies) : replies_(std::move(replies)) {}

    TransportResponse post(const std::string& body) override {
        requests.push_back(nlohmann::json::parse(body));
        if (replies_.empty()) throw TransportError("no more replies");
        auto r = replies_.front();
        replies_.pop_front();
        if (r.status < 0) throw TransportError("connection refused");
        return r;
    }

    std::vector<nlohmann::json> requests;

private:
    std::deque<TransportResponse> replies_;
};

EndpointConfig fast_config() {
    EndpointConfig c;
    c.model = "test-model";
    c.backoff = std::chrono::milliseconds(0);
    c.max_retries = 3;
    return c;
}

std::vector<ChatMessage> convo() { return {{"system", "sys"}, {"user", "go"}}; }

} // namespace

TEST_CASE("plain reply parses") {
    FakeTransport t({{200, envelope(kGood)}});
    auto out = llm_propose(convo(), t, fast_config());
    REQUIRE(out.status == ProposeOutcome::Status::ok);
    CHECK(out.proposal->edges.size() == 1);
    CHECK(out.exchanges.size() == 1);
    CHECK(t.requests[0]["model"] == "test-model");
    CHECK(t.requests[0]["messages"].size() == 2);
}

TEST_CASE("fenced reply parses") {
    FakeTransport t({{200, envelope("Sure.\n```json\n" + kGood + "\n```\n")}});
    auto out = llm_propose(convo(), t, fast_config());
    REQUIRE(out.status == ProposeOutcome::Status::ok);
    CHECK(out.proposal->edges == std::vector<Edge>{{"a", "b"}});
}

TEST_CASE("schema violation is fed back and retried") {
    const std::string bad = R"({"reasoning":"x","assumptions":"y","edges":["a->b"]})";
    FakeTransport t({{200, envelope(bad)}, {200, envelope(kGood)}});
    auto out = llm_propose(convo(), t, fast_config());
    REQUIRE(out.status == ProposeOutcome::Status::ok);
    CHECK(out.exchanges.size() == 2);
    CHECK_FALSE(out.exchanges[0].error.empty());
    const auto& msgs = t.requests[1]["messages"];
    REQUIRE(msgs.size() == 4);
    CHECK(msgs[2]["role"] == "assistant");
    CHECK(msgs[2]["content"] == bad);
    CHECK(msgs[3]["role"] == "user");
    CHECK(msgs[3]["content"].get<std::string>().find("could not be accepted") != std::string::npos);
}

TEST_CASE("transport failures and HTTP errors are retried") {
    FakeTransport t({{-1, ""}, {503, "busy"}, {200, envelope(kGood)}});
    auto out = llm_propose(convo(), t, fast_config());
    CHECK(out.status == ProposeOutcome::Status::ok);
    CHECK(out.exchanges.size() == 3);
    CHECK(out.exchanges[1].status == 503);
    // no feedback messages for transport-level problems
    CHECK(t.requests[2]["messages"].size() == 2);
}

TEST_CASE("retry budget is finite") {
    std::deque<TransportResponse> replies(10, TransportResponse{200, envelope("no json")});
    FakeTransport t(replies);
    auto cfg = fast_config();
    auto out = llm_propose(convo(), t, cfg);
    CHECK(out.status != ProposeOutcome::Status::ok);
    CHECK_FALSE(out.proposal);
    CHECK(out.exchanges.size() == cfg.max_retries + 1);
    CHECK(t.requests.size() == cfg.max_retries + 1);
}

TEST_CASE("malformed envelope is retried") {
    FakeTransport t({{200, R"({"unexpected":true})"}, {200, envelope(kGood)}});
    auto out = llm_propose(convo(), t, fast_config());
    CHECK(out.status == ProposeOutcome::Status::ok);
    CHECK(out.exchanges.size() == 2);
}

TEST_CASE("check failures are fed back") {
    const std::string other = R"({"reasoning":"...","assumptions":"...","edges":[["c","d"]]})";
    FakeTransport t({{200, envelope(kGood)}, {200, envelope(other)}});
    ProposalCheck check = [](const Proposal& p) -> std::optional<std::string> {
        if (p.edges.front().parent == "a") return "too many changes";
        return std::nullopt;
    };
    auto out = llm_propose(convo(), t, fast_config(), check);
    REQUIRE(out.status == ProposeOutcome::Status::ok);
    CHECK(out.proposal->edges.front().parent == "c");
    CHECK(t.requests[1]["messages"][3]["content"].get<std::string>().find("too many changes") != std::string::npos);
}

TEST_CASE("cancellation stops before the next attempt") {
    FakeTransport t({{200, envelope("nope")}, {200, envelope(kGood)}});
    std::atomic<bool> cancel{true};
    auto out = llm_propose(convo(), t, fast_config(), {}, &cancel);
    CHECK(out.status == ProposeOutcome::Status::failed);
    CHECK(t.requests.empty());
}

TEST_CASE("HTTP transport against a local server") {
    httplib::Server server;
    std::string seen_auth;
    std::string seen_body;
    server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        seen_body = req.body;
        res.set_content(envelope(kGood), "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread th([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    ::setenv("ARCADIA_TEST_KEY", "sk-secret-value", 1);
    EndpointConfig cfg = fast_config();
    cfg.url = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
    cfg.api_key_env = "ARCADIA_TEST_KEY";
    cfg.timeout = std::chrono::milliseconds(5000);
    HttpTransport transport(cfg);
    auto out = llm_propose(convo(), transport, cfg);

    server.stop();
    th.join();

    REQUIRE(out.status == ProposeOutcome::Status::ok);
    CHECK(seen_auth == "Bearer sk-secret-value");
    CHECK(seen_body.find("sk-secret-value") == std::string::npos);
    for (const auto& ex : out.exchanges) CHECK(to_json(ex).dump().find("sk-secret-value") == std::string::npos);
}

TEST_CASE("unreachable endpoint reports a transport error") {
    EndpointConfig cfg = fast_config();
    cfg.url = "http://127.0.0.1:1/v1/chat/completions";
    cfg.max_retries = 1;
    cfg.timeout = std::chrono::milliseconds(500);
    HttpTransport transport(cfg);
    auto out = llm_propose(convo(), transport, cfg);
    CHECK(out.status == ProposeOutcome::Status::failed);
    CHECK(out.exchanges.size() == 2);
    CHECK_FALSE(out.exchanges[0].error.empty());
    CHECK_THROWS_AS(HttpTransport(EndpointConfig{.url = "no-scheme"}), ConfigError);
}
