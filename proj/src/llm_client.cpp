#include "arcadia/llm_client.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include <cstdlib>
#include <thread>

namespace arcadia {

struct HttpTransport::Impl {
    std::string origin; // scheme://host[:port]
    std::string path;
    std::string api_key;
    std::chrono::milliseconds timeout;
};

HttpTransport::HttpTransport(const EndpointConfig& config) : impl_(std::make_unique<Impl>()) {
    auto scheme_end = config.url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError(fmt::format("endpoint URL '{}' lacks a scheme", config.url));
    auto path_start = config.url.find('/', scheme_end + 3);
    impl_->origin = config.url.substr(0, path_start);
    impl_->path = path_start == std::string::npos ? "/" : config.url.substr(path_start);
    impl_->timeout = config.timeout;
    if (const char* key = std::getenv(config.api_key_env.c_str())) impl_->api_key = key;
}

HttpTransport::~HttpTransport() = default;

TransportResponse HttpTransport::post(const std::string& body) {
    httplib::Client client(impl_->origin);
    auto seconds = std::chrono::duration_cast<std::chrono::seconds>(impl_->timeout);
    auto micros = std::chrono::duration_cast<std::chrono::microseconds>(impl_->timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());
    httplib::Headers headers;
    if (!impl_->api_key.empty()) headers.emplace("Authorization", "Bearer " + impl_->api_key);
    auto res = client.Post(impl_->path, headers, body, "application/json");
    if (!res) throw TransportError(fmt::format("request to {} failed: {}", impl_->origin, httplib::to_string(res.error())));
    return {res->status, res->body};
}

nlohmann::json chat_request(const EndpointConfig& config, std::span<const ChatMessage> messages) {
    return {{"model", config.model}, {"messages", to_json(messages)}, {"temperature", config.temperature}};
}

ProposeOutcome llm_propose(std::vector<ChatMessage> messages, ChatTransport& transport, const EndpointConfig& config,
                           const ProposalCheck& check, const std::atomic<bool>* cancel) {
    ProposeOutcome out;
    auto backoff = config.backoff;
    std::string last_error;
    for (std::size_t attempt = 0; attempt <= config.max_retries; ++attempt) {
        if (cancel && cancel->load()) {
            out.error = "cancelled";
            out.status = ProposeOutcome::Status::failed;
            return out;
        }
        Exchange ex;
        ex.attempt = attempt + 1;
        ex.request = chat_request(config, messages);
        TransportResponse res;
        try {
            res = transport.post(ex.request.dump());
        } catch (const TransportError& e) {
            ex.error = e.what();
            last_error = ex.error;
            out.exchanges.push_back(std::move(ex));
            if (attempt < config.max_retries && backoff.count() > 0) {
                std::this_thread::sleep_for(backoff);
                backoff *= 2;
            }
            continue;
        }
        ex.status = res.status;
        ex.response = res.body;
        if (res.status < 200 || res.status >= 300) {
            ex.error = fmt::format("endpoint returned HTTP {}", res.status);
            last_error = ex.error;
            out.exchanges.push_back(std::move(ex));
            if (attempt < config.max_retries && backoff.count() > 0) {
                std::this_thread::sleep_for(backoff);
                backoff *= 2;
            }
            continue;
        }

        std::string content;
        std::string problem;
        try {
            auto body = nlohmann::json::parse(res.body);
            const auto& node = body.at(nlohmann::json::json_pointer(config.content_pointer));
            if (!node.is_string()) throw ProposerError("reply content is not a string");
            content = node.get<std::string>();
        } catch (const std::exception& e) {
            // Malformed envelope: nothing sensible to feed back, so just retry.
            ex.error = fmt::format("cannot read reply content: {}", e.what());
            last_error = ex.error;
            out.exchanges.push_back(std::move(ex));
            continue;
        }
        try {
            auto proposal = proposal_from_json(nlohmann::json::parse(extract_json_object(content)));
            if (check) {
                if (auto issue = check(proposal)) throw ProposerError(*issue);
            }
            out.exchanges.push_back(std::move(ex));
            out.status = ProposeOutcome::Status::ok;
            out.proposal = std::move(proposal);
            return out;
        } catch (const std::exception& e) {
            problem = e.what();
        }
        ex.error = problem;
        last_error = problem;
        out.exchanges.push_back(std::move(ex));
        messages.push_back({"assistant", content});
        messages.push_back({"user", fmt::format("Your previous reply could not be accepted: {}. Return a single JSON "
                                                "object exactly in the required schema.",
                                                problem)});
    }
    out.status = ProposeOutcome::Status::failed;
    out.error = fmt::format("no valid proposal after {} attempts; last error: {}", config.max_retries + 1, last_error);
    return out;
}

LlmProposer::LlmProposer(EndpointConfig config, std::unique_ptr<ChatTransport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {}

ProposeOutcome LlmProposer::propose(const ProposeContext& ctx) {
    const auto names = ctx.dataset->column_names();
    const NodeSet columns(names.begin(), names.end());
    const Hyperparameters& hp = *ctx.hp;
    std::optional<Proposal> previous;
    if (!ctx.history.empty()) previous = ctx.history.back().proposal;
    ProposalCheck check = [&](const Proposal& p) -> std::optional<std::string> {
        if (auto issue = validate_proposal(p, hp, columns)) return issue;
        if (previous) {
            auto budget = enforce_refinement_budget(*previous, p, hp.k_refine);
            if (!budget.accepted) {
                return fmt::format("{} column changes versus the previous DAG; at most {} are allowed",
                                   budget.change_count, hp.k_refine);
            }
        }
        return std::nullopt;
    };
    return llm_propose(std::vector<ChatMessage>(ctx.messages.begin(), ctx.messages.end()), *transport_, config_, check,
                       &cancelled_);
}

} // namespace arcadia
