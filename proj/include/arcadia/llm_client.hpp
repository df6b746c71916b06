#pragma once

#include "arcadia/error.hpp"
#include "arcadia/proposer.hpp"

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace arcadia {

struct EndpointConfig {
    std::string url = "https://api.openai.com/v1/chat/completions";
    std::string model;
    std::string api_key_env = "ARCADIA_API_KEY";
    double temperature = 0.0;
    std::chrono::milliseconds timeout{120'000};
    /// Retry budget R shared by transport failures, schema violations and
    /// refinement-budget violations.
    std::size_t max_retries = 3;
    std::chrono::milliseconds backoff{1'000}; ///< doubled after each transport failure
    /// JSON pointer to the reply text inside the response body.
    std::string content_pointer = "/choices/0/message/content";
};

struct TransportResponse {
    int status = 0;
    std::string body;
};

class TransportError : public Error {
public:
    using Error::Error;
};

/// Posts a JSON request body and returns the raw response. Throws
/// TransportError on connection failure or timeout.
class ChatTransport {
public:
    virtual ~ChatTransport() = default;
    virtual TransportResponse post(const std::string& body) = 0;
};

/// cpp-httplib transport. The credential is read from the configured
/// environment variable once and only ever placed in the Authorization header.
class HttpTransport final : public ChatTransport {
public:
    explicit HttpTransport(const EndpointConfig& config);
    ~HttpTransport() override;

    TransportResponse post(const std::string& body) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Returns a problem description for an otherwise schema-valid proposal.
using ProposalCheck = std::function<std::optional<std::string>(const Proposal&)>;

/// Builds the chat-completion request body.
nlohmann::json chat_request(const EndpointConfig& config, std::span<const ChatMessage> messages);

/// Sends the conversation, extracts and validates a proposal, and retries up
/// to config.max_retries times. Schema or check failures append the reply
/// and an error message to the conversation before retrying.
ProposeOutcome llm_propose(std::vector<ChatMessage> messages, ChatTransport& transport, const EndpointConfig& config,
                           const ProposalCheck& check = {}, const std::atomic<bool>* cancel = nullptr);

/// Proposer backed by a chat-completion endpoint.
class LlmProposer final : public Proposer {
public:
    LlmProposer(EndpointConfig config, std::unique_ptr<ChatTransport> transport);

    std::string_view kind() const override { return "llm"; }
    ProposeOutcome propose(const ProposeContext& ctx) override;

    /// Aborts retries between attempts.
    void cancel() noexcept { cancelled_ = true; }

private:
    EndpointConfig config_;
    std::unique_ptr<ChatTransport> transport_;
    std::atomic<bool> cancelled_{false};
};

} // namespace arcadia
