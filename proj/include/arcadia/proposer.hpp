#pragma once

#include "arcadia/dag.hpp"
#include "arcadia/data_ingest.hpp"
#include "arcadia/hyperparameters.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace arcadia {

/// One proposer emission.
struct Proposal {
    std::string reasoning;
    std::string assumptions;
    std::vector<Edge> edges;
    std::optional<bool> negligible_effect_claimed;

    /// Edge endpoints, in first-appearance order.
    std::vector<std::string> node_names() const;
};

/// Strict schema check: string `reasoning` and `assumptions`, non-empty
/// `edges` of [parent, child] string pairs, optional boolean
/// `negligible_effect_claimed`. Throws ProposerError describing the problem.
Proposal proposal_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Proposal& p);

/// Returns the single outermost balanced {...} object in free text (code
/// fences and surrounding prose are ignored). Throws ProposerError when
/// there is none or more than one.
std::string extract_json_object(std::string_view reply);

/// Checks a parsed proposal against the run: known column names, no
/// self-loops or duplicates, treatment and outcome present. Returns the
/// problem description, or nullopt when the proposal is usable.
std::optional<std::string> validate_proposal(const Proposal& p, const Hyperparameters& hp, const NodeSet& columns);

struct BudgetCheck {
    bool accepted = true;
    std::size_t change_count = 0;
    std::vector<std::string> added;
    std::vector<std::string> removed;
};

/// Change count is max(|added|, |removed|) over the node sets, so an
/// add/remove pair counts as one swap.
BudgetCheck enforce_refinement_budget(const Proposal& prev, const Proposal& next, std::size_t k_refine);

// --- prompts ------------------------------------------------------------------

struct ChatMessage {
    std::string role;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

nlohmann::json to_json(const ChatMessage& m);
nlohmann::json to_json(std::span<const ChatMessage> messages);

/// One completed iteration as the proposer sees it.
struct HistoryEntry {
    std::size_t iteration = 0;
    Proposal proposal;
    std::string memo_text;
};

enum class PromptKind { bootstrap, refinement };

/// Substitutes {name} placeholders (lower-case identifiers). Braces that do
/// not enclose an identifier are literal. Throws TemplateError naming the
/// first placeholder without a value.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

/// Placeholder values derived from the hyper-parameters and column list.
std::map<std::string, std::string> prompt_values(const Hyperparameters& hp, std::span<const std::string> columns,
                                                 std::size_t iteration);

/// Bootstrap: system + first user message. Refinement: the bootstrap pair,
/// then per past iteration the proposal (assistant) and its failure memo
/// (user), then the refinement system message and the next user message.
std::vector<ChatMessage> render_prompt(PromptKind kind, const Hyperparameters& hp,
                                       std::span<const std::string> columns, std::span<const HistoryEntry> history);

namespace prompts {
extern const std::string_view system_initial;
extern const std::string_view current_user;
extern const std::string_view previous_user;
extern const std::string_view system_refinement;
} // namespace prompts

// --- proposers ----------------------------------------------------------------

/// One logged request/response pair.
struct Exchange {
    std::size_t attempt = 0;
    nlohmann::json request;
    std::optional<int> status;
    std::string response;
    std::string error;
};

nlohmann::json to_json(const Exchange& e);

struct ProposeContext {
    std::size_t iteration = 1;
    const Hyperparameters* hp = nullptr;
    const PanelDataset* dataset = nullptr;
    std::span<const HistoryEntry> history;
    std::span<const ChatMessage> messages;
    std::uint64_t seed = 0;
};

struct ProposeOutcome {
    enum class Status { ok, exhausted, failed };
    Status status = Status::failed;
    std::optional<Proposal> proposal;
    std::vector<Exchange> exchanges;
    std::string error;
};

class Proposer {
public:
    virtual ~Proposer() = default;
    virtual std::string_view kind() const = 0;
    virtual ProposeOutcome propose(const ProposeContext& ctx) = 0;
};

/// Replays a fixed list of proposals, one per iteration.
class ScriptedProposer final : public Proposer {
public:
    explicit ScriptedProposer(std::vector<Proposal> script) : script_(std::move(script)) {}

    /// Reads a JSON array of proposal objects. Parse errors report the line.
    static ScriptedProposer load(const std::filesystem::path& path);
    static ScriptedProposer parse(std::string_view text);

    std::string_view kind() const override { return "scripted"; }
    ProposeOutcome propose(const ProposeContext& ctx) override;

    /// Entry for a 1-based iteration, or nullopt once the script is exhausted.
    std::optional<Proposal> at(std::size_t iteration) const;
    std::size_t size() const noexcept { return script_.size(); }

private:
    std::vector<Proposal> script_;
};

/// Correlation-ranked, temporally consistent proposal built from the data.
Proposal heuristic_propose(const PanelDataset& ds, const Hyperparameters& hp, std::uint64_t seed);

class HeuristicProposer final : public Proposer {
public:
    std::string_view kind() const override { return "heuristic"; }
    /// Uses seed + iteration - 1 so refinements explore different sizes.
    ProposeOutcome propose(const ProposeContext& ctx) override;
};

} // namespace arcadia
