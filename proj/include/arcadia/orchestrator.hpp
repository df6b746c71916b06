#pragma once

#include "arcadia/data_ingest.hpp"
#include "arcadia/evaluator.hpp"
#include "arcadia/hyperparameters.hpp"
#include "arcadia/llm_client.hpp"
#include "arcadia/proposer.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace arcadia {

enum class ProposerKind { llm, scripted, heuristic };
enum class Termination { accepted, budget_exhausted, proposer_failed, script_exhausted };

std::string_view to_string(ProposerKind kind) noexcept;
std::string_view to_string(Termination t) noexcept;
ProposerKind parse_proposer_kind(std::string_view text);

struct RunConfig {
    Hyperparameters hp;
    std::filesystem::path data_path;
    IngestConfig ingest; ///< treatment and outcome are taken from hp
    ProposerKind proposer = ProposerKind::heuristic;
    std::filesystem::path script_path;
    EndpointConfig endpoint;
    std::filesystem::path out_dir = "arcadia_out";
    std::uint64_t seed = 0;

    /// Throws ConfigError.
    void validate() const;
};

struct IterationRecord {
    std::size_t iteration = 0;
    std::vector<ChatMessage> prompt;
    std::vector<Exchange> exchanges;
    Proposal proposal;
    std::optional<BudgetCheck> budget; ///< change count versus the previous proposal
    Dag dag;                           ///< as proposed, before structural pruning
    Diagnostics diagnostics;
    FailureMemo memo;
    double best_score_after = 0.0;
    double elapsed_ms = 0.0;
};

struct RunTranscript {
    std::string run_id;
    std::string started_at;
    std::string finished_at;
    Hyperparameters hp;
    std::uint64_t seed = 0;
    std::string proposer;
    std::vector<std::string> columns;                   ///< working columns after sampling
    std::optional<std::array<std::size_t, kBucketCount>> bucket_counts; ///< present when sampled
    std::size_t dataset_rows = 0;
    std::size_t dropped_rows = 0;
    std::vector<IterationRecord> iterations;
    std::optional<std::size_t> best_iteration; ///< 1-based
    double best_score = -std::numeric_limits<double>::infinity();
    Termination terminated_by = Termination::budget_exhausted;
    std::string termination_detail;
    std::vector<Exchange> failed_exchanges; ///< exchanges of a proposal that never arrived

    const IterationRecord* best() const;
};

/// Loads and samples the data, then runs the propose/evaluate loop with the
/// configured proposer and persists all artifacts to config.out_dir.
RunTranscript run(const RunConfig& config);

/// Same loop with an injected proposer and an already loaded dataset; no
/// sampling. Artifacts are persisted when out_dir is non-empty.
RunTranscript run_loop(const RunConfig& config, const PanelDataset& ds, Proposer& proposer);

struct ManifestEntry {
    std::string path; ///< relative to the output directory
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct Manifest {
    std::vector<ManifestEntry> files;
};

/// Writes transcript.json, best_dag.dot, diagnostics_<i>.json, summary.md and
/// manifest.json. Throws Error naming the path on I/O failure.
Manifest persist(const RunTranscript& transcript, const std::filesystem::path& out_dir);

/// Creates the directory if needed and verifies it is writable.
void ensure_writable_dir(const std::filesystem::path& dir);

nlohmann::json to_json(const RunTranscript& t);
std::string render_summary(const RunTranscript& t);
std::string sha256_hex(std::string_view data);

} // namespace arcadia
