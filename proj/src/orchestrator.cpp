#include "arcadia/orchestrator.hpp"

#include "arcadia/error.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

namespace arcadia {

namespace fs = std::filesystem;

std::string_view to_string(ProposerKind kind) noexcept {
    switch (kind) {
    case ProposerKind::llm:
        return "llm";
    case ProposerKind::scripted:
        return "scripted";
    case ProposerKind::heuristic:
        return "heuristic";
    }
    return "unknown";
}

std::string_view to_string(Termination t) noexcept {
    switch (t) {
    case Termination::accepted:
        return "accepted";
    case Termination::budget_exhausted:
        return "budget_exhausted";
    case Termination::proposer_failed:
        return "proposer_failed";
    case Termination::script_exhausted:
        return "script_exhausted";
    }
    return "unknown";
}

ProposerKind parse_proposer_kind(std::string_view text) {
    if (text == "llm") return ProposerKind::llm;
    if (text == "scripted") return ProposerKind::scripted;
    if (text == "heuristic") return ProposerKind::heuristic;
    throw ConfigError(fmt::format("unknown proposer '{}' (expected llm, scripted or heuristic)", text));
}

void RunConfig::validate() const {
    hp.validate();
    if (data_path.empty()) throw ConfigError("no data file given");
    if (proposer == ProposerKind::scripted && script_path.empty())
        throw ConfigError("the scripted proposer needs a script file");
    if (proposer == ProposerKind::llm && endpoint.model.empty())
        throw ConfigError("the llm proposer needs a model name");
}

const IterationRecord* RunTranscript::best() const {
    if (!best_iteration) return nullptr;
    for (const auto& rec : iterations)
        if (rec.iteration == *best_iteration) return &rec;
    return nullptr;
}

namespace {

std::string utc_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string make_run_id() {
    std::random_device rd;
    std::uniform_int_distribution<unsigned> byte(0, 255);
    std::string id;
    for (int i = 0; i < 16; ++i) id += fmt::format("{:02x}", byte(rd));
    return id;
}

void write_file(const fs::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot open '{}' for writing", path.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(fmt::format("write to '{}' failed", path.string()));
}

} // namespace

void ensure_writable_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
    fs::path probe = dir / ".arcadia_write_probe";
    {
        std::ofstream out(probe);
        if (!out) throw Error(fmt::format("output directory '{}' is not writable", dir.string()));
    }
    fs::remove(probe, ec);
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    std::string hex;
    hex.reserve(len * 2);
    for (unsigned i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

RunTranscript run_loop(const RunConfig& config, const PanelDataset& ds, Proposer& proposer) {
    const Hyperparameters& hp = config.hp;
    hp.validate();
    if (!config.out_dir.empty()) ensure_writable_dir(config.out_dir);

    RunTranscript tr;
    tr.run_id = make_run_id();
    tr.started_at = utc_now();
    tr.hp = hp;
    tr.seed = config.seed;
    tr.proposer = std::string(proposer.kind());
    tr.columns = ds.column_names();
    tr.dataset_rows = ds.rows();
    tr.dropped_rows = ds.dropped_rows();

    const NodeSet known(tr.columns.begin(), tr.columns.end());
    std::vector<HistoryEntry> history;
    bool accepted = false;
    bool stopped = false;

    for (std::size_t t = 1; t <= hp.t_max && !accepted && !stopped; ++t) {
        auto started = std::chrono::steady_clock::now();
        auto kind = history.empty() ? PromptKind::bootstrap : PromptKind::refinement;
        auto messages = render_prompt(kind, hp, tr.columns, history);

        ProposeContext ctx;
        ctx.iteration = t;
        ctx.hp = &hp;
        ctx.dataset = &ds;
        ctx.history = history;
        ctx.messages = messages;
        ctx.seed = config.seed;
        ProposeOutcome outcome = proposer.propose(ctx);

        if (outcome.status != ProposeOutcome::Status::ok || !outcome.proposal) {
            tr.failed_exchanges = std::move(outcome.exchanges);
            tr.terminated_by = outcome.status == ProposeOutcome::Status::exhausted && proposer.kind() == "scripted"
                                   ? Termination::script_exhausted
                                   : Termination::proposer_failed;
            tr.termination_detail = fmt::format("iteration {}: {}", t, outcome.error);
            stopped = true;
            break;
        }

        IterationRecord rec;
        rec.iteration = t;
        rec.prompt = std::move(messages);
        rec.exchanges = std::move(outcome.exchanges);
        rec.proposal = std::move(*outcome.proposal);
        if (!history.empty()) rec.budget = enforce_refinement_budget(history.back().proposal, rec.proposal, hp.k_refine);

        try {
            rec.dag = build_dag(rec.proposal.edges, known);
        } catch (const GraphError& e) {
            tr.terminated_by = Termination::proposer_failed;
            tr.termination_detail = fmt::format("iteration {}: unusable proposal: {}", t, e.what());
            tr.failed_exchanges = std::move(rec.exchanges);
            stopped = true;
            break;
        }

        rec.diagnostics = evaluate_dag(rec.dag, ds, hp, rec.proposal.negligible_effect_claimed.value_or(false));
        rec.memo = build_failure_memo(rec.diagnostics, hp);

        const double score = rec.diagnostics.global.composite_score;
        if (rec.diagnostics.ok) {
            // An accepted graph becomes the answer even if an earlier one scored higher.
            tr.best_iteration = t;
            tr.best_score = score;
            accepted = true;
        } else if (!tr.best_iteration || score > tr.best_score) {
            tr.best_iteration = t;
            tr.best_score = score;
        }
        rec.best_score_after = tr.best_score;
        rec.elapsed_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();

        history.push_back({t, rec.proposal, rec.memo.text});
        tr.iterations.push_back(std::move(rec));
    }

    if (accepted) {
        tr.terminated_by = Termination::accepted;
        tr.termination_detail = fmt::format("iteration {} satisfied all criteria", *tr.best_iteration);
    } else if (!stopped) {
        tr.terminated_by = Termination::budget_exhausted;
        tr.termination_detail = fmt::format("no graph accepted within {} iterations", hp.t_max);
    }
    tr.finished_at = utc_now();
    if (!config.out_dir.empty()) persist(tr, config.out_dir);
    return tr;
}

RunTranscript run(const RunConfig& config) {
    config.validate();
    ensure_writable_dir(config.out_dir);

    IngestConfig ingest = config.ingest;
    ingest.treatment = config.hp.treatment;
    ingest.outcome = config.hp.outcome;
    PanelDataset full = load_csv(config.data_path, ingest);

    std::optional<std::array<std::size_t, kBucketCount>> buckets;
    std::vector<std::string> working = full.column_names();
    if (config.hp.m < full.cols()) {
        BalancedSample sample = sample_balanced_subset(full, config.hp.m, config.seed);
        working = sample.columns;
        buckets = sample.bucket_counts;
    }
    const PanelDataset ds = full.select(working);

    std::unique_ptr<Proposer> proposer;
    switch (config.proposer) {
    case ProposerKind::scripted:
        proposer = std::make_unique<ScriptedProposer>(ScriptedProposer::load(config.script_path));
        break;
    case ProposerKind::heuristic:
        proposer = std::make_unique<HeuristicProposer>();
        break;
    case ProposerKind::llm:
        proposer = std::make_unique<LlmProposer>(config.endpoint, std::make_unique<HttpTransport>(config.endpoint));
        break;
    }

    RunConfig inner = config;
    inner.out_dir.clear();
    RunTranscript tr = run_loop(inner, ds, *proposer);
    tr.bucket_counts = buckets;
    tr.dropped_rows = full.dropped_rows();
    persist(tr, config.out_dir);
    return tr;
}

// --- serialization --------------------------------------------------------------

namespace {

nlohmann::json hp_json(const Hyperparameters& hp) {
    return {{"k_init_min", hp.k_init_min},
            {"k_init_max", hp.k_init_max},
            {"k_refine", hp.k_refine},
            {"t_max", hp.t_max},
            {"m", hp.m},
            {"alpha", hp.alpha},
            {"theta_global", hp.theta_global},
            {"theta_r2", hp.theta_r2},
            {"theta_vif", hp.theta_vif},
            {"treatment", hp.treatment},
            {"outcome", hp.outcome},
            {"accept_negligible_effect", hp.accept_negligible_effect}};
}

nlohmann::json budget_json(const BudgetCheck& b) {
    return {{"accepted", b.accepted}, {"change_count", b.change_count}, {"added", b.added}, {"removed", b.removed}};
}

nlohmann::json dag_edges_json(const Dag& dag) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : dag.edges()) arr.push_back({e.parent, e.child});
    return arr;
}

nlohmann::json exchanges_json(const std::vector<Exchange>& xs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& x : xs) arr.push_back(to_json(x));
    return arr;
}

} // namespace

nlohmann::json to_json(const RunTranscript& t) {
    nlohmann::json j;
    j["run_id"] = t.run_id;
    j["started_at"] = t.started_at;
    j["finished_at"] = t.finished_at;
    j["hyperparameters"] = hp_json(t.hp);
    j["seed"] = t.seed;
    j["proposer"] = t.proposer;
    j["columns"] = t.columns;
    j["bucket_counts"] = t.bucket_counts ? nlohmann::json(*t.bucket_counts) : nlohmann::json(nullptr);
    j["dataset_rows"] = t.dataset_rows;
    j["dropped_rows"] = t.dropped_rows;
    nlohmann::json iters = nlohmann::json::array();
    for (const auto& r : t.iterations) {
        nlohmann::json it;
        it["iteration"] = r.iteration;
        it["prompt"] = to_json(std::span<const ChatMessage>(r.prompt));
        it["exchanges"] = exchanges_json(r.exchanges);
        it["proposal"] = to_json(r.proposal);
        it["budget"] = r.budget ? budget_json(*r.budget) : nlohmann::json(nullptr);
        it["dag_edges"] = dag_edges_json(r.dag);
        it["diagnostics"] = to_json(r.diagnostics);
        it["memo"] = to_json(r.memo);
        it["best_score_after"] = json_number(r.best_score_after);
        it["elapsed_ms"] = r.elapsed_ms;
        iters.push_back(std::move(it));
    }
    j["iterations"] = std::move(iters);
    j["best_iteration"] = t.best_iteration ? nlohmann::json(*t.best_iteration) : nlohmann::json(nullptr);
    j["best_score"] = t.best_iteration ? json_number(t.best_score) : nlohmann::json(nullptr);
    j["terminated_by"] = to_string(t.terminated_by);
    j["termination_detail"] = t.termination_detail;
    j["failed_exchanges"] = exchanges_json(t.failed_exchanges);
    return j;
}

std::string render_summary(const RunTranscript& t) {
    std::ostringstream s;
    s << "# Run " << t.run_id << "\n\n";
    s << fmt::format("- treatment: `{}`\n- outcome: `{}`\n- proposer: {}\n- seed: {}\n", t.hp.treatment, t.hp.outcome,
                     t.proposer, t.seed);
    s << fmt::format("- rows: {} ({} dropped for missing values)\n- columns: {}\n", t.dataset_rows, t.dropped_rows,
                     t.columns.size());
    s << fmt::format("- terminated by: **{}** ({})\n", to_string(t.terminated_by), t.termination_detail);
    s << fmt::format("- started {} / finished {}\n\n", t.started_at, t.finished_at);

    s << "## Iterations\n\n";
    s << "| iter | edges | temporal pruned | cycle pruned | nodes pruned | composite | mean R2 | ok | ms |\n";
    s << "|---:|---:|---:|---:|---:|---:|---:|:-:|---:|\n";
    for (const auto& r : t.iterations) {
        const auto& d = r.diagnostics;
        s << fmt::format("| {} | {} | {} | {} | {} | {:.4f} | {:.4f} | {} | {:.1f} |\n", r.iteration,
                         r.dag.edges().size(), d.structural.temporal_edges_pruned.size(),
                         d.structural.cycle_edges_pruned.size(), d.structural.disconnected_nodes_pruned.size(),
                         d.global.composite_score, d.global.mean_r2, d.ok ? "yes" : "no", r.elapsed_ms);
    }

    const IterationRecord* best = t.best();
    if (!best) {
        s << "\nNo graph was evaluated.\n";
        return s.str();
    }
    s << fmt::format("\n## Best graph (iteration {}, composite {:.4f})\n\n", best->iteration, t.best_score);
    s << "| criterion | passed | observed | threshold |\n|---|:-:|---:|---:|\n";
    for (const auto& c : best->diagnostics.criteria) {
        s << fmt::format("| {} | {} | {} | {} |\n", to_string(c.criterion), c.passed ? "yes" : "no",
                         c.observed ? fmt::format("{:.4g}", *c.observed) : "-",
                         c.threshold ? fmt::format("{:.4g}", *c.threshold) : "-");
    }
    const auto& adj = best->diagnostics.identification.minimal_adjustment_set;
    if (adj) {
        std::string z;
        for (const auto& n : *adj) z += (z.empty() ? "" : ", ") + n;
        s << fmt::format("\nMinimal adjustment set: {{{}}}\n", z);
    } else {
        s << "\nNo valid adjustment set found.\n";
    }
    const auto& te = best->diagnostics.treatment_edge;
    if (te.fitted)
        s << fmt::format("Treatment coefficient {:.4g} (p = {:.4g}, adjusted {:.4g})\n", te.coefficient, te.p_raw,
                         te.p_adjusted);
    return s.str();
}

Manifest persist(const RunTranscript& t, const fs::path& out_dir) {
    ensure_writable_dir(out_dir);
    Manifest manifest;
    auto emit = [&](const std::string& name, const std::string& content) {
        write_file(out_dir / name, content);
        manifest.files.push_back({name, sha256_hex(content), content.size()});
    };

    emit("transcript.json", to_json(t).dump(2) + "\n");
    for (const auto& r : t.iterations)
        emit(fmt::format("diagnostics_{}.json", r.iteration), to_json(r.diagnostics).dump(2) + "\n");
    if (const IterationRecord* best = t.best()) emit("best_dag.dot", to_dot(best->dag, t.hp.treatment, t.hp.outcome));
    emit("summary.md", render_summary(t));

    nlohmann::json mj;
    mj["run_id"] = t.run_id;
    mj["files"] = nlohmann::json::array();
    for (const auto& f : manifest.files)
        mj["files"].push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    write_file(out_dir / "manifest.json", mj.dump(2) + "\n");
    return manifest;
}

} // namespace arcadia
