// Command-line front end: load a panel, run the propose/evaluate loop, write artifacts.
#include "arcadia/error.hpp"
#include "arcadia/orchestrator.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Iterative causal DAG discovery with statistical validation"};

    arcadia::RunConfig cfg;
    std::string proposer = "heuristic";
    std::string config_path;
    std::optional<std::size_t> k_init_max;
    double llm_timeout_s = 120.0;
    std::size_t llm_retries = 3;

    app.add_option("--data", cfg.data_path, "CSV panel, one column per variable")->required();
    app.add_option("--treatment", cfg.hp.treatment, "treatment column")->required();
    app.add_option("--outcome", cfg.hp.outcome, "outcome column")->required();
    app.add_option("--config", config_path, "ingest config JSON (tag overrides, binary columns, missing policy)");
    app.add_option("--budget", cfg.hp.m, "column budget M")->capture_default_str();
    app.add_option("--max-iterations", cfg.hp.t_max, "iteration budget")->capture_default_str();
    app.add_option("--k-init-min", cfg.hp.k_init_min, "smallest initial DAG node count")->capture_default_str();
    app.add_option("--k-init-max", k_init_max, "largest initial DAG node count (default min(15, M))");
    app.add_option("--k-refine", cfg.hp.k_refine, "max column changes per refinement")->capture_default_str();
    app.add_option("--alpha", cfg.hp.alpha, "FDR level")->capture_default_str();
    app.add_option("--theta-global", cfg.hp.theta_global, "composite score threshold")->capture_default_str();
    app.add_option("--theta-r2", cfg.hp.theta_r2, "mean R2 threshold")->capture_default_str();
    app.add_option("--theta-vif", cfg.hp.theta_vif, "VIF ceiling")->capture_default_str();
    app.add_flag("--accept-negligible-effect", cfg.hp.accept_negligible_effect,
                 "let a negligible-effect claim satisfy the edge significance check");
    app.add_option("--proposer", proposer, "llm, scripted or heuristic")
        ->check(CLI::IsMember({"llm", "scripted", "heuristic"}))
        ->capture_default_str();
    app.add_option("--script", cfg.script_path, "JSON array of proposals for the scripted proposer");
    app.add_option("--llm-endpoint", cfg.endpoint.url, "chat-completions URL")->capture_default_str();
    app.add_option("--llm-model", cfg.endpoint.model, "model name");
    app.add_option("--llm-key-env", cfg.endpoint.api_key_env, "environment variable holding the API key")
        ->capture_default_str();
    app.add_option("--llm-timeout", llm_timeout_s, "request timeout in seconds")->capture_default_str();
    app.add_option("--llm-retries", llm_retries, "retries per proposal")->capture_default_str();
    app.add_option("--seed", cfg.seed, "seed for sampling and the heuristic proposer")->capture_default_str();
    app.add_option("--out-dir", cfg.out_dir, "artifact directory")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        cfg.proposer = arcadia::parse_proposer_kind(proposer);
        cfg.hp.k_init_max = k_init_max.value_or(std::min<std::size_t>(15, cfg.hp.m));
        cfg.hp.k_init_min = std::min(cfg.hp.k_init_min, cfg.hp.k_init_max);
        cfg.endpoint.timeout = std::chrono::milliseconds(static_cast<long long>(llm_timeout_s * 1000.0));
        cfg.endpoint.max_retries = llm_retries;
        if (!config_path.empty()) cfg.ingest = arcadia::IngestConfig::from_json_file(config_path);

        arcadia::RunTranscript tr = arcadia::run(cfg);

        std::cout << fmt::format("run {}: {} after {} iteration(s)\n", tr.run_id, arcadia::to_string(tr.terminated_by),
                                 tr.iterations.size());
        if (!tr.termination_detail.empty()) std::cout << "  " << tr.termination_detail << "\n";
        if (const auto* best = tr.best()) {
            std::cout << fmt::format("  best iteration {} (composite {:.4f})\n", best->iteration, tr.best_score);
            for (const auto& c : best->diagnostics.criteria)
                std::cout << fmt::format("    {:<18} {}\n", arcadia::to_string(c.criterion), c.passed ? "pass" : "FAIL");
        }
        std::cout << "  artifacts in " << cfg.out_dir.string() << "\n";

        switch (tr.terminated_by) {
        case arcadia::Termination::accepted:
            return 0;
        case arcadia::Termination::budget_exhausted:
        case arcadia::Termination::script_exhausted:
            return 2;
        case arcadia::Termination::proposer_failed:
            return 1;
        }
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
