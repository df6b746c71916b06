#include "arcadia/evaluator.hpp"

#include "arcadia/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace arcadia {

void Hyperparameters::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError(msg); };
    if (k_init_min > k_init_max) fail(fmt::format("k_init_min ({}) exceeds k_init_max ({})", k_init_min, k_init_max));
    if (k_init_max > m) fail(fmt::format("k_init_max ({}) exceeds the column budget M ({})", k_init_max, m));
    if (t_max < 1) fail("T_max must be at least 1");
    if (m < 2) fail("M must be at least 2");
    if (!(alpha > 0.0 && alpha < 1.0)) fail(fmt::format("alpha must lie in (0, 1), got {}", alpha));
    if (!(theta_global > 0.0)) fail("theta_global must be positive");
    if (!(theta_r2 > 0.0)) fail("theta_r2 must be positive");
    if (!(theta_vif > 0.0)) fail("theta_vif must be positive");
    if (treatment.empty() || outcome.empty()) fail("treatment and outcome must be named");
    if (treatment == outcome) fail("treatment and outcome must differ");
}

std::string_view to_string(Criterion c) noexcept {
    switch (c) {
    case Criterion::identifiable:
        return "identifiable";
    case Criterion::orientation:
        return "orientation";
    case Criterion::edge_significance:
        return "edge_significance";
    case Criterion::global_validity:
        return "global_validity";
    case Criterion::mean_r2:
        return "mean_r2";
    case Criterion::vif:
        return "vif";
    case Criterion::positivity:
        return "positivity";
    }
    return "unknown";
}

Decision decide(const CriteriaInputs& in, const Hyperparameters& hp) {
    Decision d;
    auto& c = d.criteria;
    for (std::size_t i = 0; i < kCriterionCount; ++i) c[i].criterion = static_cast<Criterion>(i);

    auto& ident = c[static_cast<std::size_t>(Criterion::identifiable)];
    ident.passed = in.identifiable;
    ident.detail = in.identifiable ? "valid back-door adjustment set found" : "no valid back-door adjustment set";

    auto& orient = c[static_cast<std::size_t>(Criterion::orientation)];
    orient.observed = in.treatment_delta_bic;
    orient.threshold = 0.0;
    orient.passed = in.treatment_delta_bic.has_value() && *in.treatment_delta_bic > 0.0;
    orient.detail = in.treatment_delta_bic ? "delta BIC of treatment -> outcome must be > 0"
                                           : "delta BIC undefined (model failure)";

    auto& sig = c[static_cast<std::size_t>(Criterion::edge_significance)];
    sig.observed = in.treatment_p_adjusted;
    sig.threshold = hp.alpha;
    bool significant = in.treatment_p_adjusted < hp.alpha;
    bool negligible = hp.accept_negligible_effect && in.negligible_effect_claimed;
    sig.passed = significant || negligible;
    sig.detail = significant ? "treatment effect significant after FDR adjustment"
                 : negligible ? "accepted on negligible-effect claim"
                              : "treatment effect p must be < alpha";

    auto& global = c[static_cast<std::size_t>(Criterion::global_validity)];
    global.observed = in.composite_score;
    global.threshold = hp.theta_global;
    global.passed = in.composite_score >= hp.theta_global;
    global.detail = "composite score must be >= threshold";

    auto& r2 = c[static_cast<std::size_t>(Criterion::mean_r2)];
    r2.observed = in.mean_r2;
    r2.threshold = hp.theta_r2;
    r2.passed = in.mean_r2 >= hp.theta_r2;
    r2.detail = "mean node R2 must be >= threshold";

    auto& v = c[static_cast<std::size_t>(Criterion::vif)];
    v.observed = in.max_vif;
    v.threshold = hp.theta_vif;
    v.passed = !in.max_vif || *in.max_vif <= hp.theta_vif;
    v.detail = in.max_vif ? "largest VIF must be <= threshold" : "no node has co-regressors";

    auto& pos = c[static_cast<std::size_t>(Criterion::positivity)];
    pos.passed = in.positivity_ok;
    pos.detail = in.positivity_ok ? "propensity overlap sufficient" : "propensity overlap insufficient";

    d.ok = std::all_of(c.begin(), c.end(), [](const CriterionRecord& r) { return r.passed; });
    return d;
}

namespace {

std::vector<std::string> without(const std::vector<std::string>& v, const std::string& drop) {
    std::vector<std::string> out;
    for (const auto& s : v) {
        if (s != drop) out.push_back(s);
    }
    return out;
}

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

Diagnostics evaluate_dag(const Dag& dag, const PanelDataset& ds, const Hyperparameters& hp,
                         bool negligible_effect_claimed) {
    Diagnostics d;
    const std::string& treatment = hp.treatment;
    const std::string& outcome = hp.outcome;

    auto structural = structural_preprocess(dag, ds.tags(), treatment, outcome);
    d.structural = std::move(structural.report);
    d.pruned_dag = std::move(structural.dag);
    for (std::size_t i = 0; i < kCriterionCount; ++i) d.criteria[i].criterion = static_cast<Criterion>(i);

    if (!d.structural.structurally_valid) {
        for (auto& c : d.criteria) {
            c.passed = false;
            c.detail = "not evaluated: treatment or outcome missing after structural pruning";
        }
        d.identification = {};
        d.positivity.positivity_ok = false;
        d.positivity.note = "not evaluated";
        d.ok = false;
        return d;
    }
    d.statistics_computed = true;
    const Dag& g = d.pruned_dag;

    // Node models.
    std::map<std::string, std::size_t> node_pos;
    for (const auto& name : g.nodes()) {
        NodeDiagnostics nd;
        nd.node = name;
        nd.parents = g.parents(name);
        if (!nd.parents.empty()) {
            try {
                nd.fit = fit_node_model(ds, name, nd.parents);
            } catch (const StatError& e) {
                nd.error = e.what();
            }
            nd.vifs = vif(ds, nd.parents);
            bool converged = nd.fit && nd.fit->converged;
            bool finite = std::all_of(nd.vifs.begin(), nd.vifs.end(),
                                      [](const auto& kv) { return std::isfinite(kv.second); });
            nd.adequate = converged && finite;
            nd.significant = converged && nd.fit->joint_p < hp.alpha;
            if (nd.fit && !nd.fit->converged && nd.error.empty()) nd.error = "model did not converge";
        }
        node_pos[name] = d.nodes.size();
        d.nodes.push_back(std::move(nd));
    }

    // Edge statistics.
    std::vector<double> p_raw;
    for (const auto& e : g.edges()) {
        EdgeStats es;
        es.parent = e.parent;
        es.child = e.child;
        const auto& child = d.nodes[node_pos.at(e.child)];
        if (child.fit && child.fit->converged) {
            auto k = child.fit->index_of(e.parent);
            es.coefficient = child.fit->coefficients[k];
            es.p_raw = child.fit->per_coef_p[k];
        } else {
            es.from_model = false;
            es.p_raw = 1.0;
        }
        auto others = without(child.parents, e.parent);
        auto pc = residual_correlation(ds, e.child, e.parent, others);
        es.residual_corr = pc.rho;
        es.residual_corr_defined = pc.defined;
        auto db = delta_bic(ds, e.parent, e.child);
        es.delta_bic = db.value;
        es.delta_bic_defined = db.defined;
        es.mixed_response = db.mixed_response;
        p_raw.push_back(es.p_raw);
        d.edges.push_back(std::move(es));
    }
    auto p_fdr = fdr_adjust(p_raw);
    for (std::size_t i = 0; i < d.edges.size(); ++i) d.edges[i].p_fdr = p_fdr[i];

    // Global metrics.
    auto& gl = d.global;
    gl.edge_count = d.edges.size();
    for (const auto& es : d.edges) {
        if (es.p_fdr < hp.alpha) ++gl.significant_edges;
        if (es.delta_bic_defined && es.delta_bic > 2.0) ++gl.oriented_edges;
    }
    double r2_sum = 0.0;
    double adj_sum = 0.0;
    std::optional<double> max_vif;
    for (const auto& nd : d.nodes) {
        if (nd.parents.empty()) continue;
        ++gl.model_count;
        if (nd.significant) ++gl.significant_models;
        if (nd.fit && nd.fit->converged) {
            r2_sum += nd.fit->r2;
            adj_sum += nd.fit->adj_r2;
        }
        for (const auto& [parent, value] : nd.vifs) {
            if (!max_vif || value > *max_vif || std::isnan(value)) max_vif = value;
        }
    }
    gl.sig_edge_ratio = ratio(gl.significant_edges, gl.edge_count);
    gl.sig_model_ratio = ratio(gl.significant_models, gl.model_count);
    gl.direction_accuracy = ratio(gl.oriented_edges, gl.edge_count);
    gl.mean_r2 = gl.model_count ? r2_sum / static_cast<double>(gl.model_count) : 0.0;
    gl.mean_adj_r2 = gl.model_count ? adj_sum / static_cast<double>(gl.model_count) : 0.0;
    gl.composite_score = (gl.sig_edge_ratio + gl.sig_model_ratio + gl.direction_accuracy) / 3.0;

    // Identification and positivity.
    d.identification = minimal_adjustment_set(g, treatment, outcome);
    if (d.identification.minimal_adjustment_set && !d.identification.minimal_adjustment_set->empty()) {
        d.positivity = positivity_check(ds, treatment, *d.identification.minimal_adjustment_set);
    } else {
        d.positivity = PositivityResult{};
        d.positivity.note = d.identification.identifiable ? "empty adjustment set; overlap check skipped"
                                                          : "no adjustment set; overlap check skipped";
    }

    // Treatment-effect model.
    auto& te = d.treatment_edge;
    te.is_dag_edge = g.has_edge(treatment, outcome);
    te.covariates = {treatment};
    std::vector<std::string> adjustment;
    if (d.identification.minimal_adjustment_set) {
        adjustment.assign(d.identification.minimal_adjustment_set->begin(),
                          d.identification.minimal_adjustment_set->end());
        te.covariates.insert(te.covariates.end(), adjustment.begin(), adjustment.end());
    }
    try {
        auto fit = fit_node_model(ds, outcome, te.covariates);
        if (fit.converged) {
            te.fitted = true;
            te.coefficient = fit.coefficients[0];
            te.p_raw = fit.per_coef_p[0];
        } else {
            te.error = "treatment-effect model did not converge";
        }
        te.model = std::move(fit);
    } catch (const StatError& e) {
        te.error = e.what();
    }
    te.p_adjusted = te.p_raw;
    if (te.is_dag_edge) {
        std::vector<double> family = p_raw;
        for (std::size_t i = 0; i < d.edges.size(); ++i) {
            if (d.edges[i].parent == treatment && d.edges[i].child == outcome) {
                family[i] = te.p_raw;
                te.p_adjusted = fdr_adjust(family)[i];
                break;
            }
        }
    }
    auto pc = residual_correlation(ds, outcome, treatment, adjustment);
    te.residual_corr = pc.rho;
    auto db = delta_bic(ds, treatment, outcome);
    te.delta_bic = db.value;
    te.delta_bic_defined = db.defined;
    te.mixed_response = db.mixed_response;

    // Decision.
    CriteriaInputs in;
    in.identifiable = d.identification.identifiable;
    if (te.delta_bic_defined) in.treatment_delta_bic = te.delta_bic;
    in.treatment_p_adjusted = te.p_adjusted;
    in.negligible_effect_claimed = negligible_effect_claimed;
    in.composite_score = gl.composite_score;
    in.mean_r2 = gl.mean_r2;
    in.max_vif = max_vif;
    in.positivity_ok = d.positivity.positivity_ok;
    auto decision = decide(in, hp);
    d.criteria = decision.criteria;
    d.ok = decision.ok;
    return d;
}

// --- failure memo -------------------------------------------------------------

namespace {

std::string num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return fmt::format("{:.4g}", v);
}

std::string set_text(const NodeSet& s) {
    std::string out = "{";
    for (const auto& n : s) out += (out.size() > 1 ? ", " : "") + n;
    return out + "}";
}

} // namespace

FailureMemo build_failure_memo(const Diagnostics& diag, const Hyperparameters& hp) {
    FailureMemo memo;
    memo.structural_failure = !diag.structural.structurally_valid;
    for (const auto& c : diag.criteria) {
        if (!c.passed) memo.failed.push_back(c);
    }

    if (memo.structural_failure) {
        memo.identification_status = "not evaluated";
    } else if (diag.identification.minimal_adjustment_set) {
        memo.identification_status = "minimal adjustment set " + set_text(*diag.identification.minimal_adjustment_set);
    } else {
        memo.identification_status = diag.identification.search_capped
                                         ? "adjustment set absent (none found within the search cap)"
                                         : "adjustment set absent (no valid back-door set exists)";
    }
    for (const auto& e : diag.edges) {
        if (!(e.p_fdr < hp.alpha)) memo.insignificant_edges.push_back(e);
    }
    for (const auto& nd : diag.nodes) {
        if (nd.parents.empty()) continue;
        if (!nd.adequate || !nd.significant) memo.weak_models.push_back(nd.node);
        for (const auto& [parent, value] : nd.vifs) {
            if (!(value <= hp.theta_vif)) memo.vif_violations.push_back({nd.node, parent, value});
        }
    }

    std::string t;
    auto line = [&t](const std::string& s) { t += s + "\n"; };
    if (memo.failed.empty()) {
        line("Decision: ACCEPTED - all criteria satisfied.");
    } else {
        line(fmt::format("Decision: REJECTED - {} of {} criteria failed.", memo.failed.size(), kCriterionCount));
    }
    if (memo.structural_failure) {
        line(fmt::format("Structural failure: treatment '{}' or outcome '{}' missing after pruning.", hp.treatment,
                         hp.outcome));
    }
    line(fmt::format("Structural pruning: temporal edges {}, cycle edges {}, disconnected nodes {}.",
                     diag.structural.temporal_edges_pruned.size(), diag.structural.cycle_edges_pruned.size(),
                     diag.structural.disconnected_nodes_pruned.size()));
    for (const auto& e : diag.structural.temporal_edges_pruned) {
        line(fmt::format("  pruned (temporal order): {} -> {}", e.parent, e.child));
    }
    for (const auto& e : diag.structural.cycle_edges_pruned) {
        line(fmt::format("  pruned (cycle): {} -> {}", e.parent, e.child));
    }
    for (const auto& n : diag.structural.disconnected_nodes_pruned) line(fmt::format("  pruned (disconnected): {}", n));

    if (!memo.failed.empty()) {
        line("Failed criteria:");
        for (const auto& c : memo.failed) {
            std::string s = fmt::format("  - {}", to_string(c.criterion));
            if (c.observed) s += fmt::format(": observed {}", num(*c.observed));
            if (c.threshold) s += fmt::format(" vs threshold {}", num(*c.threshold));
            s += fmt::format(" ({})", c.detail);
            line(s);
        }
    }
    line("Identification: " + memo.identification_status + ".");

    if (diag.statistics_computed) {
        const auto& g = diag.global;
        line(fmt::format("Global: significant-edge ratio {} ({}/{}), significant-model ratio {} ({}/{}), "
                         "direction accuracy {} ({}/{}), composite {}, mean R2 {}, mean adj. R2 {}.",
                         num(g.sig_edge_ratio), g.significant_edges, g.edge_count, num(g.sig_model_ratio),
                         g.significant_models, g.model_count, num(g.direction_accuracy), g.oriented_edges,
                         g.edge_count, num(g.composite_score), num(g.mean_r2), num(g.mean_adj_r2)));
        const auto& te = diag.treatment_edge;
        line(fmt::format("Treatment effect {} -> {}: coefficient {}, p {} (adjusted {}), delta BIC {}{}.",
                         hp.treatment, hp.outcome, num(te.coefficient), num(te.p_raw), num(te.p_adjusted),
                         te.delta_bic_defined ? num(te.delta_bic) : std::string("undefined"),
                         te.error.empty() ? "" : "; " + te.error));
        const auto& pos = diag.positivity;
        line(fmt::format("Positivity: overlap share {}, ok = {}{}.", num(pos.overlap_share),
                         pos.positivity_ok ? "true" : "false", pos.note.empty() ? "" : " (" + pos.note + ")"));
    }
    if (!memo.insignificant_edges.empty()) {
        line(fmt::format("Edges with FDR-adjusted p >= {}:", num(hp.alpha)));
        for (const auto& e : memo.insignificant_edges) {
            line(fmt::format("  - {} -> {}: p_fdr {}, coefficient {}, delta BIC {}", e.parent, e.child, num(e.p_fdr),
                             num(e.coefficient), e.delta_bic_defined ? num(e.delta_bic) : std::string("undefined")));
        }
    }
    if (!memo.weak_models.empty()) {
        line("Weak node models:");
        for (const auto& name : memo.weak_models) {
            auto it = std::find_if(diag.nodes.begin(), diag.nodes.end(),
                                   [&](const NodeDiagnostics& n) { return n.node == name; });
            if (it->fit) {
                line(fmt::format("  - {} ({}): joint p {}, R2 {}{}", name, to_string(it->fit->model_kind),
                                 num(it->fit->joint_p), num(it->fit->r2), it->error.empty() ? "" : "; " + it->error));
            } else {
                line(fmt::format("  - {}: {}", name, it->error.empty() ? "no model" : it->error));
            }
        }
    }
    if (!memo.vif_violations.empty()) {
        line(fmt::format("VIF violations (node, parent, VIF) above {}:", num(hp.theta_vif)));
        for (const auto& v : memo.vif_violations) line(fmt::format("  - ({}, {}, {})", v.node, v.parent, num(v.vif)));
    }
    memo.text = std::move(t);
    return memo;
}

// --- JSON ---------------------------------------------------------------------

nlohmann::json json_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

namespace {

nlohmann::json numbers(const std::vector<double>& v) {
    auto arr = nlohmann::json::array();
    for (double x : v) arr.push_back(json_number(x));
    return arr;
}

nlohmann::json edge_json(const Edge& e) { return nlohmann::json::array({e.parent, e.child}); }

nlohmann::json edge_stats_json(const EdgeStats& e) {
    return {{"parent", e.parent},
            {"child", e.child},
            {"residual_corr", json_number(e.residual_corr)},
            {"residual_corr_defined", e.residual_corr_defined},
            {"coefficient", json_number(e.coefficient)},
            {"p_raw", json_number(e.p_raw)},
            {"p_fdr", json_number(e.p_fdr)},
            {"delta_bic", json_number(e.delta_bic)},
            {"delta_bic_defined", e.delta_bic_defined},
            {"mixed_response", e.mixed_response},
            {"from_model", e.from_model}};
}

} // namespace

nlohmann::json to_json(const RegressionFit& fit) {
    return {{"model_kind", to_string(fit.model_kind)},
            {"regressors", fit.regressors},
            {"intercept", json_number(fit.intercept)},
            {"coefficients", numbers(fit.coefficients)},
            {"std_errors", numbers(fit.std_errors)},
            {"per_coef_p", numbers(fit.per_coef_p)},
            {"r2", json_number(fit.r2)},
            {"adj_r2", json_number(fit.adj_r2)},
            {"joint_p", json_number(fit.joint_p)},
            {"bic", json_number(fit.bic)},
            {"log_likelihood", json_number(fit.log_likelihood)},
            {"n", fit.n},
            {"iterations", fit.iterations},
            {"converged", fit.converged}};
}

nlohmann::json to_json(const StructuralReport& r) {
    auto edges = [](const std::vector<Edge>& v) {
        auto arr = nlohmann::json::array();
        for (const auto& e : v) arr.push_back(edge_json(e));
        return arr;
    };
    return {{"temporal_edges_pruned", edges(r.temporal_edges_pruned)},
            {"cycle_edges_pruned", edges(r.cycle_edges_pruned)},
            {"disconnected_nodes_pruned", r.disconnected_nodes_pruned},
            {"structurally_valid", r.structurally_valid}};
}

nlohmann::json to_json(const CriterionRecord& c) {
    return {{"name", to_string(c.criterion)},
            {"passed", c.passed},
            {"observed", c.observed ? json_number(*c.observed) : nlohmann::json(nullptr)},
            {"threshold", c.threshold ? json_number(*c.threshold) : nlohmann::json(nullptr)},
            {"detail", c.detail}};
}

nlohmann::json to_json(const Diagnostics& d) {
    nlohmann::json j;
    j["ok"] = d.ok;
    j["statistics_computed"] = d.statistics_computed;
    j["structural"] = to_json(d.structural);
    auto pruned_edges = nlohmann::json::array();
    for (const auto& e : d.pruned_dag.edges()) pruned_edges.push_back(edge_json(e));
    j["pruned_dag"] = {{"nodes", d.pruned_dag.nodes()}, {"edges", pruned_edges}};

    auto nodes = nlohmann::json::array();
    for (const auto& n : d.nodes) {
        nlohmann::json vifs = nlohmann::json::object();
        for (const auto& [p, v] : n.vifs) vifs[p] = json_number(v);
        nodes.push_back({{"node", n.node},
                         {"parents", n.parents},
                         {"fit", n.fit ? to_json(*n.fit) : nlohmann::json(nullptr)},
                         {"vifs", vifs},
                         {"adequate", n.adequate},
                         {"significant", n.significant},
                         {"error", n.error}});
    }
    j["nodes"] = nodes;
    auto edges = nlohmann::json::array();
    for (const auto& e : d.edges) edges.push_back(edge_stats_json(e));
    j["edges"] = edges;

    const auto& g = d.global;
    j["global"] = {{"sig_edge_ratio", json_number(g.sig_edge_ratio)},
                   {"sig_model_ratio", json_number(g.sig_model_ratio)},
                   {"direction_accuracy", json_number(g.direction_accuracy)},
                   {"mean_r2", json_number(g.mean_r2)},
                   {"mean_adj_r2", json_number(g.mean_adj_r2)},
                   {"composite_score", json_number(g.composite_score)},
                   {"edge_count", g.edge_count},
                   {"significant_edges", g.significant_edges},
                   {"model_count", g.model_count},
                   {"significant_models", g.significant_models},
                   {"oriented_edges", g.oriented_edges}};

    const auto& id = d.identification;
    j["identification"] = {
        {"identifiable", id.identifiable},
        {"minimal_adjustment_set",
         id.minimal_adjustment_set ? nlohmann::json(*id.minimal_adjustment_set) : nlohmann::json(nullptr)},
        {"candidate_count_examined", id.candidate_count_examined},
        {"search_capped", id.search_capped}};

    const auto& pos = d.positivity;
    j["positivity"] = {{"overlap_share", json_number(pos.overlap_share)},
                       {"positivity_ok", pos.positivity_ok},
                       {"skipped", pos.skipped},
                       {"model_failed", pos.model_failed},
                       {"dichotomized", pos.dichotomized},
                       {"split_point", json_number(pos.split_point)},
                       {"propensity_model", pos.propensity_model ? to_json(*pos.propensity_model) : nlohmann::json(nullptr)},
                       {"note", pos.note}};

    const auto& te = d.treatment_edge;
    j["treatment_edge"] = {{"fitted", te.fitted},
                           {"is_dag_edge", te.is_dag_edge},
                           {"covariates", te.covariates},
                           {"coefficient", json_number(te.coefficient)},
                           {"p_raw", json_number(te.p_raw)},
                           {"p_adjusted", json_number(te.p_adjusted)},
                           {"residual_corr", json_number(te.residual_corr)},
                           {"delta_bic", json_number(te.delta_bic)},
                           {"delta_bic_defined", te.delta_bic_defined},
                           {"mixed_response", te.mixed_response},
                           {"model", te.model ? to_json(*te.model) : nlohmann::json(nullptr)},
                           {"error", te.error}};

    auto criteria = nlohmann::json::array();
    for (const auto& c : d.criteria) criteria.push_back(to_json(c));
    j["criteria"] = criteria;
    return j;
}

nlohmann::json to_json(const FailureMemo& memo) {
    auto failed = nlohmann::json::array();
    for (const auto& c : memo.failed) failed.push_back(to_json(c));
    auto edges = nlohmann::json::array();
    for (const auto& e : memo.insignificant_edges) edges.push_back(edge_stats_json(e));
    auto vifs = nlohmann::json::array();
    for (const auto& v : memo.vif_violations) {
        vifs.push_back({{"node", v.node}, {"parent", v.parent}, {"vif", json_number(v.vif)}});
    }
    return {{"failed_criteria", failed},
            {"insignificant_edges", edges},
            {"weak_models", memo.weak_models},
            {"vif_violations", vifs},
            {"identification_status", memo.identification_status},
            {"structural_failure", memo.structural_failure},
            {"text", memo.text}};
}

} // namespace arcadia
