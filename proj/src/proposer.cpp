#include "arcadia/proposer.hpp"

#include "arcadia/error.hpp"
#include "arcadia/stats.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

namespace arcadia {

std::vector<std::string> Proposal::node_names() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& e : edges) {
        for (const auto* n : {&e.parent, &e.child}) {
            if (seen.insert(*n).second) out.push_back(*n);
        }
    }
    return out;
}

Proposal proposal_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ProposerError("proposal must be a JSON object");
    Proposal p;
    for (const char* field : {"reasoning", "assumptions"}) {
        if (!j.contains(field)) throw ProposerError(fmt::format("missing required field '{}'", field));
        if (!j.at(field).is_string()) throw ProposerError(fmt::format("field '{}' must be a string", field));
    }
    p.reasoning = j.at("reasoning").get<std::string>();
    p.assumptions = j.at("assumptions").get<std::string>();
    if (!j.contains("edges")) throw ProposerError("missing required field 'edges'");
    const auto& edges = j.at("edges");
    if (!edges.is_array()) throw ProposerError("field 'edges' must be an array of [\"parent\", \"child\"] pairs");
    if (edges.empty()) throw ProposerError("field 'edges' must not be empty");
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto& e = edges[i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
            throw ProposerError(fmt::format("edges[{}] must be a [\"parent\", \"child\"] pair of strings, got {}", i,
                                            e.dump()));
        }
        p.edges.push_back({e[0].get<std::string>(), e[1].get<std::string>()});
    }
    if (j.contains("negligible_effect_claimed")) {
        const auto& flag = j.at("negligible_effect_claimed");
        if (!flag.is_boolean()) throw ProposerError("field 'negligible_effect_claimed' must be a boolean");
        p.negligible_effect_claimed = flag.get<bool>();
    }
    return p;
}

nlohmann::json to_json(const Proposal& p) {
    auto edges = nlohmann::json::array();
    for (const auto& e : p.edges) edges.push_back({e.parent, e.child});
    nlohmann::json j = {{"reasoning", p.reasoning}, {"assumptions", p.assumptions}, {"edges", edges}};
    if (p.negligible_effect_claimed) j["negligible_effect_claimed"] = *p.negligible_effect_claimed;
    return j;
}

std::string extract_json_object(std::string_view reply) {
    std::vector<std::string_view> objects;
    std::size_t depth = 0;
    std::size_t start = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = 0; i < reply.size(); ++i) {
        char c = reply[i];
        if (depth > 0 && in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '{') {
            if (depth++ == 0) start = i;
        } else if (c == '}' && depth > 0) {
            if (--depth == 0) objects.push_back(reply.substr(start, i - start + 1));
        } else if (c == '"' && depth > 0) {
            in_string = true;
        }
    }
    if (objects.empty()) throw ProposerError("reply contains no JSON object");
    if (objects.size() > 1) {
        throw ProposerError(fmt::format("reply contains {} top-level JSON objects; expected exactly one", objects.size()));
    }
    return std::string(objects.front());
}

std::optional<std::string> validate_proposal(const Proposal& p, const Hyperparameters& hp, const NodeSet& columns) {
    if (p.edges.empty()) return "the edge list is empty";
    std::set<Edge> seen;
    for (const auto& e : p.edges) {
        for (const auto* n : {&e.parent, &e.child}) {
            if (!columns.count(*n)) return fmt::format("column '{}' is not in the working dataframe", *n);
        }
        if (e.parent == e.child) return fmt::format("self-loop on '{}'", e.parent);
        if (!seen.insert(e).second) return fmt::format("duplicate edge [\"{}\", \"{}\"]", e.parent, e.child);
    }
    auto nodes = p.node_names();
    for (const auto* required : {&hp.treatment, &hp.outcome}) {
        if (std::find(nodes.begin(), nodes.end(), *required) == nodes.end()) {
            return fmt::format("{} MUST BE IN THE DAG", *required);
        }
    }
    return std::nullopt;
}

BudgetCheck enforce_refinement_budget(const Proposal& prev, const Proposal& next, std::size_t k_refine) {
    auto a = prev.node_names();
    auto b = next.node_names();
    std::set<std::string> before(a.begin(), a.end());
    std::set<std::string> after(b.begin(), b.end());
    BudgetCheck r;
    std::set_difference(after.begin(), after.end(), before.begin(), before.end(), std::back_inserter(r.added));
    std::set_difference(before.begin(), before.end(), after.begin(), after.end(), std::back_inserter(r.removed));
    r.change_count = std::max(r.added.size(), r.removed.size());
    r.accepted = r.change_count <= k_refine;
    return r;
}

// --- prompts ------------------------------------------------------------------

nlohmann::json to_json(const ChatMessage& m) { return {{"role", m.role}, {"content", m.content}}; }

nlohmann::json to_json(std::span<const ChatMessage> messages) {
    auto arr = nlohmann::json::array();
    for (const auto& m : messages) arr.push_back(to_json(m));
    return arr;
}

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            std::size_t j = i + 1;
            while (j < tmpl.size() && (std::islower(static_cast<unsigned char>(tmpl[j])) ||
                                       std::isdigit(static_cast<unsigned char>(tmpl[j])) || tmpl[j] == '_')) {
                ++j;
            }
            bool identifier = j > i + 1 && j < tmpl.size() && tmpl[j] == '}' &&
                              !std::isdigit(static_cast<unsigned char>(tmpl[i + 1]));
            if (identifier) {
                std::string name(tmpl.substr(i + 1, j - i - 1));
                auto it = values.find(name);
                if (it == values.end()) {
                    throw TemplateError(fmt::format("prompt template placeholder {{{}}} has no value", name), name);
                }
                out += it->second;
                i = j + 1;
                continue;
            }
        }
        out.push_back(tmpl[i++]);
    }
    return out;
}

std::map<std::string, std::string> prompt_values(const Hyperparameters& hp, std::span<const std::string> columns,
                                                 std::size_t iteration) {
    std::string cols;
    for (const auto& c : columns) cols += (cols.empty() ? "" : ", ") + c;
    return {{"treatment", hp.treatment},
            {"outcome", hp.outcome},
            {"initial_min_cols", std::to_string(hp.k_init_min)},
            {"initial_max_cols", std::to_string(hp.k_init_max)},
            {"iteration", std::to_string(iteration)},
            {"all_cols_str", cols},
            {"max_refinement_cols", std::to_string(hp.k_refine)},
            {"alpha", fmt::format("{:g}", hp.alpha)},
            {"global_validity_threshold", fmt::format("{:g}", hp.theta_global)},
            {"r2_threshold", fmt::format("{:g}", hp.theta_r2)},
            {"vif_threshold", fmt::format("{:g}", hp.theta_vif)}};
}

std::vector<ChatMessage> render_prompt(PromptKind kind, const Hyperparameters& hp,
                                       std::span<const std::string> columns, std::span<const HistoryEntry> history) {
    if (kind == PromptKind::bootstrap && !history.empty()) {
        throw ProposerError("bootstrap prompt is only valid for the first iteration");
    }
    if (kind == PromptKind::refinement && history.empty()) {
        throw ProposerError("refinement prompt requires at least one evaluated iteration");
    }
    std::vector<ChatMessage> msgs;
    msgs.push_back({"system", render_template(prompts::system_initial, prompt_values(hp, columns, 1))});
    msgs.push_back({"user", render_template(prompts::current_user, prompt_values(hp, columns, 1))});
    if (kind == PromptKind::bootstrap) return msgs;

    for (const auto& h : history) {
        if (h.iteration > 1) {
            msgs.push_back({"user", render_template(prompts::previous_user, prompt_values(hp, columns, h.iteration))});
        }
        msgs.push_back({"assistant", to_json(h.proposal).dump(2)});
        msgs.push_back({"user", fmt::format("Diagnostics for the iteration {} DAG:\n{}", h.iteration, h.memo_text)});
    }
    const std::size_t next = history.back().iteration + 1;
    msgs.push_back({"system", render_template(prompts::system_refinement, prompt_values(hp, columns, next))});
    msgs.push_back({"user", render_template(prompts::previous_user, prompt_values(hp, columns, next))});
    return msgs;
}

nlohmann::json to_json(const Exchange& e) {
    return {{"attempt", e.attempt},
            {"request", e.request},
            {"status", e.status ? nlohmann::json(*e.status) : nlohmann::json(nullptr)},
            {"response", e.response},
            {"error", e.error}};
}

// --- scripted -----------------------------------------------------------------

ScriptedProposer ScriptedProposer::parse(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1 + static_cast<std::size_t>(
                                   std::count(text.begin(), text.begin() + std::min(e.byte, text.size()), '\n'));
        throw DataError(fmt::format("script line {}: {}", line, e.what()));
    }
    if (!j.is_array()) throw DataError("script must be a JSON array of proposals");
    std::vector<Proposal> entries;
    for (std::size_t i = 0; i < j.size(); ++i) {
        try {
            entries.push_back(proposal_from_json(j[i]));
        } catch (const ProposerError& e) {
            throw DataError(fmt::format("script entry {}: {}", i + 1, e.what()));
        }
    }
    return ScriptedProposer(std::move(entries));
}

ScriptedProposer ScriptedProposer::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(fmt::format("cannot open script '{}'", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse(buf.str());
    } catch (const DataError& e) {
        throw DataError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

std::optional<Proposal> ScriptedProposer::at(std::size_t iteration) const {
    if (iteration == 0 || iteration > script_.size()) return std::nullopt;
    return script_[iteration - 1];
}

ProposeOutcome ScriptedProposer::propose(const ProposeContext& ctx) {
    ProposeOutcome out;
    auto p = at(ctx.iteration);
    if (!p) {
        out.status = ProposeOutcome::Status::exhausted;
        out.error = fmt::format("script has {} entries; iteration {} requested", script_.size(), ctx.iteration);
        return out;
    }
    out.status = ProposeOutcome::Status::ok;
    out.proposal = std::move(p);
    return out;
}

// --- heuristic ----------------------------------------------------------------

Proposal heuristic_propose(const PanelDataset& ds, const Hyperparameters& hp, std::uint64_t seed) {
    const std::string& t = hp.treatment;
    const std::string& y = hp.outcome;
    Eigen::VectorXd tv = ds.column(t);
    Eigen::VectorXd yv = ds.column(y);

    struct Candidate {
        std::string name;
        double r_outcome;
        double r_treatment;
        double score;
    };
    std::vector<Candidate> pool;
    for (const auto& c : ds.columns()) {
        if (c.name == t || c.name == y) continue;
        Eigen::VectorXd v = ds.column(c.name);
        double ry = std::abs(pearson(v, yv));
        double rt = std::abs(pearson(v, tv));
        pool.push_back({c.name, ry, rt, std::max(ry, rt)});
    }
    std::sort(pool.begin(), pool.end(), [](const Candidate& a, const Candidate& b) {
        return a.score != b.score ? a.score > b.score : a.name < b.name;
    });

    std::mt19937_64 rng(seed);
    std::size_t lo = std::max<std::size_t>(hp.k_init_min, 2);
    std::size_t hi = std::max(lo, hp.k_init_max);
    std::uniform_int_distribution<std::size_t> size_dist(lo, hi);
    std::size_t k = std::min(size_dist(rng), pool.size() + 2);
    pool.resize(k - 2);

    // Strict order: effective time first, then other < treatment < outcome, then name.
    auto key = [&](const std::string& n) {
        int role = n == y ? 2 : n == t ? 1 : 0;
        return std::make_tuple(ds.meta(n).tag.effective_time(), role, n);
    };
    auto oriented = [&](const std::string& a, const std::string& b) {
        return key(a) < key(b) ? Edge{a, b} : Edge{b, a};
    };

    Proposal p;
    p.reasoning = fmt::format("Heuristic proposal: {} candidates ranked by absolute correlation with {} or {}; "
                              "edges oriented by temporal order.",
                              pool.size(), y, t);
    p.assumptions = "Generated without domain reasoning; temporal ordering holds by construction, other "
                    "identification assumptions are unexamined.";
    p.edges.push_back(oriented(t, y));
    constexpr double kTreatmentLink = 0.1;
    for (const auto& c : pool) {
        if (c.r_treatment >= kTreatmentLink) p.edges.push_back(oriented(c.name, t));
        p.edges.push_back(oriented(c.name, y));
    }
    return p;
}

ProposeOutcome HeuristicProposer::propose(const ProposeContext& ctx) {
    ProposeOutcome out;
    out.status = ProposeOutcome::Status::ok;
    out.proposal = heuristic_propose(*ctx.dataset, *ctx.hp, ctx.seed + ctx.iteration - 1);
    return out;
}

} // namespace arcadia
