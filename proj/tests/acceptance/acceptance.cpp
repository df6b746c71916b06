// Acceptance checks 1-9. Prints one line per criterion and exits non-zero if
// any fails. Thresholds and tolerances are fixed here, not configurable.
#include "arcadia/data_ingest.hpp"
#include "arcadia/dag.hpp"
#include "arcadia/evaluator.hpp"
#include "arcadia/identification.hpp"
#include "arcadia/orchestrator.hpp"
#include "arcadia/proposer.hpp"
#include "arcadia/stats.hpp"
#include "arcadia/synthetic.hpp"

#include "controls.hpp"
#include "oracles.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <vector>

using namespace arcadia;
namespace fs = std::filesystem;

namespace {

// 1
constexpr int kDsepMaxNodes = 5;
constexpr double kDsepSeconds = 60.0;
// 2
constexpr int kAdjustTrials = 200;
constexpr int kAdjustMaxNodes = 8;
// 3
constexpr int kOrientSeeds = 100;
constexpr int kOrientPositiveMin = 95;
constexpr int kOrientStrongMin = 90;
constexpr double kStrongBic = 2.0;
// 4
constexpr int kOlsInstances = 50;
constexpr double kOlsRelTol = 1e-8;
constexpr int kLogitSeeds = 20;
constexpr std::size_t kLogitRows = 5000;
constexpr double kLogitMedianTol = 0.15;
// 8
constexpr int kNegativeSeeds = 100;
constexpr int kNegativeFailMin = 90;
// 9
constexpr int kRuntimeNodes = 15;
constexpr int kRuntimeEdges = 25;
constexpr std::size_t kRuntimeRows = 500;
constexpr double kRuntimeSeconds = 2.0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

Proposal make(std::vector<Edge> edges) {
    Proposal p;
    p.reasoning = "acceptance";
    p.assumptions = "none";
    p.edges = std::move(edges);
    return p;
}

// Every labeled DAG on n nodes: each unordered pair is absent, i -> j or j -> i.
void for_each_dag(int n, const std::function<void(const oracle::Graph&)>& visit) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    std::size_t total = 1;
    for (std::size_t k = 0; k < pairs.size(); ++k) total *= 3;
    for (std::size_t code = 0; code < total; ++code) {
        oracle::Graph g(n);
        std::size_t c = code;
        for (auto [i, j] : pairs) {
            int d = static_cast<int>(c % 3);
            c /= 3;
            if (d == 1) g.adj[i][j] = true;
            if (d == 2) g.adj[j][i] = true;
        }
        if (oracle::acyclic(g)) visit(g);
    }
}

Outcome criterion1() {
    auto t0 = Clock::now();
    std::size_t graphs = 0, queries = 0, mismatches = 0;
    for (int n = 2; n <= kDsepMaxNodes; ++n) {
        for_each_dag(n, [&](const oracle::Graph& g) {
            ++graphs;
            auto dag = oracle::to_dag(g);
            for (int x = 0; x < n; ++x)
                for (int y = x + 1; y < n; ++y)
                    for (std::uint32_t z = 0; z < (1u << n); ++z) {
                        if (z >> x & 1u || z >> y & 1u) continue;
                        NodeSet zs;
                        for (int v = 0; v < n; ++v)
                            if (z >> v & 1u) zs.insert(oracle::name(v));
                        ++queries;
                        if (d_separated(dag, oracle::name(x), oracle::name(y), zs) != oracle::d_separated(g, x, y, z))
                            ++mismatches;
                    }
        });
    }
    double secs = seconds_since(t0);
    return {mismatches == 0 && secs < kDsepSeconds,
            fmt::format("{} DAGs, {} queries, {} mismatches, {:.1f} s (limit {} s)", graphs, queries, mismatches, secs,
                        kDsepSeconds)};
}

Outcome criterion2() {
    const Dag confounder({}, {{"C", "T"}, {"C", "Y"}, {"T", "Y"}});
    const Dag mediator({}, {{"T", "M"}, {"M", "Y"}});
    const Dag mbias({"T", "Y"}, {{"A", "T"}, {"A", "U"}, {"B", "U"}, {"B", "Y"}});
    auto set_of = [](const Dag& g) { return minimal_adjustment_set(g, "T", "Y").minimal_adjustment_set; };
    bool canonical = set_of(confounder) == NodeSet{"C"} && set_of(mediator) == NodeSet{} && set_of(mbias) == NodeSet{};

    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> size(3, kAdjustMaxNodes);
    int agree = 0, identifiable = 0;
    for (int trial = 0; trial < kAdjustTrials; ++trial) {
        auto g = oracle::random_dag(size(rng), 0.35, rng);
        auto res = minimal_adjustment_set(oracle::to_dag(g), "v0", "v1");
        int expected = oracle::minimal_backdoor_size(g, 0, 1);
        bool ok = res.identifiable == (expected >= 0);
        if (ok && res.identifiable) {
            ++identifiable;
            std::uint32_t mask = 0;
            for (const auto& v : *res.minimal_adjustment_set) mask |= 1u << std::stoi(v.substr(1));
            ok = oracle::backdoor_valid(g, 0, 1, mask) &&
                 static_cast<int>(res.minimal_adjustment_set->size()) == expected;
        }
        if (ok) ++agree;
    }
    return {canonical && agree == kAdjustTrials,
            fmt::format("canonical confounder/mediator/M-bias {}; random DAGs {}/{} agree ({} identifiable)",
                        canonical ? "exact" : "WRONG", agree, kAdjustTrials, identifiable)};
}

Outcome criterion3() {
    int positive = 0, strong = 0;
    for (int seed = 0; seed < kOrientSeeds; ++seed) {
        LinearSem sem{{{"x"}, {"y"}}, {{"x", "y", 1.0}}};
        auto ds = simulate_dataset(sem, 1000, static_cast<std::uint64_t>(seed), "x", "y");
        auto d = delta_bic(ds, "x", "y");
        if (d.defined && d.value > 0.0) ++positive;
        if (d.defined && d.value > kStrongBic) ++strong;
    }
    return {positive >= kOrientPositiveMin && strong >= kOrientStrongMin,
            fmt::format("x -> y, beta 1, sigma 1, n 1000: delta BIC > 0 in {}/{} (need {}), > 2 in {}/{} (need {})",
                        positive, kOrientSeeds, kOrientPositiveMin, strong, kOrientSeeds, kOrientStrongMin)};
}

bool rel_close(double a, double b) { return std::abs(a - b) <= kOlsRelTol * std::max(std::abs(a), std::abs(b)); }

Outcome criterion4() {
    std::mt19937_64 rng(404);
    std::normal_distribution<double> g;
    int ols_ok = 0;
    for (int t = 0; t < kOlsInstances; ++t) {
        const Eigen::Index n = 30 + 11 * t, p = 1 + t % 6;
        Eigen::MatrixXd x(n, p);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < p; ++j) x(i, j) = g(rng);
        Eigen::VectorXd beta(p);
        for (Eigen::Index j = 0; j < p; ++j) beta(j) = (j % 2 ? -1.0 : 1.0) * static_cast<double>(j + 1);
        Eigen::VectorXd y = x * beta;
        for (Eigen::Index i = 0; i < n; ++i) y(i) += 0.5 + g(rng);
        auto fit = fit_ols(y, x);
        auto ref = oracle::normal_equations(y, x);
        bool ok = rel_close(fit.intercept, ref.beta(0)) && rel_close(fit.r2, ref.r2) && rel_close(fit.bic, ref.bic);
        for (Eigen::Index j = 0; j < p; ++j) ok = ok && rel_close(fit.coefficients[static_cast<std::size_t>(j)], ref.beta(j + 1));
        if (ok) ++ols_ok;
    }

    std::vector<double> errs;
    for (int seed = 0; seed < kLogitSeeds; ++seed) {
        LinearSem sem{{{"x"}, {"y", true, 0.0, 1.0}}, {{"x", "y", 1.0}}};
        Eigen::MatrixXd d = simulate(sem, kLogitRows, static_cast<std::uint64_t>(seed));
        auto fit = fit_logit(d.col(1), d.col(0));
        errs.push_back(fit.converged ? std::abs(fit.coefficients[0] - 1.0) : INFINITY);
    }
    double med = median(errs);

    const std::vector<std::vector<double>> vectors{
        {0.01, 0.02, 0.03},
        {0.001, 0.008, 0.039, 0.041, 0.042, 0.06, 0.074, 0.205, 0.212, 0.216},
        {0.5},
        {0.04, 0.04, 0.04, 0.04},
        {0.9, 0.01, 0.3, 0.02},
        {1.0, 0.0, 0.5},
        {0.011, 0.012, 0.013, 0.5, 0.6, 0.7, 0.8},
        {0.2, 0.1, 0.05, 0.025, 0.0125},
        {0.049, 0.051},
        {0.3, 0.3, 0.001, 0.7, 0.02, 0.02}};
    int bh_ok = 0;
    for (const auto& v : vectors)
        if (fdr_adjust(v) == oracle::bh_by_hand(v)) ++bh_ok;

    return {ols_ok == kOlsInstances && med <= kLogitMedianTol && bh_ok == static_cast<int>(vectors.size()),
            fmt::format("OLS {}/{} within {:g} relative; logit median |slope - 1| {:.4f} (limit {}); BH {}/{} exact",
                        ols_ok, kOlsInstances, kOlsRelTol, med, kLogitMedianTol, bh_ok, vectors.size())};
}

Outcome criterion5() {
    auto ds = synthetic_panel({15, 15, 15, 15, 20}, 50, 5);
    using A = std::array<std::size_t, kBucketCount>;
    auto s20 = sample_balanced_subset(ds, 20, 7);
    auto s50 = sample_balanced_subset(ds, 50, 7);
    auto again = sample_balanced_subset(ds, 20, 7);
    bool sizes = s20.bucket_counts == A{3, 3, 3, 3, 6} && s50.bucket_counts == A{9, 9, 9, 9, 12};
    bool totals = s20.columns.size() == 20 && s50.columns.size() == 50 && s20.columns[0] == ds.treatment() &&
                  s20.columns[1] == ds.outcome();
    bool same = again.columns == s20.columns && again.bucket_counts == s20.bucket_counts;
    auto show = [](const A& a) { return fmt::format("({},{},{},{},{})", a[0], a[1], a[2], a[3], a[4]); };
    return {sizes && totals && same,
            fmt::format("M=20 -> {} + 2, M=50 -> {} + 2, fixed seed reproduces subset: {}", show(s20.bucket_counts),
                        show(s50.bucket_counts), same ? "yes" : "no")};
}

Outcome criterion6() {
    // heuristic runs
    int clean_runs = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto ds = synthetic_panel({4, 4, 4, 4, 6}, 300, seed);
        RunConfig cfg;
        cfg.hp.treatment = ds.treatment();
        cfg.hp.outcome = ds.outcome();
        cfg.hp.m = ds.column_names().size();
        cfg.hp.t_max = 3;
        cfg.seed = seed;
        cfg.out_dir.clear();
        HeuristicProposer h;
        auto tr = run_loop(cfg, ds, h);
        bool clean = !tr.iterations.empty();
        for (const auto& it : tr.iterations)
            clean = clean && it.diagnostics.structural.temporal_edges_pruned.empty() &&
                    it.diagnostics.structural.disconnected_nodes_pruned.empty();
        if (clean) ++clean_runs;
    }

    // adversarial proposals with planted violations. Column names follow
    // synthetic_panel's serial numbering for per-bucket counts {4,4,4,4,6}.
    auto ds = synthetic_panel({4, 4, 4, 4, 6}, 300, 99);
    const std::string T = ds.treatment(), Y = ds.outcome();
    const std::string d0 = "delta_m0_2015_2016", d4 = "delta_m4_2016_2017";
    const std::string m8 = "m8_2015", m9 = "m9_2015", m12 = "m12_2016";
    const std::string m16 = "m16_2017", m17 = "m17_2017", m18 = "m18_2017", m19 = "m19_2017", m20 = "m20_2017",
                      m21 = "m21_2017";
    const std::vector<Edge> base{{m8, T}, {T, Y}, {m12, Y}, {d0, Y}, {m9, m12}};
    // each child keeps a valid edge, so removing these disconnects nothing
    const std::vector<Edge> temporal{{Y, m8}, {Y, m12}, {Y, m9}, {d0, m9}};
    // same-year three-cycle hanging off the outcome
    const std::vector<Edge> cycle{{m16, Y}, {m16, m17}, {m17, m18}, {m18, m16}};
    // same-year chain touching neither treatment nor outcome
    const std::vector<std::string> chain{m19, m20, m21, d4};

    auto hp = controls::default_hp();
    hp.treatment = T;
    hp.outcome = Y;
    int cases = 0, exact = 0;
    for (std::size_t t = 0; t <= temporal.size(); ++t)
        for (int c = 0; c <= 1; ++c)
            for (std::size_t d : {0u, 2u, 3u, 4u}) {
                std::vector<Edge> edges = base;
                edges.insert(edges.end(), temporal.begin(), temporal.begin() + static_cast<long>(t));
                if (c) edges.insert(edges.end(), cycle.begin(), cycle.end());
                for (std::size_t k = 0; k + 1 < d; ++k) edges.push_back({chain[k], chain[k + 1]});
                auto diag = evaluate_dag(Dag({}, edges), ds, hp);
                const auto& s = diag.structural;
                ++cases;
                if (s.temporal_edges_pruned.size() == t && s.cycle_edges_pruned.size() == static_cast<std::size_t>(c) &&
                    s.disconnected_nodes_pruned.size() == d)
                    ++exact;
            }
    return {clean_runs == 20 && exact == cases,
            fmt::format("heuristic runs with zero temporal and disconnected pruning {}/20; planted counts matched {}/{}",
                        clean_runs, exact, cases)};
}

nlohmann::json strip_volatile(nlohmann::json j) {
    j.erase("run_id");
    j.erase("started_at");
    j.erase("finished_at");
    for (auto& it : j["iterations"]) it.erase("elapsed_ms");
    return j;
}

Outcome criterion7() {
    auto dir = fs::temp_directory_path() / "arcadia_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto sem = controls::triangle_sem(0.5);
    for (const char* n : {"n1_2015", "n2_2015", "n3_2016"}) sem.nodes.push_back({n});
    write_csv(simulate_dataset(sem, 1000, 17, controls::kT, controls::kY), dir / "data.csv");
    const auto& T = controls::kT;
    const auto& Y = controls::kY;
    std::vector<Proposal> script{make({{Y, T}, {"n1_2015", Y}}), make({{T, Y}, {"n1_2015", Y}, {"n2_2015", Y}}),
                                 make({{T, Y}, {controls::kC, T}, {controls::kC, Y}, {"n3_2016", Y}})};
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : script) arr.push_back(to_json(p));
    std::ofstream(dir / "script.json") << arr.dump(2);

    auto once = [&](const std::string& tag) {
        RunConfig cfg;
        cfg.hp = controls::default_hp();
        cfg.hp.m = 6;
        cfg.hp.t_max = 3;
        cfg.data_path = dir / "data.csv";
        cfg.proposer = ProposerKind::scripted;
        cfg.script_path = dir / "script.json";
        cfg.seed = 3;
        cfg.out_dir = dir / tag;
        run(cfg);
        return nlohmann::json::parse(std::ifstream(cfg.out_dir / "transcript.json"));
    };
    auto a = once("a"), b = once("b");
    bool ids_differ = a["run_id"] != b["run_id"];
    bool same = strip_volatile(a) == strip_volatile(b);
    return {same && ids_differ,
            fmt::format("{} iterations, terminated_by {}, transcripts equal modulo run_id/timestamps: {}",
                        a["iterations"].size(), a["terminated_by"].get<std::string>(), same ? "yes" : "no")};
}

Outcome criterion8() {
    auto hp = controls::default_hp();
    auto pos = evaluate_dag(controls::triangle_dag(), controls::triangle_data(0.5, 8), hp);
    std::size_t passed = 0;
    for (const auto& c : pos.criteria) passed += c.passed;
    int failed_iii = 0;
    for (int seed = 0; seed < kNegativeSeeds; ++seed) {
        auto neg = evaluate_dag(controls::triangle_dag(), controls::triangle_data(0.0, static_cast<std::uint64_t>(seed)), hp);
        if (!neg.criteria[static_cast<std::size_t>(Criterion::edge_significance)].passed) ++failed_iii;
    }
    return {pos.ok && passed == kCriterionCount && failed_iii >= kNegativeFailMin,
            fmt::format("positive control {}/{} criteria (composite {:.3f}); negative control fails edge "
                        "significance in {}/{} (need {})",
                        passed, kCriterionCount, pos.global.composite_score, failed_iii, kNegativeSeeds,
                        kNegativeFailMin)};
}

Outcome criterion9() {
    std::mt19937_64 rng(909);
    std::vector<std::pair<int, int>> forward;
    for (int a = 0; a < kRuntimeNodes; ++a)
        for (int b = a + 1; b < kRuntimeNodes; ++b) forward.emplace_back(a, b);
    std::shuffle(forward.begin(), forward.end(), rng);
    const int t = 3, y = kRuntimeNodes - 1;
    std::vector<std::pair<int, int>> chosen{{t, y}};
    for (auto e : forward) {
        if (static_cast<int>(chosen.size()) == kRuntimeEdges) break;
        if (e != std::pair{t, y}) chosen.push_back(e);
    }
    auto nm = [](int i) { return fmt::format("x{}", i); };
    LinearSem sem;
    std::vector<Edge> edges;
    for (int i = 0; i < kRuntimeNodes; ++i) sem.nodes.push_back({nm(i)});
    std::uniform_real_distribution<double> w(0.3, 0.8);
    for (auto [a, b] : chosen) {
        sem.edges.push_back({nm(a), nm(b), w(rng)});
        edges.push_back({nm(a), nm(b)});
    }
    auto ds = simulate_dataset(sem, kRuntimeRows, 9, nm(t), nm(y));
    Hyperparameters hp;
    hp.treatment = nm(t);
    hp.outcome = nm(y);
    Dag dag({}, edges);
    auto t0 = Clock::now();
    auto d = evaluate_dag(dag, ds, hp);
    double secs = seconds_since(t0);
    return {secs < kRuntimeSeconds && d.statistics_computed,
            fmt::format("{} nodes, {} edges, n {}: {:.3f} s (limit {} s)", dag.node_count(), dag.edge_count(),
                        kRuntimeRows, secs, kRuntimeSeconds)};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
        {"d-separation agrees with brute force on all DAGs up to 5 nodes", criterion1},
        {"minimal adjustment set", criterion2},
        {"delta BIC orientation", criterion3},
        {"regression correctness", criterion4},
        {"sampling allocation", criterion5},
        {"structural guarantees", criterion6},
        {"end-to-end determinism", criterion7},
        {"positive and negative controls", criterion8},
        {"runtime sanity", criterion9}};
    int failures = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        Outcome o;
        try {
            o = checks[i].second();
        } catch (const std::exception& e) {
            o = {false, fmt::format("exception: {}", e.what())};
        }
        if (!o.pass) ++failures;
        fmt::print("[{}] criterion {}: {}: {}\n", o.pass ? "PASS" : "FAIL", i + 1, checks[i].first, o.detail);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", checks.size() - static_cast<std::size_t>(failures), checks.size());
    return failures == 0 ? 0 : 1;
}
