#include "arcadia/evaluator.hpp"

#include "controls.hpp"

#include <doctest.h>

#include <cmath>

using namespace arcadia;

namespace {
CriteriaInputs passing() {
    CriteriaInputs in;
    in.identifiable = true;
    in.treatment_delta_bic = 5.0;
    in.treatment_p_adjusted = 0.001;
    in.composite_score = 0.9;
    in.mean_r2 = 0.3;
    in.max_vif = 2.0;
    in.positivity_ok = true;
    return in;
}

const CriterionRecord& rec(const Decision& d, Criterion c) { return d.criteria[static_cast<std::size_t>(c)]; }
} // namespace

TEST_CASE("decide boundaries") {
    auto hp = controls::default_hp();
    CHECK(decide(passing(), hp).ok);

    auto at = passing();
    at.composite_score = hp.theta_global;
    at.mean_r2 = hp.theta_r2;
    at.max_vif = hp.theta_vif;
    auto d = decide(at, hp);
    CHECK(rec(d, Criterion::global_validity).passed);
    CHECK(rec(d, Criterion::mean_r2).passed);
    CHECK(rec(d, Criterion::vif).passed);

    auto zero = passing();
    zero.treatment_delta_bic = 0.0;
    CHECK_FALSE(rec(decide(zero, hp), Criterion::orientation).passed);
    zero.treatment_delta_bic.reset();
    CHECK_FALSE(rec(decide(zero, hp), Criterion::orientation).passed);

    auto p = passing();
    p.treatment_p_adjusted = hp.alpha;
    CHECK_FALSE(rec(decide(p, hp), Criterion::edge_significance).passed);
    p.negligible_effect_claimed = true;
    CHECK_FALSE(rec(decide(p, hp), Criterion::edge_significance).passed);
    hp.accept_negligible_effect = true;
    CHECK(rec(decide(p, hp), Criterion::edge_significance).passed);
}

TEST_CASE("decide is monotone in thresholds") {
    auto hp = controls::default_hp();
    for (double comp : {0.5, 0.6, 0.7})
        for (double r2 : {0.04, 0.05, 0.06})
            for (double v : {9.0, 10.0, 11.0}) {
                auto in = passing();
                in.composite_score = comp;
                in.mean_r2 = r2;
                in.max_vif = v;
                bool base = decide(in, hp).ok;
                auto loose = hp;
                loose.theta_global -= 0.05;
                loose.theta_r2 -= 0.01;
                loose.theta_vif += 1.0;
                loose.alpha = 0.1;
                if (base) CHECK(decide(in, loose).ok);
            }
}

TEST_CASE("missing outcome is a structural failure") {
    auto ds = controls::triangle_data(0.5, 1);
    auto hp = controls::default_hp();
    Dag g({}, {{controls::kC, controls::kT}});
    auto d = evaluate_dag(g, ds, hp);
    CHECK_FALSE(d.ok);
    CHECK_FALSE(d.structural.structurally_valid);
    CHECK_FALSE(d.statistics_computed);
    for (const auto& c : d.criteria) CHECK_FALSE(c.passed);
    auto memo = build_failure_memo(d, hp);
    CHECK(memo.structural_failure);
    CHECK(memo.failed.size() == kCriterionCount);
}

TEST_CASE("positive control passes every criterion") {
    auto hp = controls::default_hp();
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto d = evaluate_dag(controls::triangle_dag(), controls::triangle_data(0.5, seed), hp);
        CHECK(d.ok);
        REQUIRE(d.identification.minimal_adjustment_set);
        CHECK(*d.identification.minimal_adjustment_set == NodeSet{controls::kC});
        CHECK(d.treatment_edge.delta_bic > 0.0);
        CHECK(d.treatment_edge.is_dag_edge);
        auto memo = build_failure_memo(d, hp);
        CHECK(memo.text.find("all criteria satisfied") != std::string::npos);
    }
}

TEST_CASE("zero treatment effect fails edge significance in most seeds") {
    auto hp = controls::default_hp();
    int failed = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        auto d = evaluate_dag(controls::triangle_dag(), controls::triangle_data(0.0, seed), hp);
        if (!d.criteria[static_cast<std::size_t>(Criterion::edge_significance)].passed) ++failed;
    }
    CHECK(failed >= 32);
}

TEST_CASE("global metrics are consistent") {
    auto hp = controls::default_hp();
    auto ds = controls::triangle_data(0.5, 3);
    auto d = evaluate_dag(controls::triangle_dag(), ds, hp);
    const auto& g = d.global;
    CHECK(g.composite_score == (g.sig_edge_ratio + g.sig_model_ratio + g.direction_accuracy) / 3.0);
    CHECK(g.sig_edge_ratio * static_cast<double>(g.edge_count) == doctest::Approx(g.significant_edges));
    CHECK(g.sig_model_ratio * static_cast<double>(g.model_count) == doctest::Approx(g.significant_models));
    std::size_t strong = 0;
    for (const auto& e : d.edges)
        if (e.delta_bic_defined && e.delta_bic > 2.0) ++strong;
    CHECK(g.oriented_edges == strong);
    CHECK(g.direction_accuracy == doctest::Approx(static_cast<double>(strong) / 3.0));
    // only T -> Y has the larger-variance parent
    CHECK(strong == 1);
    CHECK(g.model_count == 2);
}

TEST_CASE("memo content") {
    auto hp = controls::default_hp();
    SUBCASE("VIF triple") {
        Diagnostics d;
        d.structural.structurally_valid = true;
        d.statistics_computed = true;
        NodeDiagnostics nd;
        nd.node = "y";
        nd.parents = {"x", "w"};
        nd.vifs = {{"x", 14.2}, {"w", 1.1}};
        nd.significant = true;
        d.nodes.push_back(nd);
        d.identification.identifiable = true;
        d.identification.minimal_adjustment_set = NodeSet{};
        for (std::size_t i = 0; i < kCriterionCount; ++i) {
            d.criteria[i].criterion = static_cast<Criterion>(i);
            d.criteria[i].passed = true;
        }
        d.criteria[static_cast<std::size_t>(Criterion::vif)].passed = false;
        auto memo = build_failure_memo(d, hp);
        REQUIRE(memo.vif_violations.size() == 1);
        CHECK(memo.text.find("(y, x, 14.2)") != std::string::npos);
        CHECK(memo.text.find("vif") != std::string::npos);
    }
    SUBCASE("non-identifiable") {
        // undated names, so the reversed edge survives temporal pruning
        LinearSem sem{{{"Y"}, {"T"}}, {{"Y", "T", 1.0}}};
        auto ds = simulate_dataset(sem, 300, 1, "T", "Y");
        auto h = hp;
        h.treatment = "T";
        h.outcome = "Y";
        auto d = evaluate_dag(Dag({}, {{"Y", "T"}}), ds, h);
        REQUIRE(d.structural.structurally_valid);
        auto memo = build_failure_memo(d, h);
        CHECK(memo.text.find("identifiable") != std::string::npos);
        CHECK(memo.text.find("adjustment set absent") != std::string::npos);
    }
    SUBCASE("deterministic") {
        auto ds = controls::triangle_data(0.0, 2);
        auto a = build_failure_memo(evaluate_dag(controls::triangle_dag(), ds, hp), hp);
        auto b = build_failure_memo(evaluate_dag(controls::triangle_dag(), ds, hp), hp);
        CHECK(a.text == b.text);
    }
}

TEST_CASE("failed node fits count against the ratios") {
    auto hp = controls::default_hp();
    // a duplicated column makes the outcome model rank deficient
    Eigen::MatrixXd m = arcadia::simulate(controls::triangle_sem(0.5), 300, 1);
    Eigen::MatrixXd wide(300, 4);
    wide << m, m.col(0);
    IngestConfig c;
    c.treatment = controls::kT;
    c.outcome = controls::kY;
    std::vector<std::string> names{controls::kC, controls::kT, controls::kY, "size_copy_2015"};
    auto ds = make_dataset(names, wide, c);
    Dag g({}, {{controls::kC, controls::kY}, {"size_copy_2015", controls::kY}, {controls::kT, controls::kY}});
    auto d = evaluate_dag(g, ds, hp);
    bool saw_error = false;
    for (const auto& nd : d.nodes)
        if (nd.node == controls::kY) saw_error = !nd.error.empty() && !nd.fit;
    CHECK(saw_error);
    CHECK_FALSE(d.ok);
    CHECK(d.global.significant_models == 0);
}

TEST_CASE("diagnostics serialize") {
    auto hp = controls::default_hp();
    auto d = evaluate_dag(controls::triangle_dag(), controls::triangle_data(0.5, 1), hp);
    auto j = to_json(d);
    CHECK(j["ok"] == true);
    CHECK(j["criteria"].size() == kCriterionCount);
    CHECK(json_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(json_number(std::nan("")) == "nan");
}
