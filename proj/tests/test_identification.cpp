#include "arcadia/identification.hpp"
#include "arcadia/synthetic.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace arcadia;

namespace {
const Dag kConfounder({}, {{"C", "T"}, {"C", "Y"}, {"T", "Y"}});
const Dag kMediator({}, {{"T", "M"}, {"M", "Y"}});
const Dag kMBias({"T", "Y"}, {{"A", "T"}, {"A", "U"}, {"B", "U"}, {"B", "Y"}});
} // namespace

TEST_CASE("backdoor_valid canonical graphs") {
    CHECK(backdoor_valid(kConfounder, "T", "Y", {"C"}));
    CHECK_FALSE(backdoor_valid(kConfounder, "T", "Y", {}));
    CHECK_FALSE(backdoor_valid(kMediator, "T", "Y", {"M"}));
    CHECK(backdoor_valid(kMediator, "T", "Y", {}));
    CHECK(backdoor_valid(kMBias, "T", "Y", {}));
    CHECK_FALSE(backdoor_valid(kMBias, "T", "Y", {"U"}));
    CHECK(backdoor_valid(kMBias, "T", "Y", {"U", "A"}));
}

TEST_CASE("minimal_adjustment_set canonical graphs") {
    auto c = minimal_adjustment_set(kConfounder, "T", "Y");
    REQUIRE(c.identifiable);
    CHECK(*c.minimal_adjustment_set == NodeSet{"C"});
    CHECK(*minimal_adjustment_set(kMediator, "T", "Y").minimal_adjustment_set == NodeSet{});
    CHECK(*minimal_adjustment_set(kMBias, "T", "Y").minimal_adjustment_set == NodeSet{});
    CHECK(*minimal_adjustment_set(Dag({}, {{"T", "Y"}}), "T", "Y").minimal_adjustment_set == NodeSet{});
    Dag two({}, {{"C1", "T"}, {"C1", "Y"}, {"C2", "T"}, {"C2", "Y"}, {"T", "Y"}});
    CHECK(*minimal_adjustment_set(two, "T", "Y").minimal_adjustment_set == NodeSet{"C1", "C2"});
}

TEST_CASE("lexicographic tie break") {
    // a -> b -> T, a -> Y: {a} and {b} are both valid singletons
    Dag h({}, {{"a", "b"}, {"b", "T"}, {"a", "Y"}, {"T", "Y"}});
    CHECK(*minimal_adjustment_set(h, "T", "Y").minimal_adjustment_set == NodeSet{"a"});
}

TEST_CASE("outcome causing treatment is not identifiable") {
    Dag g({}, {{"Y", "T"}, {"C", "T"}});
    auto r = minimal_adjustment_set(g, "T", "Y");
    CHECK_FALSE(r.identifiable);
    CHECK_FALSE(r.minimal_adjustment_set.has_value());
}

TEST_CASE("minimal set is valid and minimal on random DAGs") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> size(3, 8);
    int identifiable = 0;
    for (int trial = 0; trial < 300; ++trial) {
        int n = size(rng);
        auto g = oracle::random_dag(n, 0.35, rng);
        auto dag = oracle::to_dag(g);
        auto res = minimal_adjustment_set(dag, "v0", "v1");
        int expected = oracle::minimal_backdoor_size(g, 0, 1);
        CHECK(res.identifiable == (expected >= 0));
        if (!res.identifiable) continue;
        ++identifiable;
        std::uint32_t mask = 0;
        for (const auto& v : *res.minimal_adjustment_set) mask |= 1u << std::stoi(v.substr(1));
        CHECK(oracle::backdoor_valid(g, 0, 1, mask));
        CHECK(static_cast<int>(res.minimal_adjustment_set->size()) == expected);
        CHECK(backdoor_valid(dag, "v0", "v1", {}) == (expected == 0));
    }
    CHECK(identifiable > 100);
}

TEST_CASE("positivity") {
    SUBCASE("empty set is skipped") {
        LinearSem sem{{{"T"}, {"Y"}}, {{"T", "Y", 1.0}}};
        auto ds = simulate_dataset(sem, 100, 1, "T", "Y");
        auto r = positivity_check(ds, "T", {});
        CHECK(r.skipped);
        CHECK(r.positivity_ok);
    }
    SUBCASE("independent binary treatment has full overlap") {
        LinearSem sem{{{"Z"}, {"T", true}, {"Y"}}, {{"T", "Y", 1.0}}};
        auto ds = simulate_dataset(sem, 1000, 2, "T", "Y");
        auto r = positivity_check(ds, "T", {"Z"});
        CHECK_FALSE(r.skipped);
        CHECK(r.overlap_share > 0.99);
        CHECK(r.positivity_ok);
    }
    SUBCASE("sharp separation fails") {
        std::mt19937_64 rng(3);
        std::normal_distribution<double> g;
        Eigen::MatrixXd m(500, 3);
        for (Eigen::Index i = 0; i < 500; ++i) {
            m(i, 0) = g(rng);
            m(i, 1) = m(i, 0) > 0 ? 1.0 : 0.0;
            m(i, 2) = g(rng);
        }
        IngestConfig c;
        c.treatment = "T";
        c.outcome = "Y";
        std::vector<std::string> names{"Z", "T", "Y"};
        auto ds = make_dataset(names, m, c);
        auto r = positivity_check(ds, "T", {"Z"});
        CHECK_FALSE(r.positivity_ok);
        CHECK(r.overlap_share < 0.5);
    }
    SUBCASE("continuous treatment is split at the median, row order invariant") {
        LinearSem sem{{{"Z"}, {"T"}, {"Y"}}, {{"Z", "T", 0.5}, {"T", "Y", 1.0}}};
        Eigen::MatrixXd m = simulate(sem, 600, 4);
        IngestConfig c;
        c.treatment = "T";
        c.outcome = "Y";
        auto names = sem.names();
        auto r = positivity_check(make_dataset(names, m, c), "T", {"Z"});
        CHECK(r.dichotomized);
        CHECK(r.overlap_share >= 0.0);
        CHECK(r.overlap_share <= 1.0);
        Eigen::MatrixXd flipped = m.colwise().reverse();
        auto r2 = positivity_check(make_dataset(names, flipped, c), "T", {"Z"});
        CHECK(r2.overlap_share == doctest::Approx(r.overlap_share));
    }
}
