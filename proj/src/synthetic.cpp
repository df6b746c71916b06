#include "arcadia/synthetic.hpp"

#include "arcadia/dag.hpp"
#include "arcadia/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <random>

namespace arcadia {

std::vector<std::string> LinearSem::names() const {
    std::vector<std::string> out;
    out.reserve(nodes.size());
    for (const auto& n : nodes) out.push_back(n.name);
    return out;
}

Eigen::MatrixXd simulate(const LinearSem& sem, std::size_t n, std::uint64_t seed) {
    const auto names = sem.names();
    std::vector<Edge> edges;
    for (const auto& e : sem.edges) edges.push_back({e.parent, e.child});
    Dag dag(names, edges);
    if (!dag.is_acyclic()) throw GraphError("structural equation model is cyclic");
    const auto order = dag.topological_order();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    const auto nn = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(nn, static_cast<Eigen::Index>(names.size()));
    for (const auto& name : order) {
        const auto j = static_cast<Eigen::Index>(dag.index_of(name));
        const SemNode& node = sem.nodes[static_cast<std::size_t>(j)];
        Eigen::VectorXd eta = Eigen::VectorXd::Constant(nn, node.intercept);
        for (const auto& e : sem.edges)
            if (e.child == name) eta += e.weight * x.col(static_cast<Eigen::Index>(dag.index_of(e.parent)));
        for (Eigen::Index i = 0; i < nn; ++i) {
            if (node.binary) {
                double p = 1.0 / (1.0 + std::exp(-eta(i)));
                x(i, j) = unif(rng) < p ? 1.0 : 0.0;
            } else {
                x(i, j) = eta(i) + node.noise_sd * gauss(rng);
            }
        }
    }
    return x;
}

PanelDataset simulate_dataset(const LinearSem& sem, std::size_t n, std::uint64_t seed, const std::string& treatment,
                              const std::string& outcome) {
    IngestConfig cfg;
    cfg.treatment = treatment;
    cfg.outcome = outcome;
    for (const auto& node : sem.nodes)
        if (node.binary) cfg.binary_columns.insert(node.name);
    const auto names = sem.names();
    return make_dataset(names, simulate(sem, n, seed), cfg);
}

PanelDataset synthetic_panel(const std::array<std::size_t, kBucketCount>& per_bucket, std::size_t n,
                             std::uint64_t seed, double treatment_slope) {
    static constexpr const char* kPatterns[kBucketCount] = {"delta_m{}_2015_2016", "delta_m{}_2016_2017", "m{}_2015",
                                                            "m{}_2016", "m{}_2017"};
    LinearSem sem;
    sem.nodes.push_back({"delta_esg_2015_2016"});
    sem.nodes.push_back({"score2017"});
    sem.edges.push_back({"delta_esg_2015_2016", "score2017", treatment_slope});
    std::size_t serial = 0;
    for (std::size_t b = 0; b < kBucketCount; ++b)
        for (std::size_t k = 0; k < per_bucket[b]; ++k)
            sem.nodes.push_back({fmt::format(fmt::runtime(kPatterns[b]), serial++)});
    return simulate_dataset(sem, n, seed, "delta_esg_2015_2016", "score2017");
}

} // namespace arcadia
