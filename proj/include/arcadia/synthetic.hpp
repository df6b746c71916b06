#pragma once

#include "arcadia/data_ingest.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace arcadia {

/// Linear structural equation model. Continuous nodes are
/// intercept + sum(w * parent) + N(0, noise_sd^2); binary nodes draw
/// Bernoulli(logistic(intercept + sum(w * parent))).
struct SemNode {
    std::string name;
    bool binary = false;
    double intercept = 0.0;
    double noise_sd = 1.0;
};

struct SemEdge {
    std::string parent;
    std::string child;
    double weight = 1.0;
};

struct LinearSem {
    std::vector<SemNode> nodes;
    std::vector<SemEdge> edges;

    std::vector<std::string> names() const;
};

/// n x |nodes| sample, columns in node order. Throws GraphError if the
/// edges are cyclic or name unknown nodes.
Eigen::MatrixXd simulate(const LinearSem& sem, std::size_t n, std::uint64_t seed);

/// simulate() wrapped as a dataset; binary nodes are declared as such.
PanelDataset simulate_dataset(const LinearSem& sem, std::size_t n, std::uint64_t seed, const std::string& treatment,
                              const std::string& outcome);

/// Panel with year-coded column names: treatment "delta_esg_2015_2016",
/// outcome "score2017" and `per_bucket[i]` filler columns in each sampling
/// bucket. Fillers are independent standard normals except that the
/// outcome depends on the treatment with the given slope.
PanelDataset synthetic_panel(const std::array<std::size_t, kBucketCount>& per_bucket, std::size_t n,
                             std::uint64_t seed, double treatment_slope = 0.5);

} // namespace arcadia
