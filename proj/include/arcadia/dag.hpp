#pragma once

#include "arcadia/data_ingest.hpp"

#include <compare>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace arcadia {

struct Edge {
    std::string parent;
    std::string child;

    auto operator<=>(const Edge&) const = default;
};

using NodeSet = std::set<std::string>;

/// Directed graph over named columns. Node order is first appearance;
/// edge order is the order the proposer emitted them, which break_cycles
/// relies on.
class Dag {
public:
    Dag() = default;

    /// Explicit construction. Endpoints missing from `nodes` are appended.
    /// Throws GraphError on self-loops or duplicate edges.
    Dag(std::vector<std::string> nodes, std::vector<Edge> edges);

    const std::vector<std::string>& nodes() const noexcept { return nodes_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    bool contains(std::string_view node) const;
    bool has_edge(std::string_view parent, std::string_view child) const;
    std::size_t index_of(std::string_view node) const; ///< throws GraphError

    std::vector<std::string> parents(std::string_view node) const;
    std::vector<std::string> children(std::string_view node) const;

    bool is_acyclic() const;
    /// Kahn order, ties broken by node order. Throws GraphError on a cycle.
    std::vector<std::string> topological_order() const;

    Dag without_edges(std::span<const Edge> removed) const;
    Dag without_nodes(const NodeSet& removed) const;

private:
    void rebuild_index();

    std::vector<std::string> nodes_;
    std::vector<Edge> edges_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::vector<std::size_t>> out_; // node -> child node indices
    std::vector<std::vector<std::size_t>> in_;  // node -> parent node indices
};

/// Builds a Dag from a proposal edge list, checking every name against the
/// dataset's columns.
Dag build_dag(std::span<const Edge> edges, const NodeSet& known_columns);

struct EdgePruning {
    Dag dag;
    std::vector<Edge> removed;
};

struct NodePruning {
    Dag dag;
    std::vector<std::string> removed;
};

/// Drops every edge whose parent is dated strictly after its child.
EdgePruning prune_temporal(const Dag& dag, const std::map<std::string, TemporalTag>& tags);

/// Repeatedly finds a cycle and drops its latest-emitted edge.
EdgePruning break_cycles(const Dag& dag);

/// Drops nodes with no undirected path to the treatment nor to the outcome.
NodePruning prune_disconnected(const Dag& dag, std::string_view treatment, std::string_view outcome);

struct StructuralReport {
    std::vector<Edge> temporal_edges_pruned;
    std::vector<Edge> cycle_edges_pruned;
    std::vector<std::string> disconnected_nodes_pruned;
    bool structurally_valid = false;
};

struct StructuralResult {
    Dag dag;
    StructuralReport report;
};

/// Temporal pruning, then cycle breaking, then connectivity pruning.
StructuralResult structural_preprocess(const Dag& dag, const std::map<std::string, TemporalTag>& tags,
                                       std::string_view treatment, std::string_view outcome);

/// d-separation of x and y given z (Bayes-ball reachability).
bool d_separated(const Dag& dag, std::string_view x, std::string_view y, const NodeSet& z);

NodeSet descendants(const Dag& dag, std::string_view x);

/// Graphviz export. Node names are emitted verbatim inside double quotes
/// (with `"` and `\` escaped). The treatment is drawn as a filled light-blue
/// box and the outcome as a filled salmon double octagon.
void write_dot(std::ostream& out, const Dag& dag, std::string_view treatment, std::string_view outcome);
std::string to_dot(const Dag& dag, std::string_view treatment, std::string_view outcome);

} // namespace arcadia
