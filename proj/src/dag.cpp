#include "arcadia/dag.hpp"

#include "arcadia/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <deque>
#include <optional>
#include <ostream>
#include <sstream>

namespace arcadia {

Dag::Dag(std::vector<std::string> nodes, std::vector<Edge> edges) : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    std::set<std::string> seen_nodes;
    for (const auto& n : nodes_) {
        if (!seen_nodes.insert(n).second) throw GraphError(fmt::format("duplicate node '{}'", n));
    }
    std::set<Edge> seen;
    for (const auto& e : edges_) {
        if (e.parent == e.child) throw GraphError(fmt::format("self-loop on '{}'", e.parent));
        if (!seen.insert(e).second) throw GraphError(fmt::format("duplicate edge {} -> {}", e.parent, e.child));
        for (const auto* n : {&e.parent, &e.child}) {
            if (seen_nodes.insert(*n).second) nodes_.push_back(*n);
        }
    }
    rebuild_index();
}

void Dag::rebuild_index() {
    index_.clear();
    for (std::size_t i = 0; i < nodes_.size(); ++i) index_.emplace(nodes_[i], i);
    out_.assign(nodes_.size(), {});
    in_.assign(nodes_.size(), {});
    for (const auto& e : edges_) {
        auto p = index_.at(e.parent);
        auto c = index_.at(e.child);
        out_[p].push_back(c);
        in_[c].push_back(p);
    }
}

bool Dag::contains(std::string_view node) const { return index_.count(std::string(node)) > 0; }

bool Dag::has_edge(std::string_view parent, std::string_view child) const {
    return std::any_of(edges_.begin(), edges_.end(),
                       [&](const Edge& e) { return e.parent == parent && e.child == child; });
}

std::size_t Dag::index_of(std::string_view node) const {
    auto it = index_.find(std::string(node));
    if (it == index_.end()) throw GraphError(fmt::format("node '{}' is not in the graph", node));
    return it->second;
}

std::vector<std::string> Dag::parents(std::string_view node) const {
    std::vector<std::string> out;
    for (auto p : in_[index_of(node)]) out.push_back(nodes_[p]);
    return out;
}

std::vector<std::string> Dag::children(std::string_view node) const {
    std::vector<std::string> out;
    for (auto c : out_[index_of(node)]) out.push_back(nodes_[c]);
    return out;
}

namespace {

std::optional<std::vector<std::size_t>> kahn(const std::vector<std::vector<std::size_t>>& out,
                                             const std::vector<std::vector<std::size_t>>& in) {
    const std::size_t n = out.size();
    std::vector<std::size_t> indeg(n);
    for (std::size_t i = 0; i < n; ++i) indeg[i] = in[i].size();
    std::set<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i) {
        if (indeg[i] == 0) ready.insert(i);
    }
    std::vector<std::size_t> order;
    while (!ready.empty()) {
        auto v = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(v);
        for (auto c : out[v]) {
            if (--indeg[c] == 0) ready.insert(c);
        }
    }
    if (order.size() != n) return std::nullopt;
    return order;
}

} // namespace

bool Dag::is_acyclic() const { return kahn(out_, in_).has_value(); }

std::vector<std::string> Dag::topological_order() const {
    auto order = kahn(out_, in_);
    if (!order) throw GraphError("graph contains a cycle");
    std::vector<std::string> names;
    for (auto i : *order) names.push_back(nodes_[i]);
    return names;
}

Dag Dag::without_edges(std::span<const Edge> removed) const {
    std::set<Edge> drop(removed.begin(), removed.end());
    std::vector<Edge> kept;
    for (const auto& e : edges_) {
        if (!drop.count(e)) kept.push_back(e);
    }
    return Dag(nodes_, std::move(kept));
}

Dag Dag::without_nodes(const NodeSet& removed) const {
    std::vector<std::string> nodes;
    for (const auto& n : nodes_) {
        if (!removed.count(n)) nodes.push_back(n);
    }
    std::vector<Edge> kept;
    for (const auto& e : edges_) {
        if (!removed.count(e.parent) && !removed.count(e.child)) kept.push_back(e);
    }
    return Dag(std::move(nodes), std::move(kept));
}

Dag build_dag(std::span<const Edge> edges, const NodeSet& known_columns) {
    for (const auto& e : edges) {
        for (const auto* n : {&e.parent, &e.child}) {
            if (!known_columns.count(*n)) throw GraphError(fmt::format("edge references unknown column '{}'", *n));
        }
    }
    return Dag({}, std::vector<Edge>(edges.begin(), edges.end()));
}

EdgePruning prune_temporal(const Dag& dag, const std::map<std::string, TemporalTag>& tags) {
    auto time_of = [&](const std::string& n) {
        auto it = tags.find(n);
        if (it == tags.end()) throw GraphError(fmt::format("no temporal tag for node '{}'", n));
        return it->second.effective_time();
    };
    std::vector<Edge> removed;
    for (const auto& e : dag.edges()) {
        if (time_of(e.parent) > time_of(e.child)) removed.push_back(e);
    }
    return {dag.without_edges(removed), removed};
}

namespace {

// Edges (by emission index) of one directed cycle, or empty if acyclic.
std::vector<std::size_t> find_cycle(const Dag& dag) {
    const auto& nodes = dag.nodes();
    const auto& edges = dag.edges();
    const std::size_t n = nodes.size();
    std::vector<std::vector<std::size_t>> out_edges(n);
    for (std::size_t k = 0; k < edges.size(); ++k) out_edges[dag.index_of(edges[k].parent)].push_back(k);

    enum class Mark { white, grey, black };
    std::vector<Mark> mark(n, Mark::white);
    std::vector<std::size_t> via(n, 0); // edge used to enter each grey node

    for (std::size_t root = 0; root < n; ++root) {
        if (mark[root] != Mark::white) continue;
        // Iterative DFS: stack of (node, next out-edge position).
        std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
        mark[root] = Mark::grey;
        while (!stack.empty()) {
            auto& [v, pos] = stack.back();
            if (pos == out_edges[v].size()) {
                mark[v] = Mark::black;
                stack.pop_back();
                continue;
            }
            auto k = out_edges[v][pos++];
            auto w = dag.index_of(edges[k].child);
            if (mark[w] == Mark::grey) {
                std::vector<std::size_t> cycle{k};
                for (auto u = v; u != w;) {
                    cycle.push_back(via[u]);
                    u = dag.index_of(edges[via[u]].parent);
                }
                return cycle;
            }
            if (mark[w] == Mark::white) {
                mark[w] = Mark::grey;
                via[w] = k;
                stack.emplace_back(w, 0);
            }
        }
    }
    return {};
}

} // namespace

EdgePruning break_cycles(const Dag& dag) {
    Dag current = dag;
    std::vector<Edge> removed;
    for (;;) {
        auto cycle = find_cycle(current);
        if (cycle.empty()) break;
        // Indices refer to `current`, whose edges keep the original relative order.
        auto latest = *std::max_element(cycle.begin(), cycle.end());
        Edge e = current.edges()[latest];
        removed.push_back(e);
        current = current.without_edges(std::span<const Edge>(&e, 1));
    }
    return {std::move(current), std::move(removed)};
}

NodePruning prune_disconnected(const Dag& dag, std::string_view treatment, std::string_view outcome) {
    const std::size_t n = dag.node_count();
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& e : dag.edges()) {
        auto p = dag.index_of(e.parent);
        auto c = dag.index_of(e.child);
        adj[p].push_back(c);
        adj[c].push_back(p);
    }
    std::vector<bool> reached(n, false);
    std::deque<std::size_t> queue;
    for (auto anchor : {treatment, outcome}) {
        if (dag.contains(anchor)) {
            auto i = dag.index_of(anchor);
            if (!reached[i]) {
                reached[i] = true;
                queue.push_back(i);
            }
        }
    }
    while (!queue.empty()) {
        auto v = queue.front();
        queue.pop_front();
        for (auto w : adj[v]) {
            if (!reached[w]) {
                reached[w] = true;
                queue.push_back(w);
            }
        }
    }
    std::vector<std::string> removed;
    for (std::size_t i = 0; i < n; ++i) {
        if (!reached[i]) removed.push_back(dag.nodes()[i]);
    }
    return {dag.without_nodes(NodeSet(removed.begin(), removed.end())), removed};
}

StructuralResult structural_preprocess(const Dag& dag, const std::map<std::string, TemporalTag>& tags,
                                       std::string_view treatment, std::string_view outcome) {
    StructuralResult r;
    auto temporal = prune_temporal(dag, tags);
    auto acyclic = break_cycles(temporal.dag);
    auto connected = prune_disconnected(acyclic.dag, treatment, outcome);
    r.report.temporal_edges_pruned = std::move(temporal.removed);
    r.report.cycle_edges_pruned = std::move(acyclic.removed);
    r.report.disconnected_nodes_pruned = std::move(connected.removed);
    r.dag = std::move(connected.dag);
    r.report.structurally_valid = r.dag.contains(treatment) && r.dag.contains(outcome);
    return r;
}

NodeSet descendants(const Dag& dag, std::string_view x) {
    auto start = dag.index_of(x);
    std::vector<bool> seen(dag.node_count(), false);
    std::deque<std::size_t> queue{start};
    NodeSet out;
    while (!queue.empty()) {
        auto v = queue.front();
        queue.pop_front();
        for (const auto& c : dag.children(dag.nodes()[v])) {
            auto w = dag.index_of(c);
            if (!seen[w]) {
                seen[w] = true;
                out.insert(c);
                queue.push_back(w);
            }
        }
    }
    out.erase(std::string(x));
    return out;
}

bool d_separated(const Dag& dag, std::string_view x, std::string_view y, const NodeSet& z) {
    const auto xi = dag.index_of(x);
    const auto yi = dag.index_of(y);
    const std::size_t n = dag.node_count();
    std::vector<bool> observed(n, false);
    for (const auto& name : z) observed[dag.index_of(name)] = true;

    std::vector<std::vector<std::size_t>> parents(n), children(n);
    for (const auto& e : dag.edges()) {
        auto p = dag.index_of(e.parent);
        auto c = dag.index_of(e.child);
        children[p].push_back(c);
        parents[c].push_back(p);
    }

    // Nodes that are in z or have a descendant in z: colliders there are open.
    std::vector<bool> ancestor_of_z(n, false);
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < n; ++i) {
        if (observed[i]) {
            ancestor_of_z[i] = true;
            queue.push_back(i);
        }
    }
    while (!queue.empty()) {
        auto v = queue.front();
        queue.pop_front();
        for (auto p : parents[v]) {
            if (!ancestor_of_z[p]) {
                ancestor_of_z[p] = true;
                queue.push_back(p);
            }
        }
    }

    // Traverse (node, direction) states; up = arrived from a child, down = from a parent.
    enum Dir : std::size_t { up = 0, down = 1 };
    std::vector<std::array<bool, 2>> visited(n, {false, false});
    std::deque<std::pair<std::size_t, Dir>> frontier{{xi, up}};
    while (!frontier.empty()) {
        auto [v, dir] = frontier.front();
        frontier.pop_front();
        if (visited[v][dir]) continue;
        visited[v][dir] = true;
        if (v == yi) return false;

        if (dir == up && !observed[v]) {
            for (auto p : parents[v]) frontier.emplace_back(p, up);
            for (auto c : children[v]) frontier.emplace_back(c, down);
        } else if (dir == down) {
            if (!observed[v]) {
                for (auto c : children[v]) frontier.emplace_back(c, down);
            }
            if (ancestor_of_z[v]) {
                for (auto p : parents[v]) frontier.emplace_back(p, up);
            }
        }
    }
    return true;
}

namespace {

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace

void write_dot(std::ostream& out, const Dag& dag, std::string_view treatment, std::string_view outcome) {
    out << "digraph arcadia {\n";
    out << "  rankdir=LR;\n";
    out << "  node [shape=ellipse];\n";
    for (const auto& n : dag.nodes()) {
        out << "  " << quote(n);
        if (n == treatment) {
            out << " [shape=box, style=filled, fillcolor=lightblue]";
        } else if (n == outcome) {
            out << " [shape=doubleoctagon, style=filled, fillcolor=salmon]";
        }
        out << ";\n";
    }
    for (const auto& e : dag.edges()) out << "  " << quote(e.parent) << " -> " << quote(e.child) << ";\n";
    out << "}\n";
}

std::string to_dot(const Dag& dag, std::string_view treatment, std::string_view outcome) {
    std::ostringstream os;
    write_dot(os, dag, treatment, outcome);
    return os.str();
}

} // namespace arcadia
