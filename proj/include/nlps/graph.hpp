#pragma once

// Premise dependency graph: an edge points from an entry to each of its
// premises. Entries without any incident edge are not nodes.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nlps/corpus.hpp"
#include "nlps/error.hpp"

namespace nlps {

class PremiseGraph {
public:
    using Edge = std::pair<EntryId, EntryId>;  // (entry, premise)

    PremiseGraph() = default;

    // Self loops are dropped; duplicate edges collapse.
    explicit PremiseGraph(std::vector<Edge> edges) {
        edges.erase(std::remove_if(edges.begin(), edges.end(), [](const Edge& e) { return e.first == e.second; }),
                    edges.end());
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        std::set<EntryId> nodes;
        for (const auto& [a, b] : edges) {
            nodes.insert(a);
            nodes.insert(b);
        }
        nodes_.assign(nodes.begin(), nodes.end());
        for (std::size_t i = 0; i < nodes_.size(); ++i) index_.emplace(nodes_[i], i);
        out_.resize(nodes_.size());
        in_degree_.assign(nodes_.size(), 0);
        for (const auto& [a, b] : edges) {
            std::size_t ia = index_.at(a), ib = index_.at(b);
            out_[ia].push_back(ib);
            ++in_degree_[ib];
        }
        edges_ = std::move(edges);
    }

    const std::vector<EntryId>& nodes() const noexcept { return nodes_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    bool contains(std::string_view id) const { return index_.find(id) != index_.end(); }

    std::size_t index_of(std::string_view id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw LookupError("entry '" + std::string(id) + "' is not a graph node");
        return it->second;
    }

    // Successor node indices, ascending.
    const std::vector<std::size_t>& premises_of(std::size_t node) const { return out_.at(node); }
    std::size_t out_degree(std::size_t node) const { return out_.at(node).size(); }
    std::size_t in_degree(std::size_t node) const { return in_degree_.at(node); }

private:
    std::vector<EntryId> nodes_;
    std::vector<Edge> edges_;
    std::map<EntryId, std::size_t, std::less<>> index_;
    std::vector<std::vector<std::size_t>> out_;
    std::vector<std::size_t> in_degree_;
};

// One edge per (entry, premise) in premise_set(entry, all proofs).
inline PremiseGraph build_graph(const Corpus& corpus) {
    std::vector<PremiseGraph::Edge> edges;
    for (const Entry& e : corpus.entries()) {
        for (const EntryId& p : premise_set(e)) {
            if (corpus.contains(p)) edges.emplace_back(e.id, p);
        }
    }
    return PremiseGraph(std::move(edges));
}

// Entries reachable from `id` through 1..k premise edges, excluding `id`.
// Breadth-first with a visited set, so cycles are harmless.
inline std::vector<EntryId> k_hop_premises(const PremiseGraph& graph, std::string_view id, std::size_t k) {
    if (k < 1) throw ConfigError("hop count must be at least 1");
    const std::size_t start = graph.index_of(id);
    std::vector<char> seen(graph.node_count(), 0);
    seen[start] = 1;
    std::vector<std::size_t> frontier{start}, reached;
    for (std::size_t depth = 0; depth < k && !frontier.empty(); ++depth) {
        std::vector<std::size_t> next;
        for (std::size_t u : frontier) {
            for (std::size_t v : graph.premises_of(u)) {
                if (seen[v]) continue;
                seen[v] = 1;
                next.push_back(v);
                reached.push_back(v);
            }
        }
        frontier = std::move(next);
    }
    std::vector<EntryId> out;
    out.reserve(reached.size());
    for (std::size_t v : reached) out.push_back(graph.nodes()[v]);
    std::sort(out.begin(), out.end());
    return out;
}

// Strongly connected components with more than one node (Tarjan), each
// sorted, listed in ascending order of their first id.
inline std::vector<std::vector<EntryId>> find_cycles(const PremiseGraph& graph) {
    const std::size_t n = graph.node_count();
    constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unvisited), low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<std::size_t> stack;
    std::vector<std::vector<EntryId>> components;
    std::size_t counter = 0;

    // iterative to survive deep chains
    struct Frame {
        std::size_t node;
        std::size_t child;
    };
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unvisited) continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            Frame& f = call.back();
            const auto& succ = graph.premises_of(f.node);
            if (f.child < succ.size()) {
                std::size_t v = succ[f.child++];
                if (index[v] == unvisited) {
                    index[v] = low[v] = counter++;
                    stack.push_back(v);
                    on_stack[v] = 1;
                    call.push_back({v, 0});
                } else if (on_stack[v]) {
                    low[f.node] = std::min(low[f.node], index[v]);
                }
                continue;
            }
            std::size_t u = f.node;
            call.pop_back();
            if (!call.empty()) low[call.back().node] = std::min(low[call.back().node], low[u]);
            if (low[u] == index[u]) {
                std::vector<EntryId> comp;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp.push_back(graph.nodes()[w]);
                } while (w != u);
                if (comp.size() > 1) {
                    std::sort(comp.begin(), comp.end());
                    components.push_back(std::move(comp));
                }
            }
        }
    }
    std::sort(components.begin(), components.end());
    return components;
}

}  // namespace nlps
