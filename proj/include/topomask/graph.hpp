#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "topomask/errors.hpp"
#include "topomask/grid.hpp"
#include "topomask/tree.hpp"

namespace topomask {

// Undirected graph with symmetric nonnegative edge weights and no self-loops.
struct Graph {
    std::size_t size = 0;
    std::vector<std::vector<std::pair<std::size_t, double>>> adj;

    explicit Graph(std::size_t n = 0) : size(n), adj(n) {}

    void add_edge(std::size_t u, std::size_t v, double w = 1.0) {
        if (u >= size || v >= size) throw DomainError("edge endpoint out of range");
        if (u == v) throw DomainError("self-loops not allowed");
        if (w < 0.0) throw DomainError("negative edge weight");
        adj[u].push_back({v, w});
        adj[v].push_back({u, w});
    }

    // Unweighted degree: number of incident edges.
    std::size_t degree(std::size_t i) const { return adj[i].size(); }

    std::size_t edge_count() const {
        std::size_t e = 0;
        for (auto& a : adj) e += a.size();
        return e / 2;
    }
};

// Text format: first line `L E [flags]` where flags may include `weighted`
// and `tree <root>`; then E lines `u v [w]`; `#` starts a comment.
struct GraphFile {
    Graph graph;
    bool is_tree = false;
    std::size_t tree_root = 0;

    WeightedTree as_tree() const;
};

GraphFile read_graph_text(const std::string& path);
void write_graph_text(const std::string& path, const Graph& g);
void write_tree_text(const std::string& path, const WeightedTree& t);

// Grid graph with unit edges between L1-adjacent nodes, ids in grid order.
Graph grid_graph(const TokenGrid& grid);

// Generators; deterministic for fixed seed.
WeightedTree generate_random_tree(std::size_t n, std::uint64_t seed, bool weighted = false);
Graph generate_hypercube(std::size_t d);
Graph generate_erdos_renyi(std::size_t n, double p, std::uint64_t seed);
// ER graph with a cycle motif of `motif_size` nodes attached by one edge.
Graph generate_er_with_motif(std::size_t n, double p, std::size_t motif_size, std::uint64_t seed);
WeightedTree generate_path(std::size_t n);

// Random connected graph (random tree plus extra random edges); test input
// helper used by the diffusion and rwgnk suites.
Graph generate_connected_graph(std::size_t n, double extra_edge_prob, std::uint64_t seed);

}  // namespace topomask
