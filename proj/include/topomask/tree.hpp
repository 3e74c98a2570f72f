#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "topomask/errors.hpp"
#include "topomask/tensor.hpp"

namespace topomask {

// Rooted tree with nonnegative edge weights. weight[i] is the weight of the
// edge (i, parent[i]); the root maps to itself with weight 0. bfs_order lists
// nodes by nondecreasing depth, parents before children.
struct WeightedTree {
    std::size_t size = 0;
    std::size_t root = 0;
    std::vector<std::size_t> parent;
    std::vector<double> weight;
    std::vector<std::vector<std::size_t>> children;
    std::vector<std::size_t> bfs_order;

    // Builds from an undirected edge list (u, v, w); validates connectivity
    // and acyclicity.
    static WeightedTree from_edges(std::size_t n, std::size_t root,
                                   const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges);

    bool unit_weights() const;

    // Same tree re-rooted at new_root.
    WeightedTree rerooted(std::size_t new_root) const;

    std::vector<std::tuple<std::size_t, std::size_t, double>> edge_list() const;
};

// All-pairs shortest-path distances; oracle-only, refuses size > cap.
DenseMatrix tree_distances(const WeightedTree& tree, std::size_t cap = 4096);

// Unweighted (hop-count) diameter via two sweeps: farthest node from an
// arbitrary start, then farthest from that.
std::size_t tree_diameter(const WeightedTree& tree);

// Hop distance of every node from source.
std::vector<std::size_t> tree_hop_distances(const WeightedTree& tree, std::size_t source);

}  // namespace topomask
