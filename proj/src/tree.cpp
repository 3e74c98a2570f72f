#include "topomask/tree.hpp"

#include <algorithm>
#include <queue>

namespace topomask {

WeightedTree WeightedTree::from_edges(
    std::size_t n, std::size_t root,
    const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
    if (n == 0) throw DomainError("tree needs at least one node");
    if (root >= n) throw DomainError("tree root out of range");
    if (edges.size() != n - 1) throw DomainError("tree must have exactly L-1 edges");
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
    for (auto& [u, v, w] : edges) {
        if (u >= n || v >= n) throw DomainError("tree edge endpoint out of range");
        if (w < 0.0) throw DomainError("negative edge weight");
        adj[u].push_back({v, w});
        adj[v].push_back({u, w});
    }
    WeightedTree t;
    t.size = n;
    t.root = root;
    t.parent.assign(n, n);  // n = unvisited sentinel
    t.weight.assign(n, 0.0);
    t.children.assign(n, {});
    t.bfs_order.reserve(n);
    std::queue<std::size_t> q;
    q.push(root);
    t.parent[root] = root;
    while (!q.empty()) {
        std::size_t u = q.front();
        q.pop();
        t.bfs_order.push_back(u);
        for (auto [v, w] : adj[u]) {
            if (t.parent[v] != n) continue;
            t.parent[v] = u;
            t.weight[v] = w;
            t.children[u].push_back(v);
            q.push(v);
        }
    }
    if (t.bfs_order.size() != n) throw DomainError("tree edges do not span all nodes");
    return t;
}

bool WeightedTree::unit_weights() const {
    for (std::size_t i = 0; i < size; ++i)
        if (i != root && weight[i] != 1.0) return false;
    return true;
}

std::vector<std::tuple<std::size_t, std::size_t, double>> WeightedTree::edge_list() const {
    std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
    edges.reserve(size - 1);
    for (std::size_t i = 0; i < size; ++i)
        if (i != root) edges.push_back({parent[i], i, weight[i]});
    return edges;
}

WeightedTree WeightedTree::rerooted(std::size_t new_root) const {
    return from_edges(size, new_root, edge_list());
}

DenseMatrix tree_distances(const WeightedTree& tree, std::size_t cap) {
    if (tree.size > cap) throw ResourceError("tree_distances: size exceeds oracle cap");
    const std::size_t n = tree.size;
    DenseMatrix d(n, n);
    // One BFS per source; edge weights are nonnegative and the graph is a
    // tree, so path distances are unique.
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        if (i != tree.root) {
            adj[i].push_back({tree.parent[i], tree.weight[i]});
            adj[tree.parent[i]].push_back({i, tree.weight[i]});
        }
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<char> seen(n, 0);
        std::queue<std::size_t> q;
        q.push(s);
        seen[s] = 1;
        while (!q.empty()) {
            std::size_t u = q.front();
            q.pop();
            for (auto [v, w] : adj[u]) {
                if (seen[v]) continue;
                seen[v] = 1;
                d.at(s, v) = d.at(s, u) + w;
                q.push(v);
            }
        }
    }
    return d;
}

std::vector<std::size_t> tree_hop_distances(const WeightedTree& tree, std::size_t source) {
    const std::size_t n = tree.size;
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        if (i != tree.root) {
            adj[i].push_back(tree.parent[i]);
            adj[tree.parent[i]].push_back(i);
        }
    std::vector<std::size_t> dist(n, n);
    std::queue<std::size_t> q;
    q.push(source);
    dist[source] = 0;
    while (!q.empty()) {
        std::size_t u = q.front();
        q.pop();
        for (auto v : adj[u])
            if (dist[v] == n) {
                dist[v] = dist[u] + 1;
                q.push(v);
            }
    }
    return dist;
}

std::size_t tree_diameter(const WeightedTree& tree) {
    auto d0 = tree_hop_distances(tree, tree.root);
    std::size_t a = static_cast<std::size_t>(
        std::max_element(d0.begin(), d0.end()) - d0.begin());
    auto d1 = tree_hop_distances(tree, a);
    return *std::max_element(d1.begin(), d1.end());
}

}  // namespace topomask
