#include "topomask/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "topomask/rng.hpp"

namespace topomask {

WeightedTree GraphFile::as_tree() const {
    if (!is_tree) throw DomainError("graph file does not carry the tree flag");
    std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
    for (std::size_t u = 0; u < graph.size; ++u)
        for (auto [v, w] : graph.adj[u])
            if (u < v) edges.push_back({u, v, w});
    return WeightedTree::from_edges(graph.size, tree_root, edges);
}

GraphFile read_graph_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open graph file: " + path);
    auto next_line = [&in](std::string& line) -> bool {
        while (std::getline(in, line)) {
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
        }
        return false;
    };
    std::string line;
    if (!next_line(line)) throw DomainError("empty graph file: " + path);
    std::istringstream head(line);
    std::size_t n = 0, e = 0;
    if (!(head >> n >> e)) throw DomainError("bad graph header in " + path);
    GraphFile gf;
    gf.graph = Graph(n);
    bool weighted = false;
    std::string flag;
    while (head >> flag) {
        if (flag == "weighted") {
            weighted = true;
        } else if (flag == "tree") {
            gf.is_tree = true;
            if (!(head >> gf.tree_root)) throw DomainError("tree flag missing root in " + path);
        } else {
            throw DomainError("unknown graph flag '" + flag + "' in " + path);
        }
    }
    for (std::size_t k = 0; k < e; ++k) {
        if (!next_line(line)) throw DomainError("missing edge lines in " + path);
        std::istringstream es(line);
        std::size_t u, v;
        if (!(es >> u >> v)) throw DomainError("bad edge line in " + path);
        double w = 1.0;
        if (weighted && !(es >> w)) throw DomainError("missing edge weight in " + path);
        gf.graph.add_edge(u, v, w);
    }
    return gf;
}

namespace {
void write_edges(std::ofstream& out, const Graph& g, bool weighted) {
    for (std::size_t u = 0; u < g.size; ++u)
        for (auto [v, w] : g.adj[u])
            if (u < v) {
                out << u << ' ' << v;
                if (weighted) out << ' ' << w;
                out << '\n';
            }
}

bool has_nonunit_weight(const Graph& g) {
    for (auto& a : g.adj)
        for (auto [v, w] : a)
            if (w != 1.0) return true;
    return false;
}
}  // namespace

void write_graph_text(const std::string& path, const Graph& g) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot write graph file: " + path);
    out.precision(17);  // weights must survive the text round trip
    bool weighted = has_nonunit_weight(g);
    out << g.size << ' ' << g.edge_count();
    if (weighted) out << " weighted";
    out << '\n';
    write_edges(out, g, weighted);
}

void write_tree_text(const std::string& path, const WeightedTree& t) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot write tree file: " + path);
    out.precision(17);  // weights must survive the text round trip
    bool weighted = !t.unit_weights();
    out << t.size << ' ' << (t.size - 1);
    if (weighted) out << " weighted";
    out << " tree " << t.root << '\n';
    for (std::size_t i = 0; i < t.size; ++i)
        if (i != t.root) {
            out << t.parent[i] << ' ' << i;
            if (weighted) out << ' ' << t.weight[i];
            out << '\n';
        }
}

Graph grid_graph(const TokenGrid& grid) {
    Graph g(grid.size());
    for (std::size_t id = 0; id < grid.size(); ++id) {
        auto c = grid.coords(id);
        for (std::size_t k = 0; k < grid.ndim(); ++k)
            if (c[k] + 1 < grid.dims[k]) {
                auto c2 = c;
                ++c2[k];
                g.add_edge(id, grid.flat_index(c2));
            }
    }
    return g;
}

WeightedTree generate_random_tree(std::size_t n, std::uint64_t seed, bool weighted) {
    if (n == 0) throw DomainError("tree needs at least one node");
    Rng rng(seed);
    std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
    edges.reserve(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
        std::size_t p = rng.uniform_int(i);
        double w = weighted ? 0.1 + 1.9 * rng.uniform() : 1.0;
        edges.push_back({p, i, w});
    }
    return WeightedTree::from_edges(n, 0, edges);
}

Graph generate_hypercube(std::size_t d) {
    if (d == 0 || d > 24) throw DomainError("hypercube dimension out of range");
    std::size_t n = std::size_t{1} << d;
    Graph g(n);
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t b = 0; b < d; ++b) {
            std::size_t v = u ^ (std::size_t{1} << b);
            if (u < v) g.add_edge(u, v);
        }
    return g;
}

Graph generate_erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
    if (p < 0.0 || p > 1.0) throw DomainError("ER probability must be in [0,1]");
    Rng rng(seed);
    Graph g(n);
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v)
            if (rng.uniform() < p) g.add_edge(u, v);
    return g;
}

Graph generate_er_with_motif(std::size_t n, double p, std::size_t motif_size,
                             std::uint64_t seed) {
    if (motif_size < 3) throw DomainError("motif needs at least 3 nodes");
    if (n == 0) throw DomainError("ER part needs at least one node");
    Rng rng(seed);
    Graph base = generate_erdos_renyi(n, p, rng.derive(0).next_u64());
    Graph g(n + motif_size);
    for (std::size_t u = 0; u < n; ++u)
        for (auto [v, w] : base.adj[u])
            if (u < v) g.add_edge(u, v, w);
    for (std::size_t k = 0; k < motif_size; ++k)
        g.add_edge(n + k, n + (k + 1) % motif_size);
    Rng attach = rng.derive(1);
    g.add_edge(attach.uniform_int(n), n + attach.uniform_int(motif_size));
    return g;
}

WeightedTree generate_path(std::size_t n) {
    if (n == 0) throw DomainError("path needs at least one node");
    std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
    for (std::size_t i = 1; i < n; ++i) edges.push_back({i - 1, i, 1.0});
    return WeightedTree::from_edges(n, 0, edges);
}

Graph generate_connected_graph(std::size_t n, double extra_edge_prob, std::uint64_t seed) {
    Rng rng(seed);
    Graph g(n);
    for (std::size_t i = 1; i < n; ++i) g.add_edge(rng.uniform_int(i), i);
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v) {
            if (rng.uniform() >= extra_edge_prob) continue;
            bool present = false;
            for (auto [x, w] : g.adj[u])
                if (x == v) present = true;
            if (!present) g.add_edge(u, v);
        }
    return g;
}

}  // namespace topomask
