#include "topomask/tree_masks.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "topomask/fft.hpp"

namespace topomask {

Vector tree_exp_affine_apply(const WeightedTree& tree, const ExpAffineParams& params,
                             std::span<const double> x) {
    if (x.size() != tree.size) throw DomainError("tree_exp_affine_apply: length mismatch");
    if (!std::isfinite(params.a) || !std::isfinite(params.b))
        throw DomainError("exp-affine parameters must be finite");
    const std::size_t n = tree.size;
    const double eb = std::exp(params.b);
    // Bottom-up: s_i = e^b x_i + sum over children c of e^{a W(c)} s_c.
    Vector s(n);
    for (std::size_t k = n; k-- > 0;) {
        std::size_t i = tree.bfs_order[k];
        double acc = eb * x[i];
        for (std::size_t c : tree.children[i]) acc += std::exp(params.a * tree.weight[c]) * s[c];
        s[i] = acc;
    }
    // Top-down: w_root = s_root, w_i = e^{aW} w_p + (1 - e^{2aW}) s_i.
    Vector w(n);
    for (std::size_t i : tree.bfs_order) {
        if (i == tree.root) {
            w[i] = s[i];
        } else {
            double ew = std::exp(params.a * tree.weight[i]);
            w[i] = ew * w[tree.parent[i]] + (1.0 - ew * ew) * s[i];
        }
    }
    return w;
}

namespace {

void require_unit_tree(const WeightedTree& tree, const char* who) {
    if (!tree.unit_weights())
        throw DomainError(std::string(who) + ": tree must have unit edge weights");
}

void require_f_covers(const std::vector<double>& f, std::size_t diam, const char* who) {
    if (f.size() < diam + 1)
        throw DomainError(std::string(who) + ": distance table shorter than diameter + 1");
}

}  // namespace

Vector tree_general_apply_diam(const WeightedTree& tree, const std::vector<double>& f,
                               std::span<const double> x) {
    if (x.size() != tree.size) throw DomainError("tree_general_apply_diam: length mismatch");
    require_unit_tree(tree, "tree_general_apply_diam");
    const std::size_t n = tree.size;
    const std::size_t diam = tree_diameter(tree);
    require_f_covers(f, diam, "tree_general_apply_diam");
    const std::size_t len = diam + 1;
    // g_i[l] = sum of x over subtree nodes at distance l below i.
    std::vector<Vector> g(n);
    for (std::size_t k = n; k-- > 0;) {
        std::size_t i = tree.bfs_order[k];
        g[i].assign(len, 0.0);
        g[i][0] = x[i];
        for (std::size_t c : tree.children[i])
            for (std::size_t l = 1; l < len; ++l) g[i][l] += g[c][l - 1];
    }
    // h_i[l] = sum of x over all nodes at distance l from i;
    // h_i = g_i + circ(h_parent - circ(g_i)) with circ shifting indices up.
    Vector w(n);
    std::vector<Vector> h(n);
    std::vector<std::size_t> pending(n);
    for (std::size_t i = 0; i < n; ++i) pending[i] = tree.children[i].size();
    for (std::size_t i : tree.bfs_order) {
        if (i == tree.root) {
            h[i] = g[i];
        } else {
            const Vector& hp = h[tree.parent[i]];
            Vector hi(len);
            hi[0] = g[i][0];
            for (std::size_t l = 1; l < len; ++l)
                hi[l] = g[i][l] + hp[l - 1] - (l >= 2 ? g[i][l - 2] : 0.0);
            h[i] = std::move(hi);
            if (--pending[tree.parent[i]] == 0) {
                h[tree.parent[i]].clear();
                h[tree.parent[i]].shrink_to_fit();
            }
        }
        double acc = 0.0;
        for (std::size_t l = 0; l < len; ++l) acc += f[l] * h[i][l];
        w[i] = acc;
    }
    return w;
}

namespace {

// Local subtree for the separator recursion: adjacency over ids 0..n-1.
struct LocalTree {
    std::vector<std::vector<std::size_t>> adj;
    Vector x;

    std::size_t size() const { return x.size(); }
};

// u[delta-1] = sum_{e=1..E} f[delta+e] * y[e-1] for delta = 1..d_max,
// the Hankel cross-term products, via one FFT convolution.
Vector hankel_cross(const std::vector<double>& f, const Vector& y, std::size_t d_max) {
    Vector u(d_max, 0.0);
    const std::size_t e_max = y.size();
    if (e_max == 0 || d_max == 0) return u;
    std::vector<double> a(d_max + e_max - 1);
    for (std::size_t t = 0; t < a.size(); ++t) a[t] = f[t + 2];
    std::vector<double> b(e_max);
    for (std::size_t t = 0; t < e_max; ++t) b[t] = y[e_max - 1 - t];
    std::vector<double> c = convolve(a, b);
    for (std::size_t delta = 1; delta <= d_max; ++delta) u[delta - 1] = c[delta + e_max - 2];
    return u;
}

// Recursive split at a half-balanced two-vertex separator. Returns
// s_i = sum_j f(dist(i,j)) x_j over the local tree.
Vector separator_recurse(const LocalTree& t, const std::vector<double>& f) {
    const std::size_t n = t.size();
    if (n == 1) return {f[0] * t.x[0]};
    if (n == 2)
        return {f[0] * t.x[0] + f[1] * t.x[1], f[1] * t.x[0] + f[0] * t.x[1]};

    // BFS from vertex 0 fixes the deterministic ordering used for all
    // tie-breaking below.
    std::vector<std::size_t> order, parent(n, n), bfs_index(n, n);
    order.reserve(n);
    {
        std::queue<std::size_t> q;
        q.push(0);
        parent[0] = 0;
        while (!q.empty()) {
            std::size_t u = q.front();
            q.pop();
            bfs_index[u] = order.size();
            order.push_back(u);
            for (std::size_t v : t.adj[u])
                if (parent[v] == n) {
                    parent[v] = u;
                    q.push(v);
                }
        }
    }
    std::vector<std::size_t> sub(n, 1);
    for (std::size_t k = n; k-- > 1;) sub[parent[order[k]]] += sub[order[k]];

    // Centroid: minimizes the largest component left by its removal.
    std::size_t centroid = 0, best = n;
    for (std::size_t u : order) {
        std::size_t worst = n - sub[u];
        for (std::size_t v : t.adj[u])
            if (parent[v] == u) worst = std::max(worst, sub[v]);
        if (worst < best) {
            best = worst;
            centroid = u;
        }
    }
    // Second separator vertex: centroid's neighbor in its largest component.
    std::size_t mate = t.adj[centroid][0], mate_size = 0;
    for (std::size_t v : t.adj[centroid]) {
        std::size_t comp = (parent[centroid] == v) ? n - sub[centroid] : sub[v];
        if (comp > mate_size) {
            mate_size = comp;
            mate = v;
        }
    }

    // Components of the tree minus {centroid, mate}, each labelled with the
    // separator vertex it hangs off, ordered by first BFS index.
    struct Component {
        std::vector<std::size_t> verts;
        std::size_t anchor;  // centroid or mate
        std::size_t first_bfs;
    };
    std::vector<Component> comps;
    {
        std::vector<char> seen(n, 0);
        seen[centroid] = seen[mate] = 1;
        for (std::size_t start : order) {
            if (seen[start]) continue;
            Component comp;
            comp.anchor = n;
            comp.first_bfs = bfs_index[start];
            std::queue<std::size_t> q;
            q.push(start);
            seen[start] = 1;
            while (!q.empty()) {
                std::size_t u = q.front();
                q.pop();
                comp.verts.push_back(u);
                for (std::size_t v : t.adj[u]) {
                    if (v == centroid || v == mate) {
                        comp.anchor = v;
                    } else if (!seen[v]) {
                        seen[v] = 1;
                        q.push(v);
                    }
                }
            }
            comps.push_back(std::move(comp));
        }
    }

    // Split into subtrees T1, T2 sharing exactly one vertex `shared`, with
    // both sides a constant fraction of n.
    std::size_t n_c = 0, n_m = 0;
    for (auto& comp : comps) (comp.anchor == centroid ? n_c : n_m) += comp.verts.size();
    std::size_t heavy = n_c >= n_m ? centroid : mate;
    std::size_t light = heavy == centroid ? mate : centroid;
    std::size_t n_light = std::min(n_c, n_m);

    std::vector<char> in_t1(n, 0);
    std::size_t shared;
    if (10 * n_light >= n) {
        // Light side plus its anchor vs everything else; the anchor of the
        // light side is the shared vertex.
        shared = light;
        for (auto& comp : comps)
            if (comp.anchor == light)
                for (std::size_t u : comp.verts) in_t1[u] = 1;
        in_t1[light] = 1;
    } else {
        // Degenerate light side: peel heavy-anchored components (each at most
        // n/2 by the centroid property) until the prefix reaches 2n/5.
        shared = heavy;
        std::size_t cum = 0;
        for (auto& comp : comps) {
            if (comp.anchor != heavy) continue;
            for (std::size_t u : comp.verts) in_t1[u] = 1;
            cum += comp.verts.size();
            if (5 * cum >= 2 * n) break;
        }
        in_t1[heavy] = 1;
    }

    // Build both subproblems; `shared` belongs to both.
    auto build = [&](bool first) {
        LocalTree sub_tree;
        std::vector<std::size_t> ids;
        std::vector<std::size_t> local(n, n);
        for (std::size_t u : order) {
            bool member = (u == shared) || (in_t1[u] == (first ? 1 : 0));
            if (!member) continue;
            local[u] = ids.size();
            ids.push_back(u);
        }
        sub_tree.adj.resize(ids.size());
        sub_tree.x.resize(ids.size());
        for (std::size_t li = 0; li < ids.size(); ++li) {
            std::size_t u = ids[li];
            sub_tree.x[li] = t.x[u];
            for (std::size_t v : t.adj[u])
                if (local[v] != n) sub_tree.adj[li].push_back(local[v]);
        }
        return std::pair{std::move(sub_tree), std::move(ids)};
    };
    auto [t1, ids1] = build(true);
    auto [t2, ids2] = build(false);

    Vector s1 = separator_recurse(t1, f);
    Vector s2 = separator_recurse(t2, f);

    // Distances from the shared vertex inside each subtree.
    auto local_depths = [&](const LocalTree& lt, std::size_t src) {
        std::vector<std::size_t> dist(lt.size(), lt.size());
        std::queue<std::size_t> q;
        q.push(src);
        dist[src] = 0;
        while (!q.empty()) {
            std::size_t u = q.front();
            q.pop();
            for (std::size_t v : lt.adj[u])
                if (dist[v] == lt.size()) {
                    dist[v] = dist[u] + 1;
                    q.push(v);
                }
        }
        return dist;
    };
    std::size_t shared1 = n, shared2 = n;
    for (std::size_t li = 0; li < ids1.size(); ++li)
        if (ids1[li] == shared) shared1 = li;
    for (std::size_t li = 0; li < ids2.size(); ++li)
        if (ids2[li] == shared) shared2 = li;
    auto d1 = local_depths(t1, shared1);
    auto d2 = local_depths(t2, shared2);
    std::size_t dmax1 = 0, dmax2 = 0;
    for (auto d : d1) dmax1 = std::max(dmax1, d);
    for (auto d : d2) dmax2 = std::max(dmax2, d);

    // Distance-from-shared aggregates, distance 1 upward (the shared vertex
    // itself is covered by both recursive calls).
    Vector y1(dmax1, 0.0), y2(dmax2, 0.0);
    for (std::size_t li = 0; li < t1.size(); ++li)
        if (d1[li] > 0) y1[d1[li] - 1] += t1.x[li];
    for (std::size_t li = 0; li < t2.size(); ++li)
        if (d2[li] > 0) y2[d2[li] - 1] += t2.x[li];

    Vector cross_from_2 = hankel_cross(f, y2, dmax1);  // consumed by T1 vertices
    Vector cross_from_1 = hankel_cross(f, y1, dmax2);  // consumed by T2 vertices

    Vector s(n, 0.0);
    for (std::size_t li = 0; li < ids1.size(); ++li) {
        s[ids1[li]] += s1[li];
        if (d1[li] > 0) s[ids1[li]] += cross_from_2[d1[li] - 1];
    }
    for (std::size_t li = 0; li < ids2.size(); ++li) {
        s[ids2[li]] += s2[li];
        if (d2[li] > 0) s[ids2[li]] += cross_from_1[d2[li] - 1];
    }
    // The shared vertex was counted by both recursive calls at distance 0.
    s[shared] -= f[0] * t.x[shared];
    return s;
}

}  // namespace

Vector tree_general_apply_separator(const WeightedTree& tree, const std::vector<double>& f,
                                    std::span<const double> x) {
    if (x.size() != tree.size) throw DomainError("tree_general_apply_separator: length mismatch");
    require_unit_tree(tree, "tree_general_apply_separator");
    require_f_covers(f, tree_diameter(tree), "tree_general_apply_separator");
    LocalTree t;
    t.adj.resize(tree.size);
    t.x.assign(x.begin(), x.end());
    for (std::size_t i = 0; i < tree.size; ++i)
        if (i != tree.root) {
            t.adj[i].push_back(tree.parent[i]);
            t.adj[tree.parent[i]].push_back(i);
        }
    return separator_recurse(t, f);
}

TreeAlgo tree_mask_dispatch(const WeightedTree& tree, const TreeMaskSpec& spec) {
    if (std::holds_alternative<ExpAffineParams>(spec)) return TreeAlgo::exp_affine;
    if (!tree.unit_weights())
        throw DomainError("general distance tables require an unweighted tree");
    std::size_t diam = tree_diameter(tree);
    double log_l = std::log2(static_cast<double>(std::max<std::size_t>(tree.size, 2)));
    return (static_cast<double>(diam + 1) <= log_l * log_l) ? TreeAlgo::diameter
                                                            : TreeAlgo::separator;
}

Vector tree_mask_apply(const WeightedTree& tree, const TreeMaskSpec& spec,
                       std::span<const double> x) {
    switch (tree_mask_dispatch(tree, spec)) {
        case TreeAlgo::exp_affine:
            return tree_exp_affine_apply(tree, std::get<ExpAffineParams>(spec), x);
        case TreeAlgo::diameter:
            return tree_general_apply_diam(tree, std::get<DistanceFunctionTable>(spec).f, x);
        case TreeAlgo::separator:
        default:
            return tree_general_apply_separator(tree, std::get<DistanceFunctionTable>(spec).f, x);
    }
}

}  // namespace topomask
