#include "topomask/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

#include "topomask/attention.hpp"
#include "topomask/bench.hpp"
#include "topomask/diffusion.hpp"
#include "topomask/graph.hpp"
#include "topomask/mask.hpp"
#include "topomask/rng.hpp"
#include "topomask/rwgnk.hpp"
#include "topomask/tensor.hpp"
#include "topomask/tree.hpp"
#include "topomask/tree_masks.hpp"

namespace topomask {

bool VerifyReport::all_pass() const {
    for (const auto& r : results)
        if (!r.pass) return false;
    return !results.empty();
}

std::string VerifyReport::text() const {
    std::ostringstream out;
    out.precision(3);
    out << std::scientific;
    for (const auto& r : results)
        out << r.name << ' ' << r.instances << ' ' << r.max_error << ' '
            << (r.pass ? "PASS" : "FAIL") << '\n';
    return out.str();
}

std::vector<std::string> verify_suites() {
    return {"structured", "trees", "diffusion", "rwgnk", "attention"};
}

namespace {

Vector random_vector(std::size_t n, Rng& rng, double lo = -1.0, double hi = 1.0) {
    Vector x(n);
    for (auto& v : x) v = lo + (hi - lo) * rng.uniform();
    return x;
}

DenseMatrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double lo = -1.0,
                          double hi = 1.0) {
    DenseMatrix m(r, c);
    for (auto& v : m.data) v = lo + (hi - lo) * rng.uniform();
    return m;
}

double max_abs(std::span<const double> a, std::span<const double> b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::fabs(a[i] - b[i]));
    return worst;
}

// Random structured mask of the given variant tag; mask values kept positive
// when `positive` so attention normalizers stay away from zero.
MaskOperator random_mask(const std::string& variant, std::size_t L, Rng& rng, bool positive) {
    if (variant == "causal") return CausalMask{L};
    if (variant == "packing") {
        std::vector<std::pair<std::size_t, std::size_t>> segs;
        std::size_t start = 0;
        while (start < L) {
            std::size_t len = 1 + rng.uniform_int(std::min<std::size_t>(L - start, 16));
            segs.push_back({start, start + len});
            start += len;
        }
        return PackingMask(L, std::move(segs));
    }
    if (variant == "padding") return PaddingMask(L, 1 + rng.uniform_int(L));
    if (variant == "toeplitz") {
        Vector xi = random_vector(2 * L - 1, rng);
        if (positive)
            for (auto& v : xi) v = std::exp(v);
        return ToeplitzMask(L, std::move(xi));
    }
    if (variant == "blocktoeplitz") {
        std::vector<std::size_t> dims;
        std::size_t total = 1;
        std::size_t ndim = 1 + rng.uniform_int(3);
        for (std::size_t k = 0; k < ndim; ++k) {
            std::size_t n = 2 + rng.uniform_int(7);
            if (total * n > L) break;
            dims.push_back(n);
            total *= n;
        }
        if (dims.empty()) dims.push_back(std::max<std::size_t>(1, L));
        TokenGrid grid(dims);
        Vector f = random_vector(grid.max_distance() + 1, rng);
        if (positive)
            for (auto& v : f) v = std::exp(v);
        return BlockToeplitzMask(std::move(grid), std::move(f));
    }
    if (variant == "lowrank") {
        std::size_t r = 1 + rng.uniform_int(8);
        double lo = positive ? 0.05 : -1.0;
        return LowRankMask(random_matrix(L, r, rng, lo, 1.0), random_matrix(r, L, rng, lo, 1.0));
    }
    if (variant == "dense") {
        double lo = positive ? 0.05 : -1.0;
        return DenseMask(random_matrix(L, L, rng, lo, 1.0));
    }
    throw DomainError("random_mask: unknown variant " + variant);
}

PropertyResult check_tensorfile_roundtrip(Rng rng) {
    PropertyResult r{"core.tensorfile-roundtrip", 20, 0.0, false};
    auto dir = std::filesystem::temp_directory_path();
    auto p1 = (dir / "topomask_rt_a.bin").string();
    auto p2 = (dir / "topomask_rt_b.bin").string();
    double worst = 0.0;
    for (std::size_t inst = 0; inst < r.instances; ++inst) {
        Tensor t;
        std::size_t ndim = 1 + rng.uniform_int(3);
        for (std::size_t k = 0; k < ndim; ++k)
            t.dims.push_back(1 + static_cast<std::uint32_t>(rng.uniform_int(9)));
        t.data = random_vector(t.total(), rng);
        write_tensor(p1, t);
        write_tensor(p2, read_tensor(p1));
        std::ifstream a(p1, std::ios::binary), b(p2, std::ios::binary);
        std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
        std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
        if (sa.empty() || sa != sb) worst += 1.0;
    }
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
    r.max_error = worst;
    r.pass = worst == 0.0;
    return r;
}

PropertyResult check_grid_bijection(Rng rng) {
    PropertyResult r{"core.grid-index-bijection", 20, 0.0, false};
    double bad = 0.0;
    for (std::size_t inst = 0; inst < r.instances; ++inst) {
        std::vector<std::size_t> dims;
        std::size_t ndim = 1 + rng.uniform_int(4);
        for (std::size_t k = 0; k < ndim; ++k) dims.push_back(1 + rng.uniform_int(6));
        TokenGrid grid(dims);
        for (std::size_t id = 0; id < grid.size(); ++id)
            if (grid.flat_index(grid.coords(id)) != id) bad += 1.0;
    }
    r.max_error = bad;
    r.pass = bad == 0.0;
    return r;
}

PropertyResult check_tree_distances(Rng rng) {
    PropertyResult r{"core.tree-distances-dijkstra", 100, 0.0, false};
    double worst = 0.0;
    for (std::size_t inst = 0; inst < r.instances; ++inst) {
        std::size_t n = 2 + rng.uniform_int(80);
        WeightedTree tree = generate_random_tree(n, rng.next_u64(), /*weighted=*/true);
        DenseMatrix d = tree_distances(tree);
        // Dijkstra from every source on the tree's edge list.
        std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
        for (auto [u, v, w] : tree.edge_list()) {
            adj[u].push_back({v, w});
            adj[v].push_back({u, w});
        }
        for (std::size_t s = 0; s < n; ++s) {
            std::vector<double> dist(n, std::numeric_limits<double>::infinity());
            dist[s] = 0.0;
            using Item = std::pair<double, std::size_t>;
            std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
            heap.push({0.0, s});
            while (!heap.empty()) {
                auto [du, u] = heap.top();
                heap.pop();
                if (du > dist[u]) continue;
                for (auto [v, w] : adj[u])
                    if (du + w < dist[v]) {
                        dist[v] = du + w;
                        heap.push({dist[v], v});
                    }
            }
            for (std::size_t v = 0; v < n; ++v)
                worst = std::max(worst,
                                 std::fabs(d.at(s, v) - dist[v]) / (std::fabs(dist[v]) + 1e-30));
        }
    }
    r.max_error = worst;
    r.pass = worst <= 1e-12;
    return r;
}

PropertyResult check_structured_oracle(Rng rng) {
    const std::vector<std::string> variants = {"causal",        "packing", "padding", "toeplitz",
                                              "blocktoeplitz", "lowrank", "dense"};
    PropertyResult r{"structured.oracle-equivalence", 200 * variants.size(), 0.0, false};
    double worst = 0.0;
    for (const auto& variant : variants) {
        for (std::size_t inst = 0; inst < 200; ++inst) {
            std::size_t L = 1 + rng.uniform_int(512);
            MaskOperator mask = random_mask(variant, L, rng, /*positive=*/false);
            L = mask_dim(mask);
            Vector x = random_vector(L, rng);
            Vector fast = mask_apply(mask, x);
            Vector dense = matvec(mask_materialize(mask), x);
            worst = std::max(worst, rel_error(fast, dense));
        }
    }
    r.max_error = worst;
    r.pass = worst <= 1e-10;
    return r;
}

PropertyResult check_structured_linearity(Rng rng) {
    const std::vector<std::string> variants = {"causal",        "packing", "padding", "toeplitz",
                                              "blocktoeplitz", "lowrank", "dense"};
    PropertyResult r{"structured.linearity", 10 * variants.size(), 0.0, false};
    double worst = 0.0;
    for (const auto& variant : variants)
        for (std::size_t inst = 0; inst < 10; ++inst) {
            MaskOperator mask = random_mask(variant, 1 + rng.uniform_int(256), rng, false);
            std::size_t L = mask_dim(mask);
            Vector x = random_vector(L, rng), z = random_vector(L, rng);
            double alpha = rng.uniform() * 4.0 - 2.0, beta = rng.uniform() * 4.0 - 2.0;
            Vector mix(L);
            for (std::size_t i = 0; i < L; ++i) mix[i] = alpha * x[i] + beta * z[i];
            Vector lhs = mask_apply(mask, mix);
            Vector ax = mask_apply(mask, x), az = mask_apply(mask, z);
            Vector rhs(L);
            for (std::size_t i = 0; i < L; ++i) rhs[i] = alpha * ax[i] + beta * az[i];
            worst = std::max(worst, rel_error(lhs, rhs));
        }
    r.max_error = worst;
    r.pass = worst <= 1e-12;
    return r;
}

PropertyResult check_structured_symmetry(Rng rng) {
    PropertyResult r{"structured.symmetry", 60, 0.0, false};
    double worst = 0.0;
    for (std::size_t inst = 0; inst < r.instances; ++inst) {
        std::size_t which = inst % 3;
        std::size_t L = 2 + rng.uniform_int(256);
        MaskOperator mask = CausalMask{1};
        if (which == 0) {
            Vector xi = random_vector(2 * L - 1, rng);
            for (std::size_t k = 0; k < L - 1; ++k) xi[L - 1 - (k + 1)] = xi[L - 1 + (k + 1)];
            mask = ToeplitzMask(L, std::move(xi));
        } else if (which == 1) {
            mask = random_mask("blocktoeplitz", L, rng, false);
        } else {
            std::size_t rk = 1 + rng.uniform_int(6);
            DenseMatrix m1 = random_matrix(L, rk, rng);
            DenseMatrix m2(rk, L);
            for (std::size_t i = 0; i < L; ++i)
                for (std::size_t j = 0; j < rk; ++j) m2.at(j, i) = m1.at(i, j);
            mask = LowRankMask(std::move(m1), std::move(m2));
        }
        std::size_t n = mask_dim(mask);
        Vector x = random_vector(n, rng), z = random_vector(n, rng);
        Vector az = mask_apply(mask, z), ax = mask_apply(mask, x);
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            lhs += x[i] * az[i];
            rhs += z[i] * ax[i];
        }
        worst = std::max(worst, std::fabs(lhs - rhs) / (std::fabs(rhs) + 1e-30));
    }
    r.max_error = worst;
    r.pass = worst <= 1e-10;
    return r;
}

PropertyResult check_structured_slope(Rng rng) {
    PropertyResult r{"structured.toeplitz-complexity-slope", 9, 0.0, false};
    auto points = run_bench("toeplitz", pow2_sweep(12, 20), 3, rng.next_u64());
    double slope = loglog_slope(points);
    r.max_error = slope;
    r.pass = slope >= 0.9 && slope <= 1.3;
    return r;
}

// Dense tree-mask oracle: M[i][j] = f(hop distance).
Vector dense_tree_apply(const WeightedTree& tree, const std::vector<double>& f,
                        std::span<const double> x) {
    Vector y(tree.size, 0.0);
    for (std::size_t i = 0; i < tree.size; ++i) {
        auto hops = tree_hop_distances(tree, i);
        double acc = 0.0;
        for (std::size_t j = 0; j < tree.size; ++j) acc += f[hops[j]] * x[j];
        y[i] = acc;
    }
    return y;
}

PropertyResult check_trees_agree(Rng rng) {
    PropertyResult r{"trees.algorithms-agree", 100, 0.0, false};
    double worst = 0.0;
    for (std::size_t inst = 0; inst < r.instances; ++inst) {
        std::size_t n = 2 + rng.uniform_int(255);
        WeightedTree tree = generate_random_tree(n, rng.next_u64(), /*weighted=*/false);
        double a = -1.5 * rng.uniform() - 0.05, b = rng.uniform() - 0.5;
        std::size_t diam = tree_diameter(tree);
        std::vector<double> f(diam + 1);
        for (std::size_t z = 0; z <= diam; ++z) f[z] = std::exp(a * double(z) + b);
        Vector x = random_vector(n, rng);
        Vector ya = tree_exp_affine_apply(tree, {a, b}, x);
        Vector yd = tree_general_apply_diam(tree, f, x);
        Vector ys = tree_general_apply_separator(tree, f, x);
        Vector yo = dense_tree_apply(tree, f, x);
        worst = std::max({worst, rel_error(ya, yo), rel_error(yd, yo), rel_error(ys, yo),
                          rel_error(ya, yd), rel_error(yd, ys)});
    }
    r.max_error = worst;
    r.pass = worst <= 1e-8;
    return r;
}

PropertyResult check_trees_path_toeplitz(Rng rng) {
    PropertyResult r{"trees.path-equals-toeplitz", 20, 0.0, false};
    double worst = 0.0;
    for (std::size_t inst = 0; inst < r.instances; ++inst) {
        std::size_t n = 2 + rng.uniform_int(511);
        WeightedTree path = generate_path(n);
        double a = -rng.uniform() - 0.05, b = rng.uniform() - 0.5;
        Vector xi(2 * n - 1);
        for (std::size_t k = 0; k < xi.size(); ++k) {
            double delta = std::fabs(double(k) - double(n - 1));
            xi[k] = std::exp(a * delta + b);
        }
        ToeplitzMask mask(n, std::move(xi));
        Vector x = random_vector(n, rng);
        worst = std::max(worst,
                         rel_error(tree_exp_affine_apply(path, {a, b}, x), toeplitz_apply(mask, x)));
    }
    r.max_error = worst;
    r.pass = worst <= 1e-10;
    return r;
}

PropertyResult check_trees_reroot(Rng rng) {
    PropertyResult r{"trees.reroot-invariance", 30, 0.0, false};
    double worst = 0.0;
    for (std::size_t inst = 0; inst < r.instances; ++inst) {
        std::size_t n = 2 + rng.uniform_int(200);
        bool expaffine = inst % 2 == 0;
        WeightedTree tree = generate_random_tree(n, rng.next_u64(), /*weighted=*/expaffine);
        WeightedTree moved = tree.rerooted(rng.uniform_int(n));
        Vector x = random_vector(n, rng);
        if (expaffine) {
            ExpAffineParams params{-0.7, 0.2};
            worst = std::max(worst, rel_error(tree_exp_affine_apply(tree, params, x),
                                              tree_exp_affine_apply(moved, params, x)));
        } else {
            std::size_t diam = tree_diameter(tree);
            std::vector<double> f = random_vector(diam + 1, rng);
            worst = std::max(worst, rel_error(tree_general_apply_diam(tree, f, x),
                                              tree_general_apply_diam(moved, f, x)));
            worst = std::max(worst, rel_error(tree_general_apply_separator(tree, f, x),
                                              tree_general_apply_separator(moved, f, x)));
        }
    }
    r.max_error = worst;
    r.pass = worst <= 1e-9;
    return r;
}

PropertyResult check_trees_diameter(Rng rng) {
    PropertyResult r{"trees.diameter-bruteforce", 30, 0.0, false};
    double bad = 0.0;
    for (std::size_t inst = 0; inst < r.instances; ++inst) {
        std::size_t n = 1 + rng.uniform_int(512);
        WeightedTree tree = generate_random_tree(n, rng.next_u64(), false);
        std::size_t brute = 0;
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t h : tree_hop_distances(tree, s)) brute = std::max(brute, h);
        if (tree_diameter(tree) != brute) bad += 1.0;
    }
    r.max_error = bad;
    r.pass = bad == 0.0;
    return r;
}

PropertyResult check_gdk_mass(Rng rng) {
    PropertyResult r{"diffusion.mass-conservation", 50, 0.0, false};
    double worst = 0.0;
    for (std::size_t inst = 0; inst < r.instances; ++inst) {
        std::size_t n = 3 + rng.uniform_int(60);
        Graph g = generate_connected_graph(n, 0.15, rng.next_u64());
        Vector x = random_vector(n, rng);
        Vector y = gdk_apply(GdkSpec(g, 0.2 + rng.uniform() * 2.0,
                                     GdkVariant::normalized_laplacian, 1e-12),
                             x);
        double sx = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sx += x[i];
            sy += y[i];
        }
        worst = std::max(worst, std::fabs(sx - sy) / (std::fabs(sx) + 1e-30));
    }
    r.max_error = worst;
    r.pass = worst <= 1e-9;
    return r;
}

PropertyResult check_gdk_positivity(Rng rng) {
    PropertyResult r{"diffusion.positivity", 50, 0.0, false};
    double worst = 0.0;
    for (std::size_t inst = 0; inst < r.instances; ++inst) {
        std::size_t n = 3 + rng.uniform_int(60);
        Graph g = generate_connected_graph(n, 0.15, rng.next_u64());
        Vector x = random_vector(n, rng, 0.0, 1.0);
        GdkVariant var = inst % 2 == 0 ? GdkVariant::laplacian : GdkVariant::normalized_laplacian;
        Vector y = gdk_apply(GdkSpec(g, 0.2 + rng.uniform() * 2.0, var, 1e-12), x);
        for (double v : y) worst = std::max(worst, -v);
    }
    r.max_error = std::max(0.0, worst);
    r.pass = worst <= 1e-12;
    return r;
}

PropertyResult check_gdk_symmetry(Rng rng) {
    PropertyResult r{"diffusion.laplacian-symmetry", 30, 0.0, false};
    double worst = 0.0;
    for (std::size_t inst = 0; inst < r.instances; ++inst) {
        std::size_t n = 3 + rng.uniform_int(50);
        Graph g = generate_connected_graph(n, 0.2, rng.next_u64());
        GdkSpec spec(g, 0.3 + rng.uniform(), GdkVariant::laplacian, 1e-12);
        Vector x = random_vector(n, rng), z = random_vector(n, rng);
        Vector az = gdk_apply(spec, z), ax = gdk_apply(spec, x);
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            lhs += x[i] * az[i];
            rhs += z[i] * ax[i];
        }
        worst = std::max(worst, std::fabs(lhs - rhs) / (std::fabs(rhs) + 1e-30));
    }
    r.max_error = worst;
    r.pass = worst <= 1e-9;
    return r;
}

PropertyResult check_gdk_semigroup(Rng rng) {
    PropertyResult r{"diffusion.semigroup", 30, 0.0, false};
    double worst = 0.0;
    const GdkVariant variants[3] = {GdkVariant::laplacian, GdkVariant::normalized_laplacian,
                                    GdkVariant::neg_adjacency};
    for (std::size_t inst = 0; inst < r.instances; ++inst) {
        std::size_t n = 3 + rng.uniform_int(40);
        Graph g = generate_connected_graph(n, 0.15, rng.next_u64());
        GdkVariant var = variants[inst % 3];
        double l1 = 0.1 + 0.3 * rng.uniform(), l2 = 0.1 + 0.3 * rng.uniform();
        Vector x = random_vector(n, rng);
        Vector two = gdk_apply(GdkSpec(g, l1, var, 1e-12),
                               gdk_apply(GdkSpec(g, l2, var, 1e-12), x));
        Vector one = gdk_apply(GdkSpec(g, l1 + l2, var, 1e-12), x);
        worst = std::max(worst, rel_error(two, one));
    }
    r.max_error = worst;
    r.pass = worst <= 1e-7;
    return r;
}

PropertyResult check_gdk_hypercube(Rng rng) {
    PropertyResult r{"diffusion.hypercube-closed-form", 8, 0.0, false};
    double worst = 0.0;
    for (std::size_t d = 1; d <= 8; ++d) {
        Graph cube = generate_hypercube(d);
        double lambda = 0.2 + rng.uniform();
        Vector x = random_vector(std::size_t{1} << d, rng);
        Vector closed = hypercube_gdk_apply(d, lambda, x);
        Vector taylor = gdk_apply(GdkSpec(cube, lambda, GdkVariant::laplacian, 1e-12), x);
        worst = std::max(worst, rel_error(closed, taylor));
    }
    r.max_error = worst;
    r.pass = worst <= 1e-8;
    return r;
}

PropertyResult check_rwgnk_psd(Rng rng) {
    PropertyResult r{"rwgnk.gram-psd", 30, 0.0, false};
    double worst = 0.0;
    for (std::size_t inst = 0; inst < r.instances; ++inst) {
        std::size_t n = 3 + rng.uniform_int(20);
        Graph g = generate_connected_graph(n, 0.2, rng.next_u64());
        RwgnkParams params;
        params.lambda = rng.uniform();
        params.alpha = inst % 2 == 0 ? 0.0 : 1.0;
        params.fixed_length = true;
        params.tau = 1 + rng.uniform_int(5);
        params.n_walks = 8;
        params.seed = rng.next_u64();
        RwgnkFeatures feats = rwgnk_features(g, params);
        // Symmetry of the Gram entries.
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                worst = std::max(worst, std::fabs(feats.dot(i, j) - feats.dot(j, i)));
        // Nonnegative quadratic form through the low-rank mask action.
        MaskOperator mask = rwgnk_mask(feats);
        for (std::size_t t = 0; t < 5; ++t) {
            Vector z = random_vector(n, rng);
            Vector kz = mask_apply(mask, z);
            double quad = 0.0;
            for (std::size_t i = 0; i < n; ++i) quad += z[i] * kz[i];
            worst = std::max(worst, -quad);
        }
    }
    r.max_error = std::max(0.0, worst);
    r.pass = worst <= 1e-12;
    return r;
}

PropertyResult check_rwgnk_mc(Rng rng) {
    PropertyResult r{"rwgnk.exact-matches-mc", 50, 0.0, false};
    // Statistic: per-entry deviation of the seed-averaged MC features from the
    // exact expectation, in units of 4 standard errors (<= 1 passes).
    std::size_t n = 6;
    Graph g = generate_connected_graph(n, 0.3, 1234);
    double lambda = 0.6;
    std::size_t tau = 3;
    DenseMatrix exact = rwgnk_exact_features(g, lambda, true, tau, 0.0, 0.0);
    const std::size_t seeds = 50, walks = 200;
    std::vector<DenseMatrix> samples;
    for (std::size_t s = 0; s < seeds; ++s) {
        RwgnkParams params;
        params.lambda = lambda;
        params.alpha = 0.0;
        params.fixed_length = true;
        params.tau = tau;
        params.n_walks = walks;
        params.seed = rng.next_u64();
        samples.push_back(rwgnk_features(g, params).dense());
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double mean = 0.0;
            for (const auto& s : samples) mean += s.at(i, j);
            mean /= double(seeds);
            double var = 0.0;
            for (const auto& s : samples) {
                double d = s.at(i, j) - mean;
                var += d * d;
            }
            var /= double(seeds - 1);
            double se = std::sqrt(var / double(seeds));
            double dev = std::fabs(mean - exact.at(i, j));
            if (se == 0.0) {
                if (dev != 0.0) worst = std::max(worst, 1e9);
            } else {
                worst = std::max(worst, dev / (4.0 * se));
            }
        }
    r.max_error = worst;
    r.pass = worst <= 1.0;
    return r;
}

PropertyResult check_rwgnk_sandwich(Rng rng) {
    PropertyResult r{"rwgnk.theorem-sandwich", 50, 0.0, false};
    double worst = 0.0;
    bool all_hold = true;
    for (std::size_t inst = 0; inst < r.instances; ++inst) {
        std::size_t n = 3 + rng.uniform_int(18);
        Graph g = generate_connected_graph(n, 0.25, rng.next_u64());
        // rho * sigma / d_max <= rho < 1, so the lower series always converges.
        SandwichReport rep = verify_theorem2_sandwich(g, 0.5, 0.5, 64);
        if (!rep.holds) all_hold = false;
        worst = std::max(worst, -rep.worst_margin);
    }
    r.max_error = std::max(0.0, worst);
    r.pass = all_hold;
    return r;
}

PropertyResult check_rwgnk_permutation(Rng rng) {
    PropertyResult r{"rwgnk.permutation-equivariance", 20, 0.0, false};
    // lambda = 1/2 and tau = 6 keep every accumulated value an exact dyadic
    // rational, so the permuted computation must agree bitwise.
    double worst = 0.0;
    for (std::size_t inst = 0; inst < r.instances; ++inst) {
        std::size_t n = 3 + rng.uniform_int(10);
        Graph g = generate_connected_graph(n, 0.3, rng.next_u64());
        std::vector<std::size_t> perm(n);
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.uniform_int(i)]);
        Graph gp(n);
        gp.adj.assign(n, {});
        for (std::size_t u = 0; u < n; ++u)
            for (auto [v, w] : g.adj[u]) gp.adj[perm[u]].push_back({perm[v], w});
        gp.size = n;
        RwgnkParams params;
        params.lambda = 0.5;
        params.alpha = 0.0;
        params.fixed_length = true;
        params.tau = 6;
        params.n_walks = 4;
        params.seed = rng.next_u64();
        // Original graph, but each node's stream keyed by its permuted id, so
        // node h and node perm[h] replay the same walks.
        RwgnkFeatures f1 = rwgnk_features(
            g, params, [&](std::size_t h) { return std::uint64_t(perm[h]); });
        RwgnkFeatures f2 = rwgnk_features(gp, params);
        DenseMatrix d1 = f1.dense(), d2 = f2.dense();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                worst = std::max(worst, std::fabs(d1.at(i, j) - d2.at(perm[i], perm[j])));
    }
    r.max_error = worst;
    r.pass = worst == 0.0;
    return r;
}

PropertyResult check_attention_oracle(Rng rng) {
    const std::vector<std::string> variants = {"causal",        "packing", "padding", "toeplitz",
                                              "blocktoeplitz", "lowrank", "dense"};
    PropertyResult r{"attention.oracle-equivalence", 50 * variants.size(), 0.0, false};
    const FeatureMap maps[3] = {ReluMap{}, EluPlus1Map{}, SquareMap{}};
    double worst = 0.0;
    for (const auto& variant : variants)
        for (std::size_t inst = 0; inst < 50; ++inst) {
            std::size_t L = 1 + rng.uniform_int(128);
            MaskOperator mask = random_mask(variant, L, rng, /*positive=*/true);
            L = mask_dim(mask);
            const FeatureMap& map = maps[inst % 3];
            AttentionInputs in{random_matrix(L, 6, rng), random_matrix(L, 6, rng),
                               random_matrix(L, 4, rng)};
            DenseMatrix fast, oracle;
            bool fast_degenerate = false, oracle_degenerate = false;
            std::size_t fast_row = 0, oracle_row = 0;
            try {
                fast = attention_masked(in, map, mask);
            } catch (const DegenerateRowError& e) {
                fast_degenerate = true;
                fast_row = e.row();
            }
            try {
                oracle = dense_kernel_attention(in, map, mask_materialize(mask));
            } catch (const DegenerateRowError& e) {
                oracle_degenerate = true;
                oracle_row = e.row();
            }
            if (fast_degenerate || oracle_degenerate) {
                // Both routes must reject the same degenerate row.
                if (!(fast_degenerate && oracle_degenerate && fast_row == oracle_row))
                    worst = std::max(worst, 1e9);
                continue;
            }
            worst = std::max(worst, rel_error(fast.data, oracle.data));
        }
    r.max_error = worst;
    r.pass = worst <= 1e-8;
    return r;
}

PropertyResult check_attention_rows(Rng rng) {
    PropertyResult r{"attention.row-stochasticity", 50, 0.0, false};
    double worst = 0.0;
    for (std::size_t inst = 0; inst < r.instances; ++inst) {
        std::size_t L = 2 + rng.uniform_int(96);
        MaskOperator mask = inst % 2 == 0 ? MaskOperator(CausalMask{L})
                                          : random_mask("toeplitz", L, rng, /*positive=*/true);
        AttentionInputs in{random_matrix(L, 6, rng), random_matrix(L, 6, rng),
                           random_matrix(L, 4, rng)};
        DenseMatrix out = attention_masked(in, EluPlus1Map{}, mask);
        for (std::size_t b = 0; b < in.v.cols; ++b) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (std::size_t i = 0; i < L; ++i) {
                lo = std::min(lo, in.v.at(i, b));
                hi = std::max(hi, in.v.at(i, b));
            }
            for (std::size_t i = 0; i < L; ++i) {
                worst = std::max(worst, lo - out.at(i, b));
                worst = std::max(worst, out.at(i, b) - hi);
            }
        }
    }
    r.max_error = std::max(0.0, worst);
    r.pass = worst <= 1e-9;
    return r;
}

PropertyResult check_attention_rf(Rng rng) {
    PropertyResult r{"attention.rf-consistency", 80, 0.0, false};
    const std::size_t L = 24, d_qk = 8, d = 4, seeds = 20;
    const std::size_t ms[4] = {64, 256, 1024, 4096};
    // One positive Toeplitz mask shared across the sweep; its log is the
    // additive logits mask of the softmax oracle.
    Vector xi = random_vector(2 * L - 1, rng, -1.0, 1.0);
    for (auto& v : xi) v = std::exp(v);
    MaskOperator mask = ToeplitzMask(L, xi);
    DenseMatrix logits(L, L);
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = 0; j < L; ++j) logits.at(i, j) = std::log(xi[i + L - 1 - j]);
    AttentionInputs in{random_matrix(L, d_qk, rng), random_matrix(L, d_qk, rng),
                       random_matrix(L, d, rng)};
    DenseMatrix target = dense_softmax_attention(in, logits);
    std::vector<double> medians;
    for (std::size_t m : ms) {
        std::vector<double> errs;
        for (std::size_t s = 0; s < seeds; ++s) {
            PositiveSoftmaxRF map(m, d_qk, rng.next_u64());
            DenseMatrix out = attention_masked(in, FeatureMap(std::move(map)), mask);
            double mse = 0.0;
            for (std::size_t k = 0; k < out.data.size(); ++k) {
                double dlt = out.data[k] - target.data[k];
                mse += dlt * dlt;
            }
            errs.push_back(mse / double(out.data.size()));
        }
        std::sort(errs.begin(), errs.end());
        medians.push_back(0.5 * (errs[seeds / 2 - 1] + errs[seeds / 2]));
    }
    double worst_ratio = 0.0;
    for (std::size_t k = 0; k + 1 < medians.size(); ++k)
        worst_ratio = std::max(worst_ratio, medians[k + 1] / medians[k]);
    r.max_error = worst_ratio;  // < 1 means monotone decreasing
    r.pass = worst_ratio < 1.0;
    return r;
}

PropertyResult check_attention_blocks(Rng rng) {
    PropertyResult r{"attention.block-independence", 20, 0.0, false};
    double worst = 0.0;
    for (std::size_t inst = 0; inst < r.instances; ++inst) {
        std::size_t L = 2 + rng.uniform_int(64);
        MaskOperator mask = random_mask("toeplitz", L, rng, /*positive=*/true);
        AttentionInputs in{random_matrix(L, 5, rng), random_matrix(L, 5, rng),
                           random_matrix(L, 3, rng)};
        AttentionOptions o1, o2, o3;
        o1.block_cols = 1;
        o2.block_cols = in.v.cols;
        o3.block_cols = 5 * in.v.cols;
        DenseMatrix a = attention_masked(in, EluPlus1Map{}, mask, o1);
        DenseMatrix b = attention_masked(in, EluPlus1Map{}, mask, o2);
        DenseMatrix c = attention_masked(in, EluPlus1Map{}, mask, o3);
        worst = std::max({worst, max_abs(a.data, b.data), max_abs(b.data, c.data)});
    }
    r.max_error = worst;
    r.pass = worst <= 1e-13;
    return r;
}

}  // namespace

VerifyReport run_verify(const std::string& suite, std::uint64_t seed) {
    auto suites = verify_suites();
    bool all = suite == "all";
    if (!all && std::find(suites.begin(), suites.end(), suite) == suites.end())
        throw DomainError("unknown verify suite: " + suite);
    Rng rng(seed);
    VerifyReport rep;
    auto want = [&](const std::string& s) { return all || suite == s; };
    if (want("structured")) {
        rep.results.push_back(check_tensorfile_roundtrip(rng.derive(1)));
        rep.results.push_back(check_grid_bijection(rng.derive(2)));
        rep.results.push_back(check_tree_distances(rng.derive(3)));
        rep.results.push_back(check_structured_oracle(rng.derive(4)));
        rep.results.push_back(check_structured_linearity(rng.derive(5)));
        rep.results.push_back(check_structured_symmetry(rng.derive(6)));
        rep.results.push_back(check_structured_slope(rng.derive(7)));
    }
    if (want("trees")) {
        rep.results.push_back(check_trees_agree(rng.derive(10)));
        rep.results.push_back(check_trees_path_toeplitz(rng.derive(11)));
        rep.results.push_back(check_trees_reroot(rng.derive(12)));
        rep.results.push_back(check_trees_diameter(rng.derive(13)));
    }
    if (want("diffusion")) {
        rep.results.push_back(check_gdk_mass(rng.derive(20)));
        rep.results.push_back(check_gdk_positivity(rng.derive(21)));
        rep.results.push_back(check_gdk_symmetry(rng.derive(22)));
        rep.results.push_back(check_gdk_semigroup(rng.derive(23)));
        rep.results.push_back(check_gdk_hypercube(rng.derive(24)));
    }
    if (want("rwgnk")) {
        rep.results.push_back(check_rwgnk_psd(rng.derive(30)));
        rep.results.push_back(check_rwgnk_mc(rng.derive(31)));
        rep.results.push_back(check_rwgnk_sandwich(rng.derive(32)));
        rep.results.push_back(check_rwgnk_permutation(rng.derive(33)));
    }
    if (want("attention")) {
        rep.results.push_back(check_attention_oracle(rng.derive(40)));
        rep.results.push_back(check_attention_rows(rng.derive(41)));
        rep.results.push_back(check_attention_rf(rng.derive(42)));
        rep.results.push_back(check_attention_blocks(rng.derive(43)));
    }
    return rep;
}

}  // namespace topomask
