#include "topomask/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <sstream>
#include <tuple>

#include "topomask/errors.hpp"
#include "topomask/mask.hpp"
#include "topomask/parallel.hpp"
#include "topomask/rng.hpp"
#include "topomask/tree.hpp"
#include "topomask/tree_masks.hpp"

namespace topomask {

std::vector<std::string> bench_families() {
    return {"toeplitz", "blocktoeplitz", "causal", "tree-expaffine", "tree-sep"};
}

std::vector<std::size_t> pow2_sweep(std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> sizes;
    for (std::size_t e = lo; e <= hi; ++e) sizes.push_back(std::size_t{1} << e);
    return sizes;
}

namespace {

double checksum_sink = 0.0;  // defeats dead-code elimination of timed applies

// Random tree with locality-bounded parents (each parent within 64 ids), so
// the measured scaling reflects the algorithms rather than DRAM latency.
WeightedTree bench_tree(std::size_t n, Rng& rng) {
    std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
    edges.reserve(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
        std::size_t back = rng.uniform_int(std::min<std::size_t>(i, 64));
        edges.push_back({i - 1 - back, i, 1.0});
    }
    return WeightedTree::from_edges(n, 0, edges);
}

Vector random_vector(std::size_t n, Rng& rng) {
    Vector x(n);
    for (auto& v : x) v = rng.uniform() * 2.0 - 1.0;
    return x;
}

// Per-apply nanoseconds over `reps` measured repetitions; the calibration
// run doubles as the discarded warmup. Short applies are looped so every
// measurement spans at least ~2 ms.
std::vector<double> time_apply(std::size_t reps, const std::function<void()>& apply) {
    using clock = std::chrono::steady_clock;
    auto t0 = clock::now();
    apply();
    double warm_ns =
        double(std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - t0).count());
    std::size_t iters = warm_ns >= 2e6 ? 1 : static_cast<std::size_t>(2e6 / std::max(warm_ns, 50.0)) + 1;
    std::vector<double> out;
    out.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        auto t1 = clock::now();
        for (std::size_t i = 0; i < iters; ++i) apply();
        double ns =
            double(std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - t1).count());
        out.push_back(ns / double(iters));
    }
    return out;
}

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    double pos = q * double(v.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    std::size_t hi = std::min(lo + 1, v.size() - 1);
    double frac = pos - double(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace

std::vector<BenchPoint> run_bench(const std::string& family,
                                  const std::vector<std::size_t>& sizes, std::size_t reps,
                                  std::uint64_t seed) {
    if (reps < 2) throw DomainError("bench needs reps >= 2");
    auto fams = bench_families();
    if (std::find(fams.begin(), fams.end(), family) == fams.end())
        throw DomainError("unknown bench family: " + family);
    std::vector<BenchPoint> points;
    Rng rng(seed);
    for (std::size_t L : sizes) {
        if (L < 2) throw DomainError("bench sizes must be >= 2");
        std::function<void()> apply;
        // Operator setup stays outside the timed region.
        if (family == "causal") {
            auto x = std::make_shared<Vector>(random_vector(L, rng));
            apply = [x] { checksum_sink += causal_apply(*x)[0]; };
        } else if (family == "toeplitz") {
            Vector xi = random_vector(2 * L - 1, rng);
            auto mask = std::make_shared<ToeplitzMask>(L, std::move(xi));
            auto x = std::make_shared<Vector>(random_vector(L, rng));
            apply = [mask, x] { checksum_sink += toeplitz_apply(*mask, *x)[0]; };
        } else if (family == "blocktoeplitz") {
            std::size_t e = 0;
            while ((std::size_t{1} << e) < L) ++e;
            if ((std::size_t{1} << e) != L)
                throw DomainError("blocktoeplitz bench sizes must be powers of two");
            TokenGrid grid({std::size_t{1} << (e / 2), std::size_t{1} << (e - e / 2)});
            Vector f = random_vector(grid.max_distance() + 1, rng);
            auto mask = std::make_shared<BlockToeplitzMask>(std::move(grid), std::move(f));
            auto x = std::make_shared<Vector>(random_vector(L, rng));
            apply = [mask, x] { checksum_sink += block_toeplitz_apply(*mask, *x)[0]; };
        } else if (family == "tree-expaffine") {
            auto tree = std::make_shared<WeightedTree>(bench_tree(L, rng));
            auto x = std::make_shared<Vector>(random_vector(L, rng));
            ExpAffineParams params{-0.3, 0.1};
            apply = [tree, x, params] {
                checksum_sink += tree_exp_affine_apply(*tree, params, *x)[0];
            };
        } else {  // tree-sep
            auto tree = std::make_shared<WeightedTree>(bench_tree(L, rng));
            auto x = std::make_shared<Vector>(random_vector(L, rng));
            std::size_t diam = tree_diameter(*tree);
            auto f = std::make_shared<Vector>(diam + 1);
            for (std::size_t z = 0; z <= diam; ++z)
                (*f)[z] = 1.0 / (1.0 + static_cast<double>(z));
            apply = [tree, x, f] {
                checksum_sink += tree_general_apply_separator(*tree, *f, *x)[0];
            };
        }
        std::vector<double> samples = time_apply(reps, apply);
        BenchPoint p;
        p.family = family;
        p.length = L;
        p.median_ns = quantile(samples, 0.5);
        p.p10_ns = quantile(samples, 0.1);
        p.p90_ns = quantile(samples, 0.9);
        points.push_back(p);
    }
    return points;
}

double loglog_slope(const std::vector<BenchPoint>& points) {
    if (points.size() < 2) throw DomainError("slope fit needs at least two sizes");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double n = double(points.size());
    for (const auto& p : points) {
        double x = std::log2(double(p.length));
        double y = std::log2(p.median_ns);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string bench_csv(const std::vector<BenchPoint>& points) {
    std::ostringstream out;
    out << "# threads=" << thread_count() << "\n";
    out << "family,L,median_ns,p10_ns,p90_ns\n";
    out.precision(1);
    out << std::fixed;
    for (const auto& p : points)
        out << p.family << ',' << p.length << ',' << p.median_ns << ',' << p.p10_ns << ','
            << p.p90_ns << "\n";
    return out.str();
}

}  // namespace topomask
