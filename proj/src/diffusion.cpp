#include "topomask/diffusion.hpp"

#include <cmath>

#include "topomask/parallel.hpp"
#include "topomask/rng.hpp"

namespace topomask {

GdkVariant gdk_variant_from_name(const std::string& name) {
    if (name == "laplacian") return GdkVariant::laplacian;
    if (name == "normalized_laplacian") return GdkVariant::normalized_laplacian;
    if (name == "neg_adjacency") return GdkVariant::neg_adjacency;
    throw DomainError("unknown GDK variant: " + name);
}

std::string gdk_variant_name(GdkVariant v) {
    switch (v) {
        case GdkVariant::laplacian: return "laplacian";
        case GdkVariant::normalized_laplacian: return "normalized_laplacian";
        default: return "neg_adjacency";
    }
}

GdkSpec::GdkSpec(const Graph& g, double lam, GdkVariant var, double tolerance)
    : graph(&g), lambda(lam), variant(var), tol(tolerance) {
    if (!(lam > 0.0) || !std::isfinite(lam)) throw DomainError("lambda must be finite and > 0");
    if (!(tolerance > 0.0) || tolerance > 1e-2) throw DomainError("tol must be in (0, 1e-2]");
}

namespace {

// CSR form of T.
struct SparseOp {
    std::size_t n;
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> col;
    std::vector<double> val;

    Vector apply(std::span<const double> x) const {
        Vector y(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += val[k] * x[col[k]];
            y[i] = acc;
        }
        return y;
    }

    double inf_norm() const {
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += std::fabs(val[k]);
            best = std::max(best, acc);
        }
        return best;
    }
};

SparseOp build_operator(const Graph& g, GdkVariant variant) {
    SparseOp op;
    op.n = g.size;
    op.row_ptr.assign(g.size + 1, 0);
    // Zero-degree columns of L D^-1 are defined as zero (isolated nodes do
    // not interact).
    for (std::size_t i = 0; i < g.size; ++i) {
        std::size_t nnz = g.adj[i].size();
        if (variant != GdkVariant::neg_adjacency && nnz > 0) ++nnz;  // diagonal
        op.row_ptr[i + 1] = op.row_ptr[i] + nnz;
    }
    op.col.resize(op.row_ptr.back());
    op.val.resize(op.row_ptr.back());
    for (std::size_t i = 0; i < g.size; ++i) {
        std::size_t k = op.row_ptr[i];
        if (variant != GdkVariant::neg_adjacency && !g.adj[i].empty()) {
            op.col[k] = i;
            op.val[k] = variant == GdkVariant::laplacian
                            ? static_cast<double>(g.degree(i))
                            : 1.0;  // (L D^-1)_{ii} = deg(i)/deg(i)
            ++k;
        }
        for (auto [j, w] : g.adj[i]) {
            op.col[k] = j;
            switch (variant) {
                case GdkVariant::laplacian: op.val[k] = -w; break;
                case GdkVariant::normalized_laplacian:
                    op.val[k] = -w / static_cast<double>(g.degree(j));
                    break;
                case GdkVariant::neg_adjacency: op.val[k] = -w; break;
            }
            ++k;
        }
    }
    return op;
}

constexpr double kMagnitudeCeiling = 1e150;

double norm2(const Vector& v) {
    double acc = 0.0;
    for (double z : v) acc += z * z;
    return std::sqrt(acc);
}

}  // namespace

Vector gdk_apply(const GdkSpec& spec, std::span<const double> x) {
    const Graph& g = *spec.graph;
    if (x.size() != g.size) throw DomainError("gdk_apply: length mismatch");
    SparseOp op = build_operator(g, spec.variant);
    double scaled_norm = spec.lambda * op.inf_norm();
    std::size_t s = 0;
    while ((double(std::size_t{1} << s)) < scaled_norm && s < 60) ++s;
    const double stage_coeff = -spec.lambda / static_cast<double>(std::size_t{1} << s);
    const std::size_t stages = std::size_t{1} << s;

    Vector z(x.begin(), x.end());
    for (std::size_t stage = 0; stage < stages; ++stage) {
        Vector acc = z;
        Vector term = std::move(z);
        double acc_norm = norm2(acc);
        for (std::size_t k = 1; k <= 400; ++k) {
            Vector tv = op.apply(term);
            double c = stage_coeff / static_cast<double>(k);
            for (std::size_t i = 0; i < tv.size(); ++i) tv[i] *= c;
            term = std::move(tv);
            double tn = norm2(term);
            if (!std::isfinite(tn) || tn > kMagnitudeCeiling)
                throw NumericError("gdk_apply: series term overflow (|term| = " +
                                   std::to_string(tn) + ")");
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += term[i];
            acc_norm = norm2(acc);
            if (tn <= spec.tol * acc_norm) break;
        }
        if (!std::isfinite(acc_norm) || acc_norm > kMagnitudeCeiling)
            throw NumericError("gdk_apply: accumulated magnitude overflow");
        z = std::move(acc);
    }
    return z;
}

Vector gdk_apply_poisson_mc(const GdkSpec& spec, std::span<const double> x,
                            std::size_t n_walks, std::uint64_t seed) {
    const Graph& g = *spec.graph;
    if (spec.variant != GdkVariant::normalized_laplacian)
        throw DomainError("Poisson MC estimator is defined for the normalized Laplacian");
    if (x.size() != g.size) throw DomainError("gdk_apply_poisson_mc: length mismatch");
    if (n_walks == 0) throw DomainError("n_walks must be >= 1");
    for (std::size_t i = 0; i < g.size; ++i)
        if (g.degree(i) == 0)
            throw DomainError("random walk undefined: isolated node " + std::to_string(i));
    // exp(-lambda L D^-1) = e^-lambda * sum_i (lambda^i / i!) (Adj D^-1)^i:
    // mass x_j propagates along a walk of Poisson(lambda)-many uniform steps.
    Rng base(seed);
    std::vector<Vector> partial(g.size, Vector());
    parallel_for(g.size, [&](std::size_t start) {
        Vector acc(g.size, 0.0);
        Rng node_rng = base.derive(start);
        for (std::size_t w = 0; w < n_walks; ++w) {
            Rng rng = node_rng.derive(w);
            std::uint64_t steps = rng.poisson(spec.lambda);
            std::size_t node = start;
            for (std::uint64_t s = 0; s < steps; ++s)
                node = g.adj[node][rng.uniform_int(g.adj[node].size())].first;
            acc[node] += x[start];
        }
        partial[start] = std::move(acc);
    });
    Vector y(g.size, 0.0);
    for (auto& p : partial)
        for (std::size_t i = 0; i < g.size; ++i) y[i] += p[i];
    double inv = 1.0 / static_cast<double>(n_walks);
    for (auto& v : y) v *= inv;
    return y;
}

BlockToeplitzMask hypercube_gdk_mask(std::size_t d, double lambda) {
    if (d == 0) throw DomainError("hypercube dimension must be >= 1");
    double th = std::tanh(lambda);
    double c = std::pow((1.0 + std::exp(-2.0 * lambda)) / 2.0, static_cast<double>(d));
    std::vector<double> f(d + 1);
    f[0] = c;
    for (std::size_t z = 1; z <= d; ++z) f[z] = f[z - 1] * th;
    return BlockToeplitzMask(TokenGrid(std::vector<std::size_t>(d, 2)), std::move(f));
}

Vector hypercube_gdk_apply(std::size_t d, double lambda, std::span<const double> x) {
    if (x.size() != (std::size_t{1} << d))
        throw DomainError("hypercube_gdk_apply: |x| must be 2^d");
    BlockToeplitzMask mask = hypercube_gdk_mask(d, lambda);
    return block_toeplitz_apply(mask, x);
}

}  // namespace topomask
