#pragma once

#include <cstdint>
#include <span>

#include "topomask/graph.hpp"
#include "topomask/mask.hpp"
#include "topomask/tensor.hpp"

namespace topomask {

enum class GdkVariant { laplacian, normalized_laplacian, neg_adjacency };

GdkVariant gdk_variant_from_name(const std::string& name);
std::string gdk_variant_name(GdkVariant v);

// Action exp(-lambda T) x with T one of {L, L D^-1, -Adj(G)}.
struct GdkSpec {
    const Graph* graph;
    double lambda;
    GdkVariant variant = GdkVariant::laplacian;
    double tol = 1e-10;

    GdkSpec(const Graph& g, double lam, GdkVariant var, double tolerance = 1e-10);
};

// Scaled truncated-Taylor action: the operator is split into 2^s stages so
// each stage's series converges quickly, every step a sparse matvec.
Vector gdk_apply(const GdkSpec& spec, std::span<const double> x);

// Monte-Carlo estimate of exp(-lambda L D^-1) x via Poisson-many steps of the
// natural random walk. Reproducible for fixed (seed, n_walks) regardless of
// thread count (per-(node, walk) derived streams).
Vector gdk_apply_poisson_mc(const GdkSpec& spec, std::span<const double> x,
                            std::size_t n_walks, std::uint64_t seed);

// Closed-form hypercube heat kernel as a d-level block-Toeplitz apply:
// y_i = c * sum_j tanh(lambda)^{hamming(i,j)} x_j with
// c = ((1 + e^{-2 lambda}) / 2)^d, equal to exp(-lambda L) x.
Vector hypercube_gdk_apply(std::size_t d, double lambda, std::span<const double> x);

// The block-Toeplitz operator behind hypercube_gdk_apply (reusable as a mask).
BlockToeplitzMask hypercube_gdk_mask(std::size_t d, double lambda);

}  // namespace topomask
