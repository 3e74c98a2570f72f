#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "topomask/graph.hpp"
#include "topomask/mask.hpp"
#include "topomask/tensor.hpp"

namespace topomask {

// Discounted visit-frequency features of random walks.
struct RwgnkParams {
    double lambda = 1.0;       // discount in [0, 1]
    double alpha = 0.0;        // l2 renormalization exponent >= 0
    bool fixed_length = true;  // termination mode
    std::size_t tau = 0;       // walk length when fixed_length
    double p = 0.5;            // stopping probability otherwise, in (0, 1)
    std::size_t n_walks = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

// One sparse row per node: node -> accumulated weight, sorted by node id.
struct RwgnkFeatures {
    std::size_t size = 0;
    std::vector<std::vector<std::pair<std::size_t, double>>> rows;

    // Psi(h) . Psi(g).
    double dot(std::size_t h, std::size_t g) const;
    DenseMatrix dense() const;  // L x L row matrix
};

// Monte-Carlo features: mean of n_walks sampled frequency vectors per node,
// then divided by |.|_2^alpha. Per-node derived seeds make the result
// independent of evaluation order.
RwgnkFeatures rwgnk_features(const Graph& graph, const RwgnkParams& params);

// Same, with the per-node stream keyed by node_key(h) instead of h; lets
// relabeled graphs reproduce each node's walks under its original key.
RwgnkFeatures rwgnk_features(const Graph& graph, const RwgnkParams& params,
                             const std::function<std::uint64_t(std::size_t)>& node_key);

// Exact-expectation features (dense), by propagating the walk-length
// distribution; for geometric stopping the series is truncated at n_terms
// and the neglected l1 tail mass is returned through *tail_bound.
DenseMatrix rwgnk_exact_features(const Graph& graph, double lambda, bool fixed_length,
                                 std::size_t tau, double p, double alpha,
                                 std::size_t n_terms = 64, double* tail_bound = nullptr);

// Gram mask M = Psi Psi^T.
MaskOperator rwgnk_mask(const RwgnkFeatures& features);

// Features as `node (neighbor:weight)*` lines.
std::string rwgnk_features_text(const RwgnkFeatures& features);

// Empirical check of the discounted-walk sandwich
// Gamma(rho/d_max Adj) <= K <= Gamma(rho/d_min Adj), rho = (1-p) lambda.
struct SandwichReport {
    DenseMatrix kernel;       // exact-expectation K, alpha = 0, geometric stopping
    DenseMatrix lower;        // truncated Gamma(rho/d_max A)
    DenseMatrix upper;        // truncated Gamma(rho/d_min A)
    double kernel_truncation = 0.0;
    double bound_truncation = 0.0;
    double worst_margin = 0.0;  // min over entries of slack beyond truncation error
    bool upper_available = true;
    bool holds = false;
};

SandwichReport verify_theorem2_sandwich(const Graph& graph, double lambda, double p,
                                        std::size_t n_terms);

}  // namespace topomask
