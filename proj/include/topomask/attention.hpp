#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>

#include "topomask/mask.hpp"
#include "topomask/tensor.hpp"

namespace topomask {

// Kernel feature maps phi with K(x, y) = E[phi(x)^T phi(y)].
struct ReluMap {};
struct EluPlus1Map {};
struct SquareMap {};

// Positive random features for the softmax kernel exp(x^T y / sqrt(d_QK)):
// phi(u) = exp(-|u'|^2 / 2) / sqrt(m) * exp(Omega u') with Gaussian Omega and
// u' = u * d_QK^{-1/4}.
struct PositiveSoftmaxRF {
    std::size_t m;
    std::size_t d_qk;
    DenseMatrix omega;  // m x d_qk

    PositiveSoftmaxRF(std::size_t m, std::size_t d_qk, std::uint64_t seed);
};

using FeatureMap = std::variant<ReluMap, EluPlus1Map, SquareMap, PositiveSoftmaxRF>;

// Output dimension for inputs of width d_qk.
std::size_t feature_dim(const FeatureMap& map, std::size_t d_qk);

Vector feature_map_apply(const FeatureMap& map, std::span<const double> u);

// Exact kernel value of the deterministic maps, and the softmax kernel the
// random map approximates.
double kernel_value(const FeatureMap& map, std::span<const double> x, std::span<const double> y);

struct AttentionInputs {
    DenseMatrix q;  // L x d_qk
    DenseMatrix k;  // L x d_qk
    DenseMatrix v;  // L x d

    void validate() const;
};

struct AttentionOptions {
    double norm_epsilon = 1e-12;  // degenerate-row guard
    std::size_t block_cols = 256;  // V^1 column block size
};

// Unmasked fast path: R = D^-1 (Q' ((K')^T V)).
DenseMatrix attention_unmasked(const AttentionInputs& inputs, const FeatureMap& map,
                               const AttentionOptions& opts = {});

// Masked low-rank attention: outer-product rows, two batched mask applies,
// per-token devectorized contraction.
DenseMatrix attention_masked(const AttentionInputs& inputs, const FeatureMap& map,
                             const MaskOperator& mask, const AttentionOptions& opts = {});

// Same, but through an arbitrary column-batched mask action X -> M X.
using MatrixApplier = std::function<DenseMatrix(const DenseMatrix&)>;
DenseMatrix attention_masked(const AttentionInputs& inputs, const FeatureMap& map,
                             const MatrixApplier& apply_mask, std::size_t mask_size,
                             const AttentionOptions& opts = {});

// Dense oracle for softmax attention with a logits mask N (entries <= -1e30
// act as -infinity). Row-max subtraction inside exp for stability.
DenseMatrix dense_softmax_attention(const AttentionInputs& inputs, const DenseMatrix& logits_mask,
                                    std::size_t cap = 4096);

// Dense oracle for kernel attention with Hadamard mask M.
DenseMatrix dense_kernel_attention(const AttentionInputs& inputs, const FeatureMap& map,
                                   const DenseMatrix& mask, std::size_t cap = 4096,
                                   double norm_epsilon = 1e-12);

}  // namespace topomask
