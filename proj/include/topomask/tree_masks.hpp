#pragma once

#include <span>
#include <variant>
#include <vector>

#include "topomask/tensor.hpp"
#include "topomask/tree.hpp"

namespace topomask {

// Mask entry f(dist) = exp(a * dist + b).
struct ExpAffineParams {
    double a = 0.0;
    double b = 0.0;
};

// Arbitrary f indexed by integer distance 0..D_max (unweighted trees only).
struct DistanceFunctionTable {
    std::vector<double> f;
};

using TreeMaskSpec = std::variant<ExpAffineParams, DistanceFunctionTable>;

// Two-pass dynamic program for exp-affine masks on weighted trees, O(L).
Vector tree_exp_affine_apply(const WeightedTree& tree, const ExpAffineParams& params,
                             std::span<const double> x);

// Distance-histogram dynamic program, O(L * diam), unweighted trees.
Vector tree_general_apply_diam(const WeightedTree& tree, const std::vector<double>& f,
                               std::span<const double> x);

// Balanced-separator divide and conquer with Hankel FFT cross terms,
// O(L log^2 L), unweighted trees.
Vector tree_general_apply_separator(const WeightedTree& tree, const std::vector<double>& f,
                                    std::span<const double> x);

enum class TreeAlgo { exp_affine, diameter, separator };

// Algorithm chosen by tree_mask_apply for the given spec.
TreeAlgo tree_mask_dispatch(const WeightedTree& tree, const TreeMaskSpec& spec);

Vector tree_mask_apply(const WeightedTree& tree, const TreeMaskSpec& spec,
                       std::span<const double> x);

}  // namespace topomask
