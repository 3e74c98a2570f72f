#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <variant>
#include <vector>

#include "topomask/errors.hpp"
#include "topomask/grid.hpp"
#include "topomask/tensor.hpp"

namespace topomask {

// Matrix-free mask operators: each variant carries just enough structure to
// compute M*x without materializing M.

struct CausalMask {
    std::size_t length;
};

struct PackingMask {
    std::size_t length;
    // Sorted half-open segments partitioning [0, L).
    std::vector<std::pair<std::size_t, std::size_t>> segments;

    PackingMask(std::size_t L, std::vector<std::pair<std::size_t, std::size_t>> segs);
};

struct PaddingMask {
    std::size_t length;
    std::size_t valid_len;

    PaddingMask(std::size_t L, std::size_t valid);
};

// M[i][j] = xi(i - j); circulant embedding into size P = next power of two
// >= 2L-1, kernel spectrum precomputed at construction.
struct ToeplitzMask {
    std::size_t length;
    std::vector<double> xi;  // 2L-1 entries, offset i-j at index (i-j) + L-1
    std::vector<std::complex<double>> kernel_fft;

    ToeplitzMask(std::size_t L, std::vector<double> xi_table);
};

// M[i][j] = f(dist_grid(i, j)) with L1 grid distance; d-dimensional circulant
// embedding, each axis padded to a power of two >= 2n-1.
struct BlockToeplitzMask {
    TokenGrid grid;
    std::vector<double> f;  // f(0..sum(n_i - 1))
    std::vector<std::size_t> padded;
    std::vector<std::complex<double>> kernel_fft;

    BlockToeplitzMask(TokenGrid g, std::vector<double> f_table);
};

struct LowRankMask {
    DenseMatrix m1;  // L x r
    DenseMatrix m2;  // r x L

    LowRankMask(DenseMatrix a, DenseMatrix b);
};

// Oracle-only dense mask; refuses L above the cap.
struct DenseMask {
    DenseMatrix m;

    explicit DenseMask(DenseMatrix mat, std::size_t cap = 4096);
};

using MaskOperator = std::variant<CausalMask, PackingMask, PaddingMask, ToeplitzMask,
                                  BlockToeplitzMask, LowRankMask, DenseMask>;

std::size_t mask_dim(const MaskOperator& mask);

Vector causal_apply(std::span<const double> x);
Vector packing_apply(const PackingMask& mask, std::span<const double> x);
Vector padding_apply(const PaddingMask& mask, std::span<const double> x);
Vector toeplitz_apply(const ToeplitzMask& mask, std::span<const double> x);
Vector block_toeplitz_apply(const BlockToeplitzMask& mask, std::span<const double> x);
Vector lowrank_apply(const LowRankMask& mask, std::span<const double> x);

Vector mask_apply(const MaskOperator& mask, std::span<const double> x);

// Column-batched apply; columns are independent and may run in parallel.
DenseMatrix mask_apply_matrix(const MaskOperator& mask, const DenseMatrix& x);

// Materializes M densely (oracle); refuses L above the cap.
DenseMatrix mask_materialize(const MaskOperator& mask, std::size_t cap = 4096);

}  // namespace topomask
