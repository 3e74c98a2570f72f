#include "topomask/mask.hpp"

#include <algorithm>
#include <cmath>

#include "topomask/fft.hpp"
#include "topomask/parallel.hpp"

namespace topomask {

PackingMask::PackingMask(std::size_t L, std::vector<std::pair<std::size_t, std::size_t>> segs)
    : length(L), segments(std::move(segs)) {
    std::sort(segments.begin(), segments.end());
    std::size_t cursor = 0;
    for (auto [start, end] : segments) {
        if (start != cursor || end <= start) throw DomainError("packing segments must partition [0,L)");
        cursor = end;
    }
    if (cursor != length) throw DomainError("packing segments must cover [0,L)");
}

PaddingMask::PaddingMask(std::size_t L, std::size_t valid) : length(L), valid_len(valid) {
    if (valid_len > length) throw DomainError("padding valid_len exceeds L");
}

ToeplitzMask::ToeplitzMask(std::size_t L, std::vector<double> xi_table)
    : length(L), xi(std::move(xi_table)) {
    if (L == 0) throw DomainError("toeplitz mask needs L >= 1");
    if (xi.size() != 2 * L - 1) throw DomainError("toeplitz table must have 2L-1 entries");
    for (double v : xi)
        if (!std::isfinite(v)) throw DomainError("non-finite toeplitz table entry");
    std::size_t p = next_pow2(2 * L - 1);
    std::vector<cplx> c(p);
    for (std::size_t k = 0; k < L; ++k) c[k] = xi[k + L - 1];
    for (std::size_t k = 1; k < L; ++k) c[p - k] = xi[L - 1 - k];
    fft(c, false);
    kernel_fft = std::move(c);
}

BlockToeplitzMask::BlockToeplitzMask(TokenGrid g, std::vector<double> f_table)
    : grid(std::move(g)), f(std::move(f_table)) {
    if (f.size() < grid.max_distance() + 1)
        throw DomainError("distance table shorter than max grid distance + 1");
    padded.resize(grid.ndim());
    std::size_t total = 1;
    for (std::size_t k = 0; k < grid.ndim(); ++k) {
        padded[k] = next_pow2(2 * grid.dims[k] - 1);
        total *= padded[k];
    }
    // Kernel tensor of the multilevel circulant embedding: entry at padded
    // coordinates c is f(sum of per-axis offsets), zero in the dead zone.
    std::vector<cplx> kernel(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        std::size_t delta = 0;
        bool alive = true;
        for (std::size_t k = 0; k < grid.ndim(); ++k) {
            std::size_t c = rem % padded[k];
            rem /= padded[k];
            if (c < grid.dims[k]) {
                delta += c;
            } else if (padded[k] - c < grid.dims[k]) {
                delta += padded[k] - c;
            } else {
                alive = false;
                break;
            }
        }
        if (alive) kernel[idx] = f[delta];
    }
    // Forward ND transform: 1D FFT along each axis.
    std::size_t stride = 1;
    for (std::size_t k = 0; k < grid.ndim(); ++k) {
        std::size_t len = padded[k];
        if (len > 1) {
            std::vector<cplx> line(len);
            std::size_t block = stride * len;
            for (std::size_t base = 0; base < total; base += block)
                for (std::size_t off = 0; off < stride; ++off) {
                    for (std::size_t j = 0; j < len; ++j) line[j] = kernel[base + off + j * stride];
                    fft(line, false);
                    for (std::size_t j = 0; j < len; ++j) kernel[base + off + j * stride] = line[j];
                }
        }
        stride *= len;
    }
    kernel_fft = std::move(kernel);
}

LowRankMask::LowRankMask(DenseMatrix a, DenseMatrix b) : m1(std::move(a)), m2(std::move(b)) {
    if (m1.cols != m2.rows || m1.rows != m2.cols)
        throw DomainError("low-rank factors must be L x r and r x L");
}

DenseMask::DenseMask(DenseMatrix mat, std::size_t cap) : m(std::move(mat)) {
    if (m.rows != m.cols) throw DomainError("dense mask must be square");
    if (m.rows > cap) throw ResourceError("dense mask exceeds oracle cap");
}

std::size_t mask_dim(const MaskOperator& mask) {
    return std::visit(
        [](const auto& m) -> std::size_t {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, CausalMask> || std::is_same_v<T, PackingMask> ||
                          std::is_same_v<T, PaddingMask> || std::is_same_v<T, ToeplitzMask>)
                return m.length;
            else if constexpr (std::is_same_v<T, BlockToeplitzMask>)
                return m.grid.size();
            else if constexpr (std::is_same_v<T, LowRankMask>)
                return m.m1.rows;
            else
                return m.m.rows;
        },
        mask);
}

Vector causal_apply(std::span<const double> x) {
    Vector y(x.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += x[i];
        y[i] = acc;
    }
    return y;
}

Vector packing_apply(const PackingMask& mask, std::span<const double> x) {
    if (x.size() != mask.length) throw DomainError("packing_apply: length mismatch");
    Vector y(x.size());
    for (auto [start, end] : mask.segments) {
        double acc = 0.0;
        for (std::size_t i = start; i < end; ++i) acc += x[i];
        for (std::size_t i = start; i < end; ++i) y[i] = acc;
    }
    return y;
}

Vector padding_apply(const PaddingMask& mask, std::span<const double> x) {
    if (x.size() != mask.length) throw DomainError("padding_apply: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < mask.valid_len; ++i) acc += x[i];
    Vector y(x.size(), 0.0);
    for (std::size_t i = 0; i < mask.valid_len; ++i) y[i] = acc;
    return y;
}

Vector toeplitz_apply(const ToeplitzMask& mask, std::span<const double> x) {
    if (x.size() != mask.length) throw DomainError("toeplitz_apply: length mismatch");
    const std::size_t L = mask.length;
    const std::size_t p = mask.kernel_fft.size();
    std::vector<cplx> buf(p);
    for (std::size_t i = 0; i < L; ++i) buf[i] = x[i];
    fft(buf, false);
    for (std::size_t i = 0; i < p; ++i) buf[i] *= mask.kernel_fft[i];
    fft(buf, true);
    Vector y(L);
    for (std::size_t i = 0; i < L; ++i) y[i] = buf[i].real();
#ifdef TOPOMASK_NEGATIVE_CONTROL
    // Deliberate corruption used to check that the verification suites catch
    // a broken operator.
    if (!y.empty()) y[0] += 1e-3 * (std::fabs(y[0]) + 1.0);
#endif
    return y;
}

Vector block_toeplitz_apply(const BlockToeplitzMask& mask, std::span<const double> x) {
    const TokenGrid& grid = mask.grid;
    if (x.size() != grid.size()) throw DomainError("block_toeplitz_apply: length mismatch");
    const std::size_t d = grid.ndim();
    std::size_t total = 1;
    for (auto p : mask.padded) total *= p;
    std::vector<cplx> buf(total);
    // Embed x (grid layout, axis 1 innermost) into the padded tensor.
    for (std::size_t id = 0; id < x.size(); ++id) {
        std::size_t rem = id, pidx = 0, stride = 1;
        for (std::size_t k = 0; k < d; ++k) {
            pidx += (rem % grid.dims[k]) * stride;
            rem /= grid.dims[k];
            stride *= mask.padded[k];
        }
        buf[pidx] = x[id];
    }
    auto nd_fft = [&](bool inverse) {
        std::size_t stride = 1;
        for (std::size_t k = 0; k < d; ++k) {
            std::size_t len = mask.padded[k];
            if (len > 1) {
                std::vector<cplx> line(len);
                std::size_t block = stride * len;
                for (std::size_t base = 0; base < total; base += block)
                    for (std::size_t off = 0; off < stride; ++off) {
                        for (std::size_t j = 0; j < len; ++j) line[j] = buf[base + off + j * stride];
                        fft(line, inverse);
                        for (std::size_t j = 0; j < len; ++j) buf[base + off + j * stride] = line[j];
                    }
            }
            stride *= len;
        }
    };
    nd_fft(false);
    for (std::size_t i = 0; i < total; ++i) buf[i] *= mask.kernel_fft[i];
    nd_fft(true);
    Vector y(x.size());
    for (std::size_t id = 0; id < y.size(); ++id) {
        std::size_t rem = id, pidx = 0, stride = 1;
        for (std::size_t k = 0; k < d; ++k) {
            pidx += (rem % grid.dims[k]) * stride;
            rem /= grid.dims[k];
            stride *= mask.padded[k];
        }
        y[id] = buf[pidx].real();
    }
    return y;
}

Vector lowrank_apply(const LowRankMask& mask, std::span<const double> x) {
    if (x.size() != mask.m2.cols) throw DomainError("lowrank_apply: length mismatch");
    Vector inner = matvec(mask.m2, x);
    return matvec(mask.m1, inner);
}

Vector mask_apply(const MaskOperator& mask, std::span<const double> x) {
    if (x.size() != mask_dim(mask)) throw DomainError("mask_apply: length mismatch");
    return std::visit(
        [&](const auto& m) -> Vector {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, CausalMask>)
                return causal_apply(x);
            else if constexpr (std::is_same_v<T, PackingMask>)
                return packing_apply(m, x);
            else if constexpr (std::is_same_v<T, PaddingMask>)
                return padding_apply(m, x);
            else if constexpr (std::is_same_v<T, ToeplitzMask>)
                return toeplitz_apply(m, x);
            else if constexpr (std::is_same_v<T, BlockToeplitzMask>)
                return block_toeplitz_apply(m, x);
            else if constexpr (std::is_same_v<T, LowRankMask>)
                return lowrank_apply(m, x);
            else
                return matvec(m.m, x);
        },
        mask);
}

DenseMatrix mask_apply_matrix(const MaskOperator& mask, const DenseMatrix& x) {
    if (x.rows != mask_dim(mask)) throw DomainError("mask_apply_matrix: shape mismatch");
    DenseMatrix y(x.rows, x.cols);
    parallel_for(x.cols, [&](std::size_t j) {
        Vector col = x.col(j);
        Vector out = mask_apply(mask, col);
        for (std::size_t i = 0; i < x.rows; ++i) y.at(i, j) = out[i];
    });
    return y;
}

DenseMatrix mask_materialize(const MaskOperator& mask, std::size_t cap) {
    std::size_t n = mask_dim(mask);
    if (n > cap) throw ResourceError("mask_materialize: L exceeds oracle cap");
    DenseMatrix m(n, n);
    std::visit(
        [&](const auto& op) {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, CausalMask>) {
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j <= i; ++j) m.at(i, j) = 1.0;
            } else if constexpr (std::is_same_v<T, PackingMask>) {
                for (auto [start, end] : op.segments)
                    for (std::size_t i = start; i < end; ++i)
                        for (std::size_t j = start; j < end; ++j) m.at(i, j) = 1.0;
            } else if constexpr (std::is_same_v<T, PaddingMask>) {
                for (std::size_t i = 0; i < op.valid_len; ++i)
                    for (std::size_t j = 0; j < op.valid_len; ++j) m.at(i, j) = 1.0;
            } else if constexpr (std::is_same_v<T, ToeplitzMask>) {
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j)
                        m.at(i, j) = op.xi[i + n - 1 - j];
            } else if constexpr (std::is_same_v<T, BlockToeplitzMask>) {
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j)
                        m.at(i, j) = op.f[op.grid.distance(i, j)];
            } else if constexpr (std::is_same_v<T, LowRankMask>) {
                m = matmul(op.m1, op.m2);
            } else {
                m = op.m;
            }
        },
        mask);
    return m;
}

}  // namespace topomask
