#include "topomask/attention.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "topomask/rng.hpp"

namespace topomask {

PositiveSoftmaxRF::PositiveSoftmaxRF(std::size_t m_, std::size_t d_qk_, std::uint64_t seed)
    : m(m_), d_qk(d_qk_), omega(m_, d_qk_) {
    if (m == 0 || d_qk == 0) throw DomainError("PositiveSoftmaxRF needs m, d_qk >= 1");
    Rng rng(seed);
    for (auto& w : omega.data) w = rng.normal();
}

std::size_t feature_dim(const FeatureMap& map, std::size_t d_qk) {
    if (auto* rf = std::get_if<PositiveSoftmaxRF>(&map)) return rf->m;
    return d_qk;
}

Vector feature_map_apply(const FeatureMap& map, std::span<const double> u) {
    return std::visit(
        [&](const auto& m) -> Vector {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, ReluMap>) {
                Vector out(u.begin(), u.end());
                for (auto& v : out) v = std::max(v, 0.0);
                return out;
            } else if constexpr (std::is_same_v<T, EluPlus1Map>) {
                Vector out(u.begin(), u.end());
                for (auto& v : out) v = v > 0.0 ? v + 1.0 : std::exp(v);
                return out;
            } else if constexpr (std::is_same_v<T, SquareMap>) {
                Vector out(u.begin(), u.end());
                for (auto& v : out) v = v * v;
                return out;
            } else {
                if (u.size() != m.d_qk) throw DomainError("feature map dimension mismatch");
                double scale = std::pow(static_cast<double>(m.d_qk), -0.25);
                Vector scaled(u.size());
                double sq = 0.0;
                for (std::size_t i = 0; i < u.size(); ++i) {
                    scaled[i] = u[i] * scale;
                    sq += scaled[i] * scaled[i];
                }
                double base = -0.5 * sq - 0.5 * std::log(static_cast<double>(m.m));
                Vector out(m.m);
                for (std::size_t r = 0; r < m.m; ++r) {
                    double dot = 0.0;
                    for (std::size_t i = 0; i < u.size(); ++i) dot += m.omega.at(r, i) * scaled[i];
                    out[r] = std::exp(base + dot);
                }
                return out;
            }
        },
        map);
}

double kernel_value(const FeatureMap& map, std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("kernel_value: dimension mismatch");
    if (std::holds_alternative<PositiveSoftmaxRF>(map)) {
        double dot = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
        return std::exp(dot / std::sqrt(static_cast<double>(x.size())));
    }
    Vector fx = feature_map_apply(map, x);
    Vector fy = feature_map_apply(map, y);
    double dot = 0.0;
    for (std::size_t i = 0; i < fx.size(); ++i) dot += fx[i] * fy[i];
    return dot;
}

void AttentionInputs::validate() const {
    if (q.rows != k.rows || q.rows != v.rows)
        throw DomainError("attention inputs must share the row count");
    if (q.cols != k.cols) throw DomainError("Q and K must share d_QK");
    for (double z : q.data)
        if (!std::isfinite(z)) throw DomainError("non-finite entry in Q");
    for (double z : k.data)
        if (!std::isfinite(z)) throw DomainError("non-finite entry in K");
    for (double z : v.data)
        if (!std::isfinite(z)) throw DomainError("non-finite entry in V");
}

namespace {

DenseMatrix feature_rows(const FeatureMap& map, const DenseMatrix& x) {
    std::size_t m = feature_dim(map, x.cols);
    DenseMatrix out(x.rows, m);
    for (std::size_t i = 0; i < x.rows; ++i) {
        Vector f = feature_map_apply(map, x.row(i));
        std::copy(f.begin(), f.end(), out.data.begin() + static_cast<std::ptrdiff_t>(i * m));
    }
    return out;
}

void check_normalizer(double value, double eps, std::size_t row) {
    if (std::fabs(value) < eps)
        throw DegenerateRowError("attention normalizer below epsilon at row " +
                                     std::to_string(row),
                                 row);
}

}  // namespace

DenseMatrix attention_unmasked(const AttentionInputs& inputs, const FeatureMap& map,
                               const AttentionOptions& opts) {
    inputs.validate();
    DenseMatrix phi_q = feature_rows(map, inputs.q);
    DenseMatrix phi_k = feature_rows(map, inputs.k);
    const std::size_t L = inputs.q.rows, m = phi_q.cols, d = inputs.v.cols;
    // (K')^T V and (K')^T 1.
    DenseMatrix kv(m, d);
    Vector ksum(m, 0.0);
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t a = 0; a < m; ++a) {
            double f = phi_k.at(i, a);
            if (f == 0.0) continue;
            ksum[a] += f;
            for (std::size_t b = 0; b < d; ++b) kv.at(a, b) += f * inputs.v.at(i, b);
        }
    DenseMatrix out(L, d);
    for (std::size_t i = 0; i < L; ++i) {
        double norm = 0.0;
        for (std::size_t a = 0; a < m; ++a) norm += phi_q.at(i, a) * ksum[a];
        check_normalizer(norm, opts.norm_epsilon, i);
        for (std::size_t b = 0; b < d; ++b) {
            double acc = 0.0;
            for (std::size_t a = 0; a < m; ++a) acc += phi_q.at(i, a) * kv.at(a, b);
            out.at(i, b) = acc / norm;
        }
    }
    return out;
}

DenseMatrix attention_masked(const AttentionInputs& inputs, const FeatureMap& map,
                             const MaskOperator& mask, const AttentionOptions& opts) {
    return attention_masked(
        inputs, map, [&](const DenseMatrix& x) { return mask_apply_matrix(mask, x); },
        mask_dim(mask), opts);
}

DenseMatrix attention_masked(const AttentionInputs& inputs, const FeatureMap& map,
                             const MatrixApplier& apply_mask, std::size_t mask_size,
                             const AttentionOptions& opts) {
    inputs.validate();
    const std::size_t L = inputs.q.rows, d = inputs.v.cols;
    if (mask_size != L) throw DomainError("mask size does not match inputs");
    DenseMatrix phi_q = feature_rows(map, inputs.q);
    DenseMatrix phi_k = feature_rows(map, inputs.k);
    const std::size_t m = phi_q.cols;

    // D^2 = M V^2 with V^2 = Phi_K; denominators phi(q_i) . D^2_i.
    DenseMatrix d2 = apply_mask(phi_k);
    Vector denom(L, 0.0);
    for (std::size_t i = 0; i < L; ++i) {
        double acc = 0.0;
        for (std::size_t a = 0; a < m; ++a) acc += phi_q.at(i, a) * d2.at(i, a);
        denom[i] = acc;
    }

    // V^1 columns, row-major vec of the m x d outer product phi(k_i) v_i^T:
    // column index c = a * d + b. Processed in blocks to cap peak memory.
    std::size_t block = std::max<std::size_t>(1, opts.block_cols);
    DenseMatrix numer(L, d);
    const std::size_t total_cols = m * d;
    for (std::size_t c0 = 0; c0 < total_cols; c0 += block) {
        std::size_t width = std::min(block, total_cols - c0);
        DenseMatrix v1(L, width);
        for (std::size_t i = 0; i < L; ++i)
            for (std::size_t w = 0; w < width; ++w) {
                std::size_t c = c0 + w;
                v1.at(i, w) = phi_k.at(i, c / d) * inputs.v.at(i, c % d);
            }
        DenseMatrix d1 = apply_mask(v1);
        // r_i numerator[b] += phi(q_i)[a] * devec(D^1_i)[a][b].
        for (std::size_t i = 0; i < L; ++i)
            for (std::size_t w = 0; w < width; ++w) {
                std::size_t c = c0 + w;
                numer.at(i, c % d) += phi_q.at(i, c / d) * d1.at(i, w);
            }
    }
    DenseMatrix out(L, d);
    for (std::size_t i = 0; i < L; ++i) {
        check_normalizer(denom[i], opts.norm_epsilon, i);
        for (std::size_t b = 0; b < d; ++b) out.at(i, b) = numer.at(i, b) / denom[i];
    }
    return out;
}

DenseMatrix dense_softmax_attention(const AttentionInputs& inputs, const DenseMatrix& logits_mask,
                                    std::size_t cap) {
    inputs.validate();
    const std::size_t L = inputs.q.rows, d = inputs.v.cols;
    if (L > cap) throw ResourceError("dense_softmax_attention: L exceeds oracle cap");
    if (logits_mask.rows != L || logits_mask.cols != L)
        throw DomainError("logits mask must be L x L");
    double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(inputs.q.cols));
    DenseMatrix out(L, d);
    Vector logits(L);
    for (std::size_t i = 0; i < L; ++i) {
        double row_max = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < L; ++j) {
            double dot = 0.0;
            for (std::size_t t = 0; t < inputs.q.cols; ++t)
                dot += inputs.q.at(i, t) * inputs.k.at(j, t);
            logits[j] = logits_mask.at(i, j) + dot * inv_sqrt;
            row_max = std::max(row_max, logits[j]);
        }
        double denom = 0.0;
        for (std::size_t j = 0; j < L; ++j) {
            double a = std::exp(logits[j] - row_max);
            denom += a;
            for (std::size_t b = 0; b < d; ++b) out.at(i, b) += a * inputs.v.at(j, b);
        }
        if (denom == 0.0)
            throw DegenerateRowError("softmax attention row sums to zero at row " +
                                         std::to_string(i),
                                     i);
        for (std::size_t b = 0; b < d; ++b) out.at(i, b) /= denom;
    }
    return out;
}

DenseMatrix dense_kernel_attention(const AttentionInputs& inputs, const FeatureMap& map,
                                   const DenseMatrix& mask, std::size_t cap,
                                   double norm_epsilon) {
    inputs.validate();
    const std::size_t L = inputs.q.rows, d = inputs.v.cols;
    if (L > cap) throw ResourceError("dense_kernel_attention: L exceeds oracle cap");
    if (mask.rows != L || mask.cols != L) throw DomainError("mask must be L x L");
    DenseMatrix out(L, d);
    for (std::size_t i = 0; i < L; ++i) {
        double denom = 0.0;
        for (std::size_t j = 0; j < L; ++j) {
            double a = mask.at(i, j) * kernel_value(map, inputs.q.row(i), inputs.k.row(j));
            denom += a;
            for (std::size_t b = 0; b < d; ++b) out.at(i, b) += a * inputs.v.at(j, b);
        }
        check_normalizer(denom, norm_epsilon, i);
        for (std::size_t b = 0; b < d; ++b) out.at(i, b) /= denom;
    }
    return out;
}

}  // namespace topomask
