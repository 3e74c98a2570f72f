#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "topomask/attention.hpp"
#include "topomask/diffusion.hpp"
#include "topomask/graph.hpp"
#include "topomask/mask.hpp"
#include "topomask/rng.hpp"
#include "topomask/tensor.hpp"
#include "topomask/tree.hpp"
#include "topomask/tree_masks.hpp"

using namespace topomask;

namespace {

DenseMatrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double lo = -1.0,
                          double hi = 1.0) {
    DenseMatrix m(r, c);
    for (auto& v : m.data) v = lo + (hi - lo) * rng.uniform();
    return m;
}

AttentionInputs random_inputs(std::size_t L, std::size_t d_qk, std::size_t d, Rng& rng,
                              double lo = -1.0, double hi = 1.0) {
    return {random_matrix(L, d_qk, rng, lo, hi), random_matrix(L, d_qk, rng, lo, hi),
            random_matrix(L, d, rng, lo, hi)};
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.data.size(); ++k)
        worst = std::max(worst, std::fabs(a.data[k] - b.data[k]));
    return worst;
}

}  // namespace

TEST_CASE("deterministic feature maps: hand values and exact kernels") {
    Vector u = {-1.0, 2.0};
    Vector relu = feature_map_apply(ReluMap{}, u);
    CHECK(relu == Vector{0.0, 2.0});
    Vector elu = feature_map_apply(EluPlus1Map{}, u);
    CHECK(elu[0] == doctest::Approx(std::exp(-1.0)));
    CHECK(elu[1] == doctest::Approx(3.0));
    Vector sq = feature_map_apply(SquareMap{}, Vector{1.0, -2.0});
    CHECK(sq == Vector{1.0, 4.0});

    Vector x = {2.0, 1.0}, y = {3.0, -4.0};
    CHECK(kernel_value(ReluMap{}, x, y) == doctest::Approx(6.0));  // relu dots relu
    CHECK(kernel_value(SquareMap{}, x, y) == doctest::Approx(4.0 * 9.0 + 1.0 * 16.0));

    CHECK(feature_dim(ReluMap{}, 5) == 5);
    CHECK(feature_dim(SquareMap{}, 5) == 5);
    CHECK(feature_dim(PositiveSoftmaxRF(32, 5, 1), 5) == 32);
}

TEST_CASE("random features are positive and unbiased for the softmax kernel") {
    const std::size_t d = 4, seeds = 100, m = 256;
    Rng rng(1);
    Vector x(d), y(d);
    for (auto& v : x) v = rng.uniform() * 2 - 1;
    for (auto& v : y) v = rng.uniform() * 2 - 1;
    double dotxy = 0.0;
    for (std::size_t i = 0; i < d; ++i) dotxy += x[i] * y[i];
    double target = std::exp(dotxy / std::sqrt(double(d)));

    std::vector<double> estimates;
    for (std::size_t s = 0; s < seeds; ++s) {
        PositiveSoftmaxRF rf(m, d, 1000 + s);
        Vector px = feature_map_apply(FeatureMap{rf}, x);
        Vector py = feature_map_apply(FeatureMap{rf}, y);
        for (double v : px) CHECK(v > 0.0);
        double est = 0.0;
        for (std::size_t r = 0; r < m; ++r) est += px[r] * py[r];
        estimates.push_back(est);
    }
    double mean = 0.0;
    for (double e : estimates) mean += e;
    mean /= double(seeds);
    double var = 0.0;
    for (double e : estimates) var += (e - mean) * (e - mean);
    var /= double(seeds - 1);
    double se = std::sqrt(var / double(seeds));
    CHECK(std::fabs(mean - target) <= 4.0 * se + 1e-12);
    CHECK(kernel_value(FeatureMap{PositiveSoftmaxRF(8, d, 0)}, x, y) ==
          doctest::Approx(target));
}

TEST_CASE("random-feature error decreases as m grows") {
    const std::size_t d = 4, seeds = 30;
    Rng rng(2);
    Vector x(d), y(d);
    for (auto& v : x) v = rng.uniform() * 2 - 1;
    for (auto& v : y) v = rng.uniform() * 2 - 1;
    double dotxy = 0.0;
    for (std::size_t i = 0; i < d; ++i) dotxy += x[i] * y[i];
    double target = std::exp(dotxy / std::sqrt(double(d)));
    auto mse = [&](std::size_t m) {
        double acc = 0.0;
        for (std::size_t s = 0; s < seeds; ++s) {
            PositiveSoftmaxRF rf(m, d, 5000 + s);
            Vector px = feature_map_apply(FeatureMap{rf}, x);
            Vector py = feature_map_apply(FeatureMap{rf}, y);
            double est = 0.0;
            for (std::size_t r = 0; r < m; ++r) est += px[r] * py[r];
            acc += (est - target) * (est - target);
        }
        return acc / double(seeds);
    };
    CHECK(mse(512) < mse(32));
}

TEST_CASE("unmasked attention: single token returns its value row") {
    Rng rng(3);
    AttentionInputs in = random_inputs(1, 3, 5, rng, 0.1, 1.0);
    DenseMatrix r = attention_unmasked(in, ReluMap{});
    for (std::size_t j = 0; j < 5; ++j) CHECK(r.at(0, j) == doctest::Approx(in.v.at(0, j)));
}

TEST_CASE("unmasked attention equals the all-ones dense kernel oracle") {
    Rng rng(4);
    AttentionInputs in = random_inputs(64, 6, 4, rng, 0.05, 1.0);
    DenseMatrix ones(64, 64);
    for (auto& v : ones.data) v = 1.0;
    for (FeatureMap map : {FeatureMap{ReluMap{}}, FeatureMap{EluPlus1Map{}},
                           FeatureMap{SquareMap{}}}) {
        DenseMatrix fast = attention_unmasked(in, map);
        DenseMatrix dense = dense_kernel_attention(in, map, ones);
        CHECK(max_abs_diff(fast, dense) <= 1e-10);
    }
}

TEST_CASE("unmasked attention with constant values is constant") {
    Rng rng(5);
    AttentionInputs in = random_inputs(20, 4, 3, rng, 0.1, 1.0);
    for (std::size_t i = 0; i < 20; ++i)
        for (std::size_t j = 0; j < 3; ++j) in.v.at(i, j) = double(j) + 1.0;
    DenseMatrix r = attention_unmasked(in, EluPlus1Map{});
    for (std::size_t i = 0; i < 20; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(r.at(i, j) == doctest::Approx(double(j) + 1.0));
}

TEST_CASE("masked attention with the all-ones mask matches the unmasked path") {
    Rng rng(6);
    AttentionInputs in = random_inputs(40, 5, 3, rng, 0.05, 1.0);
    DenseMatrix ones(40, 40);
    for (auto& v : ones.data) v = 1.0;
    MaskOperator mask = DenseMask(ones);
    DenseMatrix masked = attention_masked(in, EluPlus1Map{}, mask);
    DenseMatrix unmasked = attention_unmasked(in, EluPlus1Map{});
    CHECK(max_abs_diff(masked, unmasked) <= 1e-12);
}

TEST_CASE("causal masked attention matches the dense oracle") {
    Rng rng(7);
    std::size_t L = 48;
    AttentionInputs in = random_inputs(L, 4, 6, rng, 0.05, 1.0);
    MaskOperator mask = CausalMask{L};
    DenseMatrix fast = attention_masked(in, ReluMap{}, mask);
    DenseMatrix tri(L, L);
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = 0; j <= i; ++j) tri.at(i, j) = 1.0;
    DenseMatrix dense = dense_kernel_attention(in, ReluMap{}, tri);
    CHECK(max_abs_diff(fast, dense) <= 1e-10);
}

TEST_CASE("masked attention matches the oracle for positive structured masks") {
    Rng rng(8);
    std::size_t L = 32;
    AttentionInputs in = random_inputs(L, 3, 4, rng, 0.05, 1.0);

    Vector xi(2 * L - 1);
    for (std::size_t k = 0; k < xi.size(); ++k)
        xi[k] = std::exp(-std::fabs(double(k) - double(L - 1)) / 8.0);
    MaskOperator toep = ToeplitzMask(L, xi);
    DenseMatrix toep_dense = mask_materialize(toep, L);
    CHECK(max_abs_diff(attention_masked(in, EluPlus1Map{}, toep),
                       dense_kernel_attention(in, EluPlus1Map{}, toep_dense)) <= 1e-8);

    TokenGrid grid({4, 8});
    Vector f(grid.max_distance() + 1);
    for (std::size_t z = 0; z < f.size(); ++z) f[z] = 1.0 / (1.0 + double(z));
    MaskOperator bt = BlockToeplitzMask(grid, f);
    DenseMatrix bt_dense = mask_materialize(bt, L);
    CHECK(max_abs_diff(attention_masked(in, EluPlus1Map{}, bt),
                       dense_kernel_attention(in, EluPlus1Map{}, bt_dense)) <= 1e-8);

    DenseMatrix m1 = random_matrix(L, 5, rng, 0.1, 1.0);
    DenseMatrix m2 = random_matrix(5, L, rng, 0.1, 1.0);
    MaskOperator lr = LowRankMask(m1, m2);
    DenseMatrix lr_dense = mask_materialize(lr, L);
    CHECK(max_abs_diff(attention_masked(in, EluPlus1Map{}, lr),
                       dense_kernel_attention(in, EluPlus1Map{}, lr_dense)) <= 1e-8);
}

TEST_CASE("masked attention through a matrix applier: tree and diffusion masks") {
    Rng rng(9);
    std::size_t L = 30;
    AttentionInputs in = random_inputs(L, 3, 4, rng, 0.05, 1.0);
    FeatureMap map = EluPlus1Map{};

    WeightedTree tree = generate_random_tree(L, 77, false);
    ExpAffineParams params{-0.4, 0.2};
    MatrixApplier tree_apply = [&](const DenseMatrix& x) {
        DenseMatrix y(x.rows, x.cols);
        for (std::size_t j = 0; j < x.cols; ++j) {
            Vector col = tree_exp_affine_apply(tree, params, x.col(j));
            for (std::size_t i = 0; i < x.rows; ++i) y.at(i, j) = col[i];
        }
        return y;
    };
    DenseMatrix dist = tree_distances(tree);
    DenseMatrix tree_dense(L, L);
    for (std::size_t k = 0; k < tree_dense.data.size(); ++k)
        tree_dense.data[k] = std::exp(params.a * dist.data[k] + params.b);
    CHECK(max_abs_diff(attention_masked(in, map, tree_apply, L),
                       dense_kernel_attention(in, map, tree_dense)) <= 1e-8);

    Graph g = generate_connected_graph(L, 0.15, 13);
    GdkSpec spec(g, 0.8, GdkVariant::laplacian, 1e-12);
    MatrixApplier gdk_applier = [&](const DenseMatrix& x) {
        DenseMatrix y(x.rows, x.cols);
        for (std::size_t j = 0; j < x.cols; ++j) {
            Vector col = gdk_apply(spec, x.col(j));
            for (std::size_t i = 0; i < x.rows; ++i) y.at(i, j) = col[i];
        }
        return y;
    };
    DenseMatrix gdk_dense(L, L);
    for (std::size_t j = 0; j < L; ++j) {
        Vector e(L, 0.0);
        e[j] = 1.0;
        Vector col = gdk_apply(spec, e);
        for (std::size_t i = 0; i < L; ++i) gdk_dense.at(i, j) = col[i];
    }
    CHECK(max_abs_diff(attention_masked(in, map, gdk_applier, L),
                       dense_kernel_attention(in, map, gdk_dense)) <= 1e-8);
}

TEST_CASE("results do not depend on the column block size") {
    Rng rng(10);
    std::size_t L = 36, d = 5;
    AttentionInputs in = random_inputs(L, 4, d, rng, 0.05, 1.0);
    MaskOperator mask = CausalMask{L};
    AttentionOptions a, b, c;
    a.block_cols = 1;
    b.block_cols = d;
    c.block_cols = 5 * d;
    DenseMatrix ra = attention_masked(in, EluPlus1Map{}, mask, a);
    DenseMatrix rb = attention_masked(in, EluPlus1Map{}, mask, b);
    DenseMatrix rc = attention_masked(in, EluPlus1Map{}, mask, c);
    CHECK(max_abs_diff(ra, rb) <= 1e-13);
    CHECK(max_abs_diff(ra, rc) <= 1e-13);
}

TEST_CASE("dense softmax oracle: zero logits average the values") {
    std::size_t L = 6, d = 3;
    AttentionInputs in{DenseMatrix(L, 2), DenseMatrix(L, 2), DenseMatrix(L, d)};
    Rng rng(11);
    for (auto& v : in.v.data) v = rng.uniform();
    DenseMatrix logits(L, L);
    DenseMatrix out = dense_softmax_attention(in, logits);
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < L; ++i) mean += in.v.at(i, j);
        mean /= double(L);
        for (std::size_t i = 0; i < L; ++i) CHECK(out.at(i, j) == doctest::Approx(mean));
    }
    // Causal logits with zero scores: running prefix means.
    DenseMatrix causal(L, L);
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = i + 1; j < L; ++j) causal.at(i, j) = -1e30;
    DenseMatrix cout = dense_softmax_attention(in, causal);
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double mean = 0.0;
            for (std::size_t t = 0; t <= i; ++t) mean += in.v.at(t, j);
            mean /= double(i + 1);
            CHECK(cout.at(i, j) == doctest::Approx(mean));
        }
}

TEST_CASE("softmax with finite logit offsets equals the exponentiated-mask kernel route") {
    Rng rng(12);
    std::size_t L = 24, d_qk = 3;
    AttentionInputs in = random_inputs(L, d_qk, 4, rng);
    DenseMatrix logits = random_matrix(L, L, rng, -2.0, 2.0);
    DenseMatrix expmask(L, L);
    for (std::size_t k = 0; k < logits.data.size(); ++k)
        expmask.data[k] = std::exp(logits.data[k]);
    FeatureMap tag = PositiveSoftmaxRF(1, d_qk, 0);  // exact-kernel tag in the oracle
    DenseMatrix a = dense_softmax_attention(in, logits);
    DenseMatrix b = dense_kernel_attention(in, tag, expmask);
    CHECK(max_abs_diff(a, b) <= 1e-12);
}

TEST_CASE("dense kernel oracle with the identity mask returns the value rows") {
    Rng rng(13);
    AttentionInputs in = random_inputs(10, 3, 4, rng, 0.1, 1.0);
    DenseMatrix eye(10, 10);
    for (std::size_t i = 0; i < 10; ++i) eye.at(i, i) = 1.0;
    DenseMatrix out = dense_kernel_attention(in, EluPlus1Map{}, eye);
    CHECK(max_abs_diff(out, in.v) <= 1e-12);
}

TEST_CASE("degenerate rows raise an error naming the first bad row") {
    Rng rng(14);
    AttentionInputs in = random_inputs(8, 3, 2, rng, 0.1, 1.0);
    for (std::size_t j = 0; j < 3; ++j) in.q.at(5, j) = -1.0;  // relu kills this query
    CHECK_THROWS_AS(attention_unmasked(in, ReluMap{}), DegenerateRowError);
    try {
        attention_unmasked(in, ReluMap{});
    } catch (const DegenerateRowError& e) {
        CHECK(e.row() == 5);
    }
    DenseMatrix ones(8, 8);
    for (auto& v : ones.data) v = 1.0;
    CHECK_THROWS_AS(attention_masked(in, ReluMap{}, MaskOperator{DenseMask(ones)}),
                    DegenerateRowError);
    CHECK_THROWS_AS(dense_kernel_attention(in, ReluMap{}, ones), DegenerateRowError);
}

TEST_CASE("input validation rejects shape mismatches and non-finite entries") {
    Rng rng(15);
    AttentionInputs in = random_inputs(6, 3, 2, rng);
    AttentionInputs bad_rows = in;
    bad_rows.k = random_matrix(5, 3, rng);
    CHECK_THROWS_AS(attention_unmasked(bad_rows, ReluMap{}), DomainError);
    AttentionInputs bad_width = in;
    bad_width.k = random_matrix(6, 2, rng);
    CHECK_THROWS_AS(attention_unmasked(bad_width, ReluMap{}), DomainError);
    AttentionInputs nan_in = in;
    nan_in.v.at(0, 0) = std::nan("");
    CHECK_THROWS_AS(attention_unmasked(nan_in, ReluMap{}), DomainError);
    MaskOperator wrong = CausalMask{7};
    CHECK_THROWS_AS(attention_masked(in, ReluMap{}, wrong), DomainError);
}
