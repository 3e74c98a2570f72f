#include "topomask/rwgnk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "topomask/parallel.hpp"
#include "topomask/rng.hpp"

namespace topomask {

void RwgnkParams::validate() const {
    if (lambda < 0.0 || lambda > 1.0) throw DomainError("rwgnk lambda must be in [0,1]");
    if (alpha < 0.0) throw DomainError("rwgnk alpha must be >= 0");
    if (!fixed_length && (p <= 0.0 || p >= 1.0))
        throw DomainError("rwgnk stopping probability must be in (0,1)");
    if (n_walks == 0) throw DomainError("rwgnk n_walks must be >= 1");
}

double RwgnkFeatures::dot(std::size_t h, std::size_t g) const {
    const auto& a = rows[h];
    const auto& b = rows[g];
    double acc = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first < b[j].first) {
            ++i;
        } else if (a[i].first > b[j].first) {
            ++j;
        } else {
            acc += a[i].second * b[j].second;
            ++i;
            ++j;
        }
    }
    return acc;
}

DenseMatrix RwgnkFeatures::dense() const {
    DenseMatrix m(size, size);
    for (std::size_t h = 0; h < size; ++h)
        for (auto [i, w] : rows[h]) m.at(h, i) = w;
    return m;
}

RwgnkFeatures rwgnk_features(const Graph& graph, const RwgnkParams& params) {
    return rwgnk_features(graph, params, [](std::size_t h) { return std::uint64_t(h); });
}

RwgnkFeatures rwgnk_features(const Graph& graph, const RwgnkParams& params,
                             const std::function<std::uint64_t(std::size_t)>& node_key) {
    params.validate();
    for (std::size_t i = 0; i < graph.size; ++i)
        if (graph.degree(i) == 0)
            throw DomainError("random walk undefined: isolated node " + std::to_string(i));
    RwgnkFeatures feats;
    feats.size = graph.size;
    feats.rows.resize(graph.size);
    Rng base(params.seed);
    parallel_for(graph.size, [&](std::size_t h) {
        std::vector<double> acc(graph.size, 0.0);
        Rng node_rng = base.derive(node_key(h));
        for (std::size_t w = 0; w < params.n_walks; ++w) {
            Rng rng = node_rng.derive(w);
            std::size_t node = h;
            double discount = 1.0;  // lambda^0, with 0^0 = 1 when lambda = 0
            acc[node] += discount;  // the empty prefix ends at the start node
            std::size_t step = 0;
            for (;;) {
                if (params.fixed_length) {
                    if (step >= params.tau) break;
                } else {
                    if (rng.uniform() < params.p) break;
                }
                node = graph.adj[node][rng.uniform_int(graph.adj[node].size())].first;
                discount *= params.lambda;
                acc[node] += discount;
                ++step;
                if (step > 100000000) break;  // hard stop for pathological parameters
            }
        }
        double inv = 1.0 / static_cast<double>(params.n_walks);
        for (auto& v : acc) v *= inv;
        if (params.alpha > 0.0) {
            double norm = 0.0;
            for (double v : acc) norm += v * v;
            norm = std::sqrt(norm);
            if (norm > 0.0) {
                double scale = std::pow(norm, -params.alpha);
                for (auto& v : acc) v *= scale;
            }
        }
        auto& row = feats.rows[h];
        for (std::size_t i = 0; i < acc.size(); ++i)
            if (acc[i] != 0.0) row.push_back({i, acc[i]});
    });
    return feats;
}

DenseMatrix rwgnk_exact_features(const Graph& graph, double lambda, bool fixed_length,
                                 std::size_t tau, double p, double alpha,
                                 std::size_t n_terms, double* tail_bound) {
    for (std::size_t i = 0; i < graph.size; ++i)
        if (graph.degree(i) == 0)
            throw DomainError("random walk undefined: isolated node " + std::to_string(i));
    const std::size_t n = graph.size;
    // q.row(h) = endpoint distribution after e steps from h.
    DenseMatrix q(n, n);
    for (std::size_t i = 0; i < n; ++i) q.at(i, i) = 1.0;
    DenseMatrix feats = q;  // e = 0 term, coefficient 1
    std::size_t steps = fixed_length ? tau : n_terms;
    double coeff = 1.0;
    for (std::size_t e = 1; e <= steps; ++e) {
        coeff *= fixed_length ? lambda : lambda * (1.0 - p);
        DenseMatrix next(n, n);
        for (std::size_t h = 0; h < n; ++h)
            for (std::size_t u = 0; u < n; ++u) {
                double mass = q.at(h, u);
                if (mass == 0.0) continue;
                double share = mass / static_cast<double>(graph.degree(u));
                for (auto [v, w] : graph.adj[u]) next.at(h, v) += share;
            }
        q = std::move(next);
        for (std::size_t k = 0; k < feats.data.size(); ++k) feats.data[k] += coeff * q.data[k];
    }
    if (tail_bound) {
        if (fixed_length) {
            *tail_bound = 0.0;
        } else {
            double rho = lambda * (1.0 - p);
            *tail_bound = rho < 1.0 ? std::pow(rho, double(n_terms + 1)) / (1.0 - rho)
                                    : std::numeric_limits<double>::infinity();
        }
    }
    if (alpha > 0.0) {
        for (std::size_t h = 0; h < n; ++h) {
            double norm = 0.0;
            for (std::size_t i = 0; i < n; ++i) norm += feats.at(h, i) * feats.at(h, i);
            norm = std::sqrt(norm);
            if (norm > 0.0) {
                double scale = std::pow(norm, -alpha);
                for (std::size_t i = 0; i < n; ++i) feats.at(h, i) *= scale;
            }
        }
    }
    return feats;
}

MaskOperator rwgnk_mask(const RwgnkFeatures& features) {
    DenseMatrix m1 = features.dense();
    DenseMatrix m2(m1.cols, m1.rows);
    for (std::size_t i = 0; i < m1.rows; ++i)
        for (std::size_t j = 0; j < m1.cols; ++j) m2.at(j, i) = m1.at(i, j);
    return LowRankMask(std::move(m1), std::move(m2));
}

std::string rwgnk_features_text(const RwgnkFeatures& features) {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t h = 0; h < features.size; ++h) {
        out << h;
        for (auto [i, w] : features.rows[h]) out << ' ' << i << ':' << w;
        out << '\n';
    }
    return out.str();
}

namespace {

double spectral_radius_sym(const DenseMatrix& a) {
    // Power iteration; A is symmetric nonnegative so the dominant eigenvalue
    // equals the spectral radius.
    Vector v(a.rows, 1.0);
    double lam = 0.0;
    for (int it = 0; it < 300; ++it) {
        Vector w = matvec(a, v);
        double norm = 0.0;
        for (double z : w) norm += z * z;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        for (auto& z : w) z /= norm;
        lam = norm;
        v = std::move(w);
    }
    return lam;
}

// sum_{i=0..inf} (i+1) q^i minus the first n_terms+1 terms.
double gamma_tail(double q, std::size_t n_terms) {
    double total = 1.0 / ((1.0 - q) * (1.0 - q));
    double partial = 0.0, qi = 1.0;
    for (std::size_t i = 0; i <= n_terms; ++i) {
        partial += static_cast<double>(i + 1) * qi;
        qi *= q;
    }
    return std::max(0.0, total - partial);
}

DenseMatrix gamma_truncated(const DenseMatrix& a, double beta, std::size_t n_terms) {
    const std::size_t n = a.rows;
    DenseMatrix b(n, n);
    for (std::size_t k = 0; k < b.data.size(); ++k) b.data[k] = beta * a.data[k];
    DenseMatrix acc(n, n);
    DenseMatrix power(n, n);
    for (std::size_t i = 0; i < n; ++i) power.at(i, i) = 1.0;
    for (std::size_t i = 0; i <= n_terms; ++i) {
        for (std::size_t k = 0; k < acc.data.size(); ++k)
            acc.data[k] += static_cast<double>(i + 1) * power.data[k];
        if (i < n_terms) power = matmul(power, b);
    }
    return acc;
}

}  // namespace

SandwichReport verify_theorem2_sandwich(const Graph& graph, double lambda, double p,
                                        std::size_t n_terms) {
    if (lambda <= 0.0 || lambda > 1.0) throw DomainError("sandwich: lambda must be in (0,1]");
    if (p <= 0.0 || p >= 1.0) throw DomainError("sandwich: p must be in (0,1)");
    const std::size_t n = graph.size;
    std::size_t d_max = 0, d_min = SIZE_MAX;
    for (std::size_t i = 0; i < n; ++i) {
        d_max = std::max(d_max, graph.degree(i));
        d_min = std::min(d_min, graph.degree(i));
    }
    if (d_min == 0) throw DomainError("sandwich: graph has an isolated node");
    DenseMatrix adj(n, n);
    for (std::size_t u = 0; u < n; ++u)
        for (auto [v, w] : graph.adj[u]) adj.at(u, v) = 1.0;
    double sigma = spectral_radius_sym(adj);
    double rho = (1.0 - p) * lambda;
    double q_lower = rho / static_cast<double>(d_max) * sigma;
    double q_upper = rho / static_cast<double>(d_min) * sigma;
    if (q_lower >= 1.0)
        throw DomainError("sandwich: rho/d_max * spectral radius >= 1, series diverges");

    SandwichReport rep;
    double kernel_l1_tail = 0.0;
    DenseMatrix feats =
        rwgnk_exact_features(graph, lambda, /*fixed_length=*/false, 0, p, /*alpha=*/0.0,
                             n_terms, &kernel_l1_tail);
    DenseMatrix feats_t(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) feats_t.at(j, i) = feats.at(i, j);
    rep.kernel = matmul(feats, feats_t);
    double feat_inf = rho < 1.0 ? 1.0 / (1.0 - rho) : 0.0;
    rep.kernel_truncation = 2.0 * kernel_l1_tail * feat_inf + kernel_l1_tail * kernel_l1_tail;

    rep.lower = gamma_truncated(adj, rho / static_cast<double>(d_max), n_terms);
    double lower_tail = gamma_tail(q_lower, n_terms);
    rep.upper_available = q_upper < 1.0;
    double upper_tail = 0.0;
    if (rep.upper_available) {
        rep.upper = gamma_truncated(adj, rho / static_cast<double>(d_min), n_terms);
        upper_tail = gamma_tail(q_upper, n_terms);
    }
    rep.bound_truncation = std::max(lower_tail, upper_tail);

    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < rep.kernel.data.size(); ++k) {
        double low_slack = rep.kernel.data[k] - rep.lower.data[k] + rep.kernel_truncation;
        worst = std::min(worst, low_slack);
        if (rep.upper_available) {
            double up_slack = rep.upper.data[k] - rep.kernel.data[k] + upper_tail +
                              rep.kernel_truncation;
            worst = std::min(worst, up_slack);
        }
    }
    rep.worst_margin = worst;
    rep.holds = worst >= -1e-12;
    return rep;
}

}  // namespace topomask
