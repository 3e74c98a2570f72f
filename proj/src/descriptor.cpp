#include "topomask/descriptor.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "topomask/diffusion.hpp"
#include "topomask/graph.hpp"
#include "topomask/rwgnk.hpp"
#include "topomask/tree.hpp"
#include "topomask/tree_masks.hpp"

namespace topomask {

DenseMatrix MaskHandle::apply_matrix(const DenseMatrix& x) const {
    if (x.rows != dim) throw DomainError("apply_matrix: row count mismatch");
    if (op) return mask_apply_matrix(*op, x);
    DenseMatrix out(x.rows, x.cols);
    Vector col(x.rows);
    for (std::size_t j = 0; j < x.cols; ++j) {
        for (std::size_t i = 0; i < x.rows; ++i) col[i] = x.at(i, j);
        Vector y = apply(col);
        for (std::size_t i = 0; i < x.rows; ++i) out.at(i, j) = y[i];
    }
    return out;
}

namespace {

struct KeyValues {
    std::map<std::string, std::string> kv;

    const std::string& require(const std::string& key) const {
        auto it = kv.find(key);
        if (it == kv.end()) throw DomainError("mask descriptor: missing key '" + key + "'");
        return it->second;
    }

    std::optional<std::string> optional(const std::string& key) const {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    }

    void expect_only(std::initializer_list<const char*> allowed) const {
        for (const auto& [k, v] : kv) {
            bool ok = false;
            for (const char* a : allowed)
                if (k == a) ok = true;
            if (!ok) throw DomainError("mask descriptor: unknown key '" + k + "'");
        }
    }
};

std::size_t parse_size(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size() || v < 0) throw std::invalid_argument(s);
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw DomainError("mask descriptor: bad integer for '" + key + "': " + s);
    }
}

double parse_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DomainError("mask descriptor: bad number for '" + key + "': " + s);
    }
}

std::vector<std::size_t> parse_dims(const std::string& s) {
    std::vector<std::size_t> dims;
    std::string part;
    std::istringstream in(s);
    while (std::getline(in, part, 'x')) dims.push_back(parse_size(part, "dims"));
    if (dims.empty()) throw DomainError("mask descriptor: empty dims");
    return dims;
}

MaskHandle from_operator(std::string variant, MaskOperator op) {
    MaskHandle h;
    h.variant = std::move(variant);
    h.dim = mask_dim(op);
    auto shared = std::make_shared<MaskOperator>(std::move(op));
    h.op = shared;
    h.apply = [shared](std::span<const double> x) { return mask_apply(*shared, x); };
    h.materialize = [shared](std::size_t cap) { return mask_materialize(*shared, cap); };
    return h;
}

DenseMatrix materialize_by_columns(const std::function<Vector(std::span<const double>)>& apply,
                                   std::size_t n, std::size_t cap) {
    if (n > cap) throw ResourceError("dense materialization refused above the cap");
    DenseMatrix m(n, n);
    Vector e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        Vector col = apply(e);
        e[j] = 0.0;
        for (std::size_t i = 0; i < n; ++i) m.at(i, j) = col[i];
    }
    return m;
}

}  // namespace

MaskHandle parse_mask_descriptor(const std::string& line) {
    std::istringstream in(line);
    std::string variant;
    if (!(in >> variant)) throw DomainError("empty mask descriptor");
    KeyValues args;
    std::string token;
    while (in >> token) {
        auto eq = token.find('=');
        if (eq == std::string::npos || eq == 0)
            throw DomainError("mask descriptor: expected key=value, got '" + token + "'");
        std::string key = token.substr(0, eq);
        if (args.kv.count(key)) throw DomainError("mask descriptor: duplicate key '" + key + "'");
        args.kv[key] = token.substr(eq + 1);
    }

    if (variant == "causal") {
        args.expect_only({"L"});
        std::size_t L = parse_size(args.require("L"), "L");
        if (L == 0) throw DomainError("causal mask needs L >= 1");
        return from_operator(variant, CausalMask{L});
    }
    if (variant == "packing") {
        args.expect_only({"segments"});
        std::vector<std::pair<std::size_t, std::size_t>> segs;
        std::istringstream list(args.require("segments"));
        std::string part;
        std::size_t L = 0;
        while (std::getline(list, part, ',')) {
            auto colon = part.find(':');
            if (colon == std::string::npos)
                throw DomainError("mask descriptor: segment must be a:b, got '" + part + "'");
            std::size_t a = parse_size(part.substr(0, colon), "segments");
            std::size_t b = parse_size(part.substr(colon + 1), "segments");
            segs.push_back({a, b});
            L = std::max(L, b);
        }
        return from_operator(variant, PackingMask(L, std::move(segs)));
    }
    if (variant == "padding") {
        args.expect_only({"L", "valid"});
        return from_operator(variant, PaddingMask(parse_size(args.require("L"), "L"),
                                                  parse_size(args.require("valid"), "valid")));
    }
    if (variant == "toeplitz") {
        args.expect_only({"xi"});
        Vector xi = vector_from_tensor(read_tensor(args.require("xi")));
        if (xi.size() % 2 == 0) throw DomainError("toeplitz xi table must have odd length 2L-1");
        std::size_t L = (xi.size() + 1) / 2;  // fix L before xi is moved from
        return from_operator(variant, ToeplitzMask(L, std::move(xi)));
    }
    if (variant == "blocktoeplitz") {
        args.expect_only({"dims", "f"});
        TokenGrid grid(parse_dims(args.require("dims")));
        Vector f = vector_from_tensor(read_tensor(args.require("f")));
        return from_operator(variant, BlockToeplitzMask(std::move(grid), std::move(f)));
    }
    if (variant == "hypercube") {
        args.expect_only({"d", "lambda"});
        return from_operator(variant,
                             hypercube_gdk_mask(parse_size(args.require("d"), "d"),
                                                parse_double(args.require("lambda"), "lambda")));
    }
    if (variant == "dense") {
        args.expect_only({"m"});
        DenseMatrix m = matrix_from_tensor(read_tensor(args.require("m")));
        return from_operator(variant, DenseMask(std::move(m)));
    }
    if (variant == "rwgnk") {
        args.expect_only({"graph", "lambda", "alpha", "tau", "p", "walks", "seed"});
        auto tau = args.optional("tau");
        auto p = args.optional("p");
        if (tau.has_value() == p.has_value())
            throw DomainError("rwgnk mask needs exactly one of tau= or p=");
        RwgnkParams params;
        params.lambda = parse_double(args.require("lambda"), "lambda");
        params.alpha = parse_double(args.require("alpha"), "alpha");
        params.fixed_length = tau.has_value();
        if (tau) params.tau = parse_size(*tau, "tau");
        if (p) params.p = parse_double(*p, "p");
        params.n_walks = parse_size(args.require("walks"), "walks");
        params.seed = parse_size(args.require("seed"), "seed");
        GraphFile gf = read_graph_text(args.require("graph"));
        return from_operator(variant, rwgnk_mask(rwgnk_features(gf.graph, params)));
    }
    if (variant == "tree-expaffine") {
        args.expect_only({"tree", "a", "b"});
        auto tree = std::make_shared<WeightedTree>(read_graph_text(args.require("tree")).as_tree());
        ExpAffineParams params{parse_double(args.require("a"), "a"),
                               parse_double(args.require("b"), "b")};
        MaskHandle h;
        h.variant = variant;
        h.dim = tree->size;
        h.apply = [tree, params](std::span<const double> x) {
            return tree_exp_affine_apply(*tree, params, x);
        };
        h.materialize = [tree, params](std::size_t cap) {
            DenseMatrix d = tree_distances(*tree, cap);
            DenseMatrix m(d.rows, d.cols);
            for (std::size_t k = 0; k < d.data.size(); ++k)
                m.data[k] = std::exp(params.a * d.data[k] + params.b);
            return m;
        };
        return h;
    }
    if (variant == "tree-general") {
        args.expect_only({"tree", "f", "algo"});
        auto tree = std::make_shared<WeightedTree>(read_graph_text(args.require("tree")).as_tree());
        auto f = std::make_shared<Vector>(vector_from_tensor(read_tensor(args.require("f"))));
        std::string algo = args.optional("algo").value_or("auto");
        if (algo != "auto" && algo != "diam" && algo != "sep")
            throw DomainError("tree-general algo must be auto, diam, or sep");
        MaskHandle h;
        h.variant = variant;
        h.dim = tree->size;
        h.apply = [tree, f, algo](std::span<const double> x) {
            if (algo == "diam") return tree_general_apply_diam(*tree, *f, x);
            if (algo == "sep") return tree_general_apply_separator(*tree, *f, x);
            return tree_mask_apply(*tree, DistanceFunctionTable{*f}, x);
        };
        h.materialize = [tree, f](std::size_t cap) {
            if (tree->size > cap) throw ResourceError("dense materialization refused above cap");
            if (!tree->unit_weights())
                throw DomainError("tree-general masks require unit edge weights");
            DenseMatrix m(tree->size, tree->size);
            for (std::size_t i = 0; i < tree->size; ++i) {
                auto hops = tree_hop_distances(*tree, i);
                for (std::size_t j = 0; j < tree->size; ++j) {
                    if (hops[j] >= f->size())
                        throw DomainError("distance table shorter than tree diameter + 1");
                    m.at(i, j) = (*f)[hops[j]];
                }
            }
            return m;
        };
        return h;
    }
    if (variant == "gdk") {
        args.expect_only({"graph", "lambda", "variant", "tol"});
        auto graph = std::make_shared<Graph>(read_graph_text(args.require("graph")).graph);
        double lambda = parse_double(args.require("lambda"), "lambda");
        GdkVariant var = gdk_variant_from_name(args.require("variant"));
        double tol = parse_double(args.require("tol"), "tol");
        MaskHandle h;
        h.variant = variant;
        h.dim = graph->size;
        h.apply = [graph, lambda, var, tol](std::span<const double> x) {
            return gdk_apply(GdkSpec(*graph, lambda, var, tol), x);
        };
        h.materialize = [apply = h.apply, n = graph->size](std::size_t cap) {
            return materialize_by_columns(apply, n, cap);
        };
        return h;
    }
    throw DomainError("unknown mask variant: " + variant);
}

const char* mask_descriptor_grammar() {
    return "Mask descriptor: one line `<variant> key=value ...`\n"
           "  causal L=<int>\n"
           "  packing segments=a:b,b:c,...\n"
           "  padding L=<int> valid=<int>\n"
           "  toeplitz xi=<tensor file, length 2L-1>\n"
           "  blocktoeplitz dims=n1xn2x... f=<tensor file>\n"
           "  tree-expaffine tree=<graph file> a=<float> b=<float>\n"
           "  tree-general tree=<graph file> f=<tensor file> [algo=auto|diam|sep]\n"
           "  gdk graph=<graph file> lambda=<float> variant=<laplacian|normalized_laplacian|"
           "neg_adjacency> tol=<float>\n"
           "  hypercube d=<int> lambda=<float>\n"
           "  rwgnk graph=<graph file> lambda=<float> alpha=<float> tau=<int>|p=<float> "
           "walks=<int> seed=<int>\n"
           "  dense m=<tensor file>\n"
           "Unknown keys are rejected; file paths resolve against the working directory.\n";
}

}  // namespace topomask
