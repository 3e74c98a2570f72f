#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "topomask/attention.hpp"
#include "topomask/bench.hpp"
#include "topomask/descriptor.hpp"
#include "topomask/diffusion.hpp"
#include "topomask/graph.hpp"
#include "topomask/grid.hpp"
#include "topomask/mask.hpp"
#include "topomask/rng.hpp"
#include "topomask/rwgnk.hpp"
#include "topomask/tensor.hpp"
#include "topomask/verify.hpp"

namespace {

using namespace topomask;

std::vector<std::size_t> parse_dims_arg(const std::string& s) {
    std::vector<std::size_t> dims;
    std::string part;
    std::istringstream in(s);
    while (std::getline(in, part, 'x')) {
        std::size_t v = std::stoull(part);
        dims.push_back(v);
    }
    if (dims.empty()) throw DomainError("--dims must look like n1xn2x...");
    return dims;
}

int cmd_gen(const std::string& kind, const std::string& out, const std::string& dims_arg,
            std::size_t n, std::size_t d, double p, std::uint64_t seed, bool weighted) {
    if (kind == "grid") {
        TokenGrid grid(parse_dims_arg(dims_arg));
        write_graph_text(out, grid_graph(grid));
    } else if (kind == "hypercube") {
        write_graph_text(out, generate_hypercube(d));
    } else if (kind == "random-tree") {
        write_tree_text(out, generate_random_tree(n, seed, weighted));
    } else if (kind == "path") {
        write_tree_text(out, generate_path(n));
    } else if (kind == "random-graph") {
        write_graph_text(out, generate_connected_graph(n, p, seed));
    } else if (kind == "random-tensor") {
        Rng rng(seed);
        Tensor t;
        for (auto v : parse_dims_arg(dims_arg)) t.dims.push_back(std::uint32_t(v));
        t.data.resize(t.total());
        for (auto& v : t.data) v = rng.uniform() * 2.0 - 1.0;
        write_tensor(out, t);
    } else {
        throw DomainError("unknown gen kind: " + kind +
                          " (grid|hypercube|random-tree|path|random-graph|random-tensor)");
    }
    std::cerr << "wrote " << out << "\n";
    return 0;
}

int cmd_matvec(const std::string& descriptor, const std::string& x_path, const std::string& out,
               bool oracle, std::size_t oracle_cap) {
    MaskHandle mask = parse_mask_descriptor(descriptor);
    Vector x = vector_from_tensor(read_tensor(x_path));
    if (x.size() != mask.dim)
        throw DomainError("input length " + std::to_string(x.size()) +
                          " does not match mask size " + std::to_string(mask.dim));
    Vector y = mask.apply(x);
    write_tensor(out, tensor_from_vector(y));
    if (oracle) {
        Vector dense = matvec(mask.materialize(oracle_cap), x);
        std::cout << "oracle_rel_error " << rel_error(y, dense) << "\n";
    }
    return 0;
}

FeatureMap make_feature_map(const std::string& phi, std::size_t m, std::size_t d_qk,
                            std::uint64_t seed) {
    if (phi == "relu") return ReluMap{};
    if (phi == "elu1") return EluPlus1Map{};
    if (phi == "square") return SquareMap{};
    if (phi == "softmax-rf") return PositiveSoftmaxRF(m, d_qk, seed);
    throw DomainError("unknown feature map: " + phi + " (relu|elu1|square|softmax-rf)");
}

int cmd_attend(const std::string& descriptor, const std::string& q_path,
               const std::string& k_path, const std::string& v_path, const std::string& out,
               const std::string& phi, std::size_t m, std::uint64_t seed, bool oracle,
               std::size_t oracle_cap) {
    AttentionInputs in{matrix_from_tensor(read_tensor(q_path)),
                       matrix_from_tensor(read_tensor(k_path)),
                       matrix_from_tensor(read_tensor(v_path))};
    FeatureMap map = make_feature_map(phi, m, in.q.cols, seed);
    DenseMatrix r;
    if (descriptor.empty()) {
        r = attention_unmasked(in, map);
    } else {
        MaskHandle mask = parse_mask_descriptor(descriptor);
        r = attention_masked(
            in, map, [&](const DenseMatrix& x) { return mask.apply_matrix(x); }, mask.dim);
        if (oracle) {
            DenseMatrix dense = dense_kernel_attention(in, map, mask.materialize(oracle_cap),
                                                       oracle_cap);
            std::cout << "oracle_rel_error " << rel_error(r.data, dense.data) << "\n";
        }
    }
    write_tensor(out, tensor_from_matrix(r));
    return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed) {
    VerifyReport rep = run_verify(suite, seed);
    std::cout << rep.text();
    return rep.all_pass() ? 0 : 1;
}

int cmd_bench(const std::string& family, std::size_t lo, std::size_t hi, std::size_t reps,
              const std::string& out, bool fit, std::uint64_t seed) {
    auto points = run_bench(family, pow2_sweep(lo, hi), reps, seed);
    std::string csv = bench_csv(points);
    if (out.empty()) {
        std::cout << csv;
    } else {
        std::ofstream f(out);
        if (!f) throw DomainError("cannot open " + out);
        f << csv;
    }
    if (fit) std::cout << "loglog_slope " << loglog_slope(points) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"topomask: matrix-free topological masks for low-rank attention"};
    app.require_subcommand(1);
    app.footer(mask_descriptor_grammar());

    auto* gen = app.add_subcommand("gen", "Generate graphs, trees, and tensors");
    std::string gen_kind, gen_out = "out.txt", gen_dims = "8x8";
    std::size_t gen_n = 16, gen_d = 4;
    double gen_p = 0.1;
    std::uint64_t gen_seed = 0;
    bool gen_weighted = false;
    gen->add_option("kind", gen_kind,
                    "grid|hypercube|random-tree|path|random-graph|random-tensor")
        ->required();
    gen->add_option("-o,--out", gen_out, "Output path");
    gen->add_option("--dims", gen_dims, "Grid/tensor dims, n1xn2x...");
    gen->add_option("--L,-n", gen_n, "Node count");
    gen->add_option("--d", gen_d, "Hypercube dimension");
    gen->add_option("--p", gen_p, "Extra-edge probability for random-graph");
    gen->add_option("--seed", gen_seed, "Seed");
    gen->add_flag("--weighted", gen_weighted, "Random edge weights for random-tree");

    auto* matvec_cmd = app.add_subcommand("matvec", "Apply a mask to a vector");
    std::string mv_mask, mv_x, mv_out = "y.tmv";
    bool mv_oracle = false;
    std::size_t mv_cap = 4096;
    matvec_cmd->add_option("--mask", mv_mask, "Mask descriptor line")->required();
    matvec_cmd->add_option("--x", mv_x, "Input vector (tensor file)")->required();
    matvec_cmd->add_option("-o,--out", mv_out, "Output tensor file");
    matvec_cmd->add_flag("--oracle", mv_oracle, "Also run the dense oracle and print the error");
    matvec_cmd->add_option("--oracle-cap", mv_cap, "Dense oracle size cap");

    auto* attend = app.add_subcommand("attend", "Masked kernel attention");
    std::string at_mask, at_q, at_k, at_v, at_out = "r.tmv", at_phi = "relu";
    std::size_t at_m = 256, at_cap = 4096;
    std::uint64_t at_seed = 0;
    bool at_oracle = false;
    attend->add_option("--mask", at_mask, "Mask descriptor line (omit for unmasked)");
    attend->add_option("--q", at_q, "Query tensor file")->required();
    attend->add_option("--k", at_k, "Key tensor file")->required();
    attend->add_option("--v", at_v, "Value tensor file")->required();
    attend->add_option("-o,--out", at_out, "Output tensor file");
    attend->add_option("--phi", at_phi, "Feature map: relu|elu1|square|softmax-rf");
    attend->add_option("--m", at_m, "Random feature count for softmax-rf");
    attend->add_option("--seed", at_seed, "Feature map seed");
    attend->add_flag("--oracle", at_oracle, "Compare against the dense oracle");
    attend->add_option("--oracle-cap", at_cap, "Dense oracle size cap");

    auto* verify = app.add_subcommand("verify", "Run property suites");
    std::string vf_suite = "all";
    std::uint64_t vf_seed = 1;
    verify->add_option("suite", vf_suite, "structured|trees|diffusion|rwgnk|attention|all");
    verify->add_option("--seed", vf_seed, "Seed");

    auto* bench = app.add_subcommand("bench", "Benchmark mask applies");
    std::string bn_family = "toeplitz", bn_out;
    std::size_t bn_lo = 12, bn_hi = 20, bn_reps = 5;
    std::uint64_t bn_seed = 0;
    bool bn_fit = false;
    bench->add_option("family", bn_family,
                      "toeplitz|blocktoeplitz|causal|tree-expaffine|tree-sep");
    bench->add_option("--lo", bn_lo, "Smallest size exponent (L = 2^lo)");
    bench->add_option("--hi", bn_hi, "Largest size exponent");
    bench->add_option("--reps", bn_reps, "Measured repetitions per size");
    bench->add_option("-o,--out", bn_out, "CSV output path (default: stdout)");
    bench->add_flag("--fit", bn_fit, "Print the log-log slope");
    bench->add_option("--seed", bn_seed, "Seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) return cmd_gen(gen_kind, gen_out, gen_dims, gen_n, gen_d, gen_p, gen_seed,
                                 gen_weighted);
        if (*matvec_cmd) return cmd_matvec(mv_mask, mv_x, mv_out, mv_oracle, mv_cap);
        if (*attend)
            return cmd_attend(at_mask, at_q, at_k, at_v, at_out, at_phi, at_m, at_seed, at_oracle,
                              at_cap);
        if (*verify) return cmd_verify(vf_suite, vf_seed);
        if (*bench) return cmd_bench(bn_family, bn_lo, bn_hi, bn_reps, bn_out, bn_fit, bn_seed);
    } catch (const topomask::DegenerateRowError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const topomask::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const topomask::ResourceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const topomask::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
