#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace topomask {

struct BenchPoint {
    std::string family;
    std::size_t length = 0;
    double median_ns = 0.0;
    double p10_ns = 0.0;
    double p90_ns = 0.0;
};

// Families: toeplitz, blocktoeplitz, causal, tree-expaffine, tree-sep.
std::vector<std::string> bench_families();

// Times the fast apply for each L (operator setup excluded). One warmup rep
// is discarded; quantiles are over the remaining reps. Sub-millisecond runs
// loop the apply internally and report per-apply time.
std::vector<BenchPoint> run_bench(const std::string& family,
                                  const std::vector<std::size_t>& sizes, std::size_t reps,
                                  std::uint64_t seed);

// Least-squares slope of log2(median_ns) vs log2(L).
double loglog_slope(const std::vector<BenchPoint>& points);

// CSV with a `# threads=` header comment and `family,L,median_ns,p10_ns,p90_ns`.
std::string bench_csv(const std::vector<BenchPoint>& points);

// Default sweep 2^lo .. 2^hi.
std::vector<std::size_t> pow2_sweep(std::size_t lo, std::size_t hi);

}  // namespace topomask
