#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace topomask {

// Counter-based generator (splitmix64 finalizer over key + counter * gamma).
// Streams derived via derive() are statistically independent, so parallel
// consumers can each own a stream keyed by (seed, id) and produce output
// independent of scheduling order.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : key_(seed), counter_(0) {}

    std::uint64_t next_u64() {
        std::uint64_t z = key_ + (++counter_) * 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) {
        // Rejection to avoid modulo bias.
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    // Standard normal via Box-Muller (one value per call, cached pair).
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

    // Poisson sampling: inversion for small mean, normal approximation with
    // rejection against the exact pmf ratio for large mean.
    std::uint64_t poisson(double lambda);

    // Independent stream for substream `id`.
    Rng derive(std::uint64_t id) const {
        std::uint64_t z = key_ ^ (0xd1342543de82ef95ULL * (id + 0x632be59bd9b4e019ULL));
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return Rng(z ^ (z >> 31));
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace topomask
