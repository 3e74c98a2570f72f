#include "topomask/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>

namespace topomask {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Plan {
    std::vector<std::size_t> bitrev;     // bit-reversal permutation
    std::vector<cplx> twiddle;           // e^{-2pi i k / n}, k in [0, n/2)
};

// Plans are immutable once built; the map is guarded for concurrent lookups.
std::shared_mutex plan_mutex;
std::map<std::size_t, Plan> plans;

const Plan& plan_for(std::size_t n) {
    {
        std::shared_lock lock(plan_mutex);
        auto it = plans.find(n);
        if (it != plans.end()) return it->second;
    }
    std::unique_lock lock(plan_mutex);
    auto it = plans.find(n);
    if (it != plans.end()) return it->second;
    Plan p;
    p.bitrev.resize(n);
    std::size_t log_n = 0;
    while ((std::size_t{1} << log_n) < n) ++log_n;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::size_t j = 0; j < log_n; ++j)
            if (i & (std::size_t{1} << j)) r |= std::size_t{1} << (log_n - 1 - j);
        p.bitrev[i] = r;
    }
    p.twiddle.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        double ang = -kTwoPi * static_cast<double>(k) / static_cast<double>(n);
        p.twiddle[k] = cplx(std::cos(ang), std::sin(ang));
    }
    return plans.emplace(n, std::move(p)).first->second;
}

}  // namespace

void fft(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n <= 1) return;
    const Plan& p = plan_for(n);
    for (std::size_t i = 0; i < n; ++i)
        if (i < p.bitrev[i]) std::swap(a[i], a[p.bitrev[i]]);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        std::size_t step = n / len;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t j = 0; j < len / 2; ++j) {
                cplx w = p.twiddle[j * step];
                if (inverse) w = std::conj(w);
                cplx u = a[i + j];
                cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
            }
        }
    }
    if (inverse) {
        double scale = 1.0 / static_cast<double>(n);
        for (auto& z : a) z *= scale;
    }
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) return {};
    std::size_t out_len = a.size() + b.size() - 1;
    std::size_t n = next_pow2(out_len);
    std::vector<cplx> fa(n), fb(n);
    for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
    fft(fa, false);
    fft(fb, false);
    for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
    fft(fa, true);
    std::vector<double> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) out[i] = fa[i].real();
    return out;
}

}  // namespace topomask
