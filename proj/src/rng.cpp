#include "topomask/rng.hpp"

namespace topomask {

std::uint64_t Rng::poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    if (lambda <= 30.0) {
        // Inversion by sequential search on the cdf.
        double p = std::exp(-lambda);
        double cdf = p;
        double u = uniform();
        std::uint64_t k = 0;
        while (u > cdf) {
            ++k;
            p *= lambda / static_cast<double>(k);
            cdf += p;
            if (p <= 0.0) break;  // underflow guard in the far tail
        }
        return k;
    }
    // Transformed rejection (Hormann's PTRS): a squeezed rejection sampler
    // whose proposal is a transformed normal-shaped density.
    const double b = 0.931 + 2.53 * std::sqrt(lambda);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_lambda = std::log(lambda);
    for (;;) {
        double u = uniform() - 0.5;
        double v = uniform();
        double us = 0.5 - std::fabs(u);
        double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::uint64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        double rhs = kf * log_lambda - lambda - std::lgamma(kf + 1.0);
        if (lhs <= rhs) return static_cast<std::uint64_t>(kf);
    }
}

}  // namespace topomask
