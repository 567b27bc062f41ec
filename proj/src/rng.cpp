#include "minar/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace minar {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + (stream + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

long Rng::binomial(long n, double p) {
    if (n < 0 || p < 0.0 || p > 1.0)
        throw std::domain_error("binomial: invalid parameters");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    if (p > 0.5) return n - binomial(n, 1.0 - p);
    if (n <= 32) {
        long k = 0;
        for (long i = 0; i < n; ++i) k += bernoulli(p) ? 1 : 0;
        return k;
    }
    // Sequential inversion through the pmf recurrence.
    const double u = uniform();
    const double q = 1.0 - p;
    double pk = std::exp(static_cast<double>(n) * std::log1p(-p));
    if (pk == 0.0) {
        // Start underflowed; fall back to two half-size draws.
        const long h = n / 2;
        return binomial(h, p) + binomial(n - h, p);
    }
    double cum = pk;
    long k = 0;
    const double ratio = p / q;
    while (u > cum && k < n) {
        ++k;
        pk *= ratio * static_cast<double>(n - k + 1) / static_cast<double>(k);
        cum += pk;
        if (pk == 0.0) break; // rounding exhausted the tail
    }
    return k;
}

long Rng::poisson(double mean) {
    if (mean < 0.0 || !std::isfinite(mean))
        throw std::domain_error("poisson: invalid mean");
    if (mean == 0.0) return 0;
    if (mean > 32.0) {
        const double half = mean / 2.0;
        return poisson(half) + poisson(mean - half);
    }
    const double u = uniform();
    double pk = std::exp(-mean);
    double cum = pk;
    long k = 0;
    const long cap = static_cast<long>(mean + 40.0 * std::sqrt(mean) + 128.0);
    while (u > cum && k < cap) {
        ++k;
        pk *= mean / static_cast<double>(k);
        cum += pk;
        if (pk == 0.0) break;
    }
    return k;
}

long thin(long count, double alpha, Rng& rng) {
    if (alpha < 0.0 || alpha > 1.0)
        throw std::domain_error("thin: alpha outside [0, 1]");
    if (count < 0)
        throw std::domain_error("thin: negative count");
    return rng.binomial(count, alpha);
}

} // namespace minar
