#ifndef MINAR_RNG_HPP
#define MINAR_RNG_HPP

#include <cstdint>
#include <random>

namespace minar {

// Seed derivation for parallel replicates: base seed and stream index are
// mixed through SplitMix64 so that nearby indices give unrelated streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Deterministic random source. The Poisson and binomial samplers are
// implemented here (inversion / Bernoulli sums) rather than taken from
// <random> so that simulated series are reproducible independently of the
// standard library in use.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform draw in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Binomial(n, p) draw; exact for all n via Bernoulli sums (small n)
    // or sequential inversion.
    long binomial(long n, double p);

    // Poisson(mean) draw by sequential inversion; large means are split
    // into halves, which leaves the distribution unchanged.
    long poisson(double mean);

private:
    std::mt19937_64 engine_;
};

// Binomial thinning alpha ∘ count: the number of survivors among `count`
// independent Bernoulli(alpha) trials. Throws std::domain_error when alpha
// lies outside [0, 1] or count is negative.
long thin(long count, double alpha, Rng& rng);

} // namespace minar

#endif
