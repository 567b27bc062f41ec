#ifndef MINAR_PMF_HPP
#define MINAR_PMF_HPP

#include <span>

#include "minar/model.hpp"

namespace minar {

// Poisson supports are truncated at the smallest K whose CDF reaches
// 1 - kDefaultTailTol; binomial supports are finite and kept exact.
inline constexpr double kDefaultTailTol = 1e-12;

// Masses below this are flushed to zero during convolution.
inline constexpr double kMassFloor = 1e-300;

// A discrete distribution on {0, ..., bound} plus the truncated tail mass.
class ConditionalPmf {
public:
    ConditionalPmf(Vec masses, double tail_mass);

    int bound() const { return static_cast<int>(masses_.size()) - 1; }
    double mass(long k) const {
        return (k >= 0 && k <= bound()) ? masses_[static_cast<size_t>(k)] : 0.0;
    }
    double tail_mass() const { return tail_; }
    const Vec& masses() const { return masses_; }

    // Total probability accounted for (should be 1 up to rounding).
    double total() const;

    // Smallest q with CDF(q) >= 1 - alpha. Falls back to the support bound
    // when the target lies inside the truncated tail.
    int quantile_upper(double alpha) const;

private:
    Vec masses_;
    double tail_;
};

// Smallest K with Poisson CDF(K) >= 1 - tail_tol.
int poisson_support_bound(double lambda, double tail_tol = kDefaultTailTol);

// Same walk but never past `cap`; safe for arbitrarily large lambda, where
// everything below the cap carries negligible mass.
int poisson_support_bound_capped(double lambda, double tail_tol, int cap);

// Poisson masses 0..kmax. Robust against exp(-lambda) underflow.
Vec poisson_pmf_upto(double lambda, int kmax);

// Binomial(n, p) masses 0..kmax (kmax may be below n).
Vec binomial_pmf_upto(long n, double p, int kmax);

// Exact conditional pmf of sum_j Binomial(x_prev[j], alpha_row[j]) +
// Poisson(lambda), built by iterated discrete convolution. Stationarity of
// the full matrix is irrelevant here, so a raw thinning row is accepted.
ConditionalPmf conditional_pmf(std::span<const long> x_prev, std::span<const double> alpha_row,
                               double lambda, double tail_tol = kDefaultTailTol);

// Mass of the same distribution at one point; the convolution is capped at x,
// which leaves the value unchanged.
double conditional_mass_at(std::span<const long> x_prev, std::span<const double> alpha_row,
                           double lambda, long x, double tail_tol = kDefaultTailTol);

// Conditional pmf of series i given the previous observation vector. In
// regression mode z must carry the covariate row of the *predicted* step.
ConditionalPmf component_conditional_pmf(const MinarModel& model, int i,
                                         std::span<const long> x_prev,
                                         std::span<const double> z = {},
                                         double tail_tol = kDefaultTailTol);

// Testing oracle: enumerates every joint thinning outcome (s_1..s_n) with
// s_j <= x_prev[j], weights by binomial probabilities evaluated in log space,
// and mixes with a Poisson computed term by term. Same contract as
// conditional_pmf but no shared code path. Refuses when the product space
// exceeds max_combinations.
ConditionalPmf brute_force_conditional_pmf(std::span<const long> x_prev,
                                           std::span<const double> alpha_row, double lambda,
                                           double tail_tol = kDefaultTailTol,
                                           long max_combinations = 1000000);

} // namespace minar

#endif
