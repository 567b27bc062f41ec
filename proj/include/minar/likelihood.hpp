#ifndef MINAR_LIKELIHOOD_HPP
#define MINAR_LIKELIHOOD_HPP

#include "minar/model.hpp"
#include "minar/pmf.hpp"
#include "minar/series.hpp"

namespace minar {

struct LogLikOptions {
    double tail_tol = kDefaultTailTol;
    // Zero-probability observations contribute -penalty each instead of
    // -inf, so gradient-free optimizers can back out of bad regions.
    double zero_mass_penalty = 1e10;
};

// Conditional log-likelihood sum_{t=2}^{T} sum_i log f_i(x_it | x_{t-1}).
// The factorization over i is exact: all counting series and innovations
// are mutually independent given x_{t-1}. Accepts a raw thinning matrix so
// the optimizer may wander through non-stationary parameter regions.
// If zero_mass_count is non-null it receives the number of observations
// whose conditional mass vanished after truncation.
double conditional_log_likelihood(const Matrix& alpha, const InnovationModel& innovations,
                                  const MultiCountSeries& data, const LogLikOptions& opts = {},
                                  int* zero_mass_count = nullptr);

double conditional_log_likelihood(const MinarModel& model, const MultiCountSeries& data,
                                  const LogLikOptions& opts = {});

} // namespace minar

#endif
