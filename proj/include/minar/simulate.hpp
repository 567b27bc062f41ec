#ifndef MINAR_SIMULATE_HPP
#define MINAR_SIMULATE_HPP

#include <optional>

#include "minar/model.hpp"
#include "minar/rng.hpp"
#include "minar/series.hpp"

namespace minar {

struct SimulateOptions {
    int length = 0;                       // emitted rows
    int burn_in = 100;                    // discarded initial transitions
    int origin = 1;                       // time value of the first emitted row
    std::optional<OutbreakSpec> outbreak; // extra Poisson(kappa_i) at one step
};

// Forward simulation of X_t = A ∘ X_{t-1} + eps_t. The initial state is an
// independent Poisson draw at the stationary mean, followed by burn-in; in
// regression mode the first covariate row serves as the reference for both.
// Covariates must supply at least `length` rows and are copied into the
// result.
MultiCountSeries simulate(const MinarModel& model, const SimulateOptions& options, Rng& rng,
                          const std::vector<double>& covariates_row_major = {},
                          const std::vector<std::string>& covariate_names = {});

} // namespace minar

#endif
