#include "minar/simulate.hpp"

#include <stdexcept>

namespace minar {

MultiCountSeries simulate(const MinarModel& model, const SimulateOptions& options, Rng& rng,
                          const std::vector<double>& covariates_row_major,
                          const std::vector<std::string>& covariate_names) {
    const int n = model.dim();
    const InnovationModel& innov = model.innovations();
    const bool regression = innov.mode() == InnovationModel::Mode::regression;
    const int p = innov.covariate_count();

    if (options.length <= 0) throw std::invalid_argument("simulate: length must be positive");
    if (options.burn_in < 0) throw std::invalid_argument("simulate: negative burn-in");
    if (regression) {
        if (static_cast<int>(covariate_names.size()) != p)
            throw std::invalid_argument("simulate: covariate names do not match the model");
        if (covariates_row_major.size() < static_cast<size_t>(options.length) * p)
            throw std::invalid_argument("simulate: covariates shorter than the horizon");
    } else if (!covariates_row_major.empty() && covariate_names.empty()) {
        throw std::invalid_argument("simulate: covariates without names");
    }

    if (options.outbreak) {
        options.outbreak->validate(n);
        const int row = options.outbreak->time - options.origin;
        if (row < 0 || row >= options.length)
            throw std::invalid_argument("simulate: outbreak time outside the simulated horizon");
    }

    auto covariate_row = [&](int r) -> std::span<const double> {
        if (!regression) return {};
        return {covariates_row_major.data() + static_cast<size_t>(r) * p,
                static_cast<size_t>(p)};
    };

    // Stationary-mean initialization; regression mode uses the first
    // covariate row as the reference point.
    const Vec mu = stationary_mean(model, covariate_row(0));
    std::vector<long> state(n);
    for (int i = 0; i < n; ++i) state[i] = rng.poisson(mu[i]);

    std::vector<long> next(n);
    auto step = [&](std::span<const double> z, const double* kappa) {
        for (int i = 0; i < n; ++i) {
            long sum = 0;
            for (int j = 0; j < n; ++j) sum += thin(state[j], model.thinning().at(i, j), rng);
            sum += rng.poisson(innov.mean(i, z));
            if (kappa != nullptr && kappa[i] > 0.0) sum += rng.poisson(kappa[i]);
            next[i] = sum;
        }
        state.swap(next);
    };

    for (int b = 0; b < options.burn_in; ++b) step(covariate_row(0), nullptr);

    MultiCountSeries out;
    out.n = n;
    out.origin = options.origin;
    out.counts.reserve(static_cast<size_t>(options.length) * n);
    if (regression) {
        out.covariate_names = covariate_names;
        out.covariates.assign(covariates_row_major.begin(),
                              covariates_row_major.begin() +
                                  static_cast<size_t>(options.length) * p);
    }

    const int outbreak_row =
        options.outbreak ? options.outbreak->time - options.origin : -1;
    for (int r = 0; r < options.length; ++r) {
        const double* kappa =
            (r == outbreak_row) ? options.outbreak->kappa.data() : nullptr;
        step(covariate_row(r), kappa);
        for (int i = 0; i < n; ++i) out.counts.push_back(state[i]);
    }
    return out;
}

} // namespace minar
