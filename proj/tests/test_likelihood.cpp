#include "doctest.h"

#include <stdexcept>

#include <cmath>

#include "minar/estimation.hpp"
#include "minar/likelihood.hpp"
#include "minar/rng.hpp"
#include "minar/simulate.hpp"

using namespace minar;

namespace {

double pois_log_pmf(double lambda, long k) {
    return -lambda + k * std::log(lambda) - std::lgamma(static_cast<double>(k) + 1.0);
}

MultiCountSeries make_series(int n, std::vector<long> counts) {
    MultiCountSeries s;
    s.n = n;
    s.counts = std::move(counts);
    return s;
}

} // namespace

TEST_CASE("no thinning: log-likelihood is a sum of Poisson log masses") {
    const Matrix a(2, 2, 0.0);
    const auto innov = InnovationModel::constant({1.2, 0.7});
    const MultiCountSeries s = make_series(2, {1, 0, 2, 3, 0, 1, 4, 2});
    double expect = 0.0;
    for (int t = 1; t < 4; ++t)
        for (int i = 0; i < 2; ++i)
            expect += pois_log_pmf(innov.lambda()[i], s.count(t, i));
    CHECK(conditional_log_likelihood(a, innov, s) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("all-zero series: each step contributes -lambda") {
    const int T = 21;
    const MultiCountSeries s = make_series(1, std::vector<long>(T, 0));
    const Matrix a(1, 1, 0.5);
    CHECK(conditional_log_likelihood(a, InnovationModel::constant({1.0}), s) ==
          doctest::Approx(-(T - 1.0)).epsilon(1e-12));
}

TEST_CASE("matches the enumeration oracle on a random trivariate instance") {
    Matrix a = Matrix::from_rows({{0.3, 0.1, 0.2}, {0.2, 0.4, 0.2}, {0.3, 0.2, 0.2}});
    const auto innov = InnovationModel::constant({1.0, 1.0, 1.0});
    MinarModel model(ThinningMatrix(a), innov);
    Rng rng(4242);
    SimulateOptions opts;
    opts.length = 40;
    const MultiCountSeries s = simulate(model, opts, rng);

    double expect = 0.0;
    for (int t = 1; t < s.length(); ++t)
        for (int i = 0; i < 3; ++i) {
            const ConditionalPmf oracle = brute_force_conditional_pmf(s.row(t - 1), a.row(i), 1.0);
            expect += std::log(oracle.mass(s.count(t, i)));
        }
    CHECK(conditional_log_likelihood(a, innov, s) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("invariant under relabeling the series") {
    Matrix a = Matrix::from_rows({{0.3, 0.1}, {0.2, 0.4}});
    const auto innov = InnovationModel::constant({1.0, 2.0});
    MinarModel model(ThinningMatrix(a), innov);
    Rng rng(7);
    SimulateOptions opts;
    opts.length = 60;
    const MultiCountSeries s = simulate(model, opts, rng);

    // Swap the two series everywhere.
    Matrix a_swapped = Matrix::from_rows({{0.4, 0.2}, {0.1, 0.3}});
    const auto innov_swapped = InnovationModel::constant({2.0, 1.0});
    MultiCountSeries swapped = s;
    for (int t = 0; t < s.length(); ++t) {
        swapped.count(t, 0) = s.count(t, 1);
        swapped.count(t, 1) = s.count(t, 0);
    }
    CHECK(conditional_log_likelihood(a, innov, s) ==
          doctest::Approx(conditional_log_likelihood(a_swapped, innov_swapped, swapped))
              .epsilon(1e-12));
}

TEST_CASE("zero-mass observations hit the penalty, not -inf") {
    const Matrix a(1, 1, 0.0);
    const auto innov = InnovationModel::constant({0.5});
    // 500 is far beyond the truncated Poisson(0.5) support.
    const MultiCountSeries s = make_series(1, {0, 500, 0});
    int violations = 0;
    const double ll = conditional_log_likelihood(a, innov, s, {}, &violations);
    CHECK(violations == 1);
    CHECK(std::isfinite(ll));
    CHECK(ll < -1e9);
}

TEST_CASE("input validation") {
    const Matrix a(1, 1, 0.0);
    const auto innov = InnovationModel::constant({1.0});
    CHECK_THROWS_AS(conditional_log_likelihood(a, innov, make_series(1, {3})), std::domain_error);
    CHECK_THROWS_AS(
        conditional_log_likelihood(Matrix(2, 2, 0.0), innov, make_series(1, {1, 2})),
        std::invalid_argument);
}

TEST_CASE("tenfold looser Poisson truncation barely moves the log-likelihood") {
    Matrix a = Matrix::from_rows({{0.3, 0.1, 0.2}, {0.2, 0.4, 0.2}, {0.3, 0.2, 0.2}});
    const auto innov = InnovationModel::constant({1.0, 1.0, 1.0});
    MinarModel model(ThinningMatrix(a), innov);
    Rng rng(99);
    SimulateOptions opts;
    opts.length = 200;
    const MultiCountSeries s = simulate(model, opts, rng);

    LogLikOptions tight, loose;
    tight.tail_tol = 1e-12;
    loose.tail_tol = 1e-11;
    const double l1 = conditional_log_likelihood(a, innov, s, tight);
    const double l2 = conditional_log_likelihood(a, innov, s, loose);
    CHECK(std::abs(l1 - l2) < 1e-8);
}

TEST_CASE("packed-theta likelihood agrees with the model form") {
    Matrix a = Matrix::from_rows({{0.3, 0.1}, {0.2, 0.4}});
    const auto innov = InnovationModel::constant({1.0, 2.0});
    MinarModel model(ThinningMatrix(a), innov);
    Rng rng(12);
    SimulateOptions opts;
    opts.length = 30;
    const MultiCountSeries s = simulate(model, opts, rng);
    const auto layout = ParameterLayout::constant(2, AStructure::full);
    const Vec theta{0.3, 0.1, 0.2, 0.4, 1.0, 2.0};
    CHECK(conditional_log_likelihood(theta, s, layout) ==
          doctest::Approx(conditional_log_likelihood(model, s)).epsilon(1e-14));
}

TEST_CASE("regression innovations use the covariate row of the predicted step") {
    // One series, lambda_t = exp(b0 + b1 z_t); hand-computed two-step check.
    const Matrix a(1, 1, 0.0);
    const auto innov = InnovationModel::regression({{0.2, 0.5}}, {"z"});
    MultiCountSeries s = make_series(1, {1, 2, 0});
    s.covariate_names = {"z"};
    s.covariates = {10.0, 1.0, -1.0}; // row 0 unused by the likelihood
    const double l2 = std::exp(0.2 + 0.5 * 1.0);
    const double l3 = std::exp(0.2 + 0.5 * -1.0);
    const double expect = pois_log_pmf(l2, 2) + pois_log_pmf(l3, 0);
    CHECK(conditional_log_likelihood(a, innov, s) == doctest::Approx(expect).epsilon(1e-12));
}
