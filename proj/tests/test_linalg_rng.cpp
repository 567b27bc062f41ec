#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "minar/linalg.hpp"
#include "minar/rng.hpp"

using namespace minar;

namespace {

Matrix study_matrix() {
    return Matrix::from_rows({{0.3, 0.1, 0.2}, {0.2, 0.4, 0.2}, {0.3, 0.2, 0.2}});
}

// det(xI - A) for a 3x3 matrix, expanded directly.
double char_poly_3x3(const Matrix& a, double x) {
    const double m00 = x - a(0, 0), m01 = -a(0, 1), m02 = -a(0, 2);
    const double m10 = -a(1, 0), m11 = x - a(1, 1), m12 = -a(1, 2);
    const double m20 = -a(2, 0), m21 = -a(2, 1), m22 = x - a(2, 2);
    return m00 * (m11 * m22 - m12 * m21) - m01 * (m10 * m22 - m12 * m20) +
           m02 * (m10 * m21 - m11 * m20);
}

} // namespace

TEST_CASE("solve recovers a known solution") {
    Matrix a = Matrix::from_rows({{2.0, 1.0}, {1.0, 3.0}});
    const Vec x = solve(a, {5.0, 10.0});
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK_THROWS(solve(Matrix(2, 2, 0.0), {1.0, 1.0}));
}

TEST_CASE("spectral radius: zero, diagonal, dense") {
    CHECK(spectral_radius(Matrix(3, 3, 0.0)) == doctest::Approx(0.0).epsilon(1e-12));

    const Matrix d = Matrix::diagonal({0.3, 0.4, 0.2});
    CHECK(spectral_radius(d) == doctest::Approx(0.4).epsilon(1e-10));

    // Dense 3x3 case against a characteristic-polynomial bisection oracle.
    const Matrix a = study_matrix();
    const double rho = spectral_radius(a);
    CHECK(rho > 0.0);
    CHECK(rho < 1.0);

    double hi = 0.9; // above the max row sum, p(hi) > 0
    double lo = hi;
    while (char_poly_3x3(a, lo) > 0.0) lo -= 0.01;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (char_poly_3x3(a, mid) > 0.0 ? hi : lo) = mid;
    }
    CHECK(rho == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-8));
}

TEST_CASE("cholesky inverse of an SPD matrix") {
    const Matrix a = Matrix::from_rows({{4.0, 1.0, 0.5}, {1.0, 3.0, 0.2}, {0.5, 0.2, 2.0}});
    bool ok = false;
    const Matrix inv = invert_spd(a, ok);
    REQUIRE(ok);
    const Matrix prod = a * inv;
    CHECK(max_abs_diff(prod, Matrix::identity(3)) < 1e-12);

    const Matrix not_pd = Matrix::from_rows({{1.0, 2.0}, {2.0, 1.0}});
    invert_spd(not_pd, ok);
    CHECK_FALSE(ok);
}

TEST_CASE("seed derivation separates streams deterministically") {
    CHECK(derive_seed(42, 0) == derive_seed(42, 0));
    CHECK(derive_seed(42, 0) != derive_seed(42, 1));
    CHECK(derive_seed(42, 0) != derive_seed(43, 0));
}

TEST_CASE("rng streams are reproducible") {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.uniform() == b.uniform());
        CHECK(a.poisson(3.7) == b.poisson(3.7));
        CHECK(a.binomial(17, 0.42) == b.binomial(17, 0.42));
    }
}

TEST_CASE("thinning operator bounds and edge probabilities") {
    Rng rng(5);
    CHECK(thin(7, 0.0, rng) == 0);
    CHECK(thin(7, 1.0, rng) == 7);
    CHECK(thin(0, 0.5, rng) == 0);
    CHECK_THROWS_AS(thin(5, 1.5, rng), std::domain_error);
    CHECK_THROWS_AS(thin(-1, 0.5, rng), std::domain_error);
    for (int i = 0; i < 1000; ++i) {
        const long v = thin(11, 0.37, rng);
        CHECK(v >= 0);
        CHECK(v <= 11);
    }
}

TEST_CASE("thin(20, 0.3) matches the binomial mean") {
    Rng rng(2024);
    double sum = 0.0;
    const int reps = 100000;
    for (int i = 0; i < reps; ++i) sum += static_cast<double>(thin(20, 0.3, rng));
    CHECK(sum / reps == doctest::Approx(6.0).epsilon(0.1 / 6.0));
}

TEST_CASE("poisson sampler mean and variance, including the split path") {
    Rng rng(99);
    for (const double mean : {0.7, 12.0, 87.5}) {
        const int reps = 60000;
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < reps; ++i) {
            const double v = static_cast<double>(rng.poisson(mean));
            s += v;
            s2 += v * v;
        }
        const double m = s / reps;
        const double var = s2 / reps - m * m;
        const double se = std::sqrt(mean / reps);
        CHECK(std::abs(m - mean) < 5.0 * se);
        CHECK(var == doctest::Approx(mean).epsilon(0.1));
    }
}

TEST_CASE("binomial sampler inversion path matches moments") {
    Rng rng(7);
    const long n = 200;
    const double p = 0.31;
    const int reps = 60000;
    double s = 0.0;
    for (int i = 0; i < reps; ++i) s += static_cast<double>(rng.binomial(n, p));
    const double se = std::sqrt(n * p * (1 - p) / reps);
    CHECK(std::abs(s / reps - n * p) < 5.0 * se);
}
