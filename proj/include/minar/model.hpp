#ifndef MINAR_MODEL_HPP
#define MINAR_MODEL_HPP

#include <span>
#include <string>
#include <vector>

#include "minar/linalg.hpp"

namespace minar {

// Margin kept between the spectral radius and 1 when a thinning matrix is
// accepted as stationary.
inline constexpr double kStationarityMargin = 1e-9;

// The epidemic component: an n x n matrix of thinning probabilities.
// Construction enforces entries in [0, 1] and spectral radius < 1, so a
// ThinningMatrix always describes a stationary process.
class ThinningMatrix {
public:
    explicit ThinningMatrix(Matrix alpha);

    int dim() const { return alpha_.rows(); }
    double at(int i, int j) const { return alpha_(i, j); }
    std::span<const double> row(int i) const { return alpha_.row(i); }
    const Matrix& matrix() const { return alpha_; }
    double spectral_radius() const { return rho_; }

    // B with entries alpha_ij (1 - alpha_ij), the thinning variance factors.
    Matrix bernoulli_variance() const;

private:
    Matrix alpha_;
    double rho_;
};

// The endemic component: per-series Poisson innovation means, either constant
// or log-linear in covariates.
class InnovationModel {
public:
    enum class Mode { constant, regression };

    // Inert empty model; real instances come from the factories below.
    InnovationModel() = default;

    static InnovationModel constant(Vec lambda);
    static InnovationModel regression(std::vector<Vec> beta,
                                      std::vector<std::string> covariate_names);

    Mode mode() const { return mode_; }
    int dim() const { return n_; }
    int covariate_count() const { return p_; }

    // Innovation mean of series i. In regression mode z must carry the
    // covariate row (length p); exp(beta_i0 + z' beta_i) is positive for any
    // finite coefficients.
    double mean(int i, std::span<const double> z = {}) const;

    const Vec& lambda() const { return lambda_; }
    const std::vector<Vec>& beta() const { return beta_; }
    const std::vector<std::string>& covariate_names() const { return covariate_names_; }

private:
    Mode mode_ = Mode::constant;
    int n_ = 0;
    int p_ = 0;
    Vec lambda_;                 // constant mode
    std::vector<Vec> beta_;      // regression mode, beta_[i] has p+1 entries
    std::vector<std::string> covariate_names_;
};

// The MINAR(1) process X_t = A ∘ X_{t-1} + eps_t with independent
// counting series and independent Poisson innovations.
class MinarModel {
public:
    MinarModel(ThinningMatrix a, InnovationModel innovations);

    int dim() const { return a_.dim(); }
    const ThinningMatrix& thinning() const { return a_; }
    const InnovationModel& innovations() const { return innovations_; }

private:
    ThinningMatrix a_;
    InnovationModel innovations_;
};

// An injected outbreak: an extra Poisson(kappa_i) count added to series i at
// one time step.
struct OutbreakSpec {
    int time = 0;  // time value, not row index
    Vec kappa;     // expected added count per series, all >= 0

    void validate(int dim) const;
};

// mu = (I - A)^{-1} mu_eps. Constant innovation mode only unless a reference
// covariate row is supplied.
Vec stationary_mean(const MinarModel& model, std::span<const double> reference_z = {});

// gamma(h): lag-h autocovariance matrix. h = 0 solves the fixed point
// gamma(0) = A gamma(0) A' + diag(B mu) + diag(lambda); h >= 1 applies
// A^h gamma(0).
Matrix autocovariance(const MinarModel& model, int lag,
                      std::span<const double> reference_z = {});

// Closed-form bivariate moments. Takes a raw matrix so that the
// non-stationarity error path (denominator <= 0) stays reachable.
struct BivariateMoments {
    double mu1, mu2;
    double gamma11, gamma22, gamma12;
};
BivariateMoments bivariate_moments(const Matrix& alpha, const Vec& lambda);

} // namespace minar

#endif
