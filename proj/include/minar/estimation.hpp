#ifndef MINAR_ESTIMATION_HPP
#define MINAR_ESTIMATION_HPP

#include <optional>
#include <string>
#include <vector>

#include "minar/likelihood.hpp"
#include "minar/model.hpp"
#include "minar/optim.hpp"
#include "minar/series.hpp"

namespace minar {

// Shape of the free parameter vector. `zero` fixes A at the zero matrix
// (independent counts), which is occasionally useful as a null model.
enum class AStructure { full, diagonal, zero };

struct ParameterLayout {
    int n = 0;
    AStructure structure = AStructure::full;
    InnovationModel::Mode mode = InnovationModel::Mode::constant;
    std::vector<std::string> covariate_names; // regression mode only

    static ParameterLayout constant(int n, AStructure structure);
    static ParameterLayout regression(int n, AStructure structure,
                                      std::vector<std::string> covariate_names);

    int covariate_count() const { return static_cast<int>(covariate_names.size()); }
    int alpha_count() const;
    int innovation_count() const;
    int total() const { return alpha_count() + innovation_count(); }

    // Index of the first innovation parameter of series i.
    int innovation_offset(int i) const;
    bool is_alpha_index(int k) const { return k < alpha_count(); }
};

struct UnpackedParams {
    Matrix alpha;
    InnovationModel innovations;
};

// Reporting-space packing: thinning probabilities first (row-major for the
// full structure, diagonal entries otherwise), then per-series innovation
// parameters. pack/unpack round-trip exactly.
Vec pack(const Matrix& alpha, const InnovationModel& innovations, const ParameterLayout& layout);
UnpackedParams unpack(const Vec& theta, const ParameterLayout& layout);

// Optimizer space: logit for thinning probabilities, log for constant
// innovation means, identity for regression coefficients.
Vec to_transformed(const Vec& theta, const ParameterLayout& layout);
Vec from_transformed(const Vec& u, const ParameterLayout& layout);

struct FitOptions {
    OptimOptions optim;
    double tail_tol = kDefaultTailTol;
    bool compute_se = true;
    std::optional<Vec> init; // reporting-space start, default derived from data
};

struct FittedModel {
    ParameterLayout layout;
    Vec theta;      // reporting space
    Vec se;         // NaN entries when unavailable
    bool se_available = false;
    double loglik = 0.0;
    bool converged = false;
    int iterations = 0;
    double grad_maxnorm = 0.0;    // transformed space, at the optimum
    double spectral_radius = 0.0; // of the fitted thinning matrix
    bool stationary = false;      // post-fit check; failure is a warning, not an error
    Matrix alpha;
    InnovationModel innovations;

    // Validated model; throws std::domain_error when the fit is non-stationary.
    MinarModel model() const;
};

// Log-likelihood of a packed reporting-space parameter vector; the form the
// optimizer maximizes (through the unconstrained transform) and the one
// finite-difference information matrices are built on.
double conditional_log_likelihood(const Vec& theta, const MultiCountSeries& data,
                                  const ParameterLayout& layout,
                                  const LogLikOptions& opts = {});

// Conditional maximum likelihood in transformed space. Deterministic given
// data, init and options. Non-convergence is reported through the flag,
// never silently.
FittedModel fit(const MultiCountSeries& data, const ParameterLayout& layout,
                const FitOptions& options = {});

// Default reporting-space start: weakly positive, diagonal-leaning thinning
// probabilities and innovation means matched to the marginal count means.
Vec default_init(const MultiCountSeries& data, const ParameterLayout& layout);

// Square roots of the diagonal of the inverse observed information, computed
// by central finite differences of the log-likelihood in the reporting
// parameterization (step max(1e-4, 1e-4 |theta_k|), shrunk only when a step
// would leave the parameter domain). `available` is false when the
// information matrix is not positive definite.
Vec standard_errors(const Vec& theta_hat, const ParameterLayout& layout,
                    const MultiCountSeries& data, bool& available,
                    double tail_tol = kDefaultTailTol);

// Design matrix with columns [weekday, cos(2*pi*t/period), sin(2*pi*t/period)];
// pass an empty weekday span to omit that column.
Matrix build_design(std::span<const int> times, std::span<const int> weekday, double period);
std::vector<std::string> design_column_names(bool with_weekday);

} // namespace minar

#endif
