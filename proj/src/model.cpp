#include "minar/model.hpp"

#include <cmath>
#include <stdexcept>

namespace minar {

ThinningMatrix::ThinningMatrix(Matrix alpha) : alpha_(std::move(alpha)) {
    if (alpha_.rows() != alpha_.cols() || alpha_.rows() == 0)
        throw std::invalid_argument("ThinningMatrix: must be square and non-empty");
    for (double v : alpha_.data())
        if (!(v >= 0.0 && v <= 1.0))
            throw std::domain_error("ThinningMatrix: entries must lie in [0, 1]");
    rho_ = minar::spectral_radius(alpha_);
    if (rho_ >= 1.0 - kStationarityMargin)
        throw std::domain_error("ThinningMatrix: spectral radius >= 1, process not stationary");
}

Matrix ThinningMatrix::bernoulli_variance() const {
    Matrix b(dim(), dim());
    for (int i = 0; i < dim(); ++i)
        for (int j = 0; j < dim(); ++j) b(i, j) = alpha_(i, j) * (1.0 - alpha_(i, j));
    return b;
}

InnovationModel InnovationModel::constant(Vec lambda) {
    InnovationModel m;
    m.mode_ = Mode::constant;
    m.n_ = static_cast<int>(lambda.size());
    if (m.n_ == 0) throw std::invalid_argument("InnovationModel: empty lambda");
    for (double l : lambda)
        if (!(l > 0.0) || !std::isfinite(l))
            throw std::domain_error("InnovationModel: lambda must be positive");
    m.lambda_ = std::move(lambda);
    return m;
}

InnovationModel InnovationModel::regression(std::vector<Vec> beta,
                                            std::vector<std::string> covariate_names) {
    InnovationModel m;
    m.mode_ = Mode::regression;
    m.n_ = static_cast<int>(beta.size());
    if (m.n_ == 0) throw std::invalid_argument("InnovationModel: empty beta");
    m.p_ = static_cast<int>(beta.front().size()) - 1;
    if (m.p_ < 0) throw std::invalid_argument("InnovationModel: beta needs an intercept");
    for (const Vec& b : beta) {
        if (static_cast<int>(b.size()) != m.p_ + 1)
            throw std::invalid_argument("InnovationModel: ragged beta");
        for (double v : b)
            if (!std::isfinite(v))
                throw std::domain_error("InnovationModel: non-finite coefficient");
    }
    if (static_cast<int>(covariate_names.size()) != m.p_)
        throw std::invalid_argument("InnovationModel: covariate name count != p");
    m.beta_ = std::move(beta);
    m.covariate_names_ = std::move(covariate_names);
    return m;
}

double InnovationModel::mean(int i, std::span<const double> z) const {
    if (i < 0 || i >= n_) throw std::out_of_range("InnovationModel::mean: bad series index");
    if (mode_ == Mode::constant) return lambda_[i];
    if (static_cast<int>(z.size()) != p_)
        throw std::invalid_argument("InnovationModel::mean: covariate row has wrong length");
    double eta = beta_[i][0];
    for (int k = 0; k < p_; ++k) eta += beta_[i][k + 1] * z[k];
    return std::exp(eta);
}

MinarModel::MinarModel(ThinningMatrix a, InnovationModel innovations)
    : a_(std::move(a)), innovations_(std::move(innovations)) {
    if (a_.dim() != innovations_.dim())
        throw std::invalid_argument("MinarModel: dimension mismatch between A and innovations");
}

void OutbreakSpec::validate(int dim) const {
    if (static_cast<int>(kappa.size()) != dim)
        throw std::invalid_argument("OutbreakSpec: kappa length != model dimension");
    for (double k : kappa)
        if (!(k >= 0.0) || !std::isfinite(k))
            throw std::domain_error("OutbreakSpec: kappa must be >= 0");
}

static Vec innovation_means(const MinarModel& model, std::span<const double> reference_z) {
    const InnovationModel& innov = model.innovations();
    if (innov.mode() == InnovationModel::Mode::regression && reference_z.empty())
        throw std::invalid_argument(
            "stationary moments in regression mode need a reference covariate row");
    Vec mu_eps(model.dim());
    for (int i = 0; i < model.dim(); ++i) mu_eps[i] = innov.mean(i, reference_z);
    return mu_eps;
}

Vec stationary_mean(const MinarModel& model, std::span<const double> reference_z) {
    const int n = model.dim();
    const Vec mu_eps = innovation_means(model, reference_z);
    Matrix i_minus_a = Matrix::identity(n) - model.thinning().matrix();
    return solve(std::move(i_minus_a), mu_eps);
}

Matrix autocovariance(const MinarModel& model, int lag, std::span<const double> reference_z) {
    if (lag < 0) throw std::invalid_argument("autocovariance: negative lag");
    const int n = model.dim();
    const Matrix& a = model.thinning().matrix();
    const Vec mu = stationary_mean(model, reference_z);
    const Vec mu_eps = innovation_means(model, reference_z);

    // diag(B mu) + Sigma_eps, the per-step noise contribution.
    const Vec bmu = model.thinning().bernoulli_variance() * mu;
    Matrix noise(n, n);
    for (int i = 0; i < n; ++i) noise(i, i) = bmu[i] + mu_eps[i];

    // Fixed-point iteration for gamma(0); geometric convergence because the
    // spectral radius is below 1.
    Matrix gamma = noise;
    const Matrix at = a.transposed();
    for (int iter = 0; iter < 100000; ++iter) {
        Matrix next = a * gamma * at + noise;
        const double delta = max_abs_diff(next, gamma);
        gamma = std::move(next);
        if (delta < 1e-12) break;
        if (iter == 99999)
            throw std::runtime_error("autocovariance: fixed-point iteration did not converge");
    }

    for (int h = 0; h < lag; ++h) gamma = a * gamma;
    return gamma;
}

BivariateMoments bivariate_moments(const Matrix& alpha, const Vec& lambda) {
    if (alpha.rows() != 2 || alpha.cols() != 2 || lambda.size() != 2)
        throw std::invalid_argument("bivariate_moments: inputs must be 2-dimensional");
    for (double v : alpha.data())
        if (!(v >= 0.0 && v <= 1.0))
            throw std::domain_error("bivariate_moments: entries must lie in [0, 1]");
    const double a11 = alpha(0, 0), a12 = alpha(0, 1), a21 = alpha(1, 0), a22 = alpha(1, 1);
    const double denom = (1.0 - a11) * (1.0 - a22) - a12 * a21;
    if (denom <= 0.0)
        throw std::domain_error("bivariate_moments: non-stationary (denominator <= 0)");

    BivariateMoments m{};
    m.mu1 = ((1.0 - a22) * lambda[0] + a12 * lambda[1]) / denom;
    m.mu2 = ((1.0 - a11) * lambda[1] + a21 * lambda[0]) / denom;

    // Linear system in (gamma11, gamma22, gamma12) exactly as printed:
    //   gamma11 (1-a11^2) = (1-a11^2) mu1 + a12^2 (gamma22 - mu2) + 2 a11 a12 gamma12
    //   gamma22 (1-a22^2) = (1-a22^2) mu2 + a21^2 (gamma11 - mu1) + 2 a22 a21 gamma12
    //   gamma12 (1 - a11 a22 - a12 a21) = a11 a21 gamma11 + a22 a12 gamma22
    Matrix sys(3, 3);
    Vec rhs(3);
    sys(0, 0) = 1.0 - a11 * a11;
    sys(0, 1) = -a12 * a12;
    sys(0, 2) = -2.0 * a11 * a12;
    rhs[0] = (1.0 - a11 * a11) * m.mu1 - a12 * a12 * m.mu2;
    sys(1, 0) = -a21 * a21;
    sys(1, 1) = 1.0 - a22 * a22;
    sys(1, 2) = -2.0 * a22 * a21;
    rhs[1] = (1.0 - a22 * a22) * m.mu2 - a21 * a21 * m.mu1;
    sys(2, 0) = -a11 * a21;
    sys(2, 1) = -a22 * a12;
    sys(2, 2) = 1.0 - a11 * a22 - a12 * a21;
    rhs[2] = 0.0;

    const Vec g = solve(std::move(sys), std::move(rhs));
    m.gamma11 = g[0];
    m.gamma22 = g[1];
    m.gamma12 = g[2];
    return m;
}

} // namespace minar
