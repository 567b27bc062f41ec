#include "minar/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace minar {

ParameterLayout ParameterLayout::constant(int n, AStructure structure) {
    if (n <= 0) throw std::invalid_argument("ParameterLayout: n must be positive");
    ParameterLayout l;
    l.n = n;
    l.structure = structure;
    l.mode = InnovationModel::Mode::constant;
    return l;
}

ParameterLayout ParameterLayout::regression(int n, AStructure structure,
                                            std::vector<std::string> covariate_names) {
    ParameterLayout l = constant(n, structure);
    l.mode = InnovationModel::Mode::regression;
    l.covariate_names = std::move(covariate_names);
    if (l.covariate_names.empty())
        throw std::invalid_argument("ParameterLayout: regression mode needs covariates");
    return l;
}

int ParameterLayout::alpha_count() const {
    switch (structure) {
    case AStructure::full: return n * n;
    case AStructure::diagonal: return n;
    case AStructure::zero: return 0;
    }
    return 0;
}

int ParameterLayout::innovation_count() const {
    return mode == InnovationModel::Mode::constant ? n : n * (covariate_count() + 1);
}

int ParameterLayout::innovation_offset(int i) const {
    const int per = mode == InnovationModel::Mode::constant ? 1 : covariate_count() + 1;
    return alpha_count() + i * per;
}

Vec pack(const Matrix& alpha, const InnovationModel& innovations, const ParameterLayout& layout) {
    const int n = layout.n;
    if (alpha.rows() != n || alpha.cols() != n || innovations.dim() != n)
        throw std::invalid_argument("pack: dimension mismatch");
    if (innovations.mode() != layout.mode)
        throw std::invalid_argument("pack: innovation mode mismatch");
    Vec theta;
    theta.reserve(layout.total());
    switch (layout.structure) {
    case AStructure::full:
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) theta.push_back(alpha(i, j));
        break;
    case AStructure::diagonal:
        for (int i = 0; i < n; ++i) theta.push_back(alpha(i, i));
        break;
    case AStructure::zero:
        break;
    }
    if (layout.mode == InnovationModel::Mode::constant) {
        for (int i = 0; i < n; ++i) theta.push_back(innovations.lambda()[i]);
    } else {
        if (innovations.covariate_count() != layout.covariate_count())
            throw std::invalid_argument("pack: covariate count mismatch");
        for (int i = 0; i < n; ++i)
            for (double b : innovations.beta()[i]) theta.push_back(b);
    }
    return theta;
}

UnpackedParams unpack(const Vec& theta, const ParameterLayout& layout) {
    if (static_cast<int>(theta.size()) != layout.total())
        throw std::invalid_argument("unpack: theta length != layout total");
    const int n = layout.n;
    Matrix alpha(n, n);
    int k = 0;
    switch (layout.structure) {
    case AStructure::full:
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) alpha(i, j) = theta[k++];
        break;
    case AStructure::diagonal:
        for (int i = 0; i < n; ++i) alpha(i, i) = theta[k++];
        break;
    case AStructure::zero:
        break;
    }
    InnovationModel innov;
    if (layout.mode == InnovationModel::Mode::constant) {
        Vec lambda(theta.begin() + k, theta.end());
        innov = InnovationModel::constant(std::move(lambda));
    } else {
        const int per = layout.covariate_count() + 1;
        std::vector<Vec> beta(n);
        for (int i = 0; i < n; ++i) {
            beta[i].assign(theta.begin() + k, theta.begin() + k + per);
            k += per;
        }
        innov = InnovationModel::regression(std::move(beta), layout.covariate_names);
    }
    return {std::move(alpha), std::move(innov)};
}

static double logit(double p) {
    const double eps = 1e-12;
    p = std::min(1.0 - eps, std::max(eps, p));
    return std::log(p / (1.0 - p));
}

static double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Vec to_transformed(const Vec& theta, const ParameterLayout& layout) {
    Vec u = theta;
    const int na = layout.alpha_count();
    for (int k = 0; k < na; ++k) u[k] = logit(theta[k]);
    if (layout.mode == InnovationModel::Mode::constant)
        for (int k = na; k < layout.total(); ++k) u[k] = std::log(std::max(theta[k], 1e-300));
    return u;
}

Vec from_transformed(const Vec& u, const ParameterLayout& layout) {
    Vec theta = u;
    const int na = layout.alpha_count();
    for (int k = 0; k < na; ++k) theta[k] = sigmoid(u[k]);
    if (layout.mode == InnovationModel::Mode::constant) {
        // Clamped so that any finite optimizer iterate maps to a positive
        // finite mean; the flat clamp region is rejected by the likelihood.
        for (int k = na; k < layout.total(); ++k)
            theta[k] = std::exp(std::clamp(u[k], -700.0, 700.0));
    }
    return theta;
}

Vec default_init(const MultiCountSeries& data, const ParameterLayout& layout) {
    const int n = layout.n;
    Vec theta(layout.total(), 0.0);
    double rowsum = 0.0;
    switch (layout.structure) {
    case AStructure::full: {
        int k = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) theta[k++] = (i == j) ? 0.15 : 0.05;
        rowsum = 0.15 + 0.05 * (n - 1);
        break;
    }
    case AStructure::diagonal:
        for (int i = 0; i < n; ++i) theta[i] = 0.15;
        rowsum = 0.15;
        break;
    case AStructure::zero:
        rowsum = 0.0;
        break;
    }
    for (int i = 0; i < n; ++i) {
        double mean = 0.0;
        for (int t = 0; t < data.length(); ++t) mean += static_cast<double>(data.count(t, i));
        mean /= std::max(1, data.length());
        const double lam = std::max(0.1, mean * (1.0 - rowsum));
        const int off = layout.innovation_offset(i);
        if (layout.mode == InnovationModel::Mode::constant)
            theta[off] = lam;
        else
            theta[off] = std::log(lam); // intercept; other coefficients stay 0
    }
    return theta;
}

MinarModel FittedModel::model() const {
    return MinarModel(ThinningMatrix(alpha), innovations);
}

double conditional_log_likelihood(const Vec& theta, const MultiCountSeries& data,
                                  const ParameterLayout& layout, const LogLikOptions& opts) {
    const UnpackedParams p = unpack(theta, layout);
    return conditional_log_likelihood(p.alpha, p.innovations, data, opts);
}

static void check_layout_against_data(const MultiCountSeries& data,
                                      const ParameterLayout& layout) {
    if (layout.n != data.n)
        throw std::invalid_argument("fit: layout dimension != data dimension");
    if (layout.mode == InnovationModel::Mode::regression) {
        if (data.covariate_names != layout.covariate_names)
            throw std::invalid_argument("fit: data covariates do not match the layout");
    }
}

FittedModel fit(const MultiCountSeries& data, const ParameterLayout& layout,
                const FitOptions& options) {
    data.validate();
    if (data.length() < 2) throw std::domain_error("fit: need at least two observations");
    check_layout_against_data(data, layout);

    Vec theta0 = options.init ? *options.init : default_init(data, layout);
    if (static_cast<int>(theta0.size()) != layout.total())
        throw std::invalid_argument("fit: init length != layout total");

    LogLikOptions ll;
    ll.tail_tol = options.tail_tol;
    const auto objective = [&](const Vec& u) {
        return -conditional_log_likelihood(from_transformed(u, layout), data, layout, ll);
    };

    const OptimResult opt = bfgs_minimize(objective, to_transformed(theta0, layout), options.optim);

    FittedModel out;
    out.layout = layout;
    out.theta = from_transformed(opt.x, layout);
    out.loglik = -opt.fmin;
    out.converged = opt.converged;
    out.iterations = opt.iterations;
    out.grad_maxnorm = opt.grad_maxnorm;
    UnpackedParams p = unpack(out.theta, layout);
    out.alpha = std::move(p.alpha);
    out.innovations = std::move(p.innovations);
    out.spectral_radius = spectral_radius(out.alpha);
    out.stationary = out.spectral_radius < 1.0 - kStationarityMargin;

    out.se.assign(layout.total(), std::numeric_limits<double>::quiet_NaN());
    if (options.compute_se && out.converged) {
        bool ok = false;
        Vec se = standard_errors(out.theta, layout, data, ok, options.tail_tol);
        if (ok) {
            out.se = std::move(se);
            out.se_available = true;
        }
    }
    return out;
}

Vec standard_errors(const Vec& theta_hat, const ParameterLayout& layout,
                    const MultiCountSeries& data, bool& available, double tail_tol) {
    available = false;
    const int p = layout.total();
    LogLikOptions ll;
    ll.tail_tol = tail_tol;
    const auto loglik = [&](const Vec& th) {
        return conditional_log_likelihood(th, data, layout, ll);
    };

    // Per-coordinate steps, shrunk where a full step would leave the domain
    // (thinning probabilities must stay in [0,1], means positive).
    Vec h(p);
    for (int k = 0; k < p; ++k) {
        double hk = std::max(1e-4, 1e-4 * std::abs(theta_hat[k]));
        if (layout.is_alpha_index(k)) {
            hk = std::min({hk, std::max(theta_hat[k] / 2.0, 1e-8),
                           std::max((1.0 - theta_hat[k]) / 2.0, 1e-8)});
        } else if (layout.mode == InnovationModel::Mode::constant) {
            hk = std::min(hk, std::max(theta_hat[k] / 2.0, 1e-8));
        }
        h[k] = hk;
    }

    // Central-difference Hessian of the log-likelihood.
    Matrix hess(p, p);
    const double f0 = loglik(theta_hat);
    Vec x = theta_hat;
    for (int k = 0; k < p; ++k) {
        x[k] = theta_hat[k] + h[k];
        const double fp = loglik(x);
        x[k] = theta_hat[k] - h[k];
        const double fm = loglik(x);
        x[k] = theta_hat[k];
        hess(k, k) = (fp - 2.0 * f0 + fm) / (h[k] * h[k]);
    }
    for (int k = 0; k < p; ++k) {
        for (int l = k + 1; l < p; ++l) {
            x[k] = theta_hat[k] + h[k];
            x[l] = theta_hat[l] + h[l];
            const double fpp = loglik(x);
            x[l] = theta_hat[l] - h[l];
            const double fpm = loglik(x);
            x[k] = theta_hat[k] - h[k];
            const double fmm = loglik(x);
            x[l] = theta_hat[l] + h[l];
            const double fmp = loglik(x);
            x[k] = theta_hat[k];
            x[l] = theta_hat[l];
            const double v = (fpp - fpm - fmp + fmm) / (4.0 * h[k] * h[l]);
            hess(k, l) = v;
            hess(l, k) = v;
        }
    }

    // Observed information is the negative Hessian.
    Matrix info(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) info(i, j) = -hess(i, j);
    bool ok = false;
    const Matrix cov = invert_spd(info, ok);
    if (!ok) return Vec(p, std::numeric_limits<double>::quiet_NaN());

    Vec se(p);
    for (int k = 0; k < p; ++k) {
        const double v = cov(k, k);
        if (!(v >= 0.0)) return Vec(p, std::numeric_limits<double>::quiet_NaN());
        se[k] = std::sqrt(v);
    }
    available = true;
    return se;
}

Matrix build_design(std::span<const int> times, std::span<const int> weekday, double period) {
    if (!(period > 0.0)) throw std::invalid_argument("build_design: period must be positive");
    const bool with_weekday = !weekday.empty();
    if (with_weekday && weekday.size() != times.size())
        throw std::invalid_argument("build_design: weekday flags do not align with times");
    const int T = static_cast<int>(times.size());
    const int p = with_weekday ? 3 : 2;
    Matrix z(T, p);
    const double w = 2.0 * std::numbers::pi / period;
    for (int r = 0; r < T; ++r) {
        int c = 0;
        if (with_weekday) z(r, c++) = static_cast<double>(weekday[r]);
        z(r, c++) = std::cos(w * times[r]);
        z(r, c++) = std::sin(w * times[r]);
    }
    return z;
}

std::vector<std::string> design_column_names(bool with_weekday) {
    std::vector<std::string> names;
    if (with_weekday) names.push_back("weekday");
    names.push_back("season_cos");
    names.push_back("season_sin");
    return names;
}

} // namespace minar
