#include "minar/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace minar {

namespace {

// Capped convolution into `out` (resized to cap+1 or shorter).
void convolve_into(const Vec& a, const Vec& b, int cap, Vec& out) {
    const int la = static_cast<int>(a.size()), lb = static_cast<int>(b.size());
    const int top = std::min(cap, la + lb - 2);
    out.assign(static_cast<size_t>(top) + 1, 0.0);
    for (int k = 0; k <= top; ++k) {
        const int jlo = std::max(0, k - lb + 1);
        const int jhi = std::min(k, la - 1);
        long double s = 0.0;
        for (int j = jlo; j <= jhi; ++j)
            s += static_cast<long double>(a[static_cast<size_t>(j)]) *
                 b[static_cast<size_t>(k - j)];
        const double v = static_cast<double>(s);
        out[static_cast<size_t>(k)] = (v < kMassFloor) ? 0.0 : v;
    }
}

// Binomial pmf tables for one predicted series: entry [j][c] holds
// Binomial(c, alpha_ij) masses up to min(c, cap), filled on first use.
class BinomialCache {
public:
    BinomialCache(std::span<const double> alpha_row, int cap, long max_count)
        : alpha_(alpha_row), cap_(cap),
          tables_(alpha_row.size(),
                  std::vector<Vec>(static_cast<size_t>(max_count) + 1)) {}

    const Vec& get(size_t j, long c) {
        Vec& slot = tables_[j][static_cast<size_t>(c)];
        if (slot.empty())
            slot = binomial_pmf_upto(c, alpha_[j], static_cast<int>(std::min<long>(c, cap_)));
        return slot;
    }

private:
    std::span<const double> alpha_;
    int cap_;
    std::vector<std::vector<Vec>> tables_;
};

} // namespace

double conditional_log_likelihood(const Matrix& alpha, const InnovationModel& innovations,
                                  const MultiCountSeries& data, const LogLikOptions& opts,
                                  int* zero_mass_count) {
    const int n = data.n;
    const int T = data.length();
    if (T < 2) throw std::domain_error("conditional_log_likelihood: need T >= 2");
    if (alpha.rows() != n || alpha.cols() != n || innovations.dim() != n)
        throw std::invalid_argument("conditional_log_likelihood: dimension mismatch");
    for (double a : alpha.data())
        if (!(a >= 0.0 && a <= 1.0))
            throw std::domain_error("conditional_log_likelihood: alpha outside [0, 1]");
    const bool regression = innovations.mode() == InnovationModel::Mode::regression;
    if (regression && data.covariate_count() != innovations.covariate_count())
        throw std::invalid_argument(
            "conditional_log_likelihood: covariate columns do not match the model");

    long max_count = 0;
    for (long c : data.counts) max_count = std::max(max_count, c);

    long double loglik = 0.0;
    int violations = 0;
    Vec acc, scratch;

    for (int i = 0; i < n; ++i) {
        long xmax = 0;
        for (int t = 1; t < T; ++t) xmax = std::max(xmax, data.count(t, i));
        const int cap_i = static_cast<int>(xmax);

        BinomialCache cache(alpha.row(i), cap_i, max_count);

        // In constant mode one truncated Poisson table serves every step.
        Vec pois_table;
        if (!regression) {
            const double lam = innovations.mean(i);
            pois_table =
                poisson_pmf_upto(lam, poisson_support_bound_capped(lam, opts.tail_tol, cap_i));
        }

        for (int t = 1; t < T; ++t) {
            const long x = data.count(t, i);
            const int cap = static_cast<int>(x);

            if (regression) {
                const double lam = innovations.mean(i, data.covariate_row(t));
                if (!std::isfinite(lam)) { // exp overflow from a wild trial point
                    ++violations;
                    continue;
                }
                acc = poisson_pmf_upto(lam,
                                       poisson_support_bound_capped(lam, opts.tail_tol, cap));
            } else {
                const size_t len = std::min(pois_table.size(), static_cast<size_t>(cap) + 1);
                acc.assign(pois_table.begin(), pois_table.begin() + len);
            }

            const auto x_prev = data.row(t - 1);
            for (int j = 0; j < n; ++j) {
                if (x_prev[j] == 0 || alpha(i, j) == 0.0) continue;
                convolve_into(acc, cache.get(static_cast<size_t>(j), x_prev[j]), cap, scratch);
                acc.swap(scratch);
            }

            const double mass =
                (x < static_cast<long>(acc.size())) ? acc[static_cast<size_t>(x)] : 0.0;
            if (mass > 0.0) {
                loglik += std::log(mass);
            } else {
                ++violations;
            }
        }
    }

    if (zero_mass_count != nullptr) *zero_mass_count = violations;
    return static_cast<double>(loglik) - opts.zero_mass_penalty * violations;
}

double conditional_log_likelihood(const MinarModel& model, const MultiCountSeries& data,
                                  const LogLikOptions& opts) {
    return conditional_log_likelihood(model.thinning().matrix(), model.innovations(), data, opts);
}

} // namespace minar
