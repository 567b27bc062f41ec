#include "minar/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace minar {

ConditionalPmf::ConditionalPmf(Vec masses, double tail_mass)
    : masses_(std::move(masses)), tail_(tail_mass) {
    if (masses_.empty()) throw std::invalid_argument("ConditionalPmf: empty support");
    if (tail_ < 0.0) tail_ = 0.0;
}

double ConditionalPmf::total() const {
    long double s = tail_;
    for (double m : masses_) s += m;
    return static_cast<double>(s);
}

int ConditionalPmf::quantile_upper(double alpha) const {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("quantile_upper: alpha must lie in (0, 1)");
    const double target = 1.0 - alpha;
    long double cdf = 0.0;
    for (size_t k = 0; k < masses_.size(); ++k) {
        cdf += masses_[k];
        if (static_cast<double>(cdf) >= target) return static_cast<int>(k);
    }
    return bound();
}

int poisson_support_bound_capped(double lambda, double tail_tol, int cap) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::domain_error("poisson_support_bound: invalid lambda");
    if (!(tail_tol > 0.0 && tail_tol < 1.0))
        throw std::domain_error("poisson_support_bound: invalid tolerance");
    if (lambda == 0.0 || cap <= 0) return 0;
    double pk = std::exp(-lambda);
    if (pk > 0.0) {
        long double cdf = pk;
        int k = 0;
        while (static_cast<double>(cdf) < 1.0 - tail_tol && k < cap) {
            ++k;
            pk *= lambda / static_cast<double>(k);
            cdf += pk;
        }
        return k;
    }
    // exp(-lambda) underflowed (huge lambda): sum outward from the mode in
    // log space.
    const Vec pmf = poisson_pmf_upto(lambda, cap);
    long double cdf = 0.0;
    for (int k = 0; k <= cap; ++k) {
        cdf += pmf[static_cast<size_t>(k)];
        if (static_cast<double>(cdf) >= 1.0 - tail_tol) return k;
    }
    return cap;
}

int poisson_support_bound(double lambda, double tail_tol) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::domain_error("poisson_support_bound: invalid lambda");
    if (lambda > 1e9)
        throw std::domain_error("poisson_support_bound: lambda too large for a dense support");
    const double cap = lambda + 40.0 * std::sqrt(lambda) + 128.0;
    return poisson_support_bound_capped(lambda, tail_tol, static_cast<int>(cap));
}

Vec poisson_pmf_upto(double lambda, int kmax) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::domain_error("poisson_pmf_upto: invalid lambda");
    if (kmax < 0) throw std::invalid_argument("poisson_pmf_upto: negative kmax");
    Vec pmf(static_cast<size_t>(kmax) + 1, 0.0);
    if (lambda == 0.0) {
        pmf[0] = 1.0;
        return pmf;
    }
    const double p0 = std::exp(-lambda);
    if (p0 > 0.0) {
        pmf[0] = p0;
        for (int k = 1; k <= kmax; ++k)
            pmf[static_cast<size_t>(k)] = pmf[static_cast<size_t>(k) - 1] * lambda / k;
    } else {
        // Recurse up and down from the mode to avoid underflow at k = 0; for
        // enormous lambda the whole window may sit at zero mass, which is the
        // correct truncated answer.
        const int mode =
            lambda >= static_cast<double>(kmax) ? kmax : static_cast<int>(lambda);
        const double log_mode =
            -lambda + mode * std::log(lambda) - std::lgamma(static_cast<double>(mode) + 1.0);
        pmf[static_cast<size_t>(mode)] = std::exp(log_mode);
        for (int k = mode + 1; k <= kmax; ++k)
            pmf[static_cast<size_t>(k)] = pmf[static_cast<size_t>(k) - 1] * lambda / k;
        for (int k = mode - 1; k >= 0; --k)
            pmf[static_cast<size_t>(k)] = pmf[static_cast<size_t>(k) + 1] * (k + 1) / lambda;
    }
    for (double& m : pmf)
        if (m < kMassFloor) m = 0.0;
    return pmf;
}

Vec binomial_pmf_upto(long n, double p, int kmax) {
    if (n < 0) throw std::domain_error("binomial_pmf_upto: negative n");
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("binomial_pmf_upto: p outside [0, 1]");
    const int top = static_cast<int>(std::min<long>(n, kmax));
    Vec pmf(static_cast<size_t>(kmax) + 1, 0.0);
    if (p == 0.0) {
        pmf[0] = 1.0;
        return pmf;
    }
    if (p == 1.0) {
        if (n <= kmax) pmf[static_cast<size_t>(n)] = 1.0;
        return pmf;
    }
    const double log_q_n = static_cast<double>(n) * std::log1p(-p);
    if (log_q_n > -700.0) {
        pmf[0] = std::exp(log_q_n);
        const double ratio = p / (1.0 - p);
        for (int k = 1; k <= top; ++k)
            pmf[static_cast<size_t>(k)] =
                pmf[static_cast<size_t>(k) - 1] * ratio * static_cast<double>(n - k + 1) / k;
    } else {
        // (1-p)^n underflowed; evaluate each term in log space.
        const double lp = std::log(p), lq = std::log1p(-p);
        const double lgn = std::lgamma(static_cast<double>(n) + 1.0);
        for (int k = 0; k <= top; ++k) {
            const double lg = lgn - std::lgamma(static_cast<double>(k) + 1.0) -
                              std::lgamma(static_cast<double>(n - k) + 1.0) + k * lp +
                              (n - k) * lq;
            pmf[static_cast<size_t>(k)] = std::exp(lg);
        }
    }
    for (double& m : pmf)
        if (m < kMassFloor) m = 0.0;
    return pmf;
}

// out[k] = sum_j a[j] b[k-j], truncated at cap. Extended-precision
// accumulation keeps the oracle comparisons tight.
static Vec convolve_capped(const Vec& a, const Vec& b, int cap) {
    const int la = static_cast<int>(a.size()), lb = static_cast<int>(b.size());
    const int out = std::min(cap, la + lb - 2);
    Vec r(static_cast<size_t>(out) + 1, 0.0);
    for (int k = 0; k <= out; ++k) {
        const int jlo = std::max(0, k - lb + 1);
        const int jhi = std::min(k, la - 1);
        long double s = 0.0;
        for (int j = jlo; j <= jhi; ++j)
            s += static_cast<long double>(a[static_cast<size_t>(j)]) * b[static_cast<size_t>(k - j)];
        const double v = static_cast<double>(s);
        r[static_cast<size_t>(k)] = (v < kMassFloor) ? 0.0 : v;
    }
    return r;
}

static void check_conditional_inputs(std::span<const long> x_prev,
                                     std::span<const double> alpha_row, double lambda) {
    if (x_prev.size() != alpha_row.size())
        throw std::invalid_argument("conditional pmf: x_prev and alpha row differ in length");
    for (long x : x_prev)
        if (x < 0) throw std::domain_error("conditional pmf: negative count in x_prev");
    for (double a : alpha_row)
        if (!(a >= 0.0 && a <= 1.0))
            throw std::domain_error("conditional pmf: alpha outside [0, 1]");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::domain_error("conditional pmf: invalid lambda");
}

// Shared worker: convolution of the Poisson part with every non-degenerate
// binomial factor, truncated at cap.
static Vec conditional_masses(std::span<const long> x_prev, std::span<const double> alpha_row,
                              double lambda, double tail_tol, int cap) {
    const int pois_top = poisson_support_bound_capped(lambda, tail_tol, cap);
    Vec acc = poisson_pmf_upto(lambda, pois_top);
    for (size_t j = 0; j < x_prev.size(); ++j) {
        if (x_prev[j] == 0 || alpha_row[j] == 0.0) continue; // thinning of zero is zero
        const int top = static_cast<int>(std::min<long>(x_prev[j], cap));
        acc = convolve_capped(acc, binomial_pmf_upto(x_prev[j], alpha_row[j], top), cap);
    }
    return acc;
}

ConditionalPmf conditional_pmf(std::span<const long> x_prev, std::span<const double> alpha_row,
                               double lambda, double tail_tol) {
    check_conditional_inputs(x_prev, alpha_row, lambda);
    long bound = poisson_support_bound(lambda, tail_tol);
    for (size_t j = 0; j < x_prev.size(); ++j)
        if (alpha_row[j] > 0.0) bound += x_prev[j];
    Vec masses = conditional_masses(x_prev, alpha_row, lambda, tail_tol,
                                    static_cast<int>(bound));
    long double sum = 0.0;
    for (double m : masses) sum += m;
    return ConditionalPmf(std::move(masses), static_cast<double>(1.0L - sum));
}

double conditional_mass_at(std::span<const long> x_prev, std::span<const double> alpha_row,
                           double lambda, long x, double tail_tol) {
    check_conditional_inputs(x_prev, alpha_row, lambda);
    if (x < 0) return 0.0;
    const Vec masses =
        conditional_masses(x_prev, alpha_row, lambda, tail_tol, static_cast<int>(x));
    return (x < static_cast<long>(masses.size())) ? masses[static_cast<size_t>(x)] : 0.0;
}

ConditionalPmf component_conditional_pmf(const MinarModel& model, int i,
                                         std::span<const long> x_prev, std::span<const double> z,
                                         double tail_tol) {
    if (i < 0 || i >= model.dim())
        throw std::out_of_range("component_conditional_pmf: bad series index");
    if (static_cast<int>(x_prev.size()) != model.dim())
        throw std::invalid_argument("component_conditional_pmf: x_prev length != dimension");
    return conditional_pmf(x_prev, model.thinning().row(i), model.innovations().mean(i, z),
                           tail_tol);
}

ConditionalPmf brute_force_conditional_pmf(std::span<const long> x_prev,
                                           std::span<const double> alpha_row, double lambda,
                                           double tail_tol, long max_combinations) {
    check_conditional_inputs(x_prev, alpha_row, lambda);
    const size_t n = x_prev.size();
    long combos = 1;
    for (long x : x_prev) {
        if (x + 1 > max_combinations / std::max<long>(combos, 1)) combos = max_combinations + 1;
        else combos *= x + 1;
        if (combos > max_combinations)
            throw std::runtime_error("brute_force_conditional_pmf: enumeration guard exceeded");
    }

    // log binomial pmf tables, evaluated independently of the recurrences
    // used by the production path.
    auto log_binom = [](long m, double p, long k) -> double {
        if (p == 0.0) return k == 0 ? 0.0 : -INFINITY;
        if (p == 1.0) return k == m ? 0.0 : -INFINITY;
        return std::lgamma(static_cast<double>(m) + 1.0) -
               std::lgamma(static_cast<double>(k) + 1.0) -
               std::lgamma(static_cast<double>(m - k) + 1.0) + k * std::log(p) +
               (m - k) * std::log1p(-p);
    };

    long total_prev = 0;
    for (long x : x_prev) total_prev += x;

    // Distribution of the total thinned count by explicit enumeration.
    Vec thin_sum(static_cast<size_t>(total_prev) + 1, 0.0);
    std::vector<long> idx(n, 0);
    while (true) {
        double logw = 0.0;
        long s = 0;
        for (size_t j = 0; j < n; ++j) {
            logw += log_binom(x_prev[j], alpha_row[j], idx[j]);
            s += idx[j];
        }
        if (logw > -INFINITY) thin_sum[static_cast<size_t>(s)] += std::exp(logw);
        size_t j = 0;
        for (; j < n; ++j) {
            if (idx[j] < x_prev[j]) {
                ++idx[j];
                break;
            }
            idx[j] = 0;
        }
        if (j == n) break;
        if (n == 0) break;
    }
    if (n == 0) thin_sum[0] = 1.0;

    const int pois_top = poisson_support_bound(lambda, tail_tol);
    const long bound = total_prev + pois_top;
    auto log_pois = [lambda](long k) {
        if (lambda == 0.0) return k == 0 ? 0.0 : -INFINITY;
        return -lambda + k * std::log(lambda) - std::lgamma(static_cast<double>(k) + 1.0);
    };

    Vec masses(static_cast<size_t>(bound) + 1, 0.0);
    for (long x = 0; x <= bound; ++x) {
        long double acc = 0.0;
        for (long s = std::max<long>(0, x - pois_top); s <= std::min<long>(total_prev, x); ++s) {
            const double w = thin_sum[static_cast<size_t>(s)];
            if (w == 0.0) continue;
            const double lp = log_pois(x - s);
            if (lp > -INFINITY) acc += w * std::exp(lp);
        }
        masses[static_cast<size_t>(x)] = static_cast<double>(acc);
    }
    long double sum = 0.0;
    for (double m : masses) sum += m;
    return ConditionalPmf(std::move(masses), static_cast<double>(1.0L - sum));
}

} // namespace minar
