#include "minar/surveillance.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace minar {

void SurveillanceConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::domain_error("surveillance: alpha must lie in (0, 1)");
    if (!(rule_fraction > 0.0 && rule_fraction <= 1.0))
        throw std::domain_error("surveillance: rule fraction must lie in (0, 1]");
}

int alarm_threshold(double rule_fraction, int n) {
    const int k = static_cast<int>(std::ceil(rule_fraction * n - 1e-12));
    return std::min(n, std::max(1, k));
}

ConditionalPmf marginal_predictive_pmf(const FittedModel& fit, std::span<const long> x_t, int i,
                                       std::span<const double> z_next, double tail_tol) {
    if (i < 0 || i >= fit.layout.n)
        throw std::out_of_range("marginal_predictive_pmf: bad series index");
    if (static_cast<int>(x_t.size()) != fit.layout.n)
        throw std::invalid_argument("marginal_predictive_pmf: state length != dimension");
    return conditional_pmf(x_t, fit.alpha.row(i), fit.innovations.mean(i, z_next), tail_tol);
}

int upper_bound(const ConditionalPmf& pmf, double alpha) { return pmf.quantile_upper(alpha); }

SurveillanceReport monitor(const FittedModel& fit, const MultiCountSeries& operational,
                           const SurveillanceConfig& config) {
    config.validate();
    operational.validate();
    const int n = fit.layout.n;
    if (operational.n != n)
        throw std::invalid_argument("monitor: data dimension does not match the fit");
    if (operational.length() < 2)
        throw std::invalid_argument("monitor: need a conditioning row plus monitored rows");
    if (fit.innovations.mode() == InnovationModel::Mode::regression &&
        operational.covariate_count() != fit.innovations.covariate_count())
        throw std::invalid_argument("monitor: covariate columns do not match the fitted model");

    const int need = alarm_threshold(config.rule_fraction, n);

    SurveillanceReport report;
    report.config = config;
    report.n = n;
    report.rows.reserve(operational.length() - 1);

    for (int r = 1; r < operational.length(); ++r) {
        SurveillanceRow row;
        row.time = operational.time_at(r);
        row.observed.resize(n);
        row.upper_bound.resize(n);
        row.flags.resize(n);
        const auto x_prev = operational.row(r - 1);
        int nflags = 0;
        for (int i = 0; i < n; ++i) {
            const ConditionalPmf pmf = marginal_predictive_pmf(
                fit, x_prev, i, operational.covariate_row(r), config.tail_tol);
            row.observed[i] = operational.count(r, i);
            row.upper_bound[i] = upper_bound(pmf, config.alpha);
            row.flags[i] = row.observed[i] > row.upper_bound[i] ? 1 : 0;
            nflags += row.flags[i];
        }
        row.alarm = nflags >= need;
        report.rows.push_back(std::move(row));
    }
    return report;
}

void write_report_csv(const SurveillanceReport& report, std::ostream& out) {
    out << "t";
    for (int i = 0; i < report.n; ++i) out << ",x" << (i + 1);
    for (int i = 0; i < report.n; ++i) out << ",ub" << (i + 1);
    for (int i = 0; i < report.n; ++i) out << ",flag" << (i + 1);
    out << ",alarm\n";
    for (const auto& row : report.rows) {
        out << row.time;
        for (long x : row.observed) out << "," << x;
        for (int ub : row.upper_bound) out << "," << ub;
        for (auto f : row.flags) out << "," << static_cast<int>(f);
        out << "," << (row.alarm ? 1 : 0) << "\n";
    }
}

} // namespace minar
