#ifndef MINAR_SURVEILLANCE_HPP
#define MINAR_SURVEILLANCE_HPP

#include <cstdint>
#include <iosfwd>

#include "minar/estimation.hpp"
#include "minar/pmf.hpp"
#include "minar/series.hpp"

namespace minar {

struct SurveillanceConfig {
    double alpha = 0.01;        // component-wise type-I rate
    double rule_fraction = 0.6; // minimum fraction of series that must flag
    double tail_tol = kDefaultTailTol;

    void validate() const;
};

// Number of simultaneous flags required for an overall alarm:
// ceil(fraction * n), clamped to [1, n].
int alarm_threshold(double rule_fraction, int n);

struct SurveillanceRow {
    int time = 0;
    std::vector<long> observed;
    std::vector<int> upper_bound;
    std::vector<std::uint8_t> flags; // observed > upper bound
    bool alarm = false;
};

struct SurveillanceReport {
    SurveillanceConfig config;
    int n = 0;
    std::vector<SurveillanceRow> rows;
};

// Plug-in one-step-ahead predictive distribution of series i given the last
// observed vector, under the fitted parameters. z_next is the covariate row
// of the predicted step (regression mode).
ConditionalPmf marginal_predictive_pmf(const FittedModel& fit, std::span<const long> x_t, int i,
                                       std::span<const double> z_next = {},
                                       double tail_tol = kDefaultTailTol);

// Smallest integer q with CDF(q) >= 1 - alpha; the prediction interval is
// [0, q] since only upward deviations matter for outbreak detection.
int upper_bound(const ConditionalPmf& pmf, double alpha);

// Two-step procedure, monitoring side: row 0 of `operational` is the
// conditioning state, every later row is assessed against per-series
// (1-alpha)-quantile upper bounds computed from the previous *observed* row
// (no adjustment after alarms). The fitted model stays frozen throughout.
SurveillanceReport monitor(const FittedModel& fit, const MultiCountSeries& operational,
                           const SurveillanceConfig& config);

// CSV: t, x_i..., ub_i..., flag_i..., alarm — one row per monitored step.
void write_report_csv(const SurveillanceReport& report, std::ostream& out);

} // namespace minar

#endif
