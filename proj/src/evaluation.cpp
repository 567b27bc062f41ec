#include "minar/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "minar/parallel.hpp"
#include "minar/pmf.hpp"
#include "minar/rng.hpp"
#include "minar/simulate.hpp"
#include "minar/surveillance.hpp"

namespace minar {

const char* to_string(FitApproach a) {
    return a == FitApproach::trivariate ? "trivariate" : "independent";
}

void ExperimentSpec::validate() const {
    if (model.innovations().mode() != InnovationModel::Mode::constant)
        throw std::invalid_argument("experiment: generating model must use constant innovations");
    if (setup_length < 2 || monitoring_length() < 2)
        throw std::invalid_argument("experiment: phases too short");
    outbreak.validate(model.dim());
    if (outbreak_step() < 0 || outbreak_step() >= monitoring_length())
        throw std::invalid_argument("experiment: outbreak time outside the monitoring phase");
    if (alphas.empty()) throw std::invalid_argument("experiment: no significance levels");
    for (double a : alphas)
        if (!(a > 0.0 && a < 1.0))
            throw std::domain_error("experiment: alpha must lie in (0, 1)");
    if (!(rule_fraction > 0.0 && rule_fraction <= 1.0))
        throw std::domain_error("experiment: rule fraction must lie in (0, 1]");
    if (replicates < 1) throw std::invalid_argument("experiment: need at least one replicate");
}

ReplicateResult run_replicate(const ExperimentSpec& spec, int replicate_index) {
    const int n = spec.model.dim();
    Rng rng(derive_seed(spec.base_seed, static_cast<std::uint64_t>(replicate_index)));

    SimulateOptions so;
    so.length = spec.total_length;
    so.burn_in = spec.burn_in;
    so.origin = 1;
    so.outbreak = spec.outbreak;
    const MultiCountSeries data = simulate(spec.model, so, rng);

    const ParameterLayout layout = ParameterLayout::constant(
        n, spec.approach == FitApproach::trivariate ? AStructure::full : AStructure::diagonal);
    FitOptions fo;
    fo.compute_se = false;
    fo.tail_tol = spec.tail_tol;
    const FittedModel fm = fit(data.slice(0, spec.setup_length), layout, fo);

    ReplicateResult out;
    out.fit_ok = fm.converged;
    if (!out.fit_ok) return out;

    const int M = spec.monitoring_length();
    const int A = static_cast<int>(spec.alphas.size());
    out.alarms.assign(A, std::vector<std::uint8_t>(M, 0));
    out.flags.assign(A, std::vector<std::vector<std::uint8_t>>(
                            n, std::vector<std::uint8_t>(M, 0)));

    std::vector<int> need(A);
    for (int a = 0; a < A; ++a) need[a] = alarm_threshold(spec.rule_fraction, n);

    std::vector<int> nflags(A);
    for (int m = 0; m < M; ++m) {
        const int row = spec.setup_length + m;
        const auto x_prev = data.row(row - 1);
        std::fill(nflags.begin(), nflags.end(), 0);
        for (int i = 0; i < n; ++i) {
            const ConditionalPmf pmf =
                conditional_pmf(x_prev, fm.alpha.row(i), fm.innovations.mean(i), spec.tail_tol);
            const long x = data.count(row, i);
            for (int a = 0; a < A; ++a) {
                const bool flag = x > pmf.quantile_upper(spec.alphas[a]);
                out.flags[a][i][m] = flag ? 1 : 0;
                nflags[a] += flag ? 1 : 0;
            }
        }
        for (int a = 0; a < A; ++a) out.alarms[a][m] = nflags[a] >= need[a] ? 1 : 0;
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, int threads) {
    spec.validate();
    ExperimentResult res;
    res.monitoring_length = spec.monitoring_length();
    res.outbreak_step = spec.outbreak_step();
    res.replicates.resize(spec.replicates);
    parallel_for(spec.replicates, threads,
                 [&](int r) { res.replicates[r] = run_replicate(spec, r); });
    for (const auto& rep : res.replicates)
        rep.fit_ok ? ++res.ok_replicates : ++res.failed_fits;
    return res;
}

static void require_successes(const ExperimentResult& r) {
    if (r.ok_replicates == 0)
        throw std::runtime_error("evaluation: no successful replicates");
}

double detection_rate(const ExperimentResult& r, int alpha_index) {
    require_successes(r);
    long hits = 0;
    for (const auto& rep : r.replicates)
        if (rep.fit_ok && rep.alarms[alpha_index][r.outbreak_step]) ++hits;
    return static_cast<double>(hits) / r.ok_replicates;
}

double false_alarm_rate(const ExperimentResult& r, int alpha_index) {
    require_successes(r);
    long false_alarms = 0;
    for (const auto& rep : r.replicates) {
        if (!rep.fit_ok) continue;
        const auto& seq = rep.alarms[alpha_index];
        for (int m = 0; m < r.monitoring_length; ++m)
            if (m != r.outbreak_step && seq[m]) ++false_alarms;
    }
    return static_cast<double>(false_alarms) /
           (static_cast<double>(r.ok_replicates) * (r.monitoring_length - 1));
}

ArlSummary average_run_length(const ExperimentResult& r, int alpha_index) {
    require_successes(r);
    int n = 0;
    for (const auto& rep : r.replicates) {
        if (rep.fit_ok) {
            n = static_cast<int>(rep.flags[alpha_index].size());
            break;
        }
    }
    ArlSummary s;
    s.per_series.assign(n, 0.0);
    for (const auto& rep : r.replicates) {
        if (!rep.fit_ok) continue;
        for (int i = 0; i < n; ++i) {
            const auto& seq = rep.flags[alpha_index][i];
            int first = r.monitoring_length; // censored: no false flag observed
            for (int m = 0; m < r.monitoring_length; ++m) {
                if (m != r.outbreak_step && seq[m]) {
                    first = m;
                    break;
                }
            }
            s.per_series[i] += first;
        }
    }
    for (double& v : s.per_series) v /= r.ok_replicates;
    s.overall = *std::min_element(s.per_series.begin(), s.per_series.end());
    return s;
}

ArlSummary average_run_length_conditional(const ExperimentResult& r, int alpha_index) {
    require_successes(r);
    int n = 0;
    for (const auto& rep : r.replicates) {
        if (rep.fit_ok) {
            n = static_cast<int>(rep.flags[alpha_index].size());
            break;
        }
    }
    ArlSummary s;
    s.per_series.assign(n, 0.0);
    std::vector<long> with_flag(n, 0);
    for (const auto& rep : r.replicates) {
        if (!rep.fit_ok) continue;
        for (int i = 0; i < n; ++i) {
            const auto& seq = rep.flags[alpha_index][i];
            for (int m = 0; m < r.monitoring_length; ++m) {
                if (m != r.outbreak_step && seq[m]) {
                    s.per_series[i] += m;
                    ++with_flag[i];
                    break;
                }
            }
        }
    }
    for (int i = 0; i < n; ++i)
        s.per_series[i] =
            with_flag[i] > 0 ? s.per_series[i] / with_flag[i] : r.monitoring_length;
    s.overall = *std::min_element(s.per_series.begin(), s.per_series.end());
    return s;
}

GridResults run_grid(const GridSpec& spec, int threads) {
    GridResults g;
    g.alphas = spec.alphas;
    g.n = spec.model.dim();
    for (size_t ki = 0; ki < spec.kappas.size(); ++ki) {
        // One seed per kappa, shared by both approaches: the comparison is
        // paired on identical simulated series.
        const std::uint64_t cell_seed = derive_seed(spec.base_seed, ki);
        for (const FitApproach approach : spec.approaches) {
            ExperimentSpec es(spec.model);
            es.total_length = spec.total_length;
            es.setup_length = spec.setup_length;
            es.outbreak.time = spec.outbreak_time;
            es.outbreak.kappa.assign(g.n, spec.kappas[ki]);
            es.alphas = spec.alphas;
            es.approach = approach;
            es.rule_fraction = spec.rule_fraction;
            es.replicates = spec.replicates;
            es.base_seed = cell_seed;
            es.burn_in = spec.burn_in;
            GridCell cell;
            cell.kappa = spec.kappas[ki];
            cell.approach = approach;
            cell.result = run_experiment(es, threads);
            g.cells.push_back(std::move(cell));
        }
    }
    return g;
}

static const GridCell* find_cell(const GridResults& g, double kappa, FitApproach a) {
    for (const auto& c : g.cells)
        if (c.kappa == kappa && c.approach == a) return &c;
    return nullptr;
}

static std::vector<double> grid_kappas(const GridResults& g) {
    std::vector<double> ks;
    for (const auto& c : g.cells)
        if (std::find(ks.begin(), ks.end(), c.kappa) == ks.end()) ks.push_back(c.kappa);
    return ks;
}

static std::vector<FitApproach> grid_approaches(const GridResults& g) {
    std::vector<FitApproach> as;
    for (const auto& c : g.cells)
        if (std::find(as.begin(), as.end(), c.approach) == as.end()) as.push_back(c.approach);
    return as;
}

void write_arl_table_csv(const GridResults& g, std::ostream& out) {
    const auto approaches = grid_approaches(g);
    out << "kappa,alpha";
    for (const auto a : approaches) {
        const std::string p = (a == FitApproach::trivariate) ? "tri" : "ind";
        for (int i = 0; i < g.n; ++i) out << "," << p << "_arl" << (i + 1);
        out << "," << p << "_arl," << p << "_arl_cond," << p << "_failed";
    }
    out << "\n";
    for (const double kappa : grid_kappas(g)) {
        for (size_t ai = 0; ai < g.alphas.size(); ++ai) {
            out << kappa << "," << g.alphas[ai];
            for (const auto a : approaches) {
                const GridCell* cell = find_cell(g, kappa, a);
                const ArlSummary s = average_run_length(cell->result, static_cast<int>(ai));
                const ArlSummary c =
                    average_run_length_conditional(cell->result, static_cast<int>(ai));
                for (double v : s.per_series) out << "," << v;
                out << "," << s.overall << "," << c.overall << "," << cell->result.failed_fits;
            }
            out << "\n";
        }
    }
}

void write_rate_table_csv(const GridResults& g, std::ostream& out) {
    const auto approaches = grid_approaches(g);
    out << "kappa,alpha";
    for (const auto a : approaches) {
        const std::string p = (a == FitApproach::trivariate) ? "tri" : "ind";
        out << "," << p << "_dr," << p << "_far," << p << "_failed";
    }
    out << "\n";
    for (const double kappa : grid_kappas(g)) {
        for (size_t ai = 0; ai < g.alphas.size(); ++ai) {
            out << kappa << "," << g.alphas[ai];
            for (const auto a : approaches) {
                const GridCell* cell = find_cell(g, kappa, a);
                // Multiplied by 100, as the rates are usually reported.
                out << "," << 100.0 * detection_rate(cell->result, static_cast<int>(ai)) << ","
                    << 100.0 * false_alarm_rate(cell->result, static_cast<int>(ai)) << ","
                    << cell->result.failed_fits;
            }
            out << "\n";
        }
    }
}

void write_alarm_log_csv(const GridResults& g, int setup_length, std::ostream& out) {
    out << "approach,kappa,alpha,replicate,t,alarm";
    for (int i = 0; i < g.n; ++i) out << ",flag" << (i + 1);
    out << "\n";
    for (const auto& cell : g.cells) {
        for (size_t ai = 0; ai < g.alphas.size(); ++ai) {
            for (size_t rep = 0; rep < cell.result.replicates.size(); ++rep) {
                const auto& rr = cell.result.replicates[rep];
                if (!rr.fit_ok) continue;
                for (int m = 0; m < cell.result.monitoring_length; ++m) {
                    out << to_string(cell.approach) << "," << cell.kappa << "," << g.alphas[ai]
                        << "," << rep << "," << (setup_length + m + 1) << ","
                        << static_cast<int>(rr.alarms[ai][m]);
                    for (int i = 0; i < g.n; ++i)
                        out << "," << static_cast<int>(rr.flags[ai][i][m]);
                    out << "\n";
                }
            }
        }
    }
}

std::vector<Vec> exceedance_probabilities(const MinarModel& model, const Vec& kappas,
                                          int replicates, int total_length, int outbreak_time,
                                          std::uint64_t base_seed, int burn_in, int threads) {
    if (replicates < 1) throw std::invalid_argument("exceedance: need replicates");
    const int n = model.dim();
    const Vec mu = stationary_mean(model);

    // Per-replicate per-series maxima over all non-outbreak times.
    std::vector<std::vector<long>> maxima(replicates, std::vector<long>(n, 0));
    parallel_for(replicates, threads, [&](int r) {
        Rng rng(derive_seed(base_seed, static_cast<std::uint64_t>(r)));
        SimulateOptions so;
        so.length = total_length;
        so.burn_in = burn_in;
        so.origin = 1;
        const MultiCountSeries s = simulate(model, so, rng);
        for (int row = 0; row < s.length(); ++row) {
            if (s.time_at(row) == outbreak_time) continue;
            for (int i = 0; i < n; ++i)
                maxima[r][i] = std::max(maxima[r][i], s.count(row, i));
        }
    });

    std::vector<Vec> probs(kappas.size(), Vec(n, 0.0));
    for (size_t k = 0; k < kappas.size(); ++k) {
        for (int i = 0; i < n; ++i) {
            const double threshold = mu[i] + kappas[k];
            long count = 0;
            for (int r = 0; r < replicates; ++r)
                if (static_cast<double>(maxima[r][i]) > threshold) ++count;
            probs[k][i] = static_cast<double>(count) / replicates;
        }
    }
    return probs;
}

} // namespace minar
