// Command-line front end: simulate / fit / monitor / evaluate over CSV and
// JSON files. Exit codes: 0 success, 1 usage, 2 data or format error,
// 3 numerical failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "minar/estimation.hpp"
#include "minar/evaluation.hpp"
#include "minar/parallel.hpp"
#include "minar/serialize.hpp"
#include "minar/simulate.hpp"
#include "minar/surveillance.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

// Thrown for malformed inputs and shape mismatches (exit 2); everything the
// library reports as domain/invalid/runtime errors lands here too.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
    if (const char* env = std::getenv("MINAR_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw DataError("MINAR_SEED is not a valid integer");
        }
    }
    return 12345;
}

minar::MinarModel load_model(const std::string& path) {
    try {
        return minar::model_from_json(minar::load_json_file(path));
    } catch (const std::exception& e) {
        throw DataError("invalid model file: " + std::string(e.what()));
    }
}

// Covariate file: header "t,name1,...", one row per step.
struct CovariateTable {
    std::vector<std::string> names;
    std::vector<double> values; // row-major
    int rows = 0;
};

CovariateTable read_covariates_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw DataError("covariates: empty file");
    CovariateTable table;
    {
        std::stringstream ss(line);
        std::string field;
        bool first = true;
        while (std::getline(ss, field, ',')) {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            if (first) {
                if (field != "t") throw DataError("covariates: header must start with 't'");
                first = false;
            } else {
                table.names.push_back(field);
            }
        }
    }
    if (table.names.empty()) throw DataError("covariates: no covariate columns");
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::stringstream ss(line);
        std::string field;
        int col = 0;
        while (std::getline(ss, field, ',')) {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            if (col > 0) {
                try {
                    table.values.push_back(std::stod(field));
                } catch (const std::exception&) {
                    throw DataError("covariates line " + std::to_string(line_no) +
                                    ": bad number '" + field + "'");
                }
            }
            ++col;
        }
        if (col != static_cast<int>(table.names.size()) + 1)
            throw DataError("covariates line " + std::to_string(line_no) + ": wrong field count");
        ++table.rows;
    }
    return table;
}

struct DesignFlags {
    std::string weekday_col;
    double season_period = 0.0;

    bool active() const { return season_period > 0.0 || !weekday_col.empty(); }
};

// Replace a series' covariates with the harmonic design built from its time
// column (plus an optional weekday column taken from the existing covariates).
void apply_design(minar::MultiCountSeries& s, const DesignFlags& flags) {
    if (!flags.active()) return;
    if (!(flags.season_period > 0.0))
        throw DataError("--weekday-col requires --season-period");
    std::vector<int> times(s.length());
    for (int r = 0; r < s.length(); ++r) times[r] = s.time_at(r);
    std::vector<int> weekday;
    if (!flags.weekday_col.empty()) {
        int col = -1;
        for (int k = 0; k < s.covariate_count(); ++k)
            if (s.covariate_names[k] == flags.weekday_col) col = k;
        if (col < 0)
            throw DataError("column '" + flags.weekday_col + "' not found in the data");
        weekday.resize(s.length());
        for (int r = 0; r < s.length(); ++r)
            weekday[r] = static_cast<int>(std::llround(s.covariate_row(r)[col]));
    }
    const minar::Matrix z = minar::build_design(times, weekday, flags.season_period);
    s.covariate_names = minar::design_column_names(!weekday.empty());
    s.covariates = z.data();
    s.validate();
}

int cmd_simulate(const std::string& model_path, int length, int burn_in, int origin,
                 std::uint64_t seed, std::optional<int> outbreak_t,
                 const std::vector<double>& outbreak_kappa, const std::string& covariates_path,
                 const std::string& out_path) {
    const minar::MinarModel model = load_model(model_path);

    minar::SimulateOptions opts;
    opts.length = length;
    opts.burn_in = burn_in;
    opts.origin = origin;
    if (outbreak_t) {
        minar::OutbreakSpec ob;
        ob.time = *outbreak_t;
        if (outbreak_kappa.size() == 1)
            ob.kappa.assign(model.dim(), outbreak_kappa[0]);
        else
            ob.kappa = outbreak_kappa;
        opts.outbreak = std::move(ob);
    } else if (!outbreak_kappa.empty()) {
        throw DataError("--outbreak-kappa requires --outbreak-t");
    }

    std::vector<double> cov;
    std::vector<std::string> cov_names;
    if (!covariates_path.empty()) {
        CovariateTable table = read_covariates_csv(covariates_path);
        cov = std::move(table.values);
        cov_names = std::move(table.names);
    }
    if (model.innovations().mode() == minar::InnovationModel::Mode::regression) {
        if (cov_names != model.innovations().covariate_names())
            throw DataError("covariate columns do not match the model (need --covariates with "
                            "exactly the model's covariate names)");
    }

    minar::Rng rng(seed);
    const minar::MultiCountSeries series = minar::simulate(model, opts, rng, cov, cov_names);
    std::ostringstream csv;
    minar::write_series_csv(series, csv);
    minar::write_text_file_atomic(out_path, csv.str());
    std::cout << "wrote " << series.length() << " rows x " << series.n << " series to "
              << out_path << "\n";
    return kExitOk;
}

void print_parameter_table(const minar::FittedModel& fit, std::ostream& out) {
    const auto& layout = fit.layout;
    out << std::left << std::setw(14) << "parameter" << std::right << std::setw(12) << "estimate"
        << std::setw(12) << "std.err" << "\n";
    auto se_str = [&](int k) -> std::string {
        if (!fit.se_available || !std::isfinite(fit.se[k])) return "-";
        std::ostringstream ss;
        ss << std::fixed << std::setprecision(4) << fit.se[k];
        return ss.str();
    };
    int k = 0;
    auto emit = [&](const std::string& name) {
        std::ostringstream est;
        est << std::fixed << std::setprecision(4) << fit.theta[k];
        out << std::left << std::setw(14) << name << std::right << std::setw(12) << est.str()
            << std::setw(12) << se_str(k) << "\n";
        ++k;
    };
    if (layout.structure == minar::AStructure::full) {
        for (int i = 1; i <= layout.n; ++i)
            for (int j = 1; j <= layout.n; ++j)
                emit("alpha_" + std::to_string(i) + std::to_string(j));
    } else if (layout.structure == minar::AStructure::diagonal) {
        for (int i = 1; i <= layout.n; ++i)
            emit("alpha_" + std::to_string(i) + std::to_string(i));
    }
    for (int i = 1; i <= layout.n; ++i) {
        if (layout.mode == minar::InnovationModel::Mode::constant) {
            emit("lambda_" + std::to_string(i));
        } else {
            emit("beta_" + std::to_string(i) + "0");
            for (int c = 0; c < layout.covariate_count(); ++c)
                emit("beta_" + std::to_string(i) + std::to_string(c + 1) + ":" +
                     layout.covariate_names[c]);
        }
    }
    out << "log-likelihood " << std::setprecision(6) << std::fixed << fit.loglik
        << (fit.converged ? "" : "  [NOT CONVERGED]") << "\n";
}

int cmd_fit(const std::string& data_path, const std::string& layout_name,
            const DesignFlags& design, bool ignore_covariates, const std::string& out_path) {
    minar::MultiCountSeries data;
    try {
        data = minar::read_series_csv_file(data_path);
    } catch (const std::exception& e) {
        throw DataError(e.what());
    }
    apply_design(data, design);
    if (ignore_covariates && !design.active()) {
        data.covariate_names.clear();
        data.covariates.clear();
    }

    minar::AStructure structure;
    if (layout_name == "full") structure = minar::AStructure::full;
    else if (layout_name == "diagonal") structure = minar::AStructure::diagonal;
    else throw DataError("unknown layout '" + layout_name + "' (use full or diagonal)");

    minar::ParameterLayout layout =
        data.covariate_count() > 0
            ? minar::ParameterLayout::regression(data.n, structure, data.covariate_names)
            : minar::ParameterLayout::constant(data.n, structure);

    minar::FittedModel fit;
    try {
        fit = minar::fit(data, layout);
    } catch (const std::exception& e) {
        throw DataError(e.what());
    }

    minar::write_text_file_atomic(out_path, minar::fitted_to_json(fit).dump(2) + "\n");
    print_parameter_table(fit, std::cout);
    if (!fit.stationary)
        std::cerr << "warning: fitted thinning matrix has spectral radius "
                  << fit.spectral_radius << " >= 1\n";
    if (!fit.converged) {
        std::cerr << "error: optimizer did not converge within the iteration budget "
                  << "(report written to " << out_path << ")\n";
        return kExitNumeric;
    }
    return kExitOk;
}

minar::FittedModel load_fit_or_model(const std::string& path) {
    const nlohmann::json j = minar::load_json_file(path);
    try {
        if (j.contains("theta")) return minar::fitted_from_json(j);
        // Plain model document: wrap it as a converged pseudo-fit.
        const minar::MinarModel model = minar::model_from_json(j);
        minar::FittedModel fit;
        const auto mode = model.innovations().mode();
        fit.layout = mode == minar::InnovationModel::Mode::constant
                         ? minar::ParameterLayout::constant(model.dim(), minar::AStructure::full)
                         : minar::ParameterLayout::regression(
                               model.dim(), minar::AStructure::full,
                               model.innovations().covariate_names());
        fit.alpha = model.thinning().matrix();
        fit.innovations = model.innovations();
        fit.theta = minar::pack(fit.alpha, fit.innovations, fit.layout);
        fit.se.assign(fit.layout.total(), std::numeric_limits<double>::quiet_NaN());
        fit.converged = true;
        fit.stationary = true;
        fit.spectral_radius = model.thinning().spectral_radius();
        return fit;
    } catch (const std::exception& e) {
        throw DataError("invalid fit/model file: " + std::string(e.what()));
    }
}

int cmd_monitor(const std::string& fit_path, const std::string& data_path, double alpha,
                double rule, const DesignFlags& design, const std::string& out_path) {
    const minar::FittedModel fit = load_fit_or_model(fit_path);
    minar::MultiCountSeries data;
    try {
        data = minar::read_series_csv_file(data_path);
    } catch (const std::exception& e) {
        throw DataError(e.what());
    }
    apply_design(data, design);
    if (fit.innovations.mode() == minar::InnovationModel::Mode::regression &&
        data.covariate_names != fit.innovations.covariate_names())
        throw DataError("operational covariate columns do not match the fitted model");

    minar::SurveillanceConfig config;
    config.alpha = alpha;
    config.rule_fraction = rule;
    minar::SurveillanceReport report;
    try {
        report = minar::monitor(fit, data, config);
    } catch (const std::exception& e) {
        throw DataError(e.what());
    }

    std::ostringstream csv;
    minar::write_report_csv(report, csv);
    minar::write_text_file_atomic(out_path, csv.str());

    int alarms = 0;
    for (const auto& row : report.rows) {
        if (!row.alarm) continue;
        ++alarms;
        std::cout << "alarm at t=" << row.time << " (series";
        for (int i = 0; i < report.n; ++i)
            if (row.flags[i]) std::cout << " " << (i + 1);
        std::cout << ")\n";
    }
    std::cout << alarms << " alarm(s) over " << report.rows.size() << " monitored steps; report "
              << "written to " << out_path << "\n";
    return kExitOk;
}

int cmd_evaluate(const std::string& spec_path, const std::string& out_dir,
                 std::optional<int> replicates, std::optional<std::uint64_t> seed, int threads) {
    minar::GridSpec spec = [&] {
        try {
            return minar::grid_spec_from_json(minar::load_json_file(spec_path));
        } catch (const std::exception& e) {
            throw DataError("invalid experiment spec: " + std::string(e.what()));
        }
    }();
    if (replicates) spec.replicates = *replicates;
    if (seed) spec.base_seed = *seed;

    // Validate every cell before any computation.
    {
        std::vector<std::string> problems;
        for (const double kappa : spec.kappas) {
            for (const auto approach : spec.approaches) {
                minar::ExperimentSpec es(spec.model);
                es.total_length = spec.total_length;
                es.setup_length = spec.setup_length;
                es.outbreak.time = spec.outbreak_time;
                es.outbreak.kappa.assign(spec.model.dim(), kappa);
                es.alphas = spec.alphas;
                es.approach = approach;
                es.rule_fraction = spec.rule_fraction;
                es.replicates = spec.replicates;
                es.burn_in = spec.burn_in;
                try {
                    es.validate();
                } catch (const std::exception& e) {
                    problems.push_back("kappa=" + std::to_string(kappa) + " approach=" +
                                       minar::to_string(approach) + ": " + e.what());
                }
            }
        }
        if (!problems.empty()) {
            for (const auto& p : problems) std::cerr << "spec error: " << p << "\n";
            return kExitData;
        }
    }

    std::filesystem::create_directories(out_dir);
    std::cerr << "running " << spec.kappas.size() * spec.approaches.size() << " cells x "
              << spec.replicates << " replicates on " << threads << " thread(s)\n";
    const minar::GridResults results = minar::run_grid(spec, threads);

    std::ostringstream arl_csv, rate_csv, alarm_csv;
    arl_csv << std::setprecision(10);
    rate_csv << std::setprecision(10);
    minar::write_arl_table_csv(results, arl_csv);
    minar::write_rate_table_csv(results, rate_csv);
    minar::write_alarm_log_csv(results, spec.setup_length, alarm_csv);
    const auto path = [&](const char* name) {
        return (std::filesystem::path(out_dir) / name).string();
    };
    minar::write_text_file_atomic(path("table3_arl.csv"), arl_csv.str());
    minar::write_text_file_atomic(path("table4_rates.csv"), rate_csv.str());
    minar::write_text_file_atomic(path("alarms.csv"), alarm_csv.str());
    minar::write_text_file_atomic(path("spec_echo.json"),
                                  minar::grid_spec_to_json(spec).dump(2) + "\n");

    int total_failed = 0;
    for (const auto& cell : results.cells) total_failed += cell.result.failed_fits;

    std::cout << rate_csv.str();
    std::cout << "failed fits (excluded from metrics): " << total_failed << "\n";
    std::cout << "tables written to " << out_dir << "\n";
    try {
        for (const auto& cell : results.cells) {
            (void)minar::detection_rate(cell.result, 0);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multivariate INAR(1) count time series: simulation, conditional maximum "
                 "likelihood, predictive-quantile outbreak monitoring, Monte-Carlo evaluation"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate a series from a model JSON file");
    std::string sim_model, sim_cov, sim_out;
    int sim_length = 0, sim_burn = 100, sim_origin = 1;
    std::uint64_t sim_seed = 0;
    bool sim_seed_given = false;
    std::optional<int> sim_outbreak_t;
    std::vector<double> sim_kappa;
    sim->add_option("--model", sim_model, "Model JSON file")->required();
    sim->add_option("--length", sim_length, "Number of emitted steps")->required();
    sim->add_option("--burn-in", sim_burn, "Discarded initial transitions (default 100)");
    sim->add_option("--origin", sim_origin, "Time value of the first row (default 1)");
    sim->add_option("--seed", sim_seed, "RNG seed (default MINAR_SEED env or 12345)")
        ->each([&](const std::string&) { sim_seed_given = true; });
    int sim_outbreak_t_raw = 0;
    auto* obt = sim->add_option("--outbreak-t", sim_outbreak_t_raw,
                                "Inject an outbreak at this time value");
    sim->add_option("--outbreak-kappa", sim_kappa,
                    "Expected outbreak size per series (single value broadcasts)")
        ->delimiter(',');
    sim->add_option("--covariates", sim_cov, "Covariate CSV (t,name...) for regression models");
    sim->add_option("--out", sim_out, "Output series CSV")->required();

    // fit
    auto* fitc = app.add_subcommand("fit", "Conditional maximum-likelihood fit from a series CSV");
    std::string fit_data, fit_layout = "full", fit_out;
    DesignFlags fit_design;
    bool fit_ignore_cov = false;
    fitc->add_option("--data", fit_data, "Input series CSV")->required();
    fitc->add_option("--layout", fit_layout, "Thinning structure: full | diagonal");
    fitc->add_option("--weekday-col", fit_design.weekday_col,
                     "Covariate column holding the weekday indicator");
    fitc->add_option("--season-period", fit_design.season_period,
                     "Build cos/sin seasonal covariates with this period");
    fitc->add_flag("--ignore-covariates", fit_ignore_cov,
                   "Fit constant innovation means even if the CSV has covariate columns");
    fitc->add_option("--out", fit_out, "Output fit-report JSON")->required();

    // monitor
    auto* mon = app.add_subcommand("monitor",
                                   "One-step-ahead predictive-quantile monitoring of a series");
    std::string mon_fit, mon_data, mon_out;
    double mon_alpha = 0.01, mon_rule = 0.6;
    DesignFlags mon_design;
    mon->add_option("--fit", mon_fit, "Fit-report JSON (or plain model JSON)")->required();
    mon->add_option("--data", mon_data,
                    "Operational CSV; the first row is the conditioning state")
        ->required();
    mon->add_option("--alpha", mon_alpha, "Per-series significance level (default 0.01)");
    mon->add_option("--rule", mon_rule, "Alarm rule fraction (default 0.6)");
    mon->add_option("--weekday-col", mon_design.weekday_col,
                    "Covariate column holding the weekday indicator");
    mon->add_option("--season-period", mon_design.season_period,
                    "Build cos/sin seasonal covariates with this period");
    mon->add_option("--out", mon_out, "Output surveillance CSV")->required();

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "Monte-Carlo evaluation grid from a spec JSON");
    std::string ev_spec, ev_dir;
    std::optional<int> ev_reps;
    std::optional<std::uint64_t> ev_seed;
    int ev_threads = minar::default_thread_count();
    int ev_reps_raw = 0;
    std::uint64_t ev_seed_raw = 0;
    ev->add_option("--spec", ev_spec, "Experiment spec JSON")->required();
    auto* evr = ev->add_option("--replicates", ev_reps_raw, "Override replicate count");
    auto* evs = ev->add_option("--seed", ev_seed_raw, "Override base seed");
    ev->add_option("--threads", ev_threads, "Worker threads (default: hardware)");
    ev->add_option("--out-dir", ev_dir, "Output directory for the CSV tables")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (sim->parsed()) {
            if (*obt) sim_outbreak_t = sim_outbreak_t_raw;
            const std::uint64_t seed = sim_seed_given ? sim_seed : default_seed();
            return cmd_simulate(sim_model, sim_length, sim_burn, sim_origin, seed, sim_outbreak_t,
                                sim_kappa, sim_cov, sim_out);
        }
        if (fitc->parsed())
            return cmd_fit(fit_data, fit_layout, fit_design, fit_ignore_cov, fit_out);
        if (mon->parsed())
            return cmd_monitor(mon_fit, mon_data, mon_alpha, mon_rule, mon_design, mon_out);
        if (ev->parsed()) {
            if (*evr) ev_reps = ev_reps_raw;
            if (*evs) ev_seed = ev_seed_raw;
            return cmd_evaluate(ev_spec, ev_dir, ev_reps, ev_seed, ev_threads);
        }
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
