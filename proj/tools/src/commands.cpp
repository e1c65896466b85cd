#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>

#include "config.hpp"
#include "csv.hpp"
#include "format.hpp"
#include "sgmidas/evaluation.hpp"

namespace sgmidas::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void ensure_dir(const std::string& dir) {
    if (dir.empty()) throw InputError("--out directory is required");
    fs::create_directories(dir);
}

void write_manifest(const std::string& dir, const std::string& command, std::uint64_t seed,
                    const std::string& inner_key, const json& inner,
                    const std::vector<std::string>& outputs) {
    json manifest;
    manifest["command"] = command;
    manifest["seed"] = seed;
    manifest[inner_key] = inner;
    manifest["outputs"] = outputs;
    write_text_file(dir + "/manifest.json", manifest.dump(2) + "\n");
}

void validate_or_die(const MixedFrequencyPanel& panel) {
    const ValidationReport report = validate_panel(panel);
    if (report.empty()) return;
    std::ostringstream msg;
    msg << "panel validation failed:";
    for (const auto& v : report) {
        msg << "\n  " << (v.series.empty() ? std::string("target") : v.series) << ": " << v.message;
    }
    throw InputError(msg.str());
}

std::string model_label(const std::string& m) { return m; }

}  // namespace

void run_simulate(const SimulateArgs& args) {
    SimulationScenario scenario = load_scenario(args.scenario_path);
    if (args.replications == 0) throw InputError("replications must be >= 1");
    if (args.replications > 0) scenario.replications = args.replications;
    if (args.seed >= 0) scenario.seed = static_cast<std::uint64_t>(args.seed);
    scenario.validate();

    const ScenarioResult result = run_scenario(scenario);

    std::ostringstream csv;
    csv << "metric,method,weight,mean,std_error\n";
    for (const auto& m : result.methods) {
        csv << "forecast_msfe," << m.method << ",,";
        if (m.feasible) csv << fmt_num(m.forecast_msfe) << "," << fmt_num(m.forecast_se);
        else csv << ",";
        csv << "\n";
    }
    for (const auto& m : result.methods) {
        csv << "nowcast_msfe," << m.method << ",,";
        if (m.feasible) csv << fmt_num(m.nowcast_msfe) << "," << fmt_num(m.nowcast_se);
        else csv << ",";
        csv << "\n";
    }
    for (const auto& m : result.mise) {
        csv << "mise," << m.method << "," << m.weight << "," << fmt_num(m.mise) << ","
            << fmt_num(m.se) << "\n";
    }
    csv << "forecast_msfe,oracle,," << fmt_num(result.oracle_forecast_msfe) << ",\n";
    csv << "nowcast_msfe,oracle,," << fmt_num(result.oracle_nowcast_msfe) << ",\n";

    ensure_dir(args.out_dir);
    write_text_file(args.out_dir + "/results.csv", csv.str());
    write_manifest(args.out_dir, "simulate", scenario.seed, "scenario", scenario_to_json(scenario),
                   {"results.csv"});
}

void run_fit(const FitArgs& args) {
    const ProjectConfig config = load_project_config(args.config_path);
    const LoadedPanel loaded = load_panel(config, args.config_path);
    validate_or_die(loaded.panel);

    const DesignSpec spec = design_from_config(config, -1);
    const DesignProblem problem = build_design(loaded.panel, spec);

    SgLassoFit fitted;
    CvResult cv;
    bool have_cv = false;
    if (args.use_cv) {
        CvPlan plan = config.cv;
        fitted = fit_with_cv(problem, plan, &cv);
        have_cv = true;
    } else {
        if (args.lambda < 0.0) throw InputError("fit: provide --lambda (and --alpha) or --cv");
        PenaltySpec penalty;
        penalty.lambda = args.lambda;
        penalty.alpha = args.alpha;
        penalty.unpenalized_intercept = config.unpenalized_intercept;
        fitted = fit(problem, penalty, config.cv.solver);
    }
    if (!fitted.converged) {
        throw NumericalError("solver did not converge: " + std::to_string(fitted.iterations) +
                             " sweeps, kkt residual " + fmt_num(fitted.kkt_residual));
    }

    std::ostringstream coef;
    coef << "name,group,value\n";
    for (int j = 0; j < problem.cols(); ++j) {
        const auto& group = problem.groups.group(problem.groups.group_of(j));
        coef << problem.column_names[static_cast<std::size_t>(j)] << "," << group.name << ","
             << fmt_num(fitted.beta[j]) << "\n";
    }

    json info;
    info["lambda"] = fitted.lambda;
    info["alpha"] = fitted.alpha;
    info["objective"] = fitted.objective;
    info["iterations"] = fitted.iterations;
    info["converged"] = fitted.converged;
    info["kkt_residual"] = fitted.kkt_residual;
    info["rows"] = problem.rows();
    info["columns"] = problem.cols();
    json active = json::array();
    for (int g : fitted.active_groups) active.push_back(problem.groups.group(g).name);
    info["active_groups"] = std::move(active);
    json active_cols = json::array();
    for (int j : fitted.active_set) active_cols.push_back(problem.column_names[static_cast<std::size_t>(j)]);
    info["active_set"] = std::move(active_cols);
    if (have_cv) {
        info["cv_best_alpha"] = cv.best_alpha;
        info["cv_best_lambda"] = cv.best_lambda;
        info["cv_best_error"] = cv.best_error;
        info["cv_one_se_alpha"] = cv.one_se_alpha;
        info["cv_one_se_lambda"] = cv.one_se_lambda;
    }

    ensure_dir(args.out_dir);
    write_text_file(args.out_dir + "/coefficients.csv", coef.str());
    write_text_file(args.out_dir + "/fit.json", info.dump(2) + "\n");
    std::vector<std::string> outputs = {"coefficients.csv", "fit.json"};
    if (have_cv) {
        std::ostringstream surface;
        surface << "alpha,lambda,cv_error,cv_se\n";
        for (std::size_t a = 0; a < cv.alpha_grid.size(); ++a) {
            for (std::size_t l = 0; l < cv.lambda_grids[a].size(); ++l) {
                surface << fmt_num(cv.alpha_grid[a]) << "," << fmt_num(cv.lambda_grids[a][l]) << ","
                        << fmt_num(cv.cv_error[a][l]) << "," << fmt_num(cv.cv_se[a][l]) << "\n";
            }
        }
        write_text_file(args.out_dir + "/cv_surface.csv", surface.str());
        outputs.push_back("cv_surface.csv");
    }
    write_manifest(args.out_dir, "fit", config.seed, "config", config.to_json(), outputs);
}

void run_nowcast(const NowcastArgs& args) {
    const ProjectConfig config = load_project_config(args.config_path);
    const LoadedPanel loaded = load_panel(config, args.config_path);
    validate_or_die(loaded.panel);

    const int months = horizon_months(args.horizon);
    const DesignSpec spec = design_from_config(config, months);
    const int window = args.window > 0 ? args.window : config.window;
    const ForecastModel model = forecast_model_from_string(args.model);

    const RollingResult rolling =
        rolling_nowcast(loaded.panel, spec, window, config.cv, model, args.horizon);

    std::ostringstream forecasts;
    forecasts << "origin,horizon,prediction,realized,error\n";
    for (const auto& rec : rolling.records) {
        forecasts << loaded.to_calendar(rec.origin) << "," << rec.horizon << ","
                  << fmt_num(rec.prediction) << "," << fmt_num(rec.realized) << ","
                  << fmt_num(rec.error) << "\n";
    }

    // Selection fractions per origin and category.
    std::map<std::string, std::string> category_of;
    std::set<std::string> categories;
    for (const auto& s : config.series) {
        category_of[s.id] = s.category;
        categories.insert(s.category);
    }
    std::ostringstream selection;
    selection << "origin,category,fraction\n";
    const double total = static_cast<double>(config.series.size());
    for (const auto& sel : rolling.selections) {
        std::map<std::string, int> counts;
        for (const auto& name : sel.active_covariates) counts[category_of.at(name)] += 1;
        for (const auto& cat : categories) {
            const auto it = counts.find(cat);
            const double frac = it == counts.end() ? 0.0 : it->second / total;
            selection << loaded.to_calendar(sel.origin) << "," << cat << "," << fmt_num(frac) << "\n";
        }
    }

    // Alignment audit for the last origin.
    std::ostringstream audit;
    audit << "series,m,delay,declared_lead,effective_lead,newest_subperiod,oldest_subperiod\n";
    const int last_origin = rolling.records.empty() ? 0 : rolling.records.back().origin;
    for (std::size_t k = 0; k < config.series.size(); ++k) {
        const auto& s = config.series[k];
        const auto* series = loaded.panel.find(s.id);
        const LagWindow w = lag_window(*series, spec.covariates[k], last_origin);
        audit << s.id << "," << s.m << "," << s.delay << "," << horizon_lead(s, months) << ","
              << w.effective_lead << "," << w.newest_subperiod << "," << w.oldest_subperiod << "\n";
    }

    ensure_dir(args.out_dir);
    write_text_file(args.out_dir + "/forecasts.csv", forecasts.str());
    write_text_file(args.out_dir + "/selection.csv", selection.str());
    write_text_file(args.out_dir + "/audit.csv", audit.str());

    json manifest;
    manifest["command"] = "nowcast";
    manifest["seed"] = config.seed;
    manifest["config"] = config.to_json();
    json options;
    options["horizon"] = args.horizon;
    options["window"] = window;
    options["model"] = model_label(args.model);
    manifest["options"] = std::move(options);
    manifest["outputs"] = {"forecasts.csv", "selection.csv", "audit.csv"};
    write_text_file(args.out_dir + "/manifest.json", manifest.dump(2) + "\n");
}

namespace {

struct ErrorSeries {
    std::vector<int> origins;
    std::vector<double> errors;
};

ErrorSeries read_errors(const std::string& path) {
    const CsvTable table = read_csv(path);
    const int origin_col = table.column("origin");
    const int error_col = table.column("error");
    ErrorSeries out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const std::string& field = table.rows[r][static_cast<std::size_t>(error_col)];
        if (field.empty()) continue;  // unrealized origin
        out.origins.push_back(parse_int(table, r, origin_col, path));
        out.errors.push_back(parse_double(table, r, error_col, path));
    }
    if (out.errors.empty()) throw InputError(path + ": no realized forecast errors");
    return out;
}

}  // namespace

void run_evaluate(const EvaluateArgs& args) {
    const ErrorSeries bench = read_errors(args.benchmark_errors_path);
    const ErrorSeries model = read_errors(args.model_errors_path);
    if (bench.origins.size() != model.origins.size()) {
        throw InputError("error files have different lengths (" +
                         std::to_string(bench.origins.size()) + " vs " +
                         std::to_string(model.origins.size()) + ")");
    }
    for (std::size_t i = 0; i < bench.origins.size(); ++i) {
        if (bench.origins[i] != model.origins[i]) {
            throw InputError("error files disagree on origin at row " + std::to_string(i + 2));
        }
    }

    const EvaluationReport report = make_report(model.errors, bench.errors, args.hac_lags);

    json j;
    j["n"] = report.n;
    j["rmse_benchmark"] = report.rmse_benchmark;
    j["rmse_model"] = report.rmse_model;
    j["rel_rmse"] = report.rel_rmse;
    j["dm_stat"] = report.dm.statistic;
    j["dm_hac_lags"] = report.dm.hac_lags;
    j["dm_degenerate"] = report.dm.degenerate;

    std::ostringstream cum;
    cum << "origin,cumsfe\n";
    for (std::size_t i = 0; i < report.cumsfe_path.size(); ++i) {
        cum << model.origins[i] << "," << fmt_num(report.cumsfe_path[i]) << "\n";
    }

    ensure_dir(args.out_dir);
    write_text_file(args.out_dir + "/report.json", j.dump(2) + "\n");
    write_text_file(args.out_dir + "/cumsfe.csv", cum.str());
}

}  // namespace sgmidas::cli
