#include "config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "csv.hpp"

namespace sgmidas::cli {

namespace {

using nlohmann::json;

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path + ": cannot open file");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
    return j;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (allowed.find(key) == allowed.end()) {
            throw InputError(where + ": unknown key '" + key + "'");
        }
    }
}

// Manifests embed the original config/scenario; accept them transparently.
json unwrap_manifest(json j, const std::string& inner_key) {
    if (j.contains("command") && j.contains(inner_key)) return j.at(inner_key);
    return j;
}

CvPlan parse_cv(const json& j, const std::string& where) {
    CvPlan plan;
    check_keys(j, {"folds", "alpha_grid", "n_lambda", "lambda_min_ratio", "embargo", "tolerance",
                   "max_sweeps", "standardize"},
               where);
    plan.n_folds = j.value("folds", plan.n_folds);
    if (j.contains("alpha_grid")) plan.alpha_grid = j.at("alpha_grid").get<std::vector<double>>();
    plan.n_lambda = j.value("n_lambda", plan.n_lambda);
    plan.lambda_min_ratio = j.value("lambda_min_ratio", plan.lambda_min_ratio);
    plan.embargo = j.value("embargo", plan.embargo);
    plan.solver.tolerance = j.value("tolerance", plan.solver.tolerance);
    plan.solver.max_sweeps = j.value("max_sweeps", plan.solver.max_sweeps);
    plan.solver.standardize = j.value("standardize", plan.solver.standardize);
    return plan;
}

json cv_to_json(const CvPlan& plan) {
    json j;
    j["folds"] = plan.n_folds;
    j["alpha_grid"] = plan.alpha_grid;
    j["n_lambda"] = plan.n_lambda;
    j["lambda_min_ratio"] = plan.lambda_min_ratio;
    j["embargo"] = plan.embargo;
    j["tolerance"] = plan.solver.tolerance;
    j["max_sweeps"] = plan.solver.max_sweeps;
    j["standardize"] = plan.solver.standardize;
    return j;
}

}  // namespace

ProjectConfig load_project_config(const std::string& path) {
    const json j = unwrap_manifest(load_json_file(path), "config");
    check_keys(j,
               {"target", "covariates", "series", "ar_lags", "include_intercept",
                "unpenalized_intercept", "group_mode", "impute_zero", "cv", "window", "seed"},
               path);

    ProjectConfig config;
    if (!j.contains("target") || !j.contains("covariates") || !j.contains("series")) {
        throw InputError(path + ": config needs 'target', 'covariates', and 'series'");
    }
    config.target_path = j.at("target").get<std::string>();
    config.covariates_path = j.at("covariates").get<std::string>();
    config.ar_lags = j.value("ar_lags", config.ar_lags);
    config.include_intercept = j.value("include_intercept", config.include_intercept);
    config.unpenalized_intercept = j.value("unpenalized_intercept", config.unpenalized_intercept);
    const std::string mode = j.value("group_mode", std::string("per-covariate"));
    if (mode == "per-covariate") {
        config.group_mode = GroupMode::PerCovariate;
    } else if (mode == "per-category") {
        config.group_mode = GroupMode::PerCategory;
    } else {
        throw InputError(path + ": group_mode must be 'per-covariate' or 'per-category'");
    }
    config.impute_zero = j.value("impute_zero", config.impute_zero);
    if (j.contains("cv")) config.cv = parse_cv(j.at("cv"), path + ": cv");
    config.cv.unpenalized_intercept = config.unpenalized_intercept;
    config.window = j.value("window", config.window);
    config.seed = j.value("seed", config.seed);

    for (const auto& s : j.at("series")) {
        check_keys(s, {"id", "m", "delay", "lead", "q", "L", "unrestricted", "category"},
                   path + ": series");
        SeriesConfig sc;
        if (!s.contains("id")) throw InputError(path + ": every series needs an 'id'");
        sc.id = s.at("id").get<std::string>();
        sc.m = s.value("m", sc.m);
        sc.delay = s.value("delay", sc.delay);
        if (s.contains("lead")) sc.lead = s.at("lead").get<int>();
        sc.lag_periods = s.value("q", sc.lag_periods);
        sc.dictionary_size = s.value("L", sc.dictionary_size);
        sc.unrestricted = s.value("unrestricted", sc.unrestricted);
        sc.category = s.value("category", sc.category);
        config.series.push_back(std::move(sc));
    }
    if (config.series.empty()) throw InputError(path + ": 'series' list is empty");
    return config;
}

nlohmann::json ProjectConfig::to_json() const {
    json j;
    j["target"] = target_path;
    j["covariates"] = covariates_path;
    j["ar_lags"] = ar_lags;
    j["include_intercept"] = include_intercept;
    j["unpenalized_intercept"] = unpenalized_intercept;
    j["group_mode"] = group_mode == GroupMode::PerCovariate ? "per-covariate" : "per-category";
    j["impute_zero"] = impute_zero;
    j["cv"] = cv_to_json(cv);
    j["window"] = window;
    j["seed"] = seed;
    json series_json = json::array();
    for (const auto& s : series) {
        json sj;
        sj["id"] = s.id;
        sj["m"] = s.m;
        sj["delay"] = s.delay;
        if (s.lead) sj["lead"] = *s.lead;
        sj["q"] = s.lag_periods;
        sj["L"] = s.dictionary_size;
        sj["unrestricted"] = s.unrestricted;
        sj["category"] = s.category;
        series_json.push_back(std::move(sj));
    }
    j["series"] = std::move(series_json);
    return j;
}

SimulationScenario load_scenario(const std::string& path) {
    const json j = unwrap_manifest(load_json_file(path), "scenario");
    check_keys(j,
               {"T", "n_noise", "subperiods", "lag_periods_dgp", "lag_periods_fit", "rho1", "rho2",
                "sigma_u2", "hf_process", "hf_rho", "hf_noise", "hf_sigma2", "student_t_dof",
                "zero_loadings", "L", "ar_lags_fit", "burn_in", "replications", "seed", "cv",
                "standardize"},
               path);

    SimulationScenario sc;
    sc.sample_size = j.value("T", sc.sample_size);
    sc.n_noise = j.value("n_noise", sc.n_noise);
    sc.subperiods = j.value("subperiods", sc.subperiods);
    sc.lag_periods_dgp = j.value("lag_periods_dgp", sc.lag_periods_dgp);
    sc.lag_periods_fit = j.value("lag_periods_fit", sc.lag_periods_fit);
    sc.rho1 = j.value("rho1", sc.rho1);
    sc.rho2 = j.value("rho2", sc.rho2);
    sc.sigma_u2 = j.value("sigma_u2", sc.sigma_u2);
    const std::string process = j.value("hf_process", std::string("ar"));
    if (process == "ar") {
        sc.hf_process = HighFreqProcess::Ar;
    } else if (process == "var") {
        sc.hf_process = HighFreqProcess::Var;
    } else {
        throw InputError(path + ": hf_process must be 'ar' or 'var'");
    }
    sc.hf_rho = j.value("hf_rho", sc.hf_rho);
    const std::string noise = j.value("hf_noise", std::string("gaussian"));
    if (noise == "gaussian") {
        sc.hf_noise = HighFreqNoise::Gaussian;
    } else if (noise == "student_t") {
        sc.hf_noise = HighFreqNoise::StudentT;
    } else {
        throw InputError(path + ": hf_noise must be 'gaussian' or 'student_t'");
    }
    sc.hf_sigma2 = j.value("hf_sigma2", sc.hf_sigma2);
    sc.student_t_dof = j.value("student_t_dof", sc.student_t_dof);
    sc.zero_loadings = j.value("zero_loadings", sc.zero_loadings);
    sc.dictionary_size = j.value("L", sc.dictionary_size);
    sc.ar_lags_fit = j.value("ar_lags_fit", sc.ar_lags_fit);
    sc.burn_in = j.value("burn_in", sc.burn_in);
    sc.replications = j.value("replications", sc.replications);
    sc.seed = j.value("seed", sc.seed);
    sc.standardize = j.value("standardize", sc.standardize);
    if (j.contains("cv")) {
        const CvPlan plan = parse_cv(j.at("cv"), path + ": cv");
        sc.cv_folds = plan.n_folds;
        sc.alpha_grid = plan.alpha_grid;
        sc.n_lambda = plan.n_lambda;
        sc.lambda_min_ratio = plan.lambda_min_ratio;
        sc.cv_tolerance = plan.solver.tolerance;
    }
    return sc;
}

nlohmann::json scenario_to_json(const SimulationScenario& sc) {
    json j;
    j["T"] = sc.sample_size;
    j["n_noise"] = sc.n_noise;
    j["subperiods"] = sc.subperiods;
    j["lag_periods_dgp"] = sc.lag_periods_dgp;
    j["lag_periods_fit"] = sc.lag_periods_fit;
    j["rho1"] = sc.rho1;
    j["rho2"] = sc.rho2;
    j["sigma_u2"] = sc.sigma_u2;
    j["hf_process"] = sc.hf_process == HighFreqProcess::Ar ? "ar" : "var";
    j["hf_rho"] = sc.hf_rho;
    j["hf_noise"] = sc.hf_noise == HighFreqNoise::Gaussian ? "gaussian" : "student_t";
    j["hf_sigma2"] = sc.hf_sigma2;
    j["student_t_dof"] = sc.student_t_dof;
    j["zero_loadings"] = sc.zero_loadings;
    j["L"] = sc.dictionary_size;
    j["ar_lags_fit"] = sc.ar_lags_fit;
    j["burn_in"] = sc.burn_in;
    j["replications"] = sc.replications;
    j["seed"] = sc.seed;
    j["standardize"] = sc.standardize;
    json cv;
    cv["folds"] = sc.cv_folds;
    cv["alpha_grid"] = sc.alpha_grid;
    cv["n_lambda"] = sc.n_lambda;
    cv["lambda_min_ratio"] = sc.lambda_min_ratio;
    cv["tolerance"] = sc.cv_tolerance;
    j["cv"] = std::move(cv);
    return j;
}

LoadedPanel load_panel(const ProjectConfig& config, const std::string& config_path) {
    namespace fs = std::filesystem;
    const fs::path base = fs::path(config_path).parent_path();
    auto resolve = [&](const std::string& p) {
        const fs::path candidate(p);
        return candidate.is_absolute() ? candidate.string() : (base / candidate).string();
    };

    const TargetData target = read_target_csv(resolve(config.target_path));
    const std::vector<CovariateData> covariates = read_covariates_csv(resolve(config.covariates_path));

    LoadedPanel loaded;
    loaded.first_period = target.first_period;
    loaded.panel.target = LowFrequencySeries(target.values);
    loaded.panel.impute_zero = config.impute_zero;

    for (const auto& sc : config.series) {
        const CovariateData* data = nullptr;
        for (const auto& c : covariates) {
            if (c.id == sc.id) data = &c;
        }
        if (data == nullptr) {
            throw InputError("series '" + sc.id + "' not found in " + config.covariates_path);
        }
        if (data->first_subperiod > sc.m) {
            throw InputError("series '" + sc.id + "' starts at subperiod " +
                             std::to_string(data->first_subperiod) + " but m = " + std::to_string(sc.m));
        }
        const int first_sub =
            (data->first_period - target.first_period) * sc.m + data->first_subperiod;
        loaded.panel.covariates.emplace_back(sc.id, data->values, sc.m, sc.delay,
                                             sc.lead.value_or(0), sc.lag_periods, first_sub,
                                             sc.category);
    }
    return loaded;
}

int horizon_months(const std::string& horizon) {
    if (horizon == "2m") return 1;
    if (horizon == "1m") return 2;
    if (horizon == "eoq") return 3;
    if (horizon == "custom") return -1;
    throw InputError("horizon must be one of 2m, 1m, eoq, custom");
}

int horizon_lead(const SeriesConfig& series, int months_into_quarter) {
    if (months_into_quarter < 0) return series.lead.value_or(0);
    return months_into_quarter * series.m / 3;
}

DesignSpec design_from_config(const ProjectConfig& config, int months_into_quarter) {
    DesignSpec spec;
    spec.ar_lags = config.ar_lags;
    spec.include_intercept = config.include_intercept;
    spec.group_mode = config.group_mode;
    for (const auto& s : config.series) {
        CovariateDesign cov;
        cov.name = s.id;
        cov.lag_periods = s.lag_periods;
        cov.unrestricted = s.unrestricted;
        if (!s.unrestricted) cov.dictionary = DictionarySpec::legendre(s.dictionary_size);
        cov.lead = horizon_lead(s, months_into_quarter);
        cov.delay = s.delay;
        spec.covariates.push_back(std::move(cov));
    }
    return spec;
}

}  // namespace sgmidas::cli
