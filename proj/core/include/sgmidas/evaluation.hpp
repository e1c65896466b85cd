#pragma once

#include <map>
#include <string>
#include <vector>

#include "sgmidas/design.hpp"
#include "sgmidas/sglasso.hpp"
#include "sgmidas/tuning.hpp"

namespace sgmidas {

struct ForecastRecord {
    int origin = 0;          // target period being predicted
    std::string horizon;     // label: 2m, 1m, eoq, custom
    double prediction = 0.0;
    double realized = 0.0;   // NaN when not yet observed
    double error = 0.0;      // realized - prediction; NaN when unobserved
};

/// Tuning choice and active covariates at one rolling origin.
struct OriginSelection {
    int origin = 0;
    double alpha = 1.0;
    double lambda = 0.0;
    std::vector<std::string> active_covariates;
};

struct RollingResult {
    std::vector<ForecastRecord> records;
    std::vector<OriginSelection> selections;
};

enum class ForecastModel { SgLasso, Ar, PcaOls, RidgeU, LassoU, ElasticNetU };

ForecastModel forecast_model_from_string(const std::string& name);
std::string to_string(ForecastModel model);

/// Rolling-window prediction: for each origin, fit on the trailing `window`
/// design rows (tuning by blocked CV where the model needs it) and predict
/// the next target. A final out-of-sample record with NaN realized value is
/// emitted when covariate data reaches past the last observed target.
RollingResult rolling_nowcast(const MixedFrequencyPanel& panel, const DesignSpec& spec, int window,
                              const CvPlan& tuner, ForecastModel model = ForecastModel::SgLasso,
                              const std::string& horizon_label = "custom");

/// Comparison baselines on an assembled design. AR uses only the intercept
/// and AR-lag columns; PCA-OLS adds the first principal component of the
/// covariate block (standardized on the given rows); the U-variants run the
/// elastic-net machinery with per-coordinate penalties, tuned by `tuner`.
SgLassoFit baseline_fit(const DesignProblem& problem, ForecastModel model, const CvPlan& tuner);

struct DmResult {
    double statistic = 0.0;
    bool degenerate = false;  // zero long-run variance
    int hac_lags = 0;
};

/// Diebold-Mariano statistic on squared-error loss: d_t = e1_t^2 - e2_t^2,
/// studentized by a Bartlett-kernel HAC long-run variance. Negative values
/// favor model 1. hac_lags < 0 selects floor(n^{1/3}).
DmResult diebold_mariano(const std::vector<double>& e1, const std::vector<double>& e2,
                         int hac_lags = -1);

/// Running sum of squared-error differentials; positive means model 1 has
/// accumulated larger squared errors.
std::vector<double> cumsfe(const std::vector<double>& e1, const std::vector<double>& e2);

double rmse(const std::vector<double>& errors);

/// RMSE(model)/RMSE(benchmark).
double relative_rmse(const std::vector<double>& model_errors,
                     const std::vector<double>& benchmark_errors);

/// Per fit, per category: (selected covariates in category) / (all covariates).
/// A covariate is selected when any coefficient in its block is nonzero.
/// Throws on covariates missing from the category map.
std::vector<std::map<std::string, double>> selection_fractions(
    const std::vector<SgLassoFit>& fits, const DesignProblem& problem,
    const std::map<std::string, std::string>& category_of_covariate);

struct EvaluationReport {
    double rmse_model = 0.0;
    double rmse_benchmark = 0.0;
    double rel_rmse = 1.0;
    DmResult dm;  // model vs benchmark; negative favors the model
    std::vector<double> cumsfe_path;
    int n = 0;
};

EvaluationReport make_report(const std::vector<double>& model_errors,
                             const std::vector<double>& benchmark_errors, int hac_lags = -1);

}  // namespace sgmidas
