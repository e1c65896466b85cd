#include "sgmidas/evaluation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sgmidas {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

Eigen::VectorXd ols_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < X.cols()) {
        throw std::invalid_argument("baseline_fit: rank-deficient OLS design");
    }
    return qr.solve(y);
}

std::vector<int> ar_columns(const DesignProblem& problem) {
    const int g = problem.groups.find("ar");
    std::vector<int> cols;
    if (g >= 0) {
        const auto& grp = problem.groups.group(g);
        for (int j = grp.begin; j < grp.end; ++j) cols.push_back(j);
    }
    return cols;
}

SgLassoFit from_beta(const DesignProblem& problem, Eigen::VectorXd beta) {
    SgLassoFit fit;
    fit.beta = std::move(beta);
    fit.converged = true;
    fit.lambda = 0.0;
    fit.alpha = 0.0;
    const Eigen::VectorXd resid = problem.y - problem.X * fit.beta;
    fit.objective = resid.squaredNorm() / static_cast<double>(problem.rows());
    for (int j = 0; j < problem.cols(); ++j) {
        if (fit.beta[j] != 0.0) fit.active_set.push_back(j);
    }
    for (int g = 0; g < problem.groups.num_groups(); ++g) {
        const auto& grp = problem.groups.group(g);
        if (fit.beta.segment(grp.begin, grp.size()).lpNorm<Eigen::Infinity>() > 0.0) {
            fit.active_groups.push_back(g);
        }
    }
    return fit;
}

// Covariate columns = everything outside the "ar" group.
std::vector<int> covariate_columns(const DesignProblem& problem) {
    std::vector<int> cols;
    const int g = problem.groups.find("ar");
    const int lo = g >= 0 ? problem.groups.group(g).begin : -1;
    const int hi = g >= 0 ? problem.groups.group(g).end : -1;
    for (int j = 0; j < problem.cols(); ++j) {
        if (j >= lo && j < hi) continue;
        cols.push_back(j);
    }
    return cols;
}

SgLassoFit pca_ols_fit(const DesignProblem& problem) {
    const std::vector<int> ar = ar_columns(problem);
    const std::vector<int> cov = covariate_columns(problem);
    if (cov.empty()) throw std::invalid_argument("baseline_fit: PCA-OLS needs covariates");
    const int n = problem.rows();

    // Standardize covariates on the training rows, then take the first
    // principal component direction.
    Eigen::MatrixXd Z(n, static_cast<int>(cov.size()));
    Eigen::VectorXd center(static_cast<int>(cov.size()));
    Eigen::VectorXd scale(static_cast<int>(cov.size()));
    for (std::size_t c = 0; c < cov.size(); ++c) {
        const Eigen::VectorXd col = problem.X.col(cov[c]);
        const double mu = col.mean();
        double sd = std::sqrt((col.array() - mu).square().sum() / std::max(1, n - 1));
        if (sd <= 0.0) sd = 1.0;
        center[static_cast<int>(c)] = mu;
        scale[static_cast<int>(c)] = sd;
        Z.col(static_cast<int>(c)) = (col.array() - mu) / sd;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Z, Eigen::ComputeThinV);
    Eigen::VectorXd loading = svd.matrixV().col(0);
    // Deterministic sign: largest-magnitude loading entry positive.
    int arg = 0;
    for (int i = 1; i < loading.size(); ++i) {
        if (std::abs(loading[i]) > std::abs(loading[arg])) arg = i;
    }
    if (loading[arg] < 0.0) loading = -loading;

    const Eigen::VectorXd score = Z * loading;
    Eigen::MatrixXd D(n, static_cast<int>(ar.size()) + 1);
    for (std::size_t c = 0; c < ar.size(); ++c) D.col(static_cast<int>(c)) = problem.X.col(ar[c]);
    D.col(static_cast<int>(ar.size())) = score;
    const Eigen::VectorXd coef = ols_solve(D, problem.y);

    // Fold the score back into a linear function of the design columns so
    // the fit predicts from raw rows: score = sum_j loading_j*(x_j - c_j)/s_j.
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(problem.cols());
    for (std::size_t c = 0; c < ar.size(); ++c) beta[ar[c]] = coef[static_cast<int>(c)];
    const double pc_coef = coef[static_cast<int>(ar.size())];
    double shift = 0.0;
    for (std::size_t c = 0; c < cov.size(); ++c) {
        beta[cov[c]] += pc_coef * loading[static_cast<int>(c)] / scale[static_cast<int>(c)];
        shift -= pc_coef * loading[static_cast<int>(c)] * center[static_cast<int>(c)] /
                 scale[static_cast<int>(c)];
    }
    if (problem.intercept_column >= 0) {
        beta[problem.intercept_column] += shift;
    } else if (shift != 0.0) {
        throw std::invalid_argument("baseline_fit: PCA-OLS needs an intercept column");
    }
    return from_beta(problem, std::move(beta));
}

}  // namespace

ForecastModel forecast_model_from_string(const std::string& name) {
    if (name == "sgl") return ForecastModel::SgLasso;
    if (name == "ar") return ForecastModel::Ar;
    if (name == "pca") return ForecastModel::PcaOls;
    if (name == "ridge-u") return ForecastModel::RidgeU;
    if (name == "lasso-u") return ForecastModel::LassoU;
    if (name == "enet-u") return ForecastModel::ElasticNetU;
    throw std::invalid_argument("unknown model '" + name + "'");
}

std::string to_string(ForecastModel model) {
    switch (model) {
        case ForecastModel::SgLasso: return "sgl";
        case ForecastModel::Ar: return "ar";
        case ForecastModel::PcaOls: return "pca";
        case ForecastModel::RidgeU: return "ridge-u";
        case ForecastModel::LassoU: return "lasso-u";
        case ForecastModel::ElasticNetU: return "enet-u";
    }
    throw std::logic_error("to_string: unknown model");
}

SgLassoFit baseline_fit(const DesignProblem& problem, ForecastModel model, const CvPlan& tuner) {
    switch (model) {
        case ForecastModel::Ar: {
            const std::vector<int> ar = ar_columns(problem);
            if (ar.empty()) throw std::invalid_argument("baseline_fit: no AR group in design");
            Eigen::MatrixXd D(problem.rows(), static_cast<int>(ar.size()));
            for (std::size_t c = 0; c < ar.size(); ++c) D.col(static_cast<int>(c)) = problem.X.col(ar[c]);
            const Eigen::VectorXd coef = ols_solve(D, problem.y);
            Eigen::VectorXd beta = Eigen::VectorXd::Zero(problem.cols());
            for (std::size_t c = 0; c < ar.size(); ++c) beta[ar[c]] = coef[static_cast<int>(c)];
            return from_beta(problem, std::move(beta));
        }
        case ForecastModel::PcaOls:
            return pca_ols_fit(problem);
        case ForecastModel::RidgeU:
        case ForecastModel::LassoU:
        case ForecastModel::ElasticNetU: {
            CvPlan plan = tuner;
            plan.kind = PenaltyKind::ElasticNet;
            plan.unpenalized_intercept = problem.intercept_column >= 0;
            plan.group_weights.clear();
            if (model == ForecastModel::RidgeU) {
                plan.alpha_grid = {0.0};
            } else if (model == ForecastModel::LassoU) {
                plan.alpha_grid = {1.0};
            } else if (plan.alpha_grid.size() < 2) {
                plan.alpha_grid = {0.25, 0.5, 0.75};
            }
            return fit_with_cv(problem, plan);
        }
        case ForecastModel::SgLasso:
            return fit_with_cv(problem, tuner);
    }
    throw std::logic_error("baseline_fit: unknown model");
}

RollingResult rolling_nowcast(const MixedFrequencyPanel& panel, const DesignSpec& spec, int window,
                              const CvPlan& tuner, ForecastModel model,
                              const std::string& horizon_label) {
    if (window < 2 * tuner.n_folds && model == ForecastModel::SgLasso) {
        throw std::invalid_argument("rolling_nowcast: window too small for the CV plan");
    }
    const DesignProblem full = build_design(panel, spec);
    const int n = full.rows();
    if (n < window + 1) {
        throw std::invalid_argument("rolling_nowcast: need at least window+1 usable periods, have " +
                                    std::to_string(n));
    }

    RollingResult out;
    auto run_origin = [&](const DesignProblem& train, const Eigen::RowVectorXd& row, int target,
                          double realized) {
        const SgLassoFit fitted = model == ForecastModel::SgLasso ? fit_with_cv(train, tuner)
                                                                  : baseline_fit(train, model, tuner);
        ForecastRecord rec;
        rec.origin = target;
        rec.horizon = horizon_label;
        rec.prediction = fitted.predict_row(row);
        rec.realized = realized;
        rec.error = std::isnan(realized) ? kNan : realized - rec.prediction;
        out.records.push_back(rec);

        OriginSelection sel;
        sel.origin = target;
        sel.alpha = fitted.alpha;
        sel.lambda = fitted.lambda;
        for (std::size_t b = 0; b < train.block_begin.size(); ++b) {
            const auto seg =
                fitted.beta.segment(train.block_begin[b], train.block_size[b]);
            if (seg.lpNorm<Eigen::Infinity>() > 0.0) {
                sel.active_covariates.push_back(train.block_name[b]);
            }
        }
        out.selections.push_back(std::move(sel));
    };

    for (int i = window; i < n; ++i) {
        std::vector<int> train_rows(static_cast<std::size_t>(window));
        for (int r = 0; r < window; ++r) train_rows[static_cast<std::size_t>(r)] = i - window + r;
        const DesignProblem train = full.subset(train_rows);
        run_origin(train, full.X.row(i), full.origin_period[static_cast<std::size_t>(i)],
                   full.y[i]);
    }

    // One step past the observed sample, but only when the user supplied
    // covariate data beyond the target series (the live-nowcast layout).
    bool data_extends = false;
    for (const auto& s : panel.covariates) {
        if (s.last_subperiod() > panel.periods() * s.m) data_extends = true;
    }
    const int next_target = full.origin_period.back() + 1;
    if (data_extends && next_target == panel.periods() + 1) {
        try {
            const Eigen::RowVectorXd row = build_prediction_row(panel, spec, next_target);
            std::vector<int> train_rows(static_cast<std::size_t>(window));
            for (int r = 0; r < window; ++r) train_rows[static_cast<std::size_t>(r)] = n - window + r;
            const DesignProblem train = full.subset(train_rows);
            run_origin(train, row, next_target, kNan);
        } catch (const std::invalid_argument&) {
            // the extra data does not cover the next window; nothing to emit
        }
    }
    return out;
}

DmResult diebold_mariano(const std::vector<double>& e1, const std::vector<double>& e2,
                         int hac_lags) {
    if (e1.size() != e2.size()) throw std::invalid_argument("diebold_mariano: length mismatch");
    const int n = static_cast<int>(e1.size());
    if (n < 5) throw std::invalid_argument("diebold_mariano: need at least 5 observations");

    std::vector<double> d(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        d[static_cast<std::size_t>(i)] = e1[static_cast<std::size_t>(i)] * e1[static_cast<std::size_t>(i)] -
                                         e2[static_cast<std::size_t>(i)] * e2[static_cast<std::size_t>(i)];
    }
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= n;

    DmResult res;
    res.hac_lags = hac_lags >= 0 ? hac_lags : static_cast<int>(std::floor(std::cbrt(n)));
    const int H = std::min(res.hac_lags, n - 1);

    auto gamma = [&](int lag) {
        double acc = 0.0;
        for (int t = lag; t < n; ++t) {
            acc += (d[static_cast<std::size_t>(t)] - mean) * (d[static_cast<std::size_t>(t - lag)] - mean);
        }
        return acc / n;
    };
    double lrv = gamma(0);
    for (int l = 1; l <= H; ++l) {
        lrv += 2.0 * (1.0 - static_cast<double>(l) / (H + 1.0)) * gamma(l);
    }

    if (lrv <= 0.0) {
        res.degenerate = true;
        res.statistic = mean == 0.0 ? 0.0
                                    : (mean > 0.0 ? std::numeric_limits<double>::infinity()
                                                  : -std::numeric_limits<double>::infinity());
        return res;
    }
    res.statistic = mean / std::sqrt(lrv / n);
    return res;
}

std::vector<double> cumsfe(const std::vector<double>& e1, const std::vector<double>& e2) {
    if (e1.size() != e2.size()) throw std::invalid_argument("cumsfe: length mismatch");
    std::vector<double> path(e1.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < e1.size(); ++i) {
        acc += e1[i] * e1[i] - e2[i] * e2[i];
        path[i] = acc;
    }
    return path;
}

double rmse(const std::vector<double>& errors) {
    if (errors.empty()) throw std::invalid_argument("rmse: empty error sequence");
    double acc = 0.0;
    for (double e : errors) acc += e * e;
    return std::sqrt(acc / static_cast<double>(errors.size()));
}

double relative_rmse(const std::vector<double>& model_errors,
                     const std::vector<double>& benchmark_errors) {
    return rmse(model_errors) / rmse(benchmark_errors);
}

std::vector<std::map<std::string, double>> selection_fractions(
    const std::vector<SgLassoFit>& fits, const DesignProblem& problem,
    const std::map<std::string, std::string>& category_of_covariate) {
    const int total = static_cast<int>(problem.block_name.size());
    if (total == 0) throw std::invalid_argument("selection_fractions: design has no covariates");
    for (const auto& name : problem.block_name) {
        if (category_of_covariate.find(name) == category_of_covariate.end()) {
            throw std::invalid_argument("selection_fractions: covariate '" + name +
                                        "' missing from the category map");
        }
    }

    std::vector<std::map<std::string, double>> out;
    out.reserve(fits.size());
    for (const auto& fit : fits) {
        std::map<std::string, double> counts;
        for (const auto& [name, cat] : category_of_covariate) counts[cat];  // zero-init categories
        for (std::size_t b = 0; b < problem.block_name.size(); ++b) {
            const auto seg = fit.beta.segment(problem.block_begin[b], problem.block_size[b]);
            if (seg.lpNorm<Eigen::Infinity>() > 0.0) {
                counts[category_of_covariate.at(problem.block_name[b])] += 1.0;
            }
        }
        for (auto& [cat, count] : counts) count /= static_cast<double>(total);
        out.push_back(std::move(counts));
    }
    return out;
}

EvaluationReport make_report(const std::vector<double>& model_errors,
                             const std::vector<double>& benchmark_errors, int hac_lags) {
    EvaluationReport report;
    report.rmse_model = rmse(model_errors);
    report.rmse_benchmark = rmse(benchmark_errors);
    report.rel_rmse = report.rmse_model / report.rmse_benchmark;
    report.dm = diebold_mariano(model_errors, benchmark_errors, hac_lags);
    report.cumsfe_path = cumsfe(model_errors, benchmark_errors);
    report.n = static_cast<int>(model_errors.size());
    return report;
}

}  // namespace sgmidas
