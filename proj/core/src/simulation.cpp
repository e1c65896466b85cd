#include "sgmidas/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "sgmidas/tuning.hpp"

namespace sgmidas {

void SimulationScenario::validate() const {
    if (sample_size < 20) throw std::invalid_argument("scenario: sample_size must be >= 20");
    if (n_noise < 0) throw std::invalid_argument("scenario: n_noise must be >= 0");
    if (subperiods < 1) throw std::invalid_argument("scenario: subperiods must be >= 1");
    if (lag_periods_dgp < 1 || lag_periods_fit < 1) {
        throw std::invalid_argument("scenario: lag windows must cover at least one period");
    }
    if (lag_periods_fit > lag_periods_dgp) {
        throw std::invalid_argument("scenario: fitted lag window exceeds the simulated history");
    }
    if (sigma_u2 <= 0.0 || hf_sigma2 <= 0.0) {
        throw std::invalid_argument("scenario: variances must be positive");
    }
    if (student_t_dof <= 2.0) throw std::invalid_argument("scenario: student t dof must exceed 2");
    if (std::abs(hf_rho) >= 1.0) throw std::invalid_argument("scenario: |hf_rho| must be < 1");
    if (dictionary_size < 1 || dictionary_size > fit_lags()) {
        throw std::invalid_argument("scenario: dictionary size must be in [1, fitted lags]");
    }
    if (ar_lags_fit < 0) throw std::invalid_argument("scenario: ar_lags_fit must be >= 0");
    if (burn_in < lag_periods_dgp + 2) throw std::invalid_argument("scenario: burn_in too short");
    if (replications < 1) throw std::invalid_argument("scenario: replications must be >= 1");
    if (cv_folds < 2) throw std::invalid_argument("scenario: cv_folds must be >= 2");
    if (alpha_grid.empty()) throw std::invalid_argument("scenario: alpha grid is empty");
    // AR(2) stationarity of the target recursion.
    if (!(rho2 + rho1 < 1.0 && rho2 - rho1 < 1.0 && std::abs(rho2) < 1.0)) {
        throw std::invalid_argument("scenario: (rho1, rho2) outside the stationary region");
    }
}

double beta_weight(double u, double a, double b) {
    if (a < 1.0 || b < 1.0) throw std::invalid_argument("beta_weight: need a, b >= 1");
    if (u < 0.0 || u > 1.0) throw std::invalid_argument("beta_weight: u must be in [0,1]");
    const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    double density = std::exp(-log_beta);
    if (a > 1.0) density *= std::pow(u, a - 1.0);
    if (b > 1.0) density *= std::pow(1.0 - u, b - 1.0);
    return density;
}

double true_weight(int k, double u) {
    switch (k) {
        case 0: return beta_weight(u, 1.0, 3.0);
        case 1: return beta_weight(u, 2.0, 3.0);
        case 2: return beta_weight(u, 2.0, 2.0);
        default: throw std::invalid_argument("true_weight: k must be 0, 1, or 2");
    }
}

std::string weight_label(int k) {
    switch (k) {
        case 0: return "beta13";
        case 1: return "beta23";
        case 2: return "beta22";
        default: throw std::invalid_argument("weight_label: k must be 0, 1, or 2");
    }
}

std::mt19937_64 replication_rng(std::uint64_t seed, std::uint64_t replication) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffULL),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(replication & 0xffffffffULL),
                      static_cast<std::uint32_t>(replication >> 32)};
    return std::mt19937_64(seq);
}

Eigen::MatrixXd var_transition(int n_covariates) {
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(n_covariates, n_covariates);
    for (int b = 0; b * 5 < n_covariates; ++b) {
        const int lo = b * 5;
        const int hi = std::min(lo + 5, n_covariates);
        const double entry = b == 0 ? 0.15 : 0.075;
        for (int i = lo; i < hi; ++i) {
            for (int j = lo; j < hi; ++j) phi(i, j) = entry;
        }
    }
    return phi;
}

namespace {

double hf_innovation_variance(const SimulationScenario& sc) {
    if (sc.hf_noise == HighFreqNoise::StudentT) {
        return sc.student_t_dof / (sc.student_t_dof - 2.0);  // unscaled t
    }
    return sc.hf_sigma2;
}

// Monthly-clock covariate paths; x(k, h) for h = 0..n_subs-1.
Eigen::MatrixXd simulate_covariates(const SimulationScenario& sc, int n_subs,
                                    std::mt19937_64& rng) {
    const int K = sc.total_covariates();
    Eigen::MatrixXd x(K, n_subs);
    std::normal_distribution<double> gauss(0.0, 1.0);

    if (sc.hf_process == HighFreqProcess::Ar) {
        std::student_t_distribution<double> student(sc.student_t_dof);
        const double eps_sd = std::sqrt(sc.hf_sigma2);
        const double init_sd = std::sqrt(hf_innovation_variance(sc) / (1.0 - sc.hf_rho * sc.hf_rho));
        for (int k = 0; k < K; ++k) {
            double prev = init_sd * gauss(rng);
            for (int h = 0; h < n_subs; ++h) {
                const double eps =
                    sc.hf_noise == HighFreqNoise::Gaussian ? eps_sd * gauss(rng) : student(rng);
                prev = sc.hf_rho * prev + eps;
                x(k, h) = prev;
            }
        }
        return x;
    }

    const Eigen::MatrixXd phi = var_transition(K);
    Eigen::VectorXd state(K);
    for (int k = 0; k < K; ++k) state[k] = gauss(rng);
    Eigen::VectorXd eps(K);
    for (int h = 0; h < n_subs; ++h) {
        for (int k = 0; k < K; ++k) eps[k] = gauss(rng);
        state = phi * state + eps;
        x.col(h) = state;
    }
    return x;
}

}  // namespace

MixedFrequencyPanel simulate_ardl_midas(const SimulationScenario& sc, std::mt19937_64& rng) {
    sc.validate();
    const int m = sc.subperiods;
    const int n_dgp_lags = sc.dgp_lags();
    const int pre = sc.ar_lags_fit;
    // burn-in + pre-sample AR lags + training sample + one holdout period
    const int total_periods = sc.burn_in + pre + sc.sample_size + 1;
    const int total_subs = total_periods * m;

    const Eigen::MatrixXd x = simulate_covariates(sc, total_subs, rng);

    // Per-lag DGP weights (1/n) * omega((j-1)/n) for the three relevant series.
    Eigen::MatrixXd w(3, n_dgp_lags);
    for (int k = 0; k < 3; ++k) {
        for (int j = 0; j < n_dgp_lags; ++j) {
            w(k, j) = true_weight(k, static_cast<double>(j) / n_dgp_lags) / n_dgp_lags;
        }
    }

    std::normal_distribution<double> gauss(0.0, 1.0);
    const double u_sd = std::sqrt(sc.sigma_u2);
    const double denom = (1.0 + sc.rho2) * ((1.0 - sc.rho2) * (1.0 - sc.rho2) - sc.rho1 * sc.rho1);
    const double y0_sd = std::sqrt(sc.sigma_u2 * (1.0 - sc.rho2) / denom);

    std::vector<double> y(static_cast<std::size_t>(total_periods) + 2, 0.0);
    y[0] = y0_sd * gauss(rng);  // y_{-1}
    y[1] = y0_sd * gauss(rng);  // y_0
    for (int t = 1; t <= total_periods; ++t) {
        double signal = 0.0;
        if (!sc.zero_loadings && t * m - n_dgp_lags >= 0) {
            for (int k = 0; k < 3; ++k) {
                double acc = 0.0;
                for (int j = 0; j < n_dgp_lags; ++j) acc += w(k, j) * x(k, t * m - 1 - j);
                signal += acc;
            }
        }
        y[static_cast<std::size_t>(t) + 1] = sc.rho1 * y[static_cast<std::size_t>(t)] +
                                             sc.rho2 * y[static_cast<std::size_t>(t) - 1] + signal +
                                             u_sd * gauss(rng);
    }

    // Expose everything after the burn-in; covariates keep one DGP window of
    // pre-sample history.
    MixedFrequencyPanel panel;
    const int panel_periods = pre + sc.sample_size + 1;
    std::vector<double> target(static_cast<std::size_t>(panel_periods));
    for (int t = 0; t < panel_periods; ++t) {
        target[static_cast<std::size_t>(t)] = y[static_cast<std::size_t>(sc.burn_in + t) + 2];
    }
    panel.target = LowFrequencySeries(std::move(target));

    const int first_sub = 1 - n_dgp_lags;  // relative to panel period 1
    const int sim_offset = sc.burn_in * m + first_sub - 1;  // 0-based into x columns
    const int n_values = panel_periods * m - first_sub + 1;
    for (int k = 0; k < sc.total_covariates(); ++k) {
        std::vector<double> vals(static_cast<std::size_t>(n_values));
        for (int i = 0; i < n_values; ++i) {
            vals[static_cast<std::size_t>(i)] = x(k, sim_offset + i);
        }
        const std::string name = k < 3 ? "relevant" + std::to_string(k + 1)
                                       : "noise" + std::to_string(k - 2);
        panel.covariates.emplace_back(name, std::move(vals), m, /*delay=*/0,
                                      /*lead=*/sc.forecast_lead(), sc.lag_periods_fit, first_sub,
                                      k < 3 ? "relevant" : "noise");
    }
    return panel;
}

namespace {

struct Accumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    int n = 0;
    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++n;
    }
    double mean() const { return n > 0 ? sum / n : 0.0; }
    double se() const {
        if (n < 2) return 0.0;
        const double mu = mean();
        const double var = (sum_sq - n * mu * mu) / (n - 1);
        return std::sqrt(std::max(0.0, var) / n);
    }
};

struct MethodAccum {
    Accumulator forecast;
    Accumulator nowcast;
    bool feasible = true;
};

DesignSpec scenario_design(const SimulationScenario& sc, const MixedFrequencyPanel& panel,
                           int lead, bool unrestricted) {
    DesignSpec spec;
    spec.ar_lags = sc.ar_lags_fit;
    spec.include_intercept = true;
    spec.group_mode = GroupMode::PerCovariate;
    spec.first_target = sc.ar_lags_fit + 1;
    spec.last_target = sc.ar_lags_fit + sc.sample_size;
    for (const auto& s : panel.covariates) {
        CovariateDesign cov;
        cov.name = s.name;
        cov.lag_periods = sc.lag_periods_fit;
        cov.unrestricted = unrestricted;
        if (!unrestricted) cov.dictionary = DictionarySpec::legendre(sc.dictionary_size);
        cov.lead = lead;
        spec.covariates.push_back(std::move(cov));
    }
    return spec;
}

// OLS; the caller has checked rows > cols.
Eigen::VectorXd ols(const DesignProblem& problem) {
    return problem.X.colPivHouseholderQr().solve(problem.y);
}

CvPlan scenario_cv_plan(const SimulationScenario& sc, const std::vector<double>& alphas) {
    CvPlan plan;
    plan.n_folds = sc.cv_folds;
    plan.alpha_grid = alphas;
    plan.n_lambda = sc.n_lambda;
    plan.lambda_min_ratio = sc.lambda_min_ratio;
    plan.solver.tolerance = sc.cv_tolerance;
    plan.solver.standardize = sc.standardize;
    return plan;
}

double oracle_prediction(const SimulationScenario& sc, const MixedFrequencyPanel& panel,
                         int target) {
    double pred = sc.rho1 * panel.target.at(target - 1) + sc.rho2 * panel.target.at(target - 2);
    if (sc.zero_loadings) return pred;
    const int n = sc.dgp_lags();
    for (int k = 0; k < 3; ++k) {
        const auto& s = panel.covariates[static_cast<std::size_t>(k)];
        const int newest = target * sc.subperiods;  // end of the target period
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            acc += true_weight(k, static_cast<double>(j) / n) / n * s.at_subperiod(newest - j);
        }
        pred += acc;
    }
    return pred;
}

}  // namespace

ScenarioResult run_scenario(const SimulationScenario& sc) {
    sc.validate();

    const std::vector<std::string> method_names = {"flow",    "stock",   "middle",
                                                   "lasso_u", "lasso_m", "sgl_m"};
    std::vector<MethodAccum> acc(method_names.size());
    Accumulator oracle_fore;
    Accumulator oracle_now;
    // MISE accumulators: [method 0..2 = lasso_u, lasso_m, sgl_m][weight 0..2]
    Accumulator mise_acc[3][3];

    const int n_fit_lags = sc.fit_lags();
    const DictionarySpec dict = DictionarySpec::legendre(sc.dictionary_size);

    for (int rep = 0; rep < sc.replications; ++rep) {
        auto rng = replication_rng(sc.seed, static_cast<std::uint64_t>(rep));
        const MixedFrequencyPanel panel = simulate_ardl_midas(sc, rng);
        const int target = sc.ar_lags_fit + sc.sample_size + 1;  // holdout period
        const double realized = panel.target.at(target);

        for (int mode = 0; mode < 2; ++mode) {
            const int lead = mode == 0 ? sc.forecast_lead() : sc.nowcast_lead();
            const bool forecast_mode = mode == 0;

            // Aggregated OLS baselines.
            for (int meth = 0; meth < 3; ++meth) {
                const auto method = static_cast<AggregationMethod>(meth);
                DesignSpec agg_spec = scenario_design(sc, panel, lead, false);
                const DesignProblem agg = build_aggregate_design(panel, method, agg_spec);
                if (agg.cols() >= agg.rows()) {
                    acc[static_cast<std::size_t>(meth)].feasible = false;
                    continue;
                }
                const Eigen::VectorXd beta = ols(agg);

                // Prediction row mirrors the aggregate design construction.
                MixedFrequencyPanel probe = panel;
                DesignSpec one_row = agg_spec;
                one_row.first_target = target;
                one_row.last_target = target;
                const DesignProblem row = build_aggregate_design(probe, method, one_row);
                const double pred = row.X.row(0).dot(beta);
                const double err = realized - pred;
                (forecast_mode ? acc[static_cast<std::size_t>(meth)].forecast
                               : acc[static_cast<std::size_t>(meth)].nowcast)
                    .add(err * err);
            }

            // Penalized fits: LASSO-U, LASSO-M, SGL-M.
            for (int meth = 3; meth < 6; ++meth) {
                const bool unrestricted = meth == 3;
                const DesignSpec spec = scenario_design(sc, panel, lead, unrestricted);
                const DesignProblem problem = build_design(panel, spec);
                const std::vector<double> alphas =
                    meth == 5 ? sc.alpha_grid : std::vector<double>{1.0};
                CvPlan plan = scenario_cv_plan(sc, alphas);
                CvResult cv;
                SgLassoFit fitted = fit_with_cv(problem, plan, &cv);

                const Eigen::RowVectorXd row = build_prediction_row(panel, spec, target);
                const double err = realized - fitted.predict_row(row);
                (forecast_mode ? acc[static_cast<std::size_t>(meth)].forecast
                               : acc[static_cast<std::size_t>(meth)].nowcast)
                    .add(err * err);

                // Weight recovery from the full-information fit.
                if (forecast_mode) {
                    for (int k = 0; k < 3; ++k) {
                        const int begin = problem.block_begin[static_cast<std::size_t>(k)];
                        double sq = 0.0;
                        for (int j = 0; j < n_fit_lags; ++j) {
                            const double u = static_cast<double>(j) / n_fit_lags;
                            double estimated;
                            if (unrestricted) {
                                estimated = n_fit_lags * fitted.beta[begin + j];
                            } else {
                                estimated = weight_function_eval(
                                    fitted.beta.segment(begin, sc.dictionary_size), dict, u);
                            }
                            // DGP weight at this lag position
                            const double truth =
                                true_weight(k, static_cast<double>(j) / sc.dgp_lags());
                            sq += (estimated - truth) * (estimated - truth);
                        }
                        mise_acc[meth - 3][k].add(sq / n_fit_lags);
                    }
                }
            }

            const double oe = realized - oracle_prediction(sc, panel, target);
            (forecast_mode ? oracle_fore : oracle_now).add(oe * oe);
        }
    }

    ScenarioResult result;
    result.replications = sc.replications;
    result.seed = sc.seed;
    for (std::size_t i = 0; i < method_names.size(); ++i) {
        MethodResult mr;
        mr.method = method_names[i];
        mr.feasible = acc[i].feasible && acc[i].forecast.n > 0;
        mr.forecast_msfe = acc[i].forecast.mean();
        mr.forecast_se = acc[i].forecast.se();
        mr.nowcast_msfe = acc[i].nowcast.mean();
        mr.nowcast_se = acc[i].nowcast.se();
        result.methods.push_back(std::move(mr));
    }
    const std::vector<std::string> mise_methods = {"lasso_u", "lasso_m", "sgl_m"};
    for (std::size_t mi = 0; mi < mise_methods.size(); ++mi) {
        for (int k = 0; k < 3; ++k) {
            MiseResult mr;
            mr.method = mise_methods[mi];
            mr.weight = weight_label(k);
            mr.mise = mise_acc[mi][k].mean();
            mr.se = mise_acc[mi][k].se();
            result.mise.push_back(std::move(mr));
        }
    }
    result.oracle_forecast_msfe = oracle_fore.mean();
    result.oracle_nowcast_msfe = oracle_now.mean();
    return result;
}

}  // namespace sgmidas
