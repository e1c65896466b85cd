#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sgmidas/design.hpp"
#include "sgmidas/timeseries.hpp"

namespace sgmidas {

enum class HighFreqProcess { Ar, Var };
enum class HighFreqNoise { Gaussian, StudentT };

/// Monte Carlo data-generating process: an AR(2) target driven by three
/// high-frequency covariates through Beta-density lag weights over a
/// window of lag_periods_dgp * subperiods lags, plus noise covariates.
struct SimulationScenario {
    int sample_size = 50;       // T, training design rows
    int n_noise = 7;            // irrelevant covariates, same law, zero loading
    int subperiods = 3;         // m, high-frequency observations per period
    int lag_periods_dgp = 4;    // lag window of the DGP in periods (m*q = 12 lags)
    int lag_periods_fit = 4;    // lag window used by fitted models (2 = half lags)
    double rho1 = 0.3;
    double rho2 = 0.01;
    double sigma_u2 = 1.0;
    HighFreqProcess hf_process = HighFreqProcess::Ar;
    double hf_rho = 0.2;        // AR case
    HighFreqNoise hf_noise = HighFreqNoise::Gaussian;
    double hf_sigma2 = 5.0;     // Gaussian innovation variance
    double student_t_dof = 5.0;
    bool zero_loadings = false; // covariates carry no signal
    int dictionary_size = 5;    // L basis functions (degrees 0..L-1)
    int ar_lags_fit = 5;
    int burn_in = 200;
    int replications = 500;
    std::uint64_t seed = 1;

    // Tuning protocol for the penalized fits.
    int cv_folds = 5;
    std::vector<double> alpha_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
    int n_lambda = 50;
    double lambda_min_ratio = 1e-3;
    double cv_tolerance = 1e-5;
    double fit_tolerance = 1e-7;
    bool standardize = true;

    int relevant_covariates() const { return 3; }
    int total_covariates() const { return relevant_covariates() + n_noise; }
    int dgp_lags() const { return subperiods * lag_periods_dgp; }
    int fit_lags() const { return subperiods * lag_periods_fit; }
    /// Full target-period information set.
    int forecast_lead() const { return subperiods; }
    /// First ceil(m/2) sub-periods of the target period.
    int nowcast_lead() const { return (subperiods + 1) / 2; }

    void validate() const;  // throws std::invalid_argument
};

/// Beta(a, b) density at u in [0,1]; requires a, b >= 1 so endpoints stay finite.
double beta_weight(double u, double a, double b);

/// The three relevant weight functions: Beta(1,3), Beta(2,3), Beta(2,2).
double true_weight(int k, double u);
std::string weight_label(int k);

/// Deterministic per-replication RNG stream.
std::mt19937_64 replication_rng(std::uint64_t seed, std::uint64_t replication);

/// One simulated panel: pre-sample AR lags, T training periods, and one
/// holdout period (with covariate data through its end) at the back.
MixedFrequencyPanel simulate_ardl_midas(const SimulationScenario& scenario, std::mt19937_64& rng);

/// Block-diagonal VAR companion with 5x5 blocks: entries 0.15 in the first
/// block, 0.075 in the remaining blocks.
Eigen::MatrixXd var_transition(int n_covariates);

struct MethodResult {
    std::string method;
    bool feasible = true;  // OLS baselines go infeasible once p >= rows
    double forecast_msfe = 0.0;
    double forecast_se = 0.0;
    double nowcast_msfe = 0.0;
    double nowcast_se = 0.0;
};

struct MiseResult {
    std::string method;
    std::string weight;
    double mise = 0.0;
    double se = 0.0;
};

struct ScenarioResult {
    std::vector<MethodResult> methods;  // flow, stock, middle, lasso_u, lasso_m, sgl_m
    std::vector<MiseResult> mise;       // lasso_u / lasso_m / sgl_m x three weights
    double oracle_forecast_msfe = 0.0;
    double oracle_nowcast_msfe = 0.0;
    int replications = 0;
    std::uint64_t seed = 0;
};

/// Run the full method suite over scenario.replications replications.
/// Deterministic given the scenario (including its seed).
ScenarioResult run_scenario(const SimulationScenario& scenario);

}  // namespace sgmidas
