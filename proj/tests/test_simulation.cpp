#include <doctest.h>

#include <cmath>

#include "sgmidas/simulation.hpp"
#include "support/oracles.hpp"

using namespace sgmidas;

namespace {

SimulationScenario tiny_baseline() {
    SimulationScenario sc;
    sc.sample_size = 50;
    sc.replications = 10;
    sc.n_lambda = 20;
    sc.alpha_grid = {0.0, 0.5, 1.0};
    sc.seed = 7;
    return sc;
}

}  // namespace

TEST_CASE("beta density values and normalization") {
    CHECK(beta_weight(0.5, 2.0, 2.0) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(beta_weight(0.0, 1.0, 3.0) == doctest::Approx(3.0).epsilon(1e-12));
    for (int k = 0; k < 3; ++k) {
        const double mass = oracle::simpson([&](double u) { return true_weight(k, u); });
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
    }
    CHECK_THROWS_AS(beta_weight(0.5, 0.5, 2.0), std::invalid_argument);
}

TEST_CASE("var transition assembles 5x5 blocks") {
    const Eigen::MatrixXd phi = var_transition(10);
    CHECK(phi(0, 4) == doctest::Approx(0.15));
    CHECK(phi(4, 0) == doctest::Approx(0.15));
    CHECK(phi(5, 9) == doctest::Approx(0.075));
    CHECK(phi(0, 5) == 0.0);
    CHECK(phi(9, 4) == 0.0);
}

TEST_CASE("degenerate DGP without loadings or AR terms is white noise") {
    SimulationScenario sc = tiny_baseline();
    sc.zero_loadings = true;
    sc.rho1 = 0.0;
    sc.rho2 = 0.0;
    sc.sigma_u2 = 1.0;

    double sum = 0.0, sum_sq = 0.0;
    int n = 0;
    for (int rep = 0; rep < 40; ++rep) {
        auto rng = replication_rng(sc.seed, static_cast<std::uint64_t>(rep));
        const auto panel = simulate_ardl_midas(sc, rng);
        for (int t = 1; t <= panel.periods(); ++t) {
            sum += panel.target.at(t);
            sum_sq += panel.target.at(t) * panel.target.at(t);
            ++n;
        }
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    // var(sample variance) ~ 2/n for Gaussian data
    const double three_se = 3.0 * std::sqrt(2.0 / n);
    CHECK(std::abs(var - 1.0) < three_se);
    CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("baseline DGP has positive lag-1 autocorrelation") {
    SimulationScenario sc = tiny_baseline();
    sc.sample_size = 400;
    double num = 0.0, den = 0.0;
    for (int rep = 0; rep < 5; ++rep) {
        auto rng = replication_rng(11, static_cast<std::uint64_t>(rep));
        const auto panel = simulate_ardl_midas(sc, rng);
        double mean = 0.0;
        for (int t = 1; t <= panel.periods(); ++t) mean += panel.target.at(t);
        mean /= panel.periods();
        for (int t = 2; t <= panel.periods(); ++t) {
            num += (panel.target.at(t) - mean) * (panel.target.at(t - 1) - mean);
        }
        for (int t = 1; t <= panel.periods(); ++t) {
            den += (panel.target.at(t) - mean) * (panel.target.at(t) - mean);
        }
    }
    CHECK(num / den > 0.15);
}

TEST_CASE("simulated target shows no deterministic trend") {
    // The target is serially correlated, so the slope t-statistic needs a
    // HAC (Bartlett) variance; plain OLS standard errors would over-reject.
    SimulationScenario sc = tiny_baseline();
    sc.sample_size = 200;
    int rejections = 0;
    const int reps = 200;
    for (int rep = 0; rep < reps; ++rep) {
        auto rng = replication_rng(31, static_cast<std::uint64_t>(rep));
        const auto panel = simulate_ardl_midas(sc, rng);
        const int T = panel.periods();
        Eigen::MatrixXd X(T, 2);
        Eigen::VectorXd y(T);
        for (int t = 1; t <= T; ++t) {
            X(t - 1, 0) = 1.0;
            X(t - 1, 1) = t;
            y[t - 1] = panel.target.at(t);
        }
        const Eigen::VectorXd coef = oracle::ols_normal_equations(X, y);
        const Eigen::VectorXd resid = y - X * coef;

        const Eigen::MatrixXd xtx_inv = (X.transpose() * X).inverse();
        const int H = static_cast<int>(std::floor(std::cbrt(static_cast<double>(T))));
        Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(2, 2);
        for (int t = 0; t < T; ++t) {
            meat += resid[t] * resid[t] * X.row(t).transpose() * X.row(t);
        }
        for (int l = 1; l <= H; ++l) {
            const double w = 1.0 - static_cast<double>(l) / (H + 1.0);
            for (int t = l; t < T; ++t) {
                const Eigen::MatrixXd cross =
                    resid[t] * resid[t - l] * X.row(t).transpose() * X.row(t - l);
                meat += w * (cross + cross.transpose());
            }
        }
        const Eigen::MatrixXd cov = xtx_inv * meat * xtx_inv;
        const double tstat = coef[1] / std::sqrt(cov(1, 1));
        if (std::abs(tstat) > 2.576) ++rejections;
    }
    // 1% nominal with some finite-sample HAC distortion; 16/200 is generous.
    CHECK(rejections <= 16);
}

TEST_CASE("panels are reproducible from the seed and differ across streams") {
    SimulationScenario sc = tiny_baseline();
    auto r1 = replication_rng(sc.seed, 3);
    auto r2 = replication_rng(sc.seed, 3);
    auto r3 = replication_rng(sc.seed, 4);
    const auto p1 = simulate_ardl_midas(sc, r1);
    const auto p2 = simulate_ardl_midas(sc, r2);
    const auto p3 = simulate_ardl_midas(sc, r3);
    CHECK(p1.target.values == p2.target.values);
    CHECK(p1.covariates[0].values == p2.covariates[0].values);
    CHECK(p1.target.values != p3.target.values);
}

TEST_CASE("panel layout supports the scenario design rows") {
    SimulationScenario sc = tiny_baseline();
    auto rng = replication_rng(1, 0);
    const auto panel = simulate_ardl_midas(sc, rng);
    CHECK(panel.periods() == sc.ar_lags_fit + sc.sample_size + 1);
    CHECK(panel.covariates.size() == static_cast<std::size_t>(sc.total_covariates()));
    CHECK(panel.covariates[0].first_subperiod == 1 - sc.dgp_lags());
    CHECK(panel.covariates[0].last_subperiod() == panel.periods() * sc.subperiods);
    CHECK(validate_panel(panel).empty());
}

TEST_CASE("scenario validation rejects bad parameters") {
    SimulationScenario sc = tiny_baseline();
    sc.replications = 0;
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    sc = tiny_baseline();
    sc.dictionary_size = 13;  // > 12 fitted lags
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    sc = tiny_baseline();
    sc.rho1 = 1.2;
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
    sc = tiny_baseline();
    sc.lag_periods_fit = 9;
    CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
}

TEST_CASE("small scenario run: determinism, oracle bound, and method set") {
    SimulationScenario sc = tiny_baseline();
    sc.replications = 30;
    sc.n_lambda = 15;
    sc.alpha_grid = {0.5, 1.0};
    const ScenarioResult a = run_scenario(sc);
    const ScenarioResult b = run_scenario(sc);

    REQUIRE(a.methods.size() == 6);
    CHECK(a.methods[0].method == "flow");
    CHECK(a.methods[5].method == "sgl_m");
    for (std::size_t i = 0; i < a.methods.size(); ++i) {
        CHECK(a.methods[i].forecast_msfe == b.methods[i].forecast_msfe);
        CHECK(a.methods[i].nowcast_msfe == b.methods[i].nowcast_msfe);
    }
    REQUIRE(a.mise.size() == 9);
    for (std::size_t i = 0; i < a.mise.size(); ++i) {
        CHECK(a.mise[i].mise == b.mise[i].mise);
        CHECK(a.mise[i].mise >= 0.0);
    }

    // The infeasible oracle lower-bounds every feasible method.
    for (const auto& m : a.methods) {
        if (!m.feasible) continue;
        CHECK(a.oracle_forecast_msfe <= m.forecast_msfe);
        CHECK(a.oracle_nowcast_msfe <= m.nowcast_msfe);
    }
    // Full-information oracle errors are the DGP innovations.
    CHECK(a.oracle_forecast_msfe > 0.3);
    CHECK(a.oracle_forecast_msfe < 3.0);
}

TEST_CASE("half-lag scenario uses the shorter window") {
    SimulationScenario sc = tiny_baseline();
    sc.lag_periods_fit = 2;
    sc.dictionary_size = 3;
    sc.replications = 3;
    sc.n_lambda = 10;
    sc.alpha_grid = {1.0};
    const ScenarioResult r = run_scenario(sc);
    CHECK(r.methods[5].forecast_msfe > 0.0);
}

TEST_CASE("ols baselines go blank when regressors reach the sample size") {
    SimulationScenario sc = tiny_baseline();
    sc.n_noise = 47;  // 50 covariates + intercept + 5 lags = 56 >= 50 rows
    sc.replications = 2;
    sc.n_lambda = 8;
    sc.alpha_grid = {1.0};
    const ScenarioResult r = run_scenario(sc);
    CHECK_FALSE(r.methods[0].feasible);
    CHECK_FALSE(r.methods[1].feasible);
    CHECK_FALSE(r.methods[2].feasible);
    CHECK(r.methods[5].feasible);
}
