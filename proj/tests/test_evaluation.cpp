#include <doctest.h>

#include <cmath>
#include <random>

#include "sgmidas/evaluation.hpp"
#include "sgmidas/simulation.hpp"
#include "support/oracles.hpp"

using namespace sgmidas;

TEST_CASE("diebold-mariano basics") {
    std::vector<double> e1 = {0.5, -1.0, 0.3, 0.8, -0.2, 1.1};
    CHECK(diebold_mariano(e1, e1).statistic == 0.0);
    CHECK(diebold_mariano(e1, e1).degenerate);

    std::vector<double> e2 = e1;
    for (auto& v : e2) v *= 2.0;  // model "2x errors" is uniformly worse
    const DmResult worse = diebold_mariano(e2, e1);
    CHECK(worse.statistic > 0.0);

    // Exact antisymmetry.
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> a(50), b(50);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = gauss(rng);
        b[i] = gauss(rng);
    }
    CHECK(diebold_mariano(a, b).statistic == -diebold_mariano(b, a).statistic);

    CHECK_THROWS_AS(diebold_mariano({1.0, 2.0}, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(diebold_mariano({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}), std::invalid_argument);
}

TEST_CASE("diebold-mariano is approximately standard normal under the null") {
    const int n = 200, draws = 1000;
    double mean_stat = 0.0;
    int big = 0;
    for (int d = 0; d < draws; ++d) {
        std::mt19937_64 rng(9000 + d);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> e1(n), e2(n);
        for (int i = 0; i < n; ++i) {
            e1[i] = gauss(rng);
            e2[i] = gauss(rng);
        }
        const double s = diebold_mariano(e1, e2).statistic;
        mean_stat += s;
        if (std::abs(s) > 1.96) ++big;
    }
    mean_stat /= draws;
    CHECK(std::abs(mean_stat) < 0.1);
    CHECK(big >= 30);
    CHECK(big <= 70);
}

TEST_CASE("cumsfe paths") {
    const std::vector<double> e1 = {1.0, 2.0};
    const std::vector<double> e2 = {1.0, 1.0};
    const auto path = cumsfe(e1, e2);
    REQUIRE(path.size() == 2);
    CHECK(path[0] == doctest::Approx(0.0));
    CHECK(path[1] == doctest::Approx(3.0));

    const auto zero = cumsfe(e2, e2);
    for (double v : zero) CHECK(v == 0.0);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> a(20), b(20);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = gauss(rng);
        b[i] = gauss(rng);
    }
    const auto ab = cumsfe(a, b);
    const auto ba = cumsfe(b, a);
    for (std::size_t i = 0; i < ab.size(); ++i) CHECK(ab[i] == doctest::Approx(-ba[i]).epsilon(1e-12));
    // Last element = n*(MSE1 - MSE2).
    double mse1 = 0.0, mse2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mse1 += a[i] * a[i];
        mse2 += b[i] * b[i];
    }
    CHECK(ab.back() == doctest::Approx(mse1 - mse2).epsilon(1e-10));
}

TEST_CASE("relative rmse is scale covariant") {
    std::vector<double> a = {1.0, -2.0, 0.5};
    std::vector<double> b = {0.5, 1.5, -1.0};
    const double base = relative_rmse(a, b);
    for (auto& v : a) v *= 3.0;
    for (auto& v : b) v *= 3.0;
    CHECK(relative_rmse(a, b) == doctest::Approx(base).epsilon(1e-14));

    const std::vector<double> half = {0.5, -1.0, 0.25};
    const std::vector<double> full = {1.0, -2.0, 0.5};
    CHECK(relative_rmse(half, full) == doctest::Approx(0.5).epsilon(1e-14));
}

namespace {

DesignProblem toy_design(std::mt19937_64& rng, int T, int n_cov) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    DesignProblem problem;
    const int p = 2 + n_cov;
    problem.X.resize(T, p);
    problem.y.resize(T);
    problem.X.col(0).setOnes();
    for (int i = 0; i < T; ++i) {
        problem.X(i, 1) = gauss(rng);
        for (int k = 0; k < n_cov; ++k) problem.X(i, 2 + k) = gauss(rng);
        problem.y[i] = 0.5 * problem.X(i, 1) + 0.3 * problem.X(i, 2) + 0.2 * gauss(rng);
    }
    std::vector<GroupStructure::Group> groups{{"ar", 0, 2}};
    for (int k = 0; k < n_cov; ++k) groups.push_back({"x" + std::to_string(k + 1), 2 + k, 3 + k});
    problem.groups = GroupStructure(groups, p);
    problem.intercept_column = 0;
    for (int k = 0; k < n_cov; ++k) {
        problem.block_begin.push_back(2 + k);
        problem.block_size.push_back(1);
        problem.block_name.push_back("x" + std::to_string(k + 1));
    }
    return problem;
}

}  // namespace

TEST_CASE("selection fractions") {
    std::mt19937_64 rng(11);
    DesignProblem problem = toy_design(rng, 30, 10);
    std::map<std::string, std::string> categories;
    for (int k = 0; k < 10; ++k) categories["x" + std::to_string(k + 1)] = k < 4 ? "macro" : "text";

    SgLassoFit none;
    none.beta = Eigen::VectorXd::Zero(problem.cols());
    SgLassoFit some;
    some.beta = Eigen::VectorXd::Zero(problem.cols());
    some.beta[2] = 1.0;   // x1 (macro)
    some.beta[4] = -0.5;  // x3 (macro)
    some.beta[9] = 0.2;   // x8 (text)
    SgLassoFit all;
    all.beta = Eigen::VectorXd::Ones(problem.cols());

    const auto fr = selection_fractions({none, some, all}, problem, categories);
    REQUIRE(fr.size() == 3);
    CHECK(fr[0].at("macro") == 0.0);
    CHECK(fr[0].at("text") == 0.0);
    CHECK(fr[1].at("macro") == doctest::Approx(0.2));
    CHECK(fr[1].at("text") == doctest::Approx(0.1));
    CHECK(fr[2].at("macro") + fr[2].at("text") == doctest::Approx(1.0));

    categories.erase("x5");
    CHECK_THROWS_AS(selection_fractions({none}, problem, categories), std::invalid_argument);
}

TEST_CASE("AR baseline is consistent on an AR(1) path") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int T = 500;
    std::vector<double> y(static_cast<std::size_t>(T + 1));
    y[0] = gauss(rng);
    for (int t = 1; t <= T; ++t) y[static_cast<std::size_t>(t)] = 0.5 * y[static_cast<std::size_t>(t - 1)] + gauss(rng);

    DesignProblem problem;
    problem.X.resize(T, 2);
    problem.y.resize(T);
    for (int t = 1; t <= T; ++t) {
        problem.X(t - 1, 0) = 1.0;
        problem.X(t - 1, 1) = y[static_cast<std::size_t>(t - 1)];
        problem.y[t - 1] = y[static_cast<std::size_t>(t)];
    }
    problem.groups = GroupStructure({{"ar", 0, 2}}, 2);
    problem.intercept_column = 0;

    const SgLassoFit f = baseline_fit(problem, ForecastModel::Ar, CvPlan{});
    CHECK(std::abs(f.beta[1] - 0.5) < 0.07);
}

TEST_CASE("PCA-OLS recovers a rank-1 factor up to sign") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int T = 80, K = 6;
    Eigen::VectorXd factor(T);
    for (int i = 0; i < T; ++i) factor[i] = gauss(rng);

    DesignProblem problem;
    problem.X.resize(T, 1 + K);
    problem.y.resize(T);
    problem.X.col(0).setOnes();
    for (int k = 0; k < K; ++k) problem.X.col(1 + k) = (0.5 + 0.1 * k) * factor;
    for (int i = 0; i < T; ++i) problem.y[i] = factor[i] + 0.1 * gauss(rng);
    std::vector<GroupStructure::Group> groups{{"ar", 0, 1}};
    for (int k = 0; k < K; ++k) groups.push_back({"x" + std::to_string(k), 1 + k, 2 + k});
    problem.groups = GroupStructure(groups, 1 + K);
    problem.intercept_column = 0;

    const SgLassoFit f = baseline_fit(problem, ForecastModel::PcaOls, CvPlan{});
    const Eigen::VectorXd fitted = f.predict(problem.X);
    // Fitted values track the factor almost perfectly.
    const double corr =
        (fitted.array() - fitted.mean()).matrix().dot((problem.y.array() - problem.y.mean()).matrix()) /
        std::sqrt((fitted.array() - fitted.mean()).square().sum() *
                  (problem.y.array() - problem.y.mean()).square().sum());
    CHECK(std::abs(corr) > 0.995);
}

TEST_CASE("ridge baseline with tiny lambda matches OLS") {
    std::mt19937_64 rng(19);
    DesignProblem problem = toy_design(rng, 60, 3);
    CvPlan plan;
    plan.n_folds = 5;
    plan.lambda_grid = {1e-8};
    plan.solver.tolerance = 1e-12;
    plan.solver.max_sweeps = 100000;
    const SgLassoFit f = baseline_fit(problem, ForecastModel::RidgeU, plan);
    const Eigen::VectorXd ols = oracle::ols_normal_equations(problem.X, problem.y);
    CHECK((f.beta - ols).lpNorm<Eigen::Infinity>() < 1e-5);
}

TEST_CASE("rolling nowcast on a short panel emits the right record count") {
    // 62 usable design rows with window 60 -> 2 records (no covariate data
    // beyond the sample, so no unrealized extra origin).
    std::mt19937_64 rng(23);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int T = 63;  // one AR lag consumes the first period
    MixedFrequencyPanel panel;
    std::vector<double> y(static_cast<std::size_t>(T));
    for (auto& v : y) v = gauss(rng);
    panel.target = LowFrequencySeries(std::move(y));
    std::vector<double> x(static_cast<std::size_t>(T * 3));
    for (auto& v : x) v = gauss(rng);
    panel.covariates.emplace_back("x1", std::move(x), 3, 0, 0, 1, 1);

    DesignSpec spec;
    spec.ar_lags = 1;
    spec.covariates.push_back({"x1", 1, DictionarySpec::legendre(2)});

    CvPlan plan;
    plan.n_folds = 5;
    plan.alpha_grid = {1.0};
    plan.n_lambda = 8;
    plan.lambda_min_ratio = 1e-2;

    const RollingResult rolling = rolling_nowcast(panel, spec, 60, plan);
    CHECK(rolling.records.size() == 2);
    CHECK(rolling.records[0].origin + 1 == rolling.records[1].origin);
    CHECK(!std::isnan(rolling.records[0].error));
}

TEST_CASE("rolling nowcast never reads the target or later periods") {
    std::mt19937_64 rng(29);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int T = 40;
    MixedFrequencyPanel panel;
    std::vector<double> y(static_cast<std::size_t>(T));
    for (auto& v : y) v = gauss(rng);
    panel.target = LowFrequencySeries(y);
    std::vector<double> x(static_cast<std::size_t>(T * 3));
    for (auto& v : x) v = gauss(rng);
    panel.covariates.emplace_back("x1", x, 3, 0, 0, 1, 1);

    DesignSpec spec;
    spec.ar_lags = 1;
    spec.covariates.push_back({"x1", 1, DictionarySpec::legendre(2)});
    CvPlan plan;
    plan.n_folds = 3;
    plan.alpha_grid = {1.0};
    plan.n_lambda = 6;
    plan.lambda_min_ratio = 1e-2;

    const RollingResult base = rolling_nowcast(panel, spec, 30, plan);

    // Corrupt the last target value; only the last origin's realized/error
    // may change, predictions must not.
    MixedFrequencyPanel mutated = panel;
    mutated.target.values.back() += 100.0;
    const RollingResult poked = rolling_nowcast(mutated, spec, 30, plan);
    REQUIRE(base.records.size() == poked.records.size());
    for (std::size_t i = 0; i + 1 < base.records.size(); ++i) {
        CHECK(base.records[i].prediction == poked.records[i].prediction);
        CHECK(base.records[i].error == poked.records[i].error);
    }
    CHECK(base.records.back().prediction == poked.records.back().prediction);
    CHECK(base.records.back().error != poked.records.back().error);
}

TEST_CASE("sg-LASSO stays near the AR benchmark on pure-noise covariates") {
    SimulationScenario sc;
    sc.sample_size = 90;
    sc.zero_loadings = true;
    sc.n_noise = 5;
    sc.replications = 1;
    sc.seed = 77;
    auto rng = replication_rng(sc.seed, 0);
    const MixedFrequencyPanel panel = simulate_ardl_midas(sc, rng);

    DesignSpec spec = DesignSpec::from_panel(panel, 1, 3);
    CvPlan plan;
    plan.n_folds = 5;
    plan.alpha_grid = {0.5, 1.0};
    plan.n_lambda = 25;
    plan.lambda_min_ratio = 1e-3;
    plan.solver.tolerance = 1e-5;

    const RollingResult sgl = rolling_nowcast(panel, spec, 40, plan);
    const RollingResult ar = rolling_nowcast(panel, spec, 40, plan, ForecastModel::Ar);
    REQUIRE(sgl.records.size() == ar.records.size());
    REQUIRE(sgl.records.size() >= 45);

    std::vector<double> es, ea;
    for (std::size_t i = 0; i < sgl.records.size(); ++i) {
        if (std::isnan(sgl.records[i].error)) continue;
        es.push_back(sgl.records[i].error);
        ea.push_back(ar.records[i].error);
    }
    const double rel = relative_rmse(es, ea);
    CHECK(rel > 0.9);
    CHECK(rel < 1.2);
}

TEST_CASE("evaluation report combines the pieces") {
    std::vector<double> model = {0.5, -0.25, 0.4, -0.3, 0.2};
    std::vector<double> bench = {1.0, -0.5, 0.8, -0.6, 0.4};
    const EvaluationReport report = make_report(model, bench, 1);
    CHECK(report.rel_rmse == doctest::Approx(0.5));
    CHECK(report.dm.statistic < 0.0);  // model beats benchmark
    CHECK(report.cumsfe_path.size() == 5);
    CHECK(report.cumsfe_path.back() < 0.0);
}
