#include "sgmidas/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sgmidas {

std::vector<std::vector<int>> make_folds(int n_rows, int n_folds) {
    if (n_folds < 2) throw std::invalid_argument("make_folds: need at least 2 folds");
    if (n_rows < 2 * n_folds) {
        throw std::invalid_argument("make_folds: too few rows (" + std::to_string(n_rows) +
                                    ") for " + std::to_string(n_folds) + " folds");
    }
    const int base = n_rows / n_folds;
    const int rem = n_rows % n_folds;
    std::vector<std::vector<int>> folds(static_cast<std::size_t>(n_folds));
    int cursor = 0;
    for (int k = 0; k < n_folds; ++k) {
        const int size = base + (k < rem ? 1 : 0);
        for (int i = 0; i < size; ++i) folds[static_cast<std::size_t>(k)].push_back(cursor++);
    }
    return folds;
}

namespace {

std::vector<int> training_rows(int n_rows, const std::vector<int>& fold, int embargo) {
    const int lo = fold.front();
    const int hi = fold.back();
    std::vector<int> rows;
    rows.reserve(static_cast<std::size_t>(n_rows - static_cast<int>(fold.size())));
    for (int i = 0; i < n_rows; ++i) {
        if (i >= lo - embargo && i <= hi + embargo) continue;
        rows.push_back(i);
    }
    return rows;
}

struct Cell {
    double error;
    double lambda;
    double alpha;
};

// Smaller error wins; ties prefer larger lambda, then larger alpha.
bool better(const Cell& a, const Cell& b) {
    if (a.error != b.error) return a.error < b.error;
    if (a.lambda != b.lambda) return a.lambda > b.lambda;
    return a.alpha > b.alpha;
}

}  // namespace

CvResult cross_validate(const DesignProblem& problem, const CvPlan& plan) {
    const int n = problem.rows();
    const auto folds = make_folds(n, plan.n_folds);
    const int K = plan.n_folds;
    if (plan.alpha_grid.empty()) throw std::invalid_argument("cross_validate: empty alpha grid");

    CvResult result;
    result.alpha_grid = plan.alpha_grid;
    result.lambda_grids.resize(plan.alpha_grid.size());
    result.cv_error.resize(plan.alpha_grid.size());
    result.cv_se.resize(plan.alpha_grid.size());
    result.fold_mse.resize(plan.alpha_grid.size());

    std::vector<DesignProblem> trains;
    std::vector<std::vector<int>> tests;
    trains.reserve(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        const auto rows = training_rows(n, folds[static_cast<std::size_t>(k)], plan.embargo);
        if (rows.empty()) throw std::invalid_argument("cross_validate: embargo leaves no training rows");
        trains.push_back(problem.subset(rows));
        tests.push_back(folds[static_cast<std::size_t>(k)]);
    }

    for (std::size_t a = 0; a < plan.alpha_grid.size(); ++a) {
        PenaltySpec penalty;
        penalty.alpha = plan.alpha_grid[a];
        penalty.kind = plan.kind;
        penalty.unpenalized_intercept = plan.unpenalized_intercept;
        penalty.group_weights = plan.group_weights;

        std::vector<double> grid = plan.lambda_grid;
        if (grid.empty()) {
            const double top = lambda_max(problem, penalty, plan.solver.standardize);
            if (top <= 0.0) {
                grid = {0.0};  // degenerate: no signal anywhere, single unpenalized fit
            } else {
                grid = lambda_grid(top, plan.n_lambda, plan.lambda_min_ratio);
            }
        }
        const std::size_t L = grid.size();
        result.lambda_grids[a] = grid;
        result.fold_mse[a].assign(L, std::vector<double>(static_cast<std::size_t>(K), 0.0));

        for (int k = 0; k < K; ++k) {
            std::vector<SgLassoFit> fits;
            if (grid.size() == 1 && grid[0] == 0.0) {
                penalty.lambda = 0.0;
                fits.push_back(fit(trains[static_cast<std::size_t>(k)], penalty, plan.solver));
            } else {
                fits = fit_path(trains[static_cast<std::size_t>(k)], penalty, grid, plan.solver);
            }
            for (std::size_t l = 0; l < L; ++l) {
                double sse = 0.0;
                for (int row : tests[static_cast<std::size_t>(k)]) {
                    const double pred = fits[l].predict_row(problem.X.row(row));
                    const double e = problem.y[row] - pred;
                    sse += e * e;
                }
                result.fold_mse[a][l][static_cast<std::size_t>(k)] =
                    sse / static_cast<double>(tests[static_cast<std::size_t>(k)].size());
            }
        }

        result.cv_error[a].resize(L);
        result.cv_se[a].resize(L);
        for (std::size_t l = 0; l < L; ++l) {
            const auto& per_fold = result.fold_mse[a][l];
            double mean = 0.0;
            for (double v : per_fold) mean += v;
            mean /= static_cast<double>(K);
            double var = 0.0;
            for (double v : per_fold) var += (v - mean) * (v - mean);
            var /= static_cast<double>(K - 1);
            result.cv_error[a][l] = mean;
            result.cv_se[a][l] = std::sqrt(var / static_cast<double>(K));
        }
    }

    bool have_best = false;
    Cell best{0.0, 0.0, 0.0};
    for (std::size_t a = 0; a < plan.alpha_grid.size(); ++a) {
        for (std::size_t l = 0; l < result.lambda_grids[a].size(); ++l) {
            const Cell cell{result.cv_error[a][l], result.lambda_grids[a][l], plan.alpha_grid[a]};
            if (!have_best || better(cell, best)) {
                best = cell;
                have_best = true;
            }
        }
    }
    result.best_alpha = best.alpha;
    result.best_lambda = best.lambda;
    result.best_error = best.error;

    // One-SE rule: sparsest settings whose error is within one SE of the best.
    double best_se = 0.0;
    for (std::size_t a = 0; a < plan.alpha_grid.size(); ++a) {
        for (std::size_t l = 0; l < result.lambda_grids[a].size(); ++l) {
            if (result.cv_error[a][l] == best.error &&
                result.lambda_grids[a][l] == best.lambda &&
                plan.alpha_grid[a] == best.alpha) {
                best_se = result.cv_se[a][l];
            }
        }
    }
    const double threshold = best.error + best_se;
    bool have_1se = false;
    Cell one_se{0.0, 0.0, 0.0};
    for (std::size_t a = 0; a < plan.alpha_grid.size(); ++a) {
        for (std::size_t l = 0; l < result.lambda_grids[a].size(); ++l) {
            if (result.cv_error[a][l] > threshold) continue;
            const Cell cell{result.cv_error[a][l], result.lambda_grids[a][l], plan.alpha_grid[a]};
            if (!have_1se || cell.lambda > one_se.lambda ||
                (cell.lambda == one_se.lambda && cell.alpha > one_se.alpha)) {
                one_se = cell;
                have_1se = true;
            }
        }
    }
    result.one_se_alpha = one_se.alpha;
    result.one_se_lambda = one_se.lambda;
    return result;
}

SgLassoFit fit_with_cv(const DesignProblem& problem, const CvPlan& plan, CvResult* result_out) {
    const CvResult cv = cross_validate(problem, plan);
    PenaltySpec penalty;
    penalty.alpha = cv.best_alpha;
    penalty.lambda = cv.best_lambda;
    penalty.kind = plan.kind;
    penalty.unpenalized_intercept = plan.unpenalized_intercept;
    penalty.group_weights = plan.group_weights;
    SgLassoFit best = fit(problem, penalty, plan.solver);
    if (result_out != nullptr) *result_out = cv;
    return best;
}

}  // namespace sgmidas
