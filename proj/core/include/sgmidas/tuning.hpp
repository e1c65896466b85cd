#pragma once

#include <vector>

#include "sgmidas/sglasso.hpp"

namespace sgmidas {

/// Blocked K-fold cross-validation plan over (alpha, lambda).
struct CvPlan {
    int n_folds = 5;
    std::vector<double> alpha_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
    // Explicit lambda grid (strictly decreasing); empty means a per-alpha
    // log-spaced grid of n_lambda points from lambda_max down.
    std::vector<double> lambda_grid;
    int n_lambda = 100;
    double lambda_min_ratio = 1e-4;
    int embargo = 0;  // training rows dropped on each side of the held-out block
    PenaltyKind kind = PenaltyKind::SparseGroup;
    bool unpenalized_intercept = false;
    std::vector<double> group_weights;
    SolverOptions solver;
};

/// K contiguous blocks over rows 0..n-1, earliest rows in fold 0; block
/// sizes differ by at most one, remainder rows going to the earliest folds.
/// Throws std::invalid_argument unless n >= 2*K and K >= 2.
std::vector<std::vector<int>> make_folds(int n_rows, int n_folds);

struct CvResult {
    std::vector<double> alpha_grid;
    std::vector<std::vector<double>> lambda_grids;           // per alpha
    std::vector<std::vector<double>> cv_error;               // [alpha][lambda], mean held-out MSE
    std::vector<std::vector<double>> cv_se;                  // [alpha][lambda]
    std::vector<std::vector<std::vector<double>>> fold_mse;  // [alpha][lambda][fold]

    double best_alpha = 1.0;
    double best_lambda = 0.0;
    double best_error = 0.0;
    // One-standard-error alternative: sparsest (alpha, lambda) whose error is
    // within one SE of the minimum.
    double one_se_alpha = 1.0;
    double one_se_lambda = 0.0;
};

/// For each (alpha, lambda): fit on the complement of each fold (the two
/// disjoint segments stacked), score MSE on the fold, average. Ties broken
/// toward larger lambda, then larger alpha. Deterministic.
CvResult cross_validate(const DesignProblem& problem, const CvPlan& plan);

/// Cross-validate, then refit on all rows at the selected (alpha, lambda).
SgLassoFit fit_with_cv(const DesignProblem& problem, const CvPlan& plan,
                       CvResult* result_out = nullptr);

}  // namespace sgmidas
