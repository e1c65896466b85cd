#pragma once

#include <Eigen/Core>
#include <vector>

#include "sgmidas/design.hpp"

namespace sgmidas {

enum class PenaltyKind {
    SparseGroup,  // alpha*l1 + (1-alpha)*sum of group l2 norms
    ElasticNet,   // alpha*l1 + (1-alpha)/2 * l2^2, per-coordinate (baselines)
};

/// Penalty 2*lambda*Omega(b) added to the empirical squared-error norm.
struct PenaltySpec {
    double lambda = 0.0;
    double alpha = 1.0;  // 1 = LASSO, 0 = group LASSO
    PenaltyKind kind = PenaltyKind::SparseGroup;
    // Multipliers on each group's l2 term (sparse-group kind only).
    // Empty = all ones; sqrt_group_size_weights() fills sqrt(|G|).
    std::vector<double> group_weights;
    bool unpenalized_intercept = false;

    void validate() const;
    double group_weight(int g) const {
        return group_weights.empty() ? 1.0 : group_weights[static_cast<std::size_t>(g)];
    }
};

std::vector<double> sqrt_group_size_weights(const GroupStructure& groups);

struct SolverOptions {
    double tolerance = 1e-7;            // max coefficient change per full sweep
    double objective_tolerance = 0.0;   // relative objective decrease; 0 disables
    int max_sweeps = 10000;
    bool track_objective = false;       // record the objective after every sweep
    bool standardize = true;            // scale columns to unit empirical norm internally
};

struct SgLassoFit {
    Eigen::VectorXd beta;       // original scale, length p
    double objective = 0.0;     // ||y - Xb||_T^2 + 2*lambda*Omega(b), standardized coords
    int iterations = 0;         // full/active sweeps performed
    bool converged = false;
    double kkt_residual = 0.0;
    double lambda = 0.0;
    double alpha = 1.0;
    std::vector<int> active_set;       // indices with beta != 0
    std::vector<int> active_groups;
    std::vector<double> objective_trace;  // filled when track_objective

    /// Linear prediction including any unpenalized intercept shift.
    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
    double predict_row(const Eigen::RowVectorXd& x) const;
};

/// sign(z) * max(|z| - t, 0).
double soft_threshold(double z, double t);

/// Proximal operator of t * (alpha*|.|_1 + (1-alpha)*w*|.|_2) on one group.
Eigen::VectorXd prox_sparse_group(const Eigen::VectorXd& z, double t, double alpha,
                                  double group_weight = 1.0);

/// Penalty value Omega(beta) under the given spec and grouping.
double penalty_value(const Eigen::VectorXd& beta, const GroupStructure& groups,
                     const PenaltySpec& penalty);

/// Block coordinate descent on the standardized problem; coefficients are
/// returned on the original column scale. Deterministic given inputs.
SgLassoFit fit(const DesignProblem& problem, const PenaltySpec& penalty,
               const SolverOptions& opts = {}, const Eigen::VectorXd* warm_start = nullptr);

/// Maximal violation of the subdifferential optimality conditions at beta
/// (original scale), measured on the standardized problem.
double kkt_residual(const DesignProblem& problem, const Eigen::VectorXd& beta,
                    const PenaltySpec& penalty, bool standardize = true);

/// Smallest lambda for which the all-zero penalized solution is optimal.
double lambda_max(const DesignProblem& problem, const PenaltySpec& penalty,
                  bool standardize = true);

/// Log-spaced decreasing grid from lambda_max down to ratio*lambda_max.
std::vector<double> lambda_grid(double lambda_top, int n, double min_ratio);

/// Warm-started fits along a strictly decreasing lambda grid.
std::vector<SgLassoFit> fit_path(const DesignProblem& problem, const PenaltySpec& penalty,
                                 const std::vector<double>& lambdas,
                                 const SolverOptions& opts = {});

}  // namespace sgmidas
