#include "sgmidas/sglasso.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sgmidas {

namespace {

constexpr double kZeroNorm = 1e-300;

// Problem mapped to the coordinates the solver works in: columns scaled to
// unit empirical norm, optionally centered with the intercept column frozen.
struct StandardizedProblem {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    Eigen::VectorXd scale;        // original-column scale s_j (1 for frozen)
    Eigen::VectorXd col_center;   // nonzero only in centered mode
    double y_center = 0.0;
    std::vector<bool> frozen;     // zero-norm columns and the centered intercept
    Eigen::VectorXd group_lipschitz;  // per group, on the standardized columns
    bool centered = false;
    int intercept_column = -1;
    const GroupStructure* groups = nullptr;
    double T = 0.0;
};

StandardizedProblem prepare(const DesignProblem& problem, const PenaltySpec& penalty,
                            bool standardize = true) {
    penalty.validate();
    if (!penalty.group_weights.empty() &&
        static_cast<int>(penalty.group_weights.size()) != problem.groups.num_groups()) {
        throw std::invalid_argument("sglasso: group_weights length must match group count");
    }
    const int T = problem.rows();
    const int p = problem.cols();
    if (T < 1 || p < 1) throw std::invalid_argument("sglasso: empty problem");

    StandardizedProblem sp;
    sp.T = static_cast<double>(T);
    sp.groups = &problem.groups;
    sp.intercept_column = problem.intercept_column;
    sp.X = problem.X;
    sp.y = problem.y;
    sp.scale = Eigen::VectorXd::Ones(p);
    sp.col_center = Eigen::VectorXd::Zero(p);
    sp.frozen.assign(static_cast<std::size_t>(p), false);

    if (penalty.unpenalized_intercept) {
        if (problem.intercept_column < 0) {
            throw std::invalid_argument("sglasso: unpenalized_intercept needs an intercept column");
        }
        sp.centered = true;
        sp.y_center = sp.y.mean();
        sp.y.array() -= sp.y_center;
        for (int j = 0; j < p; ++j) {
            if (j == problem.intercept_column) continue;
            sp.col_center[j] = sp.X.col(j).mean();
            sp.X.col(j).array() -= sp.col_center[j];
        }
        sp.X.col(problem.intercept_column).setZero();
        sp.frozen[static_cast<std::size_t>(problem.intercept_column)] = true;
    }

    for (int j = 0; j < p; ++j) {
        if (sp.frozen[static_cast<std::size_t>(j)]) continue;
        const double norm = std::sqrt(sp.X.col(j).squaredNorm() / sp.T);
        if (norm <= kZeroNorm) {
            sp.frozen[static_cast<std::size_t>(j)] = true;  // zero column: coefficient stays 0
            sp.X.col(j).setZero();
        } else if (standardize) {
            sp.scale[j] = norm;
            sp.X.col(j) /= norm;
        }
    }

    const int G = problem.groups.num_groups();
    sp.group_lipschitz.resize(G);
    for (int g = 0; g < G; ++g) {
        const auto& grp = problem.groups.group(g);
        if (grp.size() == 1) {
            sp.group_lipschitz[g] = sp.frozen[static_cast<std::size_t>(grp.begin)] ? 0.0 : 1.0;
            continue;
        }
        const Eigen::MatrixXd block = sp.X.middleCols(grp.begin, grp.size());
        const Eigen::MatrixXd gram = block.transpose() * block / sp.T;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
        sp.group_lipschitz[g] = es.eigenvalues().maxCoeff();
    }
    return sp;
}

double objective_value(const StandardizedProblem& sp, const PenaltySpec& penalty, double lambda,
                       const Eigen::VectorXd& b, const Eigen::VectorXd& resid) {
    double pen = 0.0;
    if (penalty.kind == PenaltyKind::SparseGroup) {
        for (int g = 0; g < sp.groups->num_groups(); ++g) {
            const auto& grp = sp.groups->group(g);
            const auto seg = b.segment(grp.begin, grp.size());
            pen += penalty.alpha * seg.lpNorm<1>() +
                   (1.0 - penalty.alpha) * penalty.group_weight(g) * seg.norm();
        }
    } else {
        pen = penalty.alpha * b.lpNorm<1>() + 0.5 * (1.0 - penalty.alpha) * b.squaredNorm();
    }
    return resid.squaredNorm() / sp.T + 2.0 * lambda * pen;
}

struct InternalFit {
    Eigen::VectorXd b;  // standardized coordinates
    Eigen::VectorXd resid;
    int sweeps = 0;
    bool converged = false;
    std::vector<double> trace;
};

// One pass over the listed groups; returns the max absolute coefficient change.
double sweep_groups(const StandardizedProblem& sp, const PenaltySpec& penalty, double lambda,
                    const std::vector<int>& group_list, Eigen::VectorXd& b,
                    Eigen::VectorXd& resid) {
    double max_change = 0.0;
    for (int g : group_list) {
        const auto& grp = sp.groups->group(g);
        const double lips = sp.group_lipschitz[g];
        if (lips <= 0.0) continue;

        if (penalty.kind == PenaltyKind::ElasticNet) {
            // Separable penalty: exact per-coordinate minimization.
            for (int j = grp.begin; j < grp.end; ++j) {
                if (sp.frozen[static_cast<std::size_t>(j)]) continue;
                const double grad = sp.X.col(j).dot(resid) / sp.T;
                const double z = b[j] + grad;
                const double bn =
                    soft_threshold(z, penalty.alpha * lambda) / (1.0 + (1.0 - penalty.alpha) * lambda);
                const double d = bn - b[j];
                if (d != 0.0) {
                    resid -= d * sp.X.col(j);
                    b[j] = bn;
                    max_change = std::max(max_change, std::abs(d));
                }
            }
            continue;
        }

        if (grp.size() == 1) {
            const int j = grp.begin;
            const double z = b[j] + sp.X.col(j).dot(resid) / sp.T;
            const double thr = lambda * (penalty.alpha + (1.0 - penalty.alpha) * penalty.group_weight(g));
            const double bn = soft_threshold(z, thr);
            const double d = bn - b[j];
            if (d != 0.0) {
                resid -= d * sp.X.col(j);
                b[j] = bn;
                max_change = std::max(max_change, std::abs(d));
            }
            continue;
        }

        const auto block = sp.X.middleCols(grp.begin, grp.size());
        Eigen::VectorXd z = b.segment(grp.begin, grp.size()) + block.transpose() * resid / (sp.T * lips);
        Eigen::VectorXd bn = prox_sparse_group(z, lambda / lips, penalty.alpha, penalty.group_weight(g));
        Eigen::VectorXd d = bn - b.segment(grp.begin, grp.size());
        const double dmax = d.lpNorm<Eigen::Infinity>();
        if (dmax > 0.0) {
            resid -= block * d;
            b.segment(grp.begin, grp.size()) = bn;
            max_change = std::max(max_change, dmax);
        }
    }
    return max_change;
}

std::vector<int> all_groups(const StandardizedProblem& sp) {
    std::vector<int> list(static_cast<std::size_t>(sp.groups->num_groups()));
    for (std::size_t g = 0; g < list.size(); ++g) list[g] = static_cast<int>(g);
    return list;
}

std::vector<int> active_groups_of(const StandardizedProblem& sp, const Eigen::VectorXd& b) {
    std::vector<int> list;
    for (int g = 0; g < sp.groups->num_groups(); ++g) {
        const auto& grp = sp.groups->group(g);
        if (b.segment(grp.begin, grp.size()).lpNorm<Eigen::Infinity>() > 0.0) list.push_back(g);
    }
    return list;
}

InternalFit solve(const StandardizedProblem& sp, const PenaltySpec& penalty, double lambda,
                  const SolverOptions& opts, const Eigen::VectorXd* b_init) {
    if (opts.tolerance <= 0.0) throw std::invalid_argument("sglasso: tolerance must be > 0");
    if (opts.max_sweeps < 1) throw std::invalid_argument("sglasso: max_sweeps must be >= 1");

    InternalFit out;
    const int p = static_cast<int>(sp.X.cols());
    out.b = b_init != nullptr ? *b_init : Eigen::VectorXd::Zero(p);
    for (int j = 0; j < p; ++j) {
        if (sp.frozen[static_cast<std::size_t>(j)]) out.b[j] = 0.0;
    }
    out.resid = sp.y - sp.X * out.b;

    const std::vector<int> full = all_groups(sp);
    double prev_obj = objective_value(sp, penalty, lambda, out.b, out.resid);
    if (opts.track_objective) out.trace.push_back(prev_obj);

    int full_sweeps = 0;
    while (out.sweeps < opts.max_sweeps) {
        const double change = sweep_groups(sp, penalty, lambda, full, out.b, out.resid);
        ++out.sweeps;
        ++full_sweeps;
        const double obj = objective_value(sp, penalty, lambda, out.b, out.resid);
        if (opts.track_objective) out.trace.push_back(obj);

        if (change < opts.tolerance) {
            out.converged = true;
            break;
        }
        if (opts.objective_tolerance > 0.0 && prev_obj > 0.0 &&
            (prev_obj - obj) / prev_obj < opts.objective_tolerance) {
            out.converged = true;
            break;
        }
        prev_obj = obj;

        if (full_sweeps >= 2) {
            // Iterate the current active set, then return to a verifying full sweep.
            while (out.sweeps < opts.max_sweeps) {
                const std::vector<int> active = active_groups_of(sp, out.b);
                if (active.empty()) break;
                const double ac = sweep_groups(sp, penalty, lambda, active, out.b, out.resid);
                ++out.sweeps;
                if (opts.track_objective) {
                    out.trace.push_back(objective_value(sp, penalty, lambda, out.b, out.resid));
                }
                if (ac < opts.tolerance) break;
            }
        }
    }
    return out;
}

double kkt_residual_standardized(const StandardizedProblem& sp, const PenaltySpec& penalty,
                                 double lambda, const Eigen::VectorXd& b,
                                 const Eigen::VectorXd& resid) {
    const int p = static_cast<int>(sp.X.cols());
    const Eigen::VectorXd grad = sp.X.transpose() * resid / sp.T;
    double worst = 0.0;

    if (penalty.kind == PenaltyKind::ElasticNet) {
        for (int j = 0; j < p; ++j) {
            if (sp.frozen[static_cast<std::size_t>(j)]) continue;
            const double gj = grad[j] - lambda * (1.0 - penalty.alpha) * b[j];
            if (b[j] != 0.0) {
                worst = std::max(worst, std::abs(gj - lambda * penalty.alpha * (b[j] > 0 ? 1.0 : -1.0)));
            } else {
                worst = std::max(worst, std::max(0.0, std::abs(gj) - lambda * penalty.alpha));
            }
        }
        return worst;
    }

    for (int g = 0; g < sp.groups->num_groups(); ++g) {
        const auto& grp = sp.groups->group(g);
        const auto bg = b.segment(grp.begin, grp.size());
        const auto gg = grad.segment(grp.begin, grp.size());
        const double w = penalty.group_weight(g);
        bool all_frozen = true;
        for (int j = grp.begin; j < grp.end; ++j) {
            if (!sp.frozen[static_cast<std::size_t>(j)]) all_frozen = false;
        }
        if (all_frozen) continue;

        const double bnorm = bg.norm();
        if (bnorm == 0.0) {
            // Zero group: the gradient must lie inside lambda times the
            // subdifferential; measure the excess after the l1 part absorbs
            // its share coordinate-wise.
            double ssq = 0.0;
            for (int i = 0; i < gg.size(); ++i) {
                ssq += std::pow(soft_threshold(gg[i], lambda * penalty.alpha), 2);
            }
            worst = std::max(worst, std::max(0.0, std::sqrt(ssq) - lambda * (1.0 - penalty.alpha) * w));
            continue;
        }
        for (int i = 0; i < gg.size(); ++i) {
            const int j = grp.begin + i;
            if (sp.frozen[static_cast<std::size_t>(j)]) continue;
            const double group_term = lambda * (1.0 - penalty.alpha) * w * bg[i] / bnorm;
            if (bg[i] != 0.0) {
                const double sign = bg[i] > 0 ? 1.0 : -1.0;
                worst = std::max(worst, std::abs(gg[i] - lambda * penalty.alpha * sign - group_term));
            } else {
                worst = std::max(worst, std::max(0.0, std::abs(gg[i]) - lambda * penalty.alpha));
            }
        }
    }
    return worst;
}

SgLassoFit finalize(const StandardizedProblem& sp, const PenaltySpec& penalty, double lambda,
                    const InternalFit& internal) {
    SgLassoFit fit;
    const int p = static_cast<int>(sp.X.cols());
    fit.beta.resize(p);
    for (int j = 0; j < p; ++j) {
        fit.beta[j] = internal.b[j] / sp.scale[j];
    }
    if (sp.centered) {
        double shift = sp.y_center;
        for (int j = 0; j < p; ++j) shift -= sp.col_center[j] * fit.beta[j];
        fit.beta[sp.intercept_column] = shift;
    }
    fit.objective = objective_value(sp, penalty, lambda, internal.b, internal.resid);
    fit.iterations = internal.sweeps;
    fit.converged = internal.converged;
    fit.lambda = lambda;
    fit.alpha = penalty.alpha;
    fit.objective_trace = internal.trace;
    for (int j = 0; j < p; ++j) {
        if (fit.beta[j] != 0.0) fit.active_set.push_back(j);
    }
    for (int g = 0; g < sp.groups->num_groups(); ++g) {
        const auto& grp = sp.groups->group(g);
        if (fit.beta.segment(grp.begin, grp.size()).lpNorm<Eigen::Infinity>() > 0.0) {
            fit.active_groups.push_back(g);
        }
    }
    fit.kkt_residual = kkt_residual_standardized(sp, penalty, lambda, internal.b, internal.resid);
    return fit;
}

double group_lambda_entry(const Eigen::VectorXd& grad, double alpha, double weight) {
    // Smallest t with |soft(grad, alpha*t)|_2 <= (1-alpha)*weight*t.
    const double gnorm = grad.norm();
    if (gnorm == 0.0) return 0.0;
    if (grad.size() == 1) return std::abs(grad[0]) / (alpha + (1.0 - alpha) * weight);
    if (alpha >= 1.0) return grad.lpNorm<Eigen::Infinity>();
    if (alpha <= 0.0) return gnorm / weight;

    auto excess = [&](double t) {
        double ssq = 0.0;
        for (int i = 0; i < grad.size(); ++i) {
            ssq += std::pow(soft_threshold(grad[i], alpha * t), 2);
        }
        return std::sqrt(ssq) - (1.0 - alpha) * weight * t;
    };
    double lo = 0.0;
    double hi = gnorm / ((1.0 - alpha) * weight);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (excess(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // hi is on the annihilating side, so a fit at the returned value is
    // exactly all-zero.
    return hi;
}

}  // namespace

void PenaltySpec::validate() const {
    if (lambda < 0.0) throw std::invalid_argument("PenaltySpec: lambda must be >= 0");
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("PenaltySpec: alpha must be in [0,1]");
    for (double w : group_weights) {
        if (!(w > 0.0)) throw std::invalid_argument("PenaltySpec: group weights must be positive");
    }
}

std::vector<double> sqrt_group_size_weights(const GroupStructure& groups) {
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(groups.num_groups()));
    for (int g = 0; g < groups.num_groups(); ++g) {
        w.push_back(std::sqrt(static_cast<double>(groups.group(g).size())));
    }
    return w;
}

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

Eigen::VectorXd prox_sparse_group(const Eigen::VectorXd& z, double t, double alpha,
                                  double group_weight) {
    if (t < 0.0) throw std::invalid_argument("prox_sparse_group: t must be >= 0");
    Eigen::VectorXd s(z.size());
    for (int i = 0; i < z.size(); ++i) s[i] = soft_threshold(z[i], alpha * t);
    const double norm = s.norm();
    const double group_level = (1.0 - alpha) * t * group_weight;
    if (norm <= group_level) return Eigen::VectorXd::Zero(z.size());
    return s * (1.0 - group_level / norm);
}

double penalty_value(const Eigen::VectorXd& beta, const GroupStructure& groups,
                     const PenaltySpec& penalty) {
    if (penalty.kind == PenaltyKind::ElasticNet) {
        return penalty.alpha * beta.lpNorm<1>() + 0.5 * (1.0 - penalty.alpha) * beta.squaredNorm();
    }
    double pen = 0.0;
    for (int g = 0; g < groups.num_groups(); ++g) {
        const auto& grp = groups.group(g);
        const auto seg = beta.segment(grp.begin, grp.size());
        pen += penalty.alpha * seg.lpNorm<1>() +
               (1.0 - penalty.alpha) * penalty.group_weight(g) * seg.norm();
    }
    return pen;
}

Eigen::VectorXd SgLassoFit::predict(const Eigen::MatrixXd& X) const { return X * beta; }

double SgLassoFit::predict_row(const Eigen::RowVectorXd& x) const { return x.dot(beta); }

SgLassoFit fit(const DesignProblem& problem, const PenaltySpec& penalty, const SolverOptions& opts,
               const Eigen::VectorXd* warm_start) {
    const StandardizedProblem sp = prepare(problem, penalty, opts.standardize);
    Eigen::VectorXd b0;
    const Eigen::VectorXd* init = nullptr;
    if (warm_start != nullptr) {
        if (warm_start->size() != problem.cols()) {
            throw std::invalid_argument("sglasso: warm start length mismatch");
        }
        b0 = warm_start->cwiseProduct(sp.scale);
        init = &b0;
    }
    const InternalFit internal = solve(sp, penalty, penalty.lambda, opts, init);
    return finalize(sp, penalty, penalty.lambda, internal);
}

double kkt_residual(const DesignProblem& problem, const Eigen::VectorXd& beta,
                    const PenaltySpec& penalty, bool standardize) {
    const StandardizedProblem sp = prepare(problem, penalty, standardize);
    const int p = static_cast<int>(sp.X.cols());
    if (beta.size() != p) throw std::invalid_argument("kkt_residual: beta length mismatch");

    Eigen::VectorXd b(p);
    for (int j = 0; j < p; ++j) {
        b[j] = sp.frozen[static_cast<std::size_t>(j)] ? 0.0 : beta[j] * sp.scale[j];
    }
    const Eigen::VectorXd resid = sp.y - sp.X * b;

    double worst = kkt_residual_standardized(sp, penalty, penalty.lambda, b, resid);
    if (sp.centered) {
        // Unpenalized intercept: optimal iff it equals the centering shift.
        double shift = sp.y_center;
        for (int j = 0; j < p; ++j) {
            if (j != sp.intercept_column) shift -= sp.col_center[j] * beta[j];
        }
        worst = std::max(worst, std::abs(beta[sp.intercept_column] - shift));
    }
    return worst;
}

double lambda_max(const DesignProblem& problem, const PenaltySpec& penalty, bool standardize) {
    const StandardizedProblem sp = prepare(problem, penalty, standardize);
    const Eigen::VectorXd grad = sp.X.transpose() * sp.y / sp.T;

    if (penalty.kind == PenaltyKind::ElasticNet) {
        const double top = grad.lpNorm<Eigen::Infinity>();
        // Ridge has no finite lambda_max; cap the grid as if alpha were 1e-3.
        return penalty.alpha > 0.0 ? top / penalty.alpha : top / 1e-3;
    }

    double best = 0.0;
    for (int g = 0; g < problem.groups.num_groups(); ++g) {
        const auto& grp = problem.groups.group(g);
        Eigen::VectorXd gg = grad.segment(grp.begin, grp.size());
        for (int i = 0; i < gg.size(); ++i) {
            if (sp.frozen[static_cast<std::size_t>(grp.begin + i)]) gg[i] = 0.0;
        }
        best = std::max(best, group_lambda_entry(gg, penalty.alpha, penalty.group_weight(g)));
    }
    return best;
}

std::vector<double> lambda_grid(double lambda_top, int n, double min_ratio) {
    if (n < 1) throw std::invalid_argument("lambda_grid: n must be >= 1");
    if (!(lambda_top > 0.0)) throw std::invalid_argument("lambda_grid: lambda_top must be > 0");
    if (!(min_ratio > 0.0 && min_ratio < 1.0)) {
        throw std::invalid_argument("lambda_grid: min_ratio must be in (0,1)");
    }
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n));
    if (n == 1) {
        grid.push_back(lambda_top);
        return grid;
    }
    const double log_top = std::log(lambda_top);
    const double log_bot = std::log(lambda_top * min_ratio);
    for (int i = 0; i < n; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(n - 1);
        grid.push_back(std::exp(log_top + f * (log_bot - log_top)));
    }
    return grid;
}

std::vector<SgLassoFit> fit_path(const DesignProblem& problem, const PenaltySpec& penalty,
                                 const std::vector<double>& lambdas, const SolverOptions& opts) {
    for (std::size_t i = 1; i < lambdas.size(); ++i) {
        if (!(lambdas[i] < lambdas[i - 1])) {
            throw std::invalid_argument("fit_path: lambda grid must be strictly decreasing");
        }
    }
    const StandardizedProblem sp = prepare(problem, penalty, opts.standardize);
    std::vector<SgLassoFit> fits;
    fits.reserve(lambdas.size());
    Eigen::VectorXd b = Eigen::VectorXd::Zero(problem.cols());
    for (double lam : lambdas) {
        const InternalFit internal = solve(sp, penalty, lam, opts, &b);
        b = internal.b;
        fits.push_back(finalize(sp, penalty, lam, internal));
    }
    return fits;
}

}  // namespace sgmidas
