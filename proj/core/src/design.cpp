#include "sgmidas/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace sgmidas {

namespace {

int ceil_div(int a, int b) {
    // b > 0
    return a >= 0 ? (a + b - 1) / b : -((-a) / b);
}

int floor_div(int a, int b) {
    return a >= 0 ? a / b : -((-a + b - 1) / b);
}

struct ResolvedCovariate {
    const HighFrequencySeries* series = nullptr;
    const CovariateDesign* design = nullptr;
    int n_lags = 0;
    int effective_lead = 0;
    int block_cols = 0;
    Eigen::MatrixXd weights;  // n_lags x L; empty when unrestricted
};

ResolvedCovariate resolve(const MixedFrequencyPanel& panel, const CovariateDesign& cov) {
    const HighFrequencySeries* s = panel.find(cov.name);
    if (s == nullptr) {
        throw std::invalid_argument("design: covariate '" + cov.name + "' not found in panel");
    }
    if (cov.lag_periods < 1) {
        throw std::invalid_argument("design: covariate '" + cov.name + "' needs lag_periods >= 1");
    }
    ResolvedCovariate r;
    r.series = s;
    r.design = &cov;
    r.n_lags = s->m * cov.lag_periods;
    const int declared_lead = cov.lead.value_or(s->lead);
    const int delay = cov.delay.value_or(s->delay);
    r.effective_lead = declared_lead - delay;
    if (r.effective_lead > s->m) {
        throw std::invalid_argument("design: covariate '" + cov.name +
                                    "' effective lead exceeds one period");
    }
    if (cov.unrestricted) {
        r.block_cols = r.n_lags;
    } else {
        if (cov.dictionary.size > r.n_lags) {
            throw std::invalid_argument("design: covariate '" + cov.name + "' dictionary size " +
                                        std::to_string(cov.dictionary.size) + " exceeds " +
                                        std::to_string(r.n_lags) + " aggregated lags");
        }
        r.weights = build_weight_matrix(cov.dictionary, r.n_lags);
        r.block_cols = cov.dictionary.size;
    }
    return r;
}

int newest_subperiod(const ResolvedCovariate& r, int target_period) {
    return (target_period - 1) * r.series->m + r.effective_lead;
}

// Earliest target period whose lag window is covered; impute_zero lifts the
// front constraint (missing pre-sample values read as 0).
int first_feasible(const ResolvedCovariate& r, bool impute_zero) {
    if (impute_zero) return std::numeric_limits<int>::min() / 2;
    const int fs = r.series->first_subperiod;
    return 1 + ceil_div(fs + r.n_lags - r.effective_lead - 1, r.series->m);
}

int last_feasible(const ResolvedCovariate& r) {
    return 1 + floor_div(r.series->last_subperiod() - r.effective_lead, r.series->m);
}

double lag_value(const ResolvedCovariate& r, int subperiod, bool impute_zero) {
    if (subperiod < r.series->first_subperiod) {
        if (impute_zero) return 0.0;
        throw std::invalid_argument("design: covariate '" + r.series->name +
                                    "' lacks history at sub-period " + std::to_string(subperiod));
    }
    if (subperiod > r.series->last_subperiod()) {
        throw std::invalid_argument("design: covariate '" + r.series->name +
                                    "' has no value at sub-period " + std::to_string(subperiod));
    }
    return r.series->at_subperiod(subperiod);
}

// Lag vector (newest first) for one target period.
Eigen::VectorXd lag_vector(const ResolvedCovariate& r, int target_period, bool impute_zero) {
    Eigen::VectorXd z(r.n_lags);
    const int newest = newest_subperiod(r, target_period);
    for (int j = 0; j < r.n_lags; ++j) {
        z[j] = lag_value(r, newest - j, impute_zero);
    }
    return z;
}

struct ResolvedDesign {
    std::vector<ResolvedCovariate> covariates;  // block order
    std::vector<int> spec_order;                // block order -> index into spec.covariates
    int p = 0;
    int intercept_column = -1;
    int ar_cols = 0;
};

// Resolve covariates and fix the column-block order: spec order for
// per-covariate grouping, category-contiguous (first appearance) for
// per-category grouping.
ResolvedDesign resolve_design(const MixedFrequencyPanel& panel, const DesignSpec& spec) {
    if (spec.ar_lags < 0) throw std::invalid_argument("design: ar_lags must be >= 0");
    ResolvedDesign rd;
    std::vector<ResolvedCovariate> in_spec_order;
    in_spec_order.reserve(spec.covariates.size());
    for (const auto& cov : spec.covariates) {
        in_spec_order.push_back(resolve(panel, cov));
    }

    std::vector<int> order(in_spec_order.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    if (spec.group_mode == GroupMode::PerCategory) {
        std::vector<std::string> cat_order;
        std::map<std::string, int> cat_rank;
        for (const auto& r : in_spec_order) {
            const std::string key = r.series->category.empty() ? r.series->name : r.series->category;
            if (cat_rank.find(key) == cat_rank.end()) {
                cat_rank[key] = static_cast<int>(cat_order.size());
                cat_order.push_back(key);
            }
        }
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            const auto& ra = *in_spec_order[static_cast<std::size_t>(a)].series;
            const auto& rb = *in_spec_order[static_cast<std::size_t>(b)].series;
            const std::string ka = ra.category.empty() ? ra.name : ra.category;
            const std::string kb = rb.category.empty() ? rb.name : rb.category;
            return cat_rank[ka] < cat_rank[kb];
        });
    }
    for (int idx : order) {
        rd.covariates.push_back(in_spec_order[static_cast<std::size_t>(idx)]);
        rd.spec_order.push_back(idx);
    }

    rd.intercept_column = spec.include_intercept ? 0 : -1;
    rd.ar_cols = (spec.include_intercept ? 1 : 0) + spec.ar_lags;
    rd.p = rd.ar_cols;
    for (const auto& r : rd.covariates) rd.p += r.block_cols;
    if (rd.p == 0) throw std::invalid_argument("design: empty design (no intercept, lags, or covariates)");
    return rd;
}

std::pair<int, int> target_range(const MixedFrequencyPanel& panel, const DesignSpec& spec,
                                 const ResolvedDesign& rd) {
    int lo = std::max(1, spec.ar_lags + 1);
    int hi = panel.periods();
    for (const auto& r : rd.covariates) {
        lo = std::max(lo, first_feasible(r, panel.impute_zero));
        hi = std::min(hi, last_feasible(r));
    }
    if (spec.first_target) {
        if (*spec.first_target < lo) {
            throw std::invalid_argument("design: insufficient history for target period " +
                                        std::to_string(*spec.first_target) +
                                        " (earliest feasible is " + std::to_string(lo) + ")");
        }
        lo = *spec.first_target;
    }
    if (spec.last_target) {
        if (*spec.last_target > hi) {
            throw std::invalid_argument("design: data ends before target period " +
                                        std::to_string(*spec.last_target) +
                                        " (latest feasible is " + std::to_string(hi) + ")");
        }
        hi = *spec.last_target;
    }
    if (lo > hi) throw std::invalid_argument("design: no feasible target periods");
    return {lo, hi};
}

void fill_row(Eigen::RowVectorXd& row, const MixedFrequencyPanel& panel,
              const DesignSpec& spec, const ResolvedDesign& rd, int target_period) {
    int c = 0;
    if (spec.include_intercept) row[c++] = 1.0;
    for (int j = 1; j <= spec.ar_lags; ++j) row[c++] = panel.target.at(target_period - j);
    for (const auto& r : rd.covariates) {
        const Eigen::VectorXd z = lag_vector(r, target_period, panel.impute_zero);
        if (r.design->unrestricted) {
            row.segment(c, r.n_lags) = z.transpose();
        } else {
            row.segment(c, r.block_cols) = (z.transpose() * r.weights);
        }
        c += r.block_cols;
    }
}

GroupStructure make_groups(const DesignSpec& spec, const ResolvedDesign& rd) {
    std::vector<GroupStructure::Group> groups;
    int c = 0;
    if (rd.ar_cols > 0) {
        groups.push_back({"ar", 0, rd.ar_cols});
        c = rd.ar_cols;
    }
    if (spec.group_mode == GroupMode::PerCovariate) {
        for (const auto& r : rd.covariates) {
            groups.push_back({r.series->name, c, c + r.block_cols});
            c += r.block_cols;
        }
    } else {
        // Category-contiguous block order was fixed in resolve_design.
        std::size_t i = 0;
        while (i < rd.covariates.size()) {
            const auto& s0 = *rd.covariates[i].series;
            const std::string key = s0.category.empty() ? s0.name : s0.category;
            int end = c;
            std::size_t j = i;
            while (j < rd.covariates.size()) {
                const auto& sj = *rd.covariates[j].series;
                const std::string kj = sj.category.empty() ? sj.name : sj.category;
                if (kj != key) break;
                end += rd.covariates[j].block_cols;
                ++j;
            }
            groups.push_back({key, c, end});
            c = end;
            i = j;
        }
    }
    return GroupStructure(std::move(groups), rd.p);
}

std::vector<std::string> make_column_names(const DesignSpec& spec, const ResolvedDesign& rd) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(rd.p));
    if (spec.include_intercept) names.push_back("intercept");
    for (int j = 1; j <= spec.ar_lags; ++j) names.push_back("y_lag" + std::to_string(j));
    for (const auto& r : rd.covariates) {
        for (int l = 0; l < r.block_cols; ++l) {
            names.push_back(r.series->name +
                            (r.design->unrestricted ? ":lag" + std::to_string(l + 1)
                                                    : ":b" + std::to_string(l)));
        }
    }
    return names;
}

Eigen::VectorXd empirical_norms(const Eigen::MatrixXd& X) {
    const double T = static_cast<double>(X.rows());
    return (X.colwise().squaredNorm() / T).cwiseSqrt().transpose();
}

}  // namespace

DesignSpec DesignSpec::from_panel(const MixedFrequencyPanel& panel, int ar_lags,
                                  int dictionary_size, GroupMode mode) {
    DesignSpec spec;
    spec.ar_lags = ar_lags;
    spec.group_mode = mode;
    for (const auto& s : panel.covariates) {
        CovariateDesign cov;
        cov.name = s.name;
        cov.lag_periods = s.lag_periods;
        cov.dictionary = DictionarySpec::legendre(std::min(dictionary_size, s.m * s.lag_periods));
        spec.covariates.push_back(std::move(cov));
    }
    return spec;
}

LagWindow lag_window(const HighFrequencySeries& series, const CovariateDesign& cov,
                     int target_period) {
    LagWindow w;
    const int declared_lead = cov.lead.value_or(series.lead);
    const int delay = cov.delay.value_or(series.delay);
    w.effective_lead = declared_lead - delay;
    w.n_lags = series.m * cov.lag_periods;
    w.newest_subperiod = (target_period - 1) * series.m + w.effective_lead;
    w.oldest_subperiod = w.newest_subperiod - w.n_lags + 1;
    return w;
}

DesignProblem build_design(const MixedFrequencyPanel& panel, const DesignSpec& spec) {
    const ResolvedDesign rd = resolve_design(panel, spec);
    const auto [lo, hi] = target_range(panel, spec, rd);
    if (hi > panel.periods()) {
        throw std::invalid_argument("design: response missing for target period " + std::to_string(hi));
    }
    const int n_rows = hi - lo + 1;

    DesignProblem problem;
    problem.y.resize(n_rows);
    problem.X.resize(n_rows, rd.p);
    problem.origin_period.resize(static_cast<std::size_t>(n_rows));
    Eigen::RowVectorXd row(rd.p);
    for (int i = 0; i < n_rows; ++i) {
        const int t = lo + i;
        problem.y[i] = panel.target.at(t);
        problem.origin_period[static_cast<std::size_t>(i)] = t;
        fill_row(row, panel, spec, rd, t);
        problem.X.row(i) = row;
    }
    if (!problem.X.allFinite() || !problem.y.allFinite()) {
        throw std::invalid_argument("design: non-finite entries in assembled problem");
    }

    problem.groups = make_groups(spec, rd);
    problem.column_names = make_column_names(spec, rd);
    problem.center = Eigen::VectorXd::Zero(rd.p);
    problem.scale = empirical_norms(problem.X);
    problem.intercept_column = rd.intercept_column;
    int c = rd.ar_cols;
    for (const auto& r : rd.covariates) {
        problem.block_begin.push_back(c);
        problem.block_size.push_back(r.block_cols);
        problem.block_name.push_back(r.series->name);
        c += r.block_cols;
    }
    return problem;
}

Eigen::RowVectorXd build_prediction_row(const MixedFrequencyPanel& panel, const DesignSpec& spec,
                                        int target_period) {
    const ResolvedDesign rd = resolve_design(panel, spec);
    if (target_period - spec.ar_lags < 1) {
        throw std::invalid_argument("design: insufficient AR history for target period " +
                                    std::to_string(target_period));
    }
    if (target_period > panel.periods() + 1) {
        throw std::invalid_argument("design: AR lags unavailable beyond one period past the panel");
    }
    Eigen::RowVectorXd row(rd.p);
    fill_row(row, panel, spec, rd, target_period);
    if (!row.allFinite()) throw std::invalid_argument("design: non-finite prediction row");
    return row;
}

std::pair<int, int> feasible_target_range(const MixedFrequencyPanel& panel,
                                          const DesignSpec& spec) {
    const ResolvedDesign rd = resolve_design(panel, spec);
    DesignSpec unbounded = spec;
    unbounded.first_target.reset();
    unbounded.last_target.reset();
    return target_range(panel, unbounded, rd);
}

DesignProblem DesignProblem::subset(const std::vector<int>& row_indices) const {
    DesignProblem out;
    const int n = static_cast<int>(row_indices.size());
    const bool with_origins = !origin_period.empty();
    out.y.resize(n);
    out.X.resize(n, X.cols());
    if (with_origins) out.origin_period.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int r = row_indices[static_cast<std::size_t>(i)];
        out.y[i] = y[r];
        out.X.row(i) = X.row(r);
        if (with_origins) {
            out.origin_period[static_cast<std::size_t>(i)] = origin_period[static_cast<std::size_t>(r)];
        }
    }
    out.groups = groups;
    out.column_names = column_names;
    out.center = Eigen::VectorXd::Zero(X.cols());
    out.scale = empirical_norms(out.X);
    out.intercept_column = intercept_column;
    out.block_begin = block_begin;
    out.block_size = block_size;
    out.block_name = block_name;
    return out;
}

AggregatedCovariates aggregate_simple(const MixedFrequencyPanel& panel, AggregationMethod method,
                                      int lag_periods) {
    if (lag_periods < 1) throw std::invalid_argument("aggregate_simple: lag_periods must be >= 1");
    std::vector<CovariateDesign> owned;
    owned.reserve(panel.covariates.size());
    for (const auto& s : panel.covariates) {
        CovariateDesign cov;
        cov.name = s.name;
        cov.lag_periods = lag_periods;
        cov.dictionary = DictionarySpec::legendre(1);
        owned.push_back(std::move(cov));
    }
    std::vector<ResolvedCovariate> resolved;
    resolved.reserve(owned.size());
    for (const auto& cov : owned) resolved.push_back(resolve(panel, cov));

    int lo = 1;
    int hi = panel.periods();
    for (const auto& r : resolved) {
        lo = std::max(lo, first_feasible(r, panel.impute_zero));
        hi = std::min(hi, last_feasible(r));
    }
    if (lo > hi) throw std::invalid_argument("aggregate_simple: insufficient history");

    AggregatedCovariates agg;
    agg.values.resize(hi - lo + 1, static_cast<Eigen::Index>(resolved.size()));
    for (int t = lo; t <= hi; ++t) {
        agg.periods.push_back(t);
        for (std::size_t k = 0; k < resolved.size(); ++k) {
            const Eigen::VectorXd z = lag_vector(resolved[k], t, panel.impute_zero);
            double v = 0.0;
            switch (method) {
                case AggregationMethod::Flow:
                    v = z.mean();
                    break;
                case AggregationMethod::Stock:
                    v = z[0];
                    break;
                case AggregationMethod::Middle:
                    // lag (n+1)/2, 1-based; ties toward the newer lag
                    v = z[(z.size() + 1) / 2 - 1];
                    break;
            }
            agg.values(t - lo, static_cast<Eigen::Index>(k)) = v;
        }
    }
    return agg;
}

DesignProblem build_aggregate_design(const MixedFrequencyPanel& panel, AggregationMethod method,
                                     const DesignSpec& spec) {
    // Reuse the dictionary machinery with a constant basis for FLOW; STOCK and
    // MIDDLE need the plain window values, so build rows directly.
    std::vector<ResolvedCovariate> resolved;
    std::vector<CovariateDesign> owned;
    owned.reserve(spec.covariates.size());
    for (const auto& cov : spec.covariates) {
        CovariateDesign c1 = cov;
        c1.unrestricted = false;
        c1.dictionary = DictionarySpec::legendre(1);
        owned.push_back(c1);
    }
    for (const auto& cov : owned) resolved.push_back(resolve(panel, cov));

    int lo = std::max(1, spec.ar_lags + 1);
    int hi = panel.periods();
    for (const auto& r : resolved) {
        lo = std::max(lo, first_feasible(r, panel.impute_zero));
        hi = std::min(hi, last_feasible(r));
    }
    if (spec.first_target) lo = std::max(lo, *spec.first_target);
    if (spec.last_target) hi = std::min(hi, *spec.last_target);
    if (lo > hi) throw std::invalid_argument("build_aggregate_design: no feasible target periods");

    const int K = static_cast<int>(resolved.size());
    const int ar_cols = (spec.include_intercept ? 1 : 0) + spec.ar_lags;
    const int p = ar_cols + K;
    const int n_rows = hi - lo + 1;

    DesignProblem problem;
    problem.y.resize(n_rows);
    problem.X.resize(n_rows, p);
    for (int i = 0; i < n_rows; ++i) {
        const int t = lo + i;
        problem.y[i] = panel.target.at(t);
        problem.origin_period.push_back(t);
        int c = 0;
        if (spec.include_intercept) problem.X(i, c++) = 1.0;
        for (int j = 1; j <= spec.ar_lags; ++j) problem.X(i, c++) = panel.target.at(t - j);
        for (int k = 0; k < K; ++k) {
            const Eigen::VectorXd z = lag_vector(resolved[static_cast<std::size_t>(k)], t, panel.impute_zero);
            double v = 0.0;
            switch (method) {
                case AggregationMethod::Flow: v = z.mean(); break;
                case AggregationMethod::Stock: v = z[0]; break;
                case AggregationMethod::Middle: v = z[(z.size() + 1) / 2 - 1]; break;
            }
            problem.X(i, c++) = v;
        }
    }

    std::vector<GroupStructure::Group> groups;
    int c = 0;
    if (ar_cols > 0) {
        groups.push_back({"ar", 0, ar_cols});
        c = ar_cols;
    }
    problem.column_names.reserve(static_cast<std::size_t>(p));
    if (spec.include_intercept) problem.column_names.push_back("intercept");
    for (int j = 1; j <= spec.ar_lags; ++j) problem.column_names.push_back("y_lag" + std::to_string(j));
    for (int k = 0; k < K; ++k) {
        const std::string& nm = resolved[static_cast<std::size_t>(k)].series->name;
        groups.push_back({nm, c, c + 1});
        problem.column_names.push_back(nm + ":agg");
        problem.block_begin.push_back(c);
        problem.block_size.push_back(1);
        problem.block_name.push_back(nm);
        ++c;
    }
    problem.groups = GroupStructure(std::move(groups), p);
    problem.center = Eigen::VectorXd::Zero(p);
    problem.scale = empirical_norms(problem.X);
    problem.intercept_column = spec.include_intercept ? 0 : -1;
    return problem;
}

}  // namespace sgmidas
