#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "sgmidas/dictionary.hpp"
#include "sgmidas/timeseries.hpp"

namespace sgmidas {

enum class GroupMode {
    PerCovariate,  // one group per covariate's dictionary block
    PerCategory,   // covariates sharing a category form one group
};

/// Per-covariate design choices. Lead/delay default to the panel metadata.
struct CovariateDesign {
    std::string name;
    int lag_periods = 1;  // q_k, low-frequency lag depth
    DictionarySpec dictionary = DictionarySpec::legendre(1);
    bool unrestricted = false;  // skip the dictionary: one coefficient per lag
    std::optional<int> lead;    // declared lead override, in sub-periods
    std::optional<int> delay;   // publication delay override, in sub-periods
};

struct DesignSpec {
    int ar_lags = 0;  // J
    bool include_intercept = true;
    GroupMode group_mode = GroupMode::PerCovariate;
    std::vector<CovariateDesign> covariates;
    // Target period range; defaults to every feasible period.
    std::optional<int> first_target;
    std::optional<int> last_target;

    /// Spec with every panel covariate at its declared lag depth and a
    /// shared Legendre dictionary of the given size.
    static DesignSpec from_panel(const MixedFrequencyPanel& panel, int ar_lags,
                                 int dictionary_size,
                                 GroupMode mode = GroupMode::PerCovariate);
};

/// Assembled regression problem. Column order: intercept, y lags 1..J,
/// then one dictionary block per covariate.
struct DesignProblem {
    Eigen::VectorXd y;
    Eigen::MatrixXd X;
    GroupStructure groups;
    std::vector<std::string> column_names;
    Eigen::VectorXd center;            // per-column centering record (zero at build)
    Eigen::VectorXd scale;             // per-column empirical norm at build
    std::vector<int> origin_period;    // row index -> target period t
    int intercept_column = -1;         // -1 when absent

    // Covariate bookkeeping in column-block order.
    std::vector<int> block_begin;         // first column of each covariate block
    std::vector<int> block_size;          // columns in each block
    std::vector<std::string> block_name;  // covariate name per block

    int rows() const { return static_cast<int>(X.rows()); }
    int cols() const { return static_cast<int>(X.cols()); }

    /// Row subset with the same columns and groups; scale is recomputed.
    DesignProblem subset(const std::vector<int>& row_indices) const;
};

/// Resolved alignment of one covariate: where its lag window sits on the
/// global sub-period clock for a given target period.
struct LagWindow {
    int effective_lead = 0;  // declared lead minus delay
    int n_lags = 0;          // m * q
    int newest_subperiod = 0;
    int oldest_subperiod = 0;
};

LagWindow lag_window(const HighFrequencySeries& series, const CovariateDesign& cov,
                     int target_period);

/// Build the training design. Throws std::invalid_argument on insufficient
/// history or dimension mismatches.
DesignProblem build_design(const MixedFrequencyPanel& panel, const DesignSpec& spec);

/// Regressor row for one target period (the response need not exist yet;
/// AR lags must). Used for out-of-sample prediction.
Eigen::RowVectorXd build_prediction_row(const MixedFrequencyPanel& panel, const DesignSpec& spec,
                                        int target_period);

/// Earliest/latest target periods for which a full design row exists.
std::pair<int, int> feasible_target_range(const MixedFrequencyPanel& panel, const DesignSpec& spec);

enum class AggregationMethod { Flow, Stock, Middle };

/// Per-period aggregated covariates over the m*q-lag window: FLOW = window
/// mean, STOCK = most recent lag, MIDDLE = lag (n+1)/2 with ties toward the
/// most recent observation (the 6th of 12).
struct AggregatedCovariates {
    std::vector<int> periods;  // target periods, one row each
    Eigen::MatrixXd values;    // periods x covariates, panel order
};

AggregatedCovariates aggregate_simple(const MixedFrequencyPanel& panel, AggregationMethod method,
                                      int lag_periods);

/// Design with one aggregated column per covariate instead of dictionary
/// blocks; used by the FLOW/STOCK/MIDDLE baselines.
DesignProblem build_aggregate_design(const MixedFrequencyPanel& panel, AggregationMethod method,
                                     const DesignSpec& spec);

}  // namespace sgmidas
