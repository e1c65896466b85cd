#pragma once

#include <optional>
#include <string>
#include <vector>

namespace sgmidas {

/// Low-frequency target series indexed by integer period t = 1..T.
/// Period labels are decorative metadata; all arithmetic is on the index.
struct LowFrequencySeries {
    std::vector<double> values;
    std::vector<std::string> period_labels;  // empty or same length as values

    LowFrequencySeries() = default;
    explicit LowFrequencySeries(std::vector<double> vals,
                                std::vector<std::string> labels = {});

    int size() const { return static_cast<int>(values.size()); }

    /// y_t for t = 1..T.
    double at(int t) const { return values[static_cast<std::size_t>(t - 1)]; }
};

/// High-frequency covariate series with alignment metadata.
///
/// Values live on a global sub-period clock: period t spans sub-periods
/// (t-1)*m+1 .. t*m, and values[i] sits at sub-period first_subperiod + i.
/// first_subperiod <= 0 marks pre-sample history before period 1.
struct HighFrequencySeries {
    std::string name;
    std::vector<double> values;
    int m = 1;                 // observations per low-frequency period
    int delay = 0;             // publication delay in sub-periods, >= 0
    int lead = 0;              // sub-periods of within-period data at prediction time, in [0, m]
    int lag_periods = 1;       // low-frequency lag depth q declared with the data
    int first_subperiod = 1;   // global sub-period index of values[0]
    std::string category;      // optional grouping tag

    HighFrequencySeries() = default;
    HighFrequencySeries(std::string series_name, std::vector<double> vals, int obs_per_period,
                        int publication_delay = 0, int available_lead = 0, int lag_depth = 1,
                        int first_sub = 1, std::string category_tag = {});

    int size() const { return static_cast<int>(values.size()); }
    int last_subperiod() const { return first_subperiod + size() - 1; }

    /// Value at a global sub-period index; requires coverage.
    double at_subperiod(int g) const {
        return values[static_cast<std::size_t>(g - first_subperiod)];
    }
    bool covers(int g) const { return g >= first_subperiod && g <= last_subperiod(); }
};

/// Aligned mixed-frequency observations shared by design construction,
/// simulation, and evaluation. Immutable after construction by convention.
struct MixedFrequencyPanel {
    LowFrequencySeries target;
    std::vector<HighFrequencySeries> covariates;
    bool impute_zero = false;  // opt-in: treat missing pre-sample values as 0

    int periods() const { return target.size(); }
    const HighFrequencySeries* find(const std::string& name) const;
};

/// One problem found while validating a panel.
struct PanelViolation {
    std::string series;   // empty for target-level issues
    std::string message;
};

using ValidationReport = std::vector<PanelViolation>;

/// Report-style validation: length mismatches, non-finite values, and
/// insufficient pre-sample history for the declared lag depths. Empty
/// report iff the panel supports a design row for every target period.
ValidationReport validate_panel(const MixedFrequencyPanel& panel);

/// Partition of coefficient indices 0..p-1 into named contiguous ranges.
class GroupStructure {
  public:
    struct Group {
        std::string name;
        int begin = 0;  // inclusive
        int end = 0;    // exclusive
        int size() const { return end - begin; }
    };

    GroupStructure() = default;

    /// Throws std::invalid_argument unless the ranges are non-empty,
    /// ordered, disjoint, and cover 0..p-1 exactly.
    GroupStructure(std::vector<Group> groups, int p);

    int num_coefficients() const { return p_; }
    int num_groups() const { return static_cast<int>(groups_.size()); }
    const Group& group(int g) const { return groups_[static_cast<std::size_t>(g)]; }
    const std::vector<Group>& groups() const { return groups_; }

    /// Index of the group containing coefficient j.
    int group_of(int j) const;
    /// Index of the named group, or -1.
    int find(const std::string& name) const;

  private:
    std::vector<Group> groups_;
    int p_ = 0;
};

}  // namespace sgmidas
