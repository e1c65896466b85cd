#include "sgmidas/timeseries.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sgmidas {

LowFrequencySeries::LowFrequencySeries(std::vector<double> vals, std::vector<std::string> labels)
    : values(std::move(vals)), period_labels(std::move(labels)) {
    if (values.empty()) {
        throw std::invalid_argument("LowFrequencySeries: need at least one observation");
    }
    if (!period_labels.empty() && period_labels.size() != values.size()) {
        throw std::invalid_argument("LowFrequencySeries: label/value length mismatch");
    }
}

HighFrequencySeries::HighFrequencySeries(std::string series_name, std::vector<double> vals,
                                         int obs_per_period, int publication_delay,
                                         int available_lead, int lag_depth, int first_sub,
                                         std::string category_tag)
    : name(std::move(series_name)),
      values(std::move(vals)),
      m(obs_per_period),
      delay(publication_delay),
      lead(available_lead),
      lag_periods(lag_depth),
      first_subperiod(first_sub),
      category(std::move(category_tag)) {
    if (m < 1) throw std::invalid_argument("HighFrequencySeries " + name + ": m must be >= 1");
    if (delay < 0) throw std::invalid_argument("HighFrequencySeries " + name + ": delay must be >= 0");
    if (lead < 0 || lead > m) {
        throw std::invalid_argument("HighFrequencySeries " + name + ": lead must be in [0, m]");
    }
    if (lag_periods < 1) {
        throw std::invalid_argument("HighFrequencySeries " + name + ": lag depth must be >= 1");
    }
}

const HighFrequencySeries* MixedFrequencyPanel::find(const std::string& name) const {
    for (const auto& s : covariates) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

ValidationReport validate_panel(const MixedFrequencyPanel& panel) {
    ValidationReport report;
    const int T = panel.target.size();

    if (T < 1) {
        report.push_back({"", "target series is empty"});
        return report;
    }
    for (int t = 1; t <= T; ++t) {
        if (!std::isfinite(panel.target.at(t))) {
            report.push_back({"", "target has non-finite value at period " + std::to_string(t)});
        }
    }

    for (const auto& s : panel.covariates) {
        for (int i = 0; i < s.size(); ++i) {
            if (!std::isfinite(s.values[static_cast<std::size_t>(i)])) {
                report.push_back({s.name, "non-finite value at sub-period index " +
                                              std::to_string(s.first_subperiod + i)});
            }
        }
        // Coverage through the end of the last panel period.
        if (s.last_subperiod() < T * s.m) {
            report.push_back({s.name, "series ends before the panel does (last sub-period " +
                                          std::to_string(s.last_subperiod()) + " < " +
                                          std::to_string(T * s.m) + ")"});
        }
        // History so that every target period has a full lag window. At the
        // first period the window reaches back to sub-period
        // lead - delay + 1 - m*q, so q periods of lags need m*q - (lead-delay)
        // pre-sample values.
        const int effective_lead = s.lead - s.delay;
        const int earliest_needed = effective_lead + 1 - s.m * s.lag_periods;
        if (!panel.impute_zero && s.first_subperiod > earliest_needed) {
            const int missing = s.first_subperiod - earliest_needed;
            report.push_back({s.name, "insufficient pre-sample history: " +
                                          std::to_string(s.lag_periods) + " periods of lags need " +
                                          std::to_string(missing) +
                                          " more sub-period values before the series start"});
        }
    }
    return report;
}

GroupStructure::GroupStructure(std::vector<Group> groups, int p) : groups_(std::move(groups)), p_(p) {
    if (p_ < 1) throw std::invalid_argument("GroupStructure: p must be >= 1");
    int cursor = 0;
    for (const auto& g : groups_) {
        if (g.begin != cursor) {
            throw std::invalid_argument("GroupStructure: groups must tile 0..p-1 in order (group '" +
                                        g.name + "' starts at " + std::to_string(g.begin) +
                                        ", expected " + std::to_string(cursor) + ")");
        }
        if (g.size() <= 0) {
            throw std::invalid_argument("GroupStructure: group '" + g.name + "' is empty");
        }
        cursor = g.end;
    }
    if (cursor != p_) {
        throw std::invalid_argument("GroupStructure: groups cover " + std::to_string(cursor) +
                                    " coefficients, expected " + std::to_string(p_));
    }
}

int GroupStructure::group_of(int j) const {
    for (int g = 0; g < num_groups(); ++g) {
        if (j >= groups_[static_cast<std::size_t>(g)].begin && j < groups_[static_cast<std::size_t>(g)].end) return g;
    }
    throw std::out_of_range("GroupStructure::group_of: index " + std::to_string(j));
}

int GroupStructure::find(const std::string& name) const {
    for (int g = 0; g < num_groups(); ++g) {
        if (groups_[static_cast<std::size_t>(g)].name == name) return g;
    }
    return -1;
}

}  // namespace sgmidas
