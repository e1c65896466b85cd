#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "sgmidas/design.hpp"
#include "sgmidas/simulation.hpp"
#include "sgmidas/timeseries.hpp"
#include "sgmidas/tuning.hpp"

namespace sgmidas::cli {

struct SeriesConfig {
    std::string id;
    int m = 3;
    int delay = 0;
    std::optional<int> lead;  // declared lead when the horizon flag is not used
    int lag_periods = 4;      // q
    int dictionary_size = 3;  // L
    bool unrestricted = false;
    std::string category = "default";
};

struct ProjectConfig {
    std::string target_path;
    std::string covariates_path;
    std::vector<SeriesConfig> series;
    int ar_lags = 4;
    bool include_intercept = true;
    bool unpenalized_intercept = false;
    GroupMode group_mode = GroupMode::PerCovariate;
    bool impute_zero = false;
    CvPlan cv;
    int window = 60;
    std::uint64_t seed = 1;

    nlohmann::json to_json() const;
};

/// Parse a project config; unknown keys are errors. Accepts either a plain
/// config or a manifest produced by a previous run (its "config" object is
/// used, making manifests replayable).
ProjectConfig load_project_config(const std::string& path);

/// Parse a scenario file (same unknown-key policy and manifest unwrapping).
SimulationScenario load_scenario(const std::string& path);
nlohmann::json scenario_to_json(const SimulationScenario& scenario);

/// Assemble the in-memory panel from the config's data files. Relative data
/// paths resolve against the config file's directory.
struct LoadedPanel {
    MixedFrequencyPanel panel;
    int first_period = 1;  // calendar tag of panel period 1

    int to_calendar(int t) const { return first_period + t - 1; }
};
LoadedPanel load_panel(const ProjectConfig& config, const std::string& config_path);

/// Design spec per the config; months_into_quarter < 0 means "use each
/// series' declared lead" (the custom horizon).
DesignSpec design_from_config(const ProjectConfig& config, int months_into_quarter);

/// Effective per-series lead for a horizon: floor(months * m / 3) sub-periods
/// of the target period are available before the declared publication delay.
int horizon_lead(const SeriesConfig& series, int months_into_quarter);

int horizon_months(const std::string& horizon);  // 2m -> 1, 1m -> 2, eoq -> 3

}  // namespace sgmidas::cli
