#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "sgmidas/timeseries.hpp"

namespace sgmidas::cli {

/// Thrown for malformed input data; maps to exit code 1.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // throws InputError when absent
};

/// Minimal CSV reader: comma-separated, no quoting, one header line.
/// Parse errors carry the file name and 1-based line number.
CsvTable read_csv(const std::string& path);

double parse_double(const CsvTable& table, std::size_t row, int col, const std::string& path);
int parse_int(const CsvTable& table, std::size_t row, int col, const std::string& path);

/// Target series file: header "period,value", consecutive integer periods.
struct TargetData {
    std::vector<double> values;
    int first_period = 1;  // calendar tag of the first observation
};
TargetData read_target_csv(const std::string& path);

/// Long covariate file: header "series_id,period,subperiod,value". Values for
/// each series must be contiguous on the sub-period clock.
struct CovariateData {
    std::string id;
    std::vector<double> values;
    int first_period = 0;     // calendar period of the first value
    int first_subperiod = 0;  // sub-period within that period (1-based)
};
std::vector<CovariateData> read_covariates_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace sgmidas::cli
