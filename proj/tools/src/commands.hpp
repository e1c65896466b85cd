#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sgmidas::cli {

/// Exit codes: 0 success, 1 validation/config failure, 2 numerical failure.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimulateArgs {
    std::string scenario_path;
    int replications = -1;       // -1: keep the scenario's value
    std::int64_t seed = -1;      // -1: keep the scenario's value
    std::string out_dir;
};
void run_simulate(const SimulateArgs& args);

struct FitArgs {
    std::string config_path;
    bool use_cv = false;
    double lambda = -1.0;  // required unless use_cv
    double alpha = 1.0;
    std::string out_dir;
};
void run_fit(const FitArgs& args);

struct NowcastArgs {
    std::string config_path;
    std::string horizon = "eoq";
    int window = -1;  // -1: use the config's window
    std::string model = "sgl";
    std::string out_dir;
};
void run_nowcast(const NowcastArgs& args);

struct EvaluateArgs {
    std::string benchmark_errors_path;
    std::string model_errors_path;
    int hac_lags = -1;
    std::string out_dir;
};
void run_evaluate(const EvaluateArgs& args);

}  // namespace sgmidas::cli
