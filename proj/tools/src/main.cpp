#include <CLI11.hpp>
#include <cstdio>
#include <exception>

#include "commands.hpp"
#include "csv.hpp"

int main(int argc, char** argv) {
    using namespace sgmidas::cli;

    CLI::App app{"Sparse-group LASSO estimation for mixed-frequency time-series regressions"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo scenario");
    simulate->add_option("--scenario", sim.scenario_path, "Scenario JSON file")->required();
    simulate->add_option("--replications", sim.replications, "Override replication count");
    simulate->add_option("--seed", sim.seed, "Override RNG seed");
    simulate->add_option("--out", sim.out_dir, "Output directory")->required();

    FitArgs fit_args;
    auto* fit_cmd = app.add_subcommand("fit", "Fit one sg-LASSO regression");
    fit_cmd->add_option("--config", fit_args.config_path, "Project config JSON")->required();
    fit_cmd->add_option("--lambda", fit_args.lambda, "Penalty level");
    fit_cmd->add_option("--alpha", fit_args.alpha, "Sparse-group mixing weight in [0,1]");
    fit_cmd->add_flag("--cv", fit_args.use_cv, "Select (alpha, lambda) by blocked cross-validation");
    fit_cmd->add_option("--out", fit_args.out_dir, "Output directory")->required();

    NowcastArgs now;
    auto* nowcast = app.add_subcommand("nowcast", "Rolling-window nowcasting");
    nowcast->add_option("--config", now.config_path, "Project config JSON")->required();
    nowcast->add_option("--horizon", now.horizon, "2m, 1m, eoq, or custom")
        ->check(CLI::IsMember({"2m", "1m", "eoq", "custom"}));
    nowcast->add_option("--window", now.window, "Rolling window length in periods");
    nowcast->add_option("--model", now.model, "sgl, ar, pca, ridge-u, lasso-u, enet-u")
        ->check(CLI::IsMember({"sgl", "ar", "pca", "ridge-u", "lasso-u", "enet-u"}));
    nowcast->add_option("--out", now.out_dir, "Output directory")->required();

    EvaluateArgs eval;
    auto* evaluate = app.add_subcommand("evaluate", "Compare two forecast error files");
    evaluate
        ->add_option("--errors", [&eval](const std::vector<std::string>& vals) {
            if (vals.size() != 2) return false;
            eval.benchmark_errors_path = vals[0];
            eval.model_errors_path = vals[1];
            return true;
        }, "Benchmark and model forecasts.csv files")
        ->expected(2)
        ->required();
    evaluate->add_option("--hac-lags", eval.hac_lags, "Bartlett HAC lags (default n^(1/3))");
    evaluate->add_option("--out", eval.out_dir, "Output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) run_simulate(sim);
        if (fit_cmd->parsed()) run_fit(fit_args);
        if (nowcast->parsed()) run_nowcast(now);
        if (evaluate->parsed()) run_evaluate(eval);
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    } catch (const InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    }
    return 0;
}
