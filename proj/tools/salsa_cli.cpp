#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "salsa/app.hpp"
#include "salsa/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "Local smoothness estimation for scattered data via multilevel "
        "kernel interpolation"};
    app.require_subcommand(1);

    std::string config_path, input, out, experiment = "all";
    std::string function, sampler = "halton";
    bool raw = false;
    int threads = -1, n = 1000, levels = 10;
    double tau = 3.0;

    CLI::App* analyze = app.add_subcommand(
        "analyze", "Estimate local smoothness per the config");
    analyze->add_option("--config", config_path, "key=value config file")
        ->required();
    analyze->add_option("--input", input, "data table (overrides io.input)");
    analyze->add_option("--out", out, "output directory (overrides io.output)");
    analyze->add_flag("--raw", raw, "also dump per-center level tables");
    analyze->add_option("--threads", threads,
                        "worker pool size (overrides config)");

    CLI::App* rates = app.add_subcommand(
        "rates", "Run a convergence-rate experiment");
    rates->add_option("--experiment", experiment,
                      "abs_x | step | sine | kernel_translate | all");
    rates->add_option("--out", out, "output directory")->required();
    rates->add_option("--tau", tau, "kernel smoothness order");
    rates->add_option("--levels", levels, "number of nested levels");

    CLI::App* synth = app.add_subcommand(
        "synth", "Sample a built-in test function to a data table");
    synth->add_option("--function", function, "built-in function name")
        ->required();
    synth->add_option("--sampler", sampler, "grid | halton");
    synth->add_option("--n", n, "points (halton) or points per axis (grid)");
    synth->add_option("--out", out, "output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (analyze->parsed()) {
            salsa::RunConfig cfg = salsa::load_config(config_path);
            if (!input.empty()) cfg.io.input = input;
            if (!out.empty()) cfg.io.output = out;
            if (raw) cfg.io.raw = true;
            if (threads >= 0) cfg.threads = threads;
            salsa::run_analyze(cfg);
        } else if (rates->parsed()) {
            salsa::run_rates(experiment, out, tau, levels);
        } else if (synth->parsed()) {
            salsa::run_synth(function, sampler, n, out);
        }
    } catch (const salsa::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const salsa::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
