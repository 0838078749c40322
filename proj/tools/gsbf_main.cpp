#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <gsbf/errors.hpp>
#include <gsbf/harness/report.hpp>
#include <gsbf/harness/runner.hpp>
#include <gsbf/harness/spec.hpp>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

struct RunArgs
{
    std::string config;
    std::optional<int> trials;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
    std::string out;
    std::vector<double> sinr_db;
};

void print_summary(const gsbf::harness::ExperimentSpec& spec, const gsbf::harness::RunResult& result)
{
    std::printf("%-12s %8s %10s %12s %8s\n", "algorithm", "sinr_db", "feasible", "power_w", "active");
    for (const auto& c : result.summary) {
        std::printf("%-12s %8g %5d/%-4d ", std::string(gsbf::harness::to_string(c.algorithm)).c_str(),
                    c.sinr_db, c.feasible_trials, c.total_trials);
        if (c.mean_network_power_w)
            std::printf("%12.4f %8.3f\n", *c.mean_network_power_w, *c.mean_active_count);
        else
            std::printf("%12s %8s\n", "-", "-");
    }
    (void)spec;
}

int execute(const RunArgs& args)
{
    auto spec = gsbf::harness::load_spec(args.config);
    if (args.trials) spec.trials = *args.trials;
    if (args.seed) spec.base_seed = *args.seed;
    if (!args.sinr_db.empty()) spec.sinr_grid_db = args.sinr_db;
    if (!args.out.empty()) spec.output_dir = args.out;
    spec.validate();

    const auto result = gsbf::harness::run_trials(spec, {args.jobs});
    gsbf::harness::emit_reports(spec, result, spec.output_dir);
    print_summary(spec, result);
    std::printf("reports written to %s\n", spec.output_dir.c_str());
    if (result.all_infeasible()) {
        std::fprintf(stderr, "gsbf: every trial was infeasible\n");
        return kExitInfeasible;
    }
    return 0;
}

void add_run_options(CLI::App* cmd, RunArgs& args)
{
    cmd->add_option("--config", args.config, "Experiment config file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--trials", args.trials, "Override the trial count")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", args.seed, "Override base_seed");
    cmd->add_option("--jobs", args.jobs, "Concurrent trials")->check(CLI::PositiveNumber);
    cmd->add_option("--out", args.out, "Output directory");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cloud-RAN group sparse beamforming simulator"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Run the Monte Carlo experiment in a config");
    add_run_options(run, run_args);

    RunArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "Run the experiment over an explicit SINR grid");
    add_run_options(sweep, sweep_args);
    sweep->add_option("--sinr-db", sweep_args.sinr_db, "Comma-separated SINR targets in dB")
        ->required()
        ->delimiter(',');

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Parse and validate a config, then echo it");
    validate->add_option("--config", validate_path, "Experiment config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*validate) {
            std::cout << gsbf::harness::echo_spec(gsbf::harness::load_spec(validate_path));
            return 0;
        }
        return execute(*run ? run_args : sweep_args);
    } catch (const gsbf::ConfigError& e) {
        std::cerr << "gsbf: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "gsbf: " << e.what() << "\n";
        return 1;
    }
}
