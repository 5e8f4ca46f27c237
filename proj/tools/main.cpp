#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pvqd/experiment.hpp"

namespace {

void apply_overrides(pvqd::ExperimentSpec& spec, long long seed, int runs) {
    if (seed >= 0) spec.base_seed = static_cast<std::uint64_t>(seed);
    if (runs > 0) spec.num_runs = runs;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Projected variational quantum dynamics with block sweeping"};
    app.require_subcommand(1);

    std::string out_dir = "out";
    long long seed_override = -1;
    int runs_override = 0;
    int threads = 1;
    app.add_option("--out-dir", out_dir, "Directory for CSV/JSON outputs");
    app.add_option("--seed", seed_override, "Override the config base seed");
    app.add_option("--runs", runs_override, "Override the config run count");
    app.add_option("--threads", threads, "Worker threads across runs");

    std::string run_config;
    CLI::App* run_cmd = app.add_subcommand("run", "Run one experiment config");
    run_cmd->add_option("config", run_config, "JSON config path")->required();

    std::vector<std::string> compare_configs;
    CLI::App* compare_cmd =
        app.add_subcommand("compare", "Run several configs and tabulate them");
    compare_cmd->add_option("configs", compare_configs, "JSON config paths")
        ->required()
        ->expected(-1);

    CLI::App* presets_cmd = app.add_subcommand("presets", "Built-in configurations");
    CLI::App* presets_list = presets_cmd->add_subcommand("list", "List preset names");
    std::string dump_name;
    CLI::App* presets_dump =
        presets_cmd->add_subcommand("dump", "Print a preset config as JSON");
    presets_dump->add_option("name", dump_name, "Preset name")->required();
    presets_cmd->require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            pvqd::ExperimentSpec spec = pvqd::parse_config(run_config);
            apply_overrides(spec, seed_override, runs_override);
            const pvqd::ExperimentOutput out =
                pvqd::run_experiment(spec, out_dir, threads);
            for (const auto& file : out.files_written)
                std::cout << "wrote " << file << "\n";
            const pvqd::RunSummary& s = out.runs.front().summary;
            std::cout << spec.label << ": mean infidelity (run 0) = "
                      << s.mean_infidelity << ", total iterations = "
                      << s.total_iterations << "\n";
        } else if (*compare_cmd) {
            std::vector<pvqd::ExperimentSpec> specs;
            for (const auto& path : compare_configs) {
                specs.push_back(pvqd::parse_config(path));
                apply_overrides(specs.back(), seed_override, runs_override);
            }
            const auto rows = pvqd::compare_policies(specs, out_dir, threads);
            std::cout << pvqd::format_comparison_table(rows);
            std::cout << "wrote " << out_dir << "/comparison.csv\n";
        } else if (*presets_cmd) {
            if (*presets_list) {
                for (const auto& name : pvqd::preset_names()) std::cout << name << "\n";
            } else if (*presets_dump) {
                std::cout << pvqd::preset_text(dump_name);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
