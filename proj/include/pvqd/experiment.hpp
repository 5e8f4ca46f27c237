#pragma once

#include <string>
#include <vector>

#include "pvqd/engine.hpp"

namespace pvqd {

/// One experiment as read from a JSON config: model, evolution and policy
/// settings, and the multi-run layout. Unknown config keys are rejected.
struct ExperimentSpec {
    enum class Model { Tfim, Xyz, Custom };

    std::string label;
    Model model = Model::Tfim;
    int num_qubits = 2;
    double coupling_j = -0.25;
    double field_h = -1.0;
    double jx = 1.0, jy = 0.8, jz = 0.6;
    bool periodic = false;
    std::string hamiltonian_file;  // custom model

    double dt = 0.01;
    int num_steps = 1;
    int trotter_steps = 8;
    int ansatz_blocks = 1;
    std::uint64_t initial_bits = 0;

    SweepPolicy policy;
    OptimizerConfig optimizer;
    MeasurementConfig measurement;

    int num_runs = 1;
    std::uint64_t base_seed = 1;
};

ExperimentSpec parse_config(const std::string& path);
ExperimentSpec parse_config_text(const std::string& json_text,
                                 const std::string& default_label);

/// Builds the model Hamiltonian and its preset observable list
/// (TFIM: energy, sigma_x, sigma_z; XYZ: energy, z0, z0z1; custom: energy).
PauliSum build_hamiltonian(const ExperimentSpec& spec);
std::vector<NamedObservable> default_observables(const ExperimentSpec& spec,
                                                 const PauliSum& hamiltonian);

/// Engine configuration for one seeded run of the experiment.
EvolutionConfig to_evolution_config(const ExperimentSpec& spec, std::uint64_t run_seed);

/// Per-step mean and population standard deviation across runs for every
/// numeric recorded quantity.
struct AggregateQuantity {
    std::string name;
    std::vector<double> mean;
    std::vector<double> stdev;
};

struct AggregateReport {
    int num_runs = 0;
    std::vector<double> t;
    std::vector<AggregateQuantity> quantities;
};

struct ExperimentOutput {
    std::vector<RunResult> runs;
    AggregateReport aggregate;
    std::vector<std::string> files_written;
};

/// Runs num_runs seeded evolutions (base_seed + run index), writes one CSV
/// per run plus an aggregate CSV and a JSON report under out_dir. A failed
/// run leaves its completed records behind with a `.partial` suffix and the
/// whole experiment throws.
ExperimentOutput run_experiment(const ExperimentSpec& spec, const std::string& out_dir,
                                int threads = 1);

AggregateReport aggregate_runs(const std::vector<RunResult>& runs);

struct PolicyComparisonRow {
    std::string label;
    std::string policy;
    int ansatz_blocks = 0;
    double mean_params_per_step = 0.0;
    std::vector<ObservableErrorStats> observable_errors;  // averaged across runs
    double mean_infidelity = 0.0;
    double mean_total_iterations = 0.0;
    double mean_total_wall_ms = 0.0;
};

/// Runs each spec and tabulates average errors, infidelity, iteration and
/// wall-time totals side by side. The specs must share the model, dt, step
/// count, and Trotter depth.
std::vector<PolicyComparisonRow> compare_policies(const std::vector<ExperimentSpec>& specs,
                                                  const std::string& out_dir,
                                                  int threads = 1);

std::string format_comparison_table(const std::vector<PolicyComparisonRow>& rows);

/// Deterministic CSV emission (fixed column set, %.12g doubles). Per-step
/// wall times stay out of the CSVs so reruns are byte-identical; timing is
/// reported in the JSON report instead.
std::string run_csv(const RunResult& run);
std::string aggregate_csv(const AggregateReport& report);
std::string report_json(const ExperimentSpec& spec, const ExperimentOutput& output);

/// Named built-in configurations mirroring the studied systems.
std::vector<std::string> preset_names();
std::string preset_text(const std::string& name);

}  // namespace pvqd
