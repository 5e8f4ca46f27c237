#pragma once

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "pvqd/circuit.hpp"
#include "pvqd/dense.hpp"
#include "pvqd/optimize.hpp"
#include "pvqd/pauli.hpp"
#include "pvqd/sweep.hpp"

namespace pvqd {

struct NoiseSpec {
    double depolarizing_1q = 0.0;  // per single-qubit-support gate
    double depolarizing_2q = 0.0;  // per two-qubit-support gate
    double readout_flip = 0.0;     // per measured qubit
};

struct MeasurementConfig {
    enum class Mode { Exact, Shots };
    Mode mode = Mode::Exact;
    std::uint64_t num_shots = 1024;
    NoiseSpec noise;
};

struct NamedObservable {
    std::string name;
    PauliSum op;
};

struct EvolutionConfig {
    PauliSum hamiltonian;
    int ansatz_blocks = 1;
    int trotter_steps = 8;
    double dt = 0.01;
    int num_steps = 1;
    SweepPolicy policy;
    OptimizerConfig optimizer;
    std::vector<NamedObservable> observables;
    MeasurementConfig measurement;
    std::uint64_t run_seed = 0;
    std::uint64_t initial_bits = 0;  // product-state start |bits>
};

/// Telemetry for one committed time step.
struct TimeStepRecord {
    int step_index = 0;
    double t = 0.0;
    std::vector<double> observed;        // through the measurement backend
    std::vector<double> observed_error;  // std_error per observable (shots mode)
    std::vector<double> exact;           // dense-oracle values
    double loss = 0.0;
    double infidelity = 0.0;  // vs the exact-evolution oracle
    int iterations = 0;
    long loss_evaluations = 0;
    long gradient_evaluations = 0;
    std::vector<std::uint32_t> active_blocks;
    std::size_t optimized_parameters = 0;
    double wall_ms = 0.0;  // optimizer call only
};

struct ObservableErrorStats {
    std::string name;
    double mean_abs_error = 0.0;
    double std_abs_error = 0.0;  // population std of the per-step |error| sequence
};

struct RunSummary {
    std::vector<ObservableErrorStats> observable_errors;
    double mean_infidelity = 0.0;
    double max_infidelity = 0.0;
    long total_iterations = 0;
    double total_wall_ms = 0.0;
    double mean_wall_ms_per_step = 0.0;
};

struct RunResult {
    EvolutionConfig config;
    std::vector<TimeStepRecord> records;
    RunSummary summary;
};

/// Raised when the optimizer fails numerically mid-run; carries the records
/// of the steps completed before the failure.
class PartialRunError : public std::runtime_error {
  public:
    PartialRunError(const std::string& what, std::vector<TimeStepRecord> completed)
        : std::runtime_error(what), records(std::move(completed)) {}
    std::vector<TimeStepRecord> records;
};

struct ShotEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Samples each Pauli term of `obs` from `state` in its measurement basis:
/// N_s bitstrings per term, readout flips applied per qubit, eigenvalues
/// averaged and combined with the coefficients.
ShotEstimate measure_observable_shots(const StateVector& state, const PauliSum& obs,
                                      std::uint64_t shots, const NoiseSpec& noise,
                                      std::mt19937_64& rng);

/// One stochastic-Pauli-insertion trajectory of the ansatz circuit: after
/// each gate a depolarizing Pauli is inserted on the gate's support with the
/// configured per-gate probability.
StateVector noisy_ansatz_state(const BlockedAnsatz& ansatz, std::span<const double> theta,
                               const StateVector& initial, const NoiseSpec& noise,
                               std::mt19937_64& rng);

/// The projected-evolution loop: per step, select a block mask, minimize the
/// projection loss over the masked increment, commit theta, and record
/// observables plus the exact-oracle infidelity. Deterministic given seeds.
RunResult run_evolution(const EvolutionConfig& cfg);

/// Per-observable mean/std of |exact - observed| over the records, plus
/// infidelity, iteration, and wall-time totals.
RunSummary summarize(const std::vector<TimeStepRecord>& records,
                     const std::vector<std::string>& observable_names);

}  // namespace pvqd
