#include "pvqd/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

namespace pvqd {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base ^ splitmix64(stream));
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void check_noise(const NoiseSpec& noise) {
    for (const double p : {noise.depolarizing_1q, noise.depolarizing_2q, noise.readout_flip})
        if (!(p >= 0.0 && p < 1.0))
            throw std::invalid_argument("noise probabilities must lie in [0, 1)");
}

// Basis-change rotations mapping the term's X/Y factors onto Z for sampling.
void rotate_to_measurement_basis(StateVector& state, const PauliTerm& term) {
    constexpr double half_pi = std::numbers::pi / 2.0;
    for (const auto& [q, p] : term.word) {
        if (p == Pauli::X)
            apply_pauli_rotation(state, make_rotation({q}, {Pauli::Y}, 0.0), -half_pi);
        else if (p == Pauli::Y)
            apply_pauli_rotation(state, make_rotation({q}, {Pauli::X}, 0.0), half_pi);
    }
}

std::uint64_t sample_bitstring(const std::vector<double>& cumulative,
                               std::mt19937_64& rng) {
    const double u = uniform01(rng) * cumulative.back();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return static_cast<std::uint64_t>(std::distance(cumulative.begin(), it));
}

}  // namespace

ShotEstimate measure_observable_shots(const StateVector& state, const PauliSum& obs,
                                      std::uint64_t shots, const NoiseSpec& noise,
                                      std::mt19937_64& rng) {
    if (shots < 1) throw std::invalid_argument("shot count must be at least 1");
    check_noise(noise);

    double estimate = 0.0;
    double variance = 0.0;
    std::vector<double> cumulative(state.dimension());
    for (const auto& term : obs.terms()) {
        StateVector rotated = state;
        rotate_to_measurement_basis(rotated, term);
        double acc = 0.0;
        for (std::uint64_t x = 0; x < rotated.dimension(); ++x) {
            acc += std::norm(rotated.amplitudes()[x]);
            cumulative[x] = acc;
        }

        double sum = 0.0, sum_sq = 0.0;
        for (std::uint64_t s = 0; s < shots; ++s) {
            std::uint64_t bits = sample_bitstring(cumulative, rng);
            double eigenvalue = 1.0;
            for (const auto& [q, p] : term.word) {
                bool bit = (bits >> q) & 1;
                if (noise.readout_flip > 0.0 && uniform01(rng) < noise.readout_flip)
                    bit = !bit;
                if (bit) eigenvalue = -eigenvalue;
            }
            sum += eigenvalue;
            sum_sq += 1.0;  // eigenvalue^2
        }
        const double mean = sum / static_cast<double>(shots);
        const double var =
            shots > 1 ? (sum_sq - sum * sum / static_cast<double>(shots)) /
                            static_cast<double>(shots - 1)
                      : 0.0;
        estimate += term.coefficient * mean;
        variance += term.coefficient * term.coefficient * var /
                    static_cast<double>(shots);
    }
    return {estimate, std::sqrt(std::max(0.0, variance))};
}

StateVector noisy_ansatz_state(const BlockedAnsatz& ansatz, std::span<const double> theta,
                               const StateVector& initial, const NoiseSpec& noise,
                               std::mt19937_64& rng) {
    check_noise(noise);
    if (theta.size() != ansatz.num_parameters())
        throw std::invalid_argument("theta length does not match the ansatz");
    static constexpr Pauli kPaulis[3] = {Pauli::X, Pauli::Y, Pauli::Z};
    StateVector state = initial;
    for (const auto& gate : ansatz.circuit().gates) {
        apply_pauli_rotation(state, gate,
                             theta[static_cast<std::size_t>(gate.parameter_slot)]);
        const double p =
            gate.support.size() <= 1 ? noise.depolarizing_1q : noise.depolarizing_2q;
        if (p <= 0.0 || uniform01(rng) >= p) continue;
        if (gate.support.size() == 1) {
            const Pauli err = kPaulis[rng() % 3];
            apply_pauli_word(state, make_rotation({gate.support[0]}, {err}, 0.0));
        } else {
            // Uniform non-identity Pauli pair on the gate's two support qubits.
            const std::uint64_t idx = 1 + rng() % 15;  // 1..15, base-4 digits (I,X,Y,Z)
            const std::uint64_t p0 = idx & 3, p1 = (idx >> 2) & 3;
            std::vector<std::uint32_t> support;
            std::vector<Pauli> letters;
            if (p0 != 0) {
                support.push_back(gate.support[0]);
                letters.push_back(kPaulis[p0 - 1]);
            }
            if (p1 != 0) {
                support.push_back(gate.support[1]);
                letters.push_back(kPaulis[p1 - 1]);
            }
            apply_pauli_word(state, make_rotation(std::move(support), std::move(letters), 0.0));
        }
    }
    return state;
}

RunResult run_evolution(const EvolutionConfig& cfg) {
    if (cfg.num_steps < 1) throw std::invalid_argument("num_steps must be at least 1");
    if (cfg.dt <= 0.0 || !std::isfinite(cfg.dt))
        throw std::invalid_argument("dt must be positive and finite");
    if (cfg.measurement.mode == MeasurementConfig::Mode::Shots &&
        cfg.measurement.num_shots < 1)
        throw std::invalid_argument("shots mode needs at least one shot");
    check_noise(cfg.measurement.noise);

    const BlockedAnsatz ansatz(cfg.hamiltonian, cfg.ansatz_blocks);
    const Circuit target = trotter_step_circuit(cfg.hamiltonian, cfg.dt, cfg.trotter_steps);
    const StateVector initial =
        StateVector::basis_state(cfg.hamiltonian.num_qubits(), cfg.initial_bits);

    SweepPolicy policy = cfg.policy;
    policy.rng_seed = derive_seed(cfg.run_seed, 0x706f6c69ULL);  // policy stream
    SweepState sweep_state = make_sweep_state(policy);
    std::mt19937_64 measure_rng(derive_seed(cfg.run_seed, 0x73686f74ULL));
    std::mt19937_64 noise_rng(derive_seed(cfg.run_seed, 0x6e6f6973ULL));

    ParamVector theta(ansatz.num_parameters(), 0.0);
    std::vector<TimeStepRecord> records;
    records.reserve(static_cast<std::size_t>(cfg.num_steps));
    OptimizeResult prev;
    bool have_prev = false;

    for (int step = 1; step <= cfg.num_steps; ++step) {
        const BlockMask mask =
            select_mask(policy, sweep_state, have_prev ? &prev : nullptr,
                        ansatz.num_blocks());
        const ParamVector d_theta_0 =
            warm_start_initial(policy, sweep_state, theta, mask, ansatz.block_size());

        LossContext ctx(ansatz, theta, target, cfg.dt, initial);
        OptimizerConfig opt = cfg.optimizer;
        opt.rng_seed = derive_seed(cfg.run_seed, 0x73707361ULL + static_cast<std::uint64_t>(step));

        OptimizeResult result;
        const auto tic = std::chrono::steady_clock::now();
        try {
            result = opt.mode == OptimizerConfig::Mode::Spsa
                         ? spsa_minimize(ctx, mask, d_theta_0, opt)
                         : minimize(ctx, mask, d_theta_0, opt);
        } catch (const std::runtime_error& e) {
            throw PartialRunError(std::string("step ") + std::to_string(step) + ": " +
                                      e.what(),
                                  std::move(records));
        }
        const auto toc = std::chrono::steady_clock::now();

        for (std::size_t i = 0; i < theta.size(); ++i) theta[i] += result.d_theta_star[i];

        const double t = step * cfg.dt;
        const StateVector psi = evaluate(ansatz, theta, initial);
        const StateVector reference = exact_evolve(cfg.hamiltonian, initial, t);

        TimeStepRecord rec;
        rec.step_index = step;
        rec.t = t;
        rec.loss = result.final_loss;
        rec.infidelity = infidelity(psi, reference);
        rec.iterations = result.iterations;
        rec.loss_evaluations = result.loss_evaluations;
        rec.gradient_evaluations = result.gradient_evaluations;
        rec.active_blocks = mask.blocks();
        rec.optimized_parameters = mask.cardinality() * ansatz.block_size();
        rec.wall_ms = std::chrono::duration<double, std::milli>(toc - tic).count();

        for (const auto& obs : cfg.observables) {
            rec.exact.push_back(expectation(reference, obs.op));
            if (cfg.measurement.mode == MeasurementConfig::Mode::Exact) {
                rec.observed.push_back(expectation(psi, obs.op));
                rec.observed_error.push_back(0.0);
            } else {
                // One stochastic trajectory per shot batch, then sampled
                // measurement with readout flips.
                const StateVector traj = noisy_ansatz_state(
                    ansatz, theta, initial, cfg.measurement.noise, noise_rng);
                const ShotEstimate est = measure_observable_shots(
                    traj, obs.op, cfg.measurement.num_shots, cfg.measurement.noise,
                    measure_rng);
                rec.observed.push_back(est.estimate);
                rec.observed_error.push_back(est.std_error);
            }
        }

        records.push_back(std::move(rec));
        sweep_state.last_blocks = mask.blocks();
        sweep_state.last_d_theta_star = result.d_theta_star;
        prev = std::move(result);
        have_prev = true;
    }

    std::vector<std::string> names;
    names.reserve(cfg.observables.size());
    for (const auto& obs : cfg.observables) names.push_back(obs.name);

    RunResult out{cfg, std::move(records), {}};
    out.summary = summarize(out.records, names);
    return out;
}

RunSummary summarize(const std::vector<TimeStepRecord>& records,
                     const std::vector<std::string>& observable_names) {
    if (records.empty()) throw std::invalid_argument("no records to summarize");
    RunSummary s;
    const auto n = static_cast<double>(records.size());
    for (std::size_t j = 0; j < observable_names.size(); ++j) {
        double mean = 0.0;
        for (const auto& r : records) mean += std::abs(r.exact[j] - r.observed[j]);
        mean /= n;
        double var = 0.0;
        for (const auto& r : records) {
            const double d = std::abs(r.exact[j] - r.observed[j]) - mean;
            var += d * d;
        }
        s.observable_errors.push_back({observable_names[j], mean, std::sqrt(var / n)});
    }
    for (const auto& r : records) {
        s.mean_infidelity += r.infidelity;
        s.max_infidelity = std::max(s.max_infidelity, r.infidelity);
        s.total_iterations += r.iterations;
        s.total_wall_ms += r.wall_ms;
    }
    s.mean_infidelity /= n;
    s.mean_wall_ms_per_step = s.total_wall_ms / n;
    return s;
}

}  // namespace pvqd
