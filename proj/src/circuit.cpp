#include "pvqd/circuit.hpp"

#include <cmath>
#include <stdexcept>

namespace pvqd {

namespace {

PauliRotationGate term_gate(const PauliTerm& term) {
    PauliRotationGate g;
    g.support.reserve(term.word.size());
    g.paulis.reserve(term.word.size());
    for (const auto& [q, p] : term.word) {
        g.support.push_back(q);
        g.paulis.push_back(p);
    }
    return g;
}

}  // namespace

void apply_circuit(const Circuit& circuit, StateVector& state,
                   std::span<const double> params) {
    if (circuit.num_parameters > 0 && params.size() != circuit.num_parameters)
        throw std::invalid_argument("parameter vector length " +
                                    std::to_string(params.size()) + " does not match " +
                                    std::to_string(circuit.num_parameters));
    for (const auto& gate : circuit.gates) {
        const double angle =
            gate.parameterized() ? params[static_cast<std::size_t>(gate.parameter_slot)]
                                 : gate.angle;
        apply_pauli_rotation(state, gate, angle);
    }
}

Circuit trotter_step_circuit(const PauliSum& hamiltonian, double dt, int trotter_steps) {
    if (trotter_steps < 1)
        throw std::invalid_argument("trotter_steps must be at least 1");
    if (!std::isfinite(dt)) throw std::invalid_argument("dt is not finite");
    Circuit c;
    c.num_qubits = hamiltonian.num_qubits();
    c.gates.reserve(static_cast<std::size_t>(trotter_steps) * hamiltonian.num_terms());
    for (int rep = 0; rep < trotter_steps; ++rep) {
        for (const auto& term : hamiltonian.terms()) {
            PauliRotationGate g = term_gate(term);
            g.angle = 2.0 * term.coefficient * dt / trotter_steps;
            c.gates.push_back(std::move(g));
        }
    }
    return c;
}

BlockedAnsatz::BlockedAnsatz(const PauliSum& hamiltonian, int num_blocks) {
    if (num_blocks < 1)
        throw std::invalid_argument("ansatz needs at least one block");
    num_blocks_ = static_cast<std::size_t>(num_blocks);
    block_size_ = hamiltonian.num_terms();

    template_.num_qubits = hamiltonian.num_qubits();
    template_.num_parameters = block_size_;
    int slot = 0;
    for (const auto& term : hamiltonian.terms()) {
        PauliRotationGate g = term_gate(term);
        g.parameter_slot = slot++;
        template_.gates.push_back(std::move(g));
    }

    circuit_.num_qubits = template_.num_qubits;
    circuit_.num_parameters = num_blocks_ * block_size_;
    circuit_.gates.reserve(circuit_.num_parameters);
    for (std::size_t b = 0; b < num_blocks_; ++b) {
        for (const auto& gate : template_.gates) {
            PauliRotationGate g = gate;
            g.parameter_slot += static_cast<int>(b * block_size_);
            circuit_.gates.push_back(std::move(g));
        }
    }
}

BlockedAnsatz build_blocked_ansatz(const PauliSum& hamiltonian, int num_blocks) {
    return BlockedAnsatz(hamiltonian, num_blocks);
}

StateVector evaluate(const BlockedAnsatz& ansatz, std::span<const double> theta,
                     const StateVector& input) {
    if (theta.size() != ansatz.num_parameters())
        throw std::invalid_argument("theta length " + std::to_string(theta.size()) +
                                    " does not match ansatz parameter count " +
                                    std::to_string(ansatz.num_parameters()));
    StateVector out = input;
    apply_circuit(ansatz.circuit(), out, theta);
    return out;
}

}  // namespace pvqd
