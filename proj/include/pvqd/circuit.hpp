#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pvqd/pauli.hpp"
#include "pvqd/state_vector.hpp"

namespace pvqd {

using ParamVector = std::vector<double>;

/// Ordered list of Pauli-rotation gates. Parameter slots, when present, form
/// the contiguous range [0, num_parameters).
struct Circuit {
    std::uint32_t num_qubits = 0;
    std::vector<PauliRotationGate> gates;
    std::size_t num_parameters = 0;
};

/// Applies the circuit in gate order. `params` resolves parameterized gates
/// and must match num_parameters (may be empty for fixed circuits).
void apply_circuit(const Circuit& circuit, StateVector& state,
                   std::span<const double> params = {});

/// First-order Suzuki-Trotter step for e^{-iH dt}: p repetitions of one
/// rotation per Hamiltonian term (term order preserved), fixed angles
/// 2 c_k dt / p under the exp(-i(angle/2)P) convention.
Circuit trotter_step_circuit(const PauliSum& hamiltonian, double dt, int trotter_steps);

/// Variational ansatz built from `num_blocks` structurally identical copies
/// of a parameterized Trotter block (one parameter per Hamiltonian term).
/// Block k owns the parameter slots [k*block_size, (k+1)*block_size).
class BlockedAnsatz {
  public:
    BlockedAnsatz(const PauliSum& hamiltonian, int num_blocks);

    std::uint32_t num_qubits() const { return circuit_.num_qubits; }
    std::size_t num_blocks() const { return num_blocks_; }
    std::size_t block_size() const { return block_size_; }
    std::size_t num_parameters() const { return circuit_.num_parameters; }

    /// One block with slots [0, block_size).
    const Circuit& block_template() const { return template_; }
    /// All blocks flattened in application order (block 0 first).
    const Circuit& circuit() const { return circuit_; }

  private:
    Circuit template_;
    Circuit circuit_;
    std::size_t num_blocks_;
    std::size_t block_size_;
};

BlockedAnsatz build_blocked_ansatz(const PauliSum& hamiltonian, int num_blocks);

/// U(theta) applied to `input`; theta length must equal num_parameters.
StateVector evaluate(const BlockedAnsatz& ansatz, std::span<const double> theta,
                     const StateVector& input);

}  // namespace pvqd
