#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "pvqd/pauli.hpp"

namespace pvqd {

using cdouble = std::complex<double>;

/// Dense complex statevector over 2^N amplitudes. Qubit 0 is the least
/// significant bit of the amplitude index. One evolution run owns its state
/// exclusively; distinct states may live on distinct threads.
class StateVector {
  public:
    /// |0...0> on `num_qubits` qubits.
    explicit StateVector(std::uint32_t num_qubits);

    /// Computational basis state |bits>.
    static StateVector basis_state(std::uint32_t num_qubits, std::uint64_t bits);

    std::uint32_t num_qubits() const { return num_qubits_; }
    std::uint64_t dimension() const { return amps_.size(); }
    std::vector<cdouble>& amplitudes() { return amps_; }
    const std::vector<cdouble>& amplitudes() const { return amps_; }

    double norm() const;

  private:
    std::uint32_t num_qubits_;
    std::vector<cdouble> amps_;
};

/// Rotation exp(-i (angle/2) P) where P is the tensor product of the listed
/// Pauli factors on the support qubits. A gate is either fixed-angle or bound
/// to one parameter slot, never both.
struct PauliRotationGate {
    std::vector<std::uint32_t> support;
    std::vector<Pauli> paulis;
    double angle = 0.0;
    int parameter_slot = -1;

    bool parameterized() const { return parameter_slot >= 0; }
};

PauliRotationGate make_rotation(std::vector<std::uint32_t> support,
                                std::vector<Pauli> paulis, double angle);
PauliRotationGate make_parameterized_rotation(std::vector<std::uint32_t> support,
                                              std::vector<Pauli> paulis, int slot);

/// Applies exp(-i (angle/2) P) in place, O(2^N), without materializing a
/// matrix. Throws on out-of-range support or non-finite angle.
void apply_pauli_rotation(StateVector& state, const PauliRotationGate& gate,
                          double angle);

/// Applies the bare Pauli word P of `gate` in place (used by gradient and
/// noise paths).
void apply_pauli_word(StateVector& state, const PauliRotationGate& gate);

/// <a|b> with conjugation on `a`.
cdouble inner_product(const StateVector& a, const StateVector& b);

/// <a|P b> for the Pauli word P of `gate`, without materializing P b.
cdouble pauli_bracket(const StateVector& a, const PauliRotationGate& gate,
                      const StateVector& b);

/// <state|O|state> for a Hermitian Pauli-sum observable; the imaginary
/// residue is asserted below 1e-10 and discarded.
double expectation(const StateVector& state, const PauliSum& observable);

/// 1 - |<a|b>|^2, clamped to [0, 1].
double infidelity(const StateVector& a, const StateVector& b);

}  // namespace pvqd
