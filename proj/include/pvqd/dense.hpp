#pragma once

#include <Eigen/Dense>

#include "pvqd/pauli.hpp"
#include "pvqd/state_vector.hpp"

namespace pvqd {

using DenseOperator = Eigen::MatrixXcd;

/// Full 2^N x 2^N matrix of a PauliSum (sum of Kronecker-extended words).
/// Guarded at N <= 14.
DenseOperator dense_matrix(const PauliSum& op);

/// Exact propagator e^{-iHt} through one eigendecomposition of the dense
/// Hamiltonian, reusable for any t. Immutable and shareable across threads.
class ExactEvolver {
  public:
    explicit ExactEvolver(const PauliSum& hamiltonian);

    StateVector evolve(const StateVector& state, double t) const;

    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
    std::uint32_t num_qubits() const { return num_qubits_; }

  private:
    std::uint32_t num_qubits_;
    Eigen::VectorXd eigenvalues_;
    Eigen::MatrixXcd eigenvectors_;
};

/// e^{-iHt}|state>. The eigendecomposition is computed once per distinct
/// Hamiltonian and cached (concurrent reads are safe).
StateVector exact_evolve(const PauliSum& hamiltonian, const StateVector& state,
                         double t);

}  // namespace pvqd
