#include "pvqd/dense.hpp"

#include <bit>
#include <complex>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace pvqd {

namespace {

constexpr std::uint32_t kMaxDenseQubits = 14;

void check_capacity(std::uint32_t num_qubits) {
    if (num_qubits > kMaxDenseQubits)
        throw std::invalid_argument("dense realization capped at " +
                                    std::to_string(kMaxDenseQubits) + " qubits");
}

}  // namespace

DenseOperator dense_matrix(const PauliSum& op) {
    check_capacity(op.num_qubits());
    const Eigen::Index dim = Eigen::Index{1} << op.num_qubits();
    DenseOperator m = DenseOperator::Zero(dim, dim);
    static constexpr cdouble i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (const auto& term : op.terms()) {
        const std::uint64_t flip = term.flip_mask();
        const std::uint64_t phase = term.phase_mask();
        const cdouble base = term.coefficient * i_pow[term.y_count() & 3];
        for (std::uint64_t col = 0; col < static_cast<std::uint64_t>(dim); ++col) {
            const cdouble v = (std::popcount(col & phase) & 1) ? -base : base;
            m(static_cast<Eigen::Index>(col ^ flip), static_cast<Eigen::Index>(col)) += v;
        }
    }
    return m;
}

ExactEvolver::ExactEvolver(const PauliSum& hamiltonian)
    : num_qubits_(hamiltonian.num_qubits()) {
    check_capacity(num_qubits_);
    const DenseOperator h = dense_matrix(hamiltonian);
    Eigen::SelfAdjointEigenSolver<DenseOperator> solver(h);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("Hermitian eigendecomposition failed");
    eigenvalues_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
}

StateVector ExactEvolver::evolve(const StateVector& state, double t) const {
    if (state.num_qubits() != num_qubits_)
        throw std::invalid_argument("state dimension does not match the Hamiltonian");
    const Eigen::Index dim = eigenvectors_.rows();
    Eigen::Map<const Eigen::VectorXcd> psi(state.amplitudes().data(), dim);
    Eigen::VectorXcd w = eigenvectors_.adjoint() * psi;
    for (Eigen::Index k = 0; k < dim; ++k)
        w[k] *= std::polar(1.0, -eigenvalues_[k] * t);
    Eigen::VectorXcd out = eigenvectors_ * w;
    StateVector result(num_qubits_);
    Eigen::Map<Eigen::VectorXcd>(result.amplitudes().data(), dim) = out;
    return result;
}

StateVector exact_evolve(const PauliSum& hamiltonian, const StateVector& state,
                         double t) {
    static std::mutex cache_mutex;
    static std::unordered_map<std::string, std::shared_ptr<const ExactEvolver>> cache;

    const std::string key =
        std::to_string(hamiltonian.num_qubits()) + "\n" + hamiltonian.to_text();
    std::shared_ptr<const ExactEvolver> evolver;
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        if (auto it = cache.find(key); it != cache.end()) evolver = it->second;
    }
    if (!evolver) {
        evolver = std::make_shared<const ExactEvolver>(hamiltonian);
        std::lock_guard<std::mutex> lock(cache_mutex);
        cache.emplace(key, evolver);
    }
    return evolver->evolve(state, t);
}

}  // namespace pvqd
