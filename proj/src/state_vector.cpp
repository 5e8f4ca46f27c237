#include "pvqd/state_vector.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace pvqd {

namespace {

constexpr std::uint32_t kMaxQubits = 14;

struct WordMasks {
    std::uint64_t flip = 0;   // X and Y factors
    std::uint64_t phase = 0;  // Y and Z factors
    int y_count = 0;
};

WordMasks gate_masks(const StateVector& state, const PauliRotationGate& gate) {
    if (gate.support.size() != gate.paulis.size())
        throw std::invalid_argument("gate support/paulis length mismatch");
    if (gate.support.empty())
        throw std::invalid_argument("gate acts on no qubits");
    WordMasks m;
    std::uint64_t seen = 0;
    for (std::size_t i = 0; i < gate.support.size(); ++i) {
        const std::uint32_t q = gate.support[i];
        if (q >= state.num_qubits())
            throw std::invalid_argument("gate support qubit " + std::to_string(q) +
                                        " out of range for " +
                                        std::to_string(state.num_qubits()) + " qubits");
        const std::uint64_t bit = std::uint64_t{1} << q;
        if (seen & bit) throw std::invalid_argument("duplicate qubit in gate support");
        seen |= bit;
        switch (gate.paulis[i]) {
            case Pauli::X: m.flip |= bit; break;
            case Pauli::Y: m.flip |= bit; m.phase |= bit; ++m.y_count; break;
            case Pauli::Z: m.phase |= bit; break;
        }
    }
    return m;
}

// Phase of P|x> = phase(x) |x ^ flip>: i^{#Y} * (-1)^{parity(x & phase_mask)}.
inline cdouble word_phase(std::uint64_t x, const WordMasks& m) {
    static constexpr cdouble i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    cdouble p = i_pow[m.y_count & 3];
    if (std::popcount(x & m.phase) & 1) p = -p;
    return p;
}

}  // namespace

StateVector::StateVector(std::uint32_t num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits == 0 || num_qubits > kMaxQubits)
        throw std::invalid_argument("qubit count must be in [1, " +
                                    std::to_string(kMaxQubits) + "]");
    amps_.assign(std::uint64_t{1} << num_qubits, cdouble{0.0, 0.0});
    amps_[0] = 1.0;
}

StateVector StateVector::basis_state(std::uint32_t num_qubits, std::uint64_t bits) {
    StateVector s(num_qubits);
    if (bits >= s.dimension())
        throw std::invalid_argument("basis index out of range");
    s.amps_[0] = 0.0;
    s.amps_[bits] = 1.0;
    return s;
}

double StateVector::norm() const {
    double n2 = 0.0;
    for (const auto& a : amps_) n2 += std::norm(a);
    return std::sqrt(n2);
}

PauliRotationGate make_rotation(std::vector<std::uint32_t> support,
                                std::vector<Pauli> paulis, double angle) {
    return PauliRotationGate{std::move(support), std::move(paulis), angle, -1};
}

PauliRotationGate make_parameterized_rotation(std::vector<std::uint32_t> support,
                                              std::vector<Pauli> paulis, int slot) {
    if (slot < 0) throw std::invalid_argument("parameter slot must be non-negative");
    return PauliRotationGate{std::move(support), std::move(paulis), 0.0, slot};
}

void apply_pauli_rotation(StateVector& state, const PauliRotationGate& gate,
                          double angle) {
    if (!std::isfinite(angle))
        throw std::invalid_argument("rotation angle is not finite");
    const WordMasks m = gate_masks(state, gate);
    auto& amp = state.amplitudes();
    const std::uint64_t dim = state.dimension();
    const double c = std::cos(0.5 * angle);
    const double s = std::sin(0.5 * angle);
    const cdouble mis{0.0, -s};  // -i sin(angle/2)

    if (m.flip == 0) {
        // Pure Z word: diagonal phases exp(-+ i angle/2).
        const cdouble plus = c + mis;   // eigenvalue +1 rows
        const cdouble minus = c - mis;  // eigenvalue -1 rows
        for (std::uint64_t x = 0; x < dim; ++x)
            amp[x] *= (std::popcount(x & m.phase) & 1) ? minus : plus;
        return;
    }

    // Pair each x (pivot bit clear) with x ^ flip (pivot bit set).
    const int pivot = 63 - std::countl_zero(m.flip);
    const std::uint64_t low = (std::uint64_t{1} << pivot) - 1;
    for (std::uint64_t i = 0; i < dim / 2; ++i) {
        const std::uint64_t x = ((i & ~low) << 1) | (i & low);
        const std::uint64_t y = x ^ m.flip;
        const cdouble ax = amp[x];
        const cdouble ay = amp[y];
        amp[x] = c * ax + mis * word_phase(y, m) * ay;
        amp[y] = c * ay + mis * word_phase(x, m) * ax;
    }
}

void apply_pauli_word(StateVector& state, const PauliRotationGate& gate) {
    const WordMasks m = gate_masks(state, gate);
    auto& amp = state.amplitudes();
    const std::uint64_t dim = state.dimension();
    if (m.flip == 0) {
        for (std::uint64_t x = 0; x < dim; ++x)
            amp[x] *= word_phase(x, m);
        return;
    }
    const int pivot = 63 - std::countl_zero(m.flip);
    const std::uint64_t low = (std::uint64_t{1} << pivot) - 1;
    for (std::uint64_t i = 0; i < dim / 2; ++i) {
        const std::uint64_t x = ((i & ~low) << 1) | (i & low);
        const std::uint64_t y = x ^ m.flip;
        const cdouble ax = amp[x];
        amp[x] = word_phase(y, m) * amp[y];
        amp[y] = word_phase(x, m) * ax;
    }
}

cdouble pauli_bracket(const StateVector& a, const PauliRotationGate& gate,
                      const StateVector& b) {
    if (a.num_qubits() != b.num_qubits())
        throw std::invalid_argument("pauli_bracket dimension mismatch");
    const WordMasks m = gate_masks(a, gate);
    const auto& va = a.amplitudes();
    const auto& vb = b.amplitudes();
    cdouble acc{0.0, 0.0};
    for (std::uint64_t z = 0; z < va.size(); ++z)
        acc += std::conj(va[z]) * word_phase(z ^ m.flip, m) * vb[z ^ m.flip];
    return acc;
}

cdouble inner_product(const StateVector& a, const StateVector& b) {
    if (a.num_qubits() != b.num_qubits())
        throw std::invalid_argument("inner product dimension mismatch");
    cdouble acc{0.0, 0.0};
    const auto& va = a.amplitudes();
    const auto& vb = b.amplitudes();
    for (std::uint64_t i = 0; i < va.size(); ++i)
        acc += std::conj(va[i]) * vb[i];
    return acc;
}

double expectation(const StateVector& state, const PauliSum& observable) {
    if (observable.num_qubits() > state.num_qubits())
        throw std::invalid_argument("observable acts on more qubits than the state");
    const auto& amp = state.amplitudes();
    const std::uint64_t dim = state.dimension();
    cdouble total{0.0, 0.0};
    for (const auto& term : observable.terms()) {
        const WordMasks m{term.flip_mask(), term.phase_mask(), term.y_count()};
        cdouble acc{0.0, 0.0};
        if (m.flip == 0) {
            double diag = 0.0;
            for (std::uint64_t x = 0; x < dim; ++x) {
                const double p = std::norm(amp[x]);
                diag += (std::popcount(x & m.phase) & 1) ? -p : p;
            }
            acc = diag;
        } else {
            for (std::uint64_t x = 0; x < dim; ++x)
                acc += std::conj(amp[x]) * word_phase(x ^ m.flip, m) * amp[x ^ m.flip];
        }
        total += term.coefficient * acc;
    }
    if (std::abs(total.imag()) >= 1e-10)
        throw std::runtime_error("expectation has a non-negligible imaginary part: " +
                                 std::to_string(total.imag()));
    return total.real();
}

double infidelity(const StateVector& a, const StateVector& b) {
    const cdouble ov = inner_product(a, b);
    const double f = std::norm(ov);
    const double inf = 1.0 - f;
    if (inf < 0.0) return 0.0;
    if (inf > 1.0) return 1.0;
    return inf;
}

}  // namespace pvqd
