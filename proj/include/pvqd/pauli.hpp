#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <utility>
#include <vector>

namespace pvqd {

enum class Pauli : std::uint8_t { X, Y, Z };

char pauli_char(Pauli p);
Pauli pauli_from_char(char c);

/// One weighted Pauli word, e.g. -0.25 * Z0*Z1. Factors are kept sorted by
/// qubit index; identity factors are never stored, so an empty word is the
/// identity (disallowed inside a PauliSum).
struct PauliTerm {
    double coefficient = 0.0;
    std::vector<std::pair<std::uint32_t, Pauli>> word;

    /// Bit set for every qubit carrying an X or Y factor (basis-flip part).
    std::uint64_t flip_mask() const;
    /// Bit set for every qubit carrying a Y or Z factor (sign part).
    std::uint64_t phase_mask() const;
    int y_count() const;

    bool operator==(const PauliTerm&) const = default;
};

/// A Hermitian operator as a real-weighted sum of Pauli words on a fixed
/// qubit register. Immutable after construction.
class PauliSum {
  public:
    PauliSum(std::uint32_t num_qubits, std::vector<PauliTerm> terms);

    std::uint32_t num_qubits() const { return num_qubits_; }
    const std::vector<PauliTerm>& terms() const { return terms_; }
    std::size_t num_terms() const { return terms_.size(); }

    /// Text form, one term per line: `<coeff> <word>` with words like
    /// `Z0*Z1` or `X3`.
    std::string to_text() const;

    bool operator==(const PauliSum&) const = default;

  private:
    std::uint32_t num_qubits_;
    std::vector<PauliTerm> terms_;
};

/// Transverse-field Ising chain -J sum Z_i Z_{i+1} - h sum X_i. An open
/// chain of N sites has 2N-1 terms, couplings first.
PauliSum build_tfim(std::uint32_t num_qubits, double coupling_j, double field_h,
                    bool periodic = false);

/// Anisotropic Heisenberg chain sum_i (Jx XX + Jy YY + Jz ZZ) on neighboring
/// sites, bond-major term order (XX, YY, ZZ per bond). Open chain: 3(N-1)
/// terms.
PauliSum build_xyz(std::uint32_t num_qubits, double jx, double jy, double jz,
                   bool periodic = false);

/// Parses the one-term-per-line text format. `#` starts a comment; blank
/// lines are skipped.
PauliSum parse_pauli_sum(std::istream& in, std::uint32_t num_qubits);
PauliSum parse_pauli_sum(const std::string& text, std::uint32_t num_qubits);

}  // namespace pvqd
