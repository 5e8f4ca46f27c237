#include "pvqd/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pvqd {

char pauli_char(Pauli p) {
    switch (p) {
        case Pauli::X: return 'X';
        case Pauli::Y: return 'Y';
        case Pauli::Z: return 'Z';
    }
    throw std::logic_error("unreachable Pauli value");
}

Pauli pauli_from_char(char c) {
    switch (c) {
        case 'X': case 'x': return Pauli::X;
        case 'Y': case 'y': return Pauli::Y;
        case 'Z': case 'z': return Pauli::Z;
        default:
            throw std::invalid_argument(std::string("not a Pauli letter: '") + c + "'");
    }
}

std::uint64_t PauliTerm::flip_mask() const {
    std::uint64_t m = 0;
    for (const auto& [q, p] : word)
        if (p != Pauli::Z) m |= std::uint64_t{1} << q;
    return m;
}

std::uint64_t PauliTerm::phase_mask() const {
    std::uint64_t m = 0;
    for (const auto& [q, p] : word)
        if (p != Pauli::X) m |= std::uint64_t{1} << q;
    return m;
}

int PauliTerm::y_count() const {
    int n = 0;
    for (const auto& [q, p] : word)
        if (p == Pauli::Y) ++n;
    return n;
}

PauliSum::PauliSum(std::uint32_t num_qubits, std::vector<PauliTerm> terms)
    : num_qubits_(num_qubits), terms_(std::move(terms)) {
    if (num_qubits_ == 0)
        throw std::invalid_argument("PauliSum needs at least one qubit");
    if (terms_.empty())
        throw std::invalid_argument("PauliSum needs at least one term");
    for (auto& term : terms_) {
        if (!std::isfinite(term.coefficient))
            throw std::invalid_argument("PauliSum coefficient is not finite");
        if (term.word.empty())
            throw std::invalid_argument("identity-only Pauli word is not allowed");
        std::sort(term.word.begin(), term.word.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 0; i < term.word.size(); ++i) {
            if (term.word[i].first >= num_qubits_)
                throw std::invalid_argument("Pauli factor qubit index out of range");
            if (i > 0 && term.word[i].first == term.word[i - 1].first)
                throw std::invalid_argument("duplicate qubit in Pauli word");
        }
    }
}

std::string PauliSum::to_text() const {
    std::ostringstream out;
    out.precision(17);
    for (const auto& term : terms_) {
        out << term.coefficient << ' ';
        for (std::size_t i = 0; i < term.word.size(); ++i) {
            if (i > 0) out << '*';
            out << pauli_char(term.word[i].second) << term.word[i].first;
        }
        out << '\n';
    }
    return out.str();
}

PauliSum build_tfim(std::uint32_t num_qubits, double coupling_j, double field_h,
                    bool periodic) {
    if (num_qubits < 2)
        throw std::invalid_argument("TFIM chain needs at least 2 sites");
    std::vector<PauliTerm> terms;
    const std::uint32_t bonds = periodic ? num_qubits : num_qubits - 1;
    for (std::uint32_t i = 0; i < bonds; ++i) {
        const std::uint32_t j = (i + 1) % num_qubits;
        terms.push_back({-coupling_j, {{i, Pauli::Z}, {j, Pauli::Z}}});
    }
    for (std::uint32_t i = 0; i < num_qubits; ++i)
        terms.push_back({-field_h, {{i, Pauli::X}}});
    return PauliSum(num_qubits, std::move(terms));
}

PauliSum build_xyz(std::uint32_t num_qubits, double jx, double jy, double jz,
                   bool periodic) {
    if (num_qubits < 2)
        throw std::invalid_argument("XYZ chain needs at least 2 sites");
    std::vector<PauliTerm> terms;
    const std::uint32_t bonds = periodic ? num_qubits : num_qubits - 1;
    for (std::uint32_t i = 0; i < bonds; ++i) {
        const std::uint32_t j = (i + 1) % num_qubits;
        terms.push_back({jx, {{i, Pauli::X}, {j, Pauli::X}}});
        terms.push_back({jy, {{i, Pauli::Y}, {j, Pauli::Y}}});
        terms.push_back({jz, {{i, Pauli::Z}, {j, Pauli::Z}}});
    }
    return PauliSum(num_qubits, std::move(terms));
}

namespace {

PauliTerm parse_term_line(const std::string& line, int line_no) {
    std::istringstream in(line);
    PauliTerm term;
    if (!(in >> term.coefficient))
        throw std::invalid_argument("line " + std::to_string(line_no) +
                                    ": expected a coefficient");
    std::string word;
    if (!(in >> word))
        throw std::invalid_argument("line " + std::to_string(line_no) +
                                    ": expected a Pauli word after the coefficient");
    std::string trailing;
    if (in >> trailing)
        throw std::invalid_argument("line " + std::to_string(line_no) +
                                    ": unexpected trailing token '" + trailing + "'");
    std::size_t pos = 0;
    while (pos < word.size()) {
        const Pauli p = pauli_from_char(word[pos]);
        ++pos;
        std::size_t digits = 0;
        while (pos + digits < word.size() && std::isdigit(word[pos + digits])) ++digits;
        if (digits == 0)
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": Pauli letter without a qubit index in '" + word + "'");
        term.word.emplace_back(
            static_cast<std::uint32_t>(std::stoul(word.substr(pos, digits))), p);
        pos += digits;
        if (pos < word.size()) {
            if (word[pos] != '*')
                throw std::invalid_argument("line " + std::to_string(line_no) +
                                            ": expected '*' between factors in '" + word + "'");
            ++pos;
            if (pos == word.size())
                throw std::invalid_argument("line " + std::to_string(line_no) +
                                            ": dangling '*' in '" + word + "'");
        }
    }
    return term;
}

}  // namespace

PauliSum parse_pauli_sum(std::istream& in, std::uint32_t num_qubits) {
    std::vector<PauliTerm> terms;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        terms.push_back(parse_term_line(line, line_no));
    }
    return PauliSum(num_qubits, std::move(terms));
}

PauliSum parse_pauli_sum(const std::string& text, std::uint32_t num_qubits) {
    std::istringstream in(text);
    return parse_pauli_sum(in, num_qubits);
}

}  // namespace pvqd
