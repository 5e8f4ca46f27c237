#include <doctest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "pvqd/state_vector.hpp"

using namespace pvqd;
constexpr double kPi = std::numbers::pi;

namespace {

PauliRotationGate random_gate(std::uint32_t num_qubits, std::mt19937_64& rng) {
    const std::size_t width = 1 + rng() % std::min<std::uint32_t>(3, num_qubits);
    std::vector<std::uint32_t> support;
    while (support.size() < width) {
        const auto q = static_cast<std::uint32_t>(rng() % num_qubits);
        if (std::find(support.begin(), support.end(), q) == support.end())
            support.push_back(q);
    }
    std::vector<Pauli> paulis;
    for (std::size_t i = 0; i < width; ++i)
        paulis.push_back(static_cast<Pauli>(rng() % 3));
    return make_rotation(std::move(support), std::move(paulis), 0.0);
}

}  // namespace

TEST_CASE("zero angle leaves any state unchanged") {
    std::mt19937_64 rng(11);
    StateVector s = oracles::random_state(4, 3);
    const StateVector before = s;
    for (int i = 0; i < 10; ++i)
        apply_pauli_rotation(s, random_gate(4, rng), 0.0);
    for (std::size_t i = 0; i < s.dimension(); ++i)
        CHECK(s.amplitudes()[i] == before.amplitudes()[i]);
}

TEST_CASE("X pi rotation maps |0> to -i|1>") {
    StateVector s(1);
    apply_pauli_rotation(s, make_rotation({0}, {Pauli::X}, 0.0), kPi);
    CHECK(std::abs(s.amplitudes()[0]) < 1e-15);
    CHECK(std::abs(s.amplitudes()[1] - cdouble(0, -1)) < 1e-15);
}

TEST_CASE("ZZ rotation phases |00> by exp(-i phi/2)") {
    const double phi = 0.7331;
    StateVector s(2);
    apply_pauli_rotation(s, make_rotation({0, 1}, {Pauli::Z, Pauli::Z}, 0.0), phi);
    CHECK(std::abs(s.amplitudes()[0] - std::polar(1.0, -phi / 2)) < 1e-15);
}

TEST_CASE("kernels match explicit Kronecker-product matrices") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> angle(-2.5, 2.5);
    for (std::uint32_t n = 1; n <= 4; ++n) {
        for (int rep = 0; rep < 25; ++rep) {
            const PauliRotationGate gate = random_gate(n, rng);
            const double a = angle(rng);
            StateVector s = oracles::random_state(n, 1000 * n + rep);
            const oracles::Vector expected =
                oracles::rotation_matrix(n, gate, a) * oracles::to_eigen(s);
            apply_pauli_rotation(s, gate, a);
            for (std::size_t i = 0; i < s.dimension(); ++i)
                CHECK(std::abs(s.amplitudes()[i] -
                               expected[static_cast<Eigen::Index>(i)]) < 1e-12);
        }
    }
}

TEST_CASE("bare Pauli word application matches matrices") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        const PauliRotationGate gate = random_gate(3, rng);
        StateVector s = oracles::random_state(3, 500 + rep);
        std::vector<std::pair<std::uint32_t, Pauli>> word;
        for (std::size_t i = 0; i < gate.support.size(); ++i)
            word.emplace_back(gate.support[i], gate.paulis[i]);
        const oracles::Vector expected =
            oracles::word_matrix(3, word) * oracles::to_eigen(s);
        apply_pauli_word(s, gate);
        for (std::size_t i = 0; i < s.dimension(); ++i)
            CHECK(std::abs(s.amplitudes()[i] - expected[static_cast<Eigen::Index>(i)]) <
                  1e-12);
    }
}

TEST_CASE("norm preserved through long random gate sequences") {
    std::mt19937_64 rng(401);
    std::uniform_real_distribution<double> angle(-3.0, 3.0);
    for (std::uint32_t n : {2u, 5u, 8u}) {
        StateVector s(n);
        for (int i = 0; i < 100; ++i)
            apply_pauli_rotation(s, random_gate(n, rng), angle(rng));
        CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("rotation composition and inverse") {
    std::mt19937_64 rng(55);
    const PauliRotationGate gate = random_gate(3, rng);
    StateVector s = oracles::random_state(3, 21);
    StateVector composed = s;
    apply_pauli_rotation(composed, gate, 0.4);
    apply_pauli_rotation(composed, gate, 0.9);
    StateVector direct = s;
    apply_pauli_rotation(direct, gate, 1.3);
    for (std::size_t i = 0; i < s.dimension(); ++i)
        CHECK(std::abs(composed.amplitudes()[i] - direct.amplitudes()[i]) < 1e-12);

    apply_pauli_rotation(composed, gate, -1.3);
    for (std::size_t i = 0; i < s.dimension(); ++i)
        CHECK(std::abs(composed.amplitudes()[i] - s.amplitudes()[i]) < 1e-12);
}

TEST_CASE("gate validation errors") {
    StateVector s(2);
    CHECK_THROWS_AS(
        apply_pauli_rotation(s, make_rotation({5}, {Pauli::X}, 0.0), 1.0),
        std::invalid_argument);
    CHECK_THROWS_AS(
        apply_pauli_rotation(s, make_rotation({0, 0}, {Pauli::X, Pauli::Z}, 0.0), 1.0),
        std::invalid_argument);
    CHECK_THROWS_AS(apply_pauli_rotation(s, make_rotation({0}, {Pauli::X}, 0.0),
                                         std::numeric_limits<double>::quiet_NaN()),
                    std::invalid_argument);
}

TEST_CASE("inner product basics") {
    const StateVector zero(3);
    CHECK(inner_product(zero, zero) == cdouble(1.0, 0.0));

    const StateVector one = StateVector::basis_state(1, 1);
    const StateVector z(1);
    CHECK(std::abs(inner_product(z, one)) == 0.0);

    StateVector a = oracles::random_state(3, 5);
    StateVector b = oracles::random_state(3, 6);
    const double before = std::abs(inner_product(a, b));
    std::mt19937_64 rng(77);
    const PauliRotationGate gate = random_gate(3, rng);
    apply_pauli_rotation(a, gate, 0.8);
    apply_pauli_rotation(b, gate, 0.8);
    CHECK(std::abs(inner_product(a, b)) == doctest::Approx(before).epsilon(1e-12));

    const StateVector other(2);
    CHECK_THROWS_AS(inner_product(zero, other), std::invalid_argument);
}

TEST_CASE("pauli_bracket agrees with explicit application") {
    std::mt19937_64 rng(31);
    for (int rep = 0; rep < 10; ++rep) {
        const PauliRotationGate gate = random_gate(4, rng);
        const StateVector a = oracles::random_state(4, 800 + rep);
        const StateVector b = oracles::random_state(4, 900 + rep);
        StateVector pb = b;
        apply_pauli_word(pb, gate);
        const cdouble direct = inner_product(a, pb);
        CHECK(std::abs(pauli_bracket(a, gate, b) - direct) < 1e-13);
    }
}

TEST_CASE("expectation of magnetization observables") {
    const std::uint32_t n = 5;
    std::vector<PauliTerm> zs, xs;
    for (std::uint32_t q = 0; q < n; ++q) {
        zs.push_back({1.0, {{q, Pauli::Z}}});
        xs.push_back({1.0, {{q, Pauli::X}}});
    }
    const PauliSum sigma_z(n, zs);
    const PauliSum sigma_x(n, xs);
    const StateVector zero(n);
    CHECK(expectation(zero, sigma_z) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(expectation(zero, sigma_x) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("tfim energy of the |+...+> state") {
    // With J=-0.25, h=-1 the couplings average to zero on |+> and each field
    // term contributes +1, so <H> = 4 on four qubits.
    const PauliSum h = build_tfim(4, -0.25, -1.0);
    StateVector plus(4);
    for (std::uint32_t q = 0; q < 4; ++q)
        apply_pauli_rotation(plus, make_rotation({q}, {Pauli::Y}, 0.0), kPi / 2);
    CHECK(expectation(plus, h) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("expectation matches dense quadratic form on random states") {
    const PauliSum h = build_xyz(4, 1.0, 0.8, 0.6);
    const oracles::Matrix hm = oracles::pauli_sum_matrix(h);
    for (int rep = 0; rep < 5; ++rep) {
        const StateVector s = oracles::random_state(4, 40 + rep);
        const oracles::Vector v = oracles::to_eigen(s);
        const double expected = (v.adjoint() * hm * v)(0, 0).real();
        CHECK(expectation(s, h) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("infidelity limits and phase invariance") {
    const StateVector a = oracles::random_state(4, 13);
    CHECK(infidelity(a, a) == doctest::Approx(0.0).epsilon(1e-14));

    const StateVector zero(1);
    const StateVector one = StateVector::basis_state(1, 1);
    CHECK(infidelity(zero, one) == doctest::Approx(1.0).epsilon(1e-14));

    StateVector phased = a;
    for (auto& amp : phased.amplitudes()) amp *= std::polar(1.0, 0.923);
    CHECK(infidelity(a, phased) == doctest::Approx(0.0).epsilon(1e-12));
}
