#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "pvqd/dense.hpp"
#include "pvqd/optimize.hpp"

using namespace pvqd;

namespace {

LossContext make_context(const PauliSum& h, int blocks, double dt, int p,
                         ParamVector theta = {}, StateVector* initial = nullptr) {
    BlockedAnsatz ansatz(h, blocks);
    if (theta.empty()) theta.assign(ansatz.num_parameters(), 0.0);
    StateVector init = initial ? *initial : StateVector(h.num_qubits());
    return LossContext(std::move(ansatz), std::move(theta),
                       trotter_step_circuit(h, dt, p), dt, std::move(init));
}

ParamVector trotter_angles(const PauliSum& h, double dt) {
    ParamVector v;
    for (const auto& term : h.terms()) v.push_back(2.0 * term.coefficient * dt);
    return v;
}

}  // namespace

TEST_CASE("block mask construction") {
    const BlockMask mask({2, 0}, 3);
    CHECK(mask.blocks() == std::vector<std::uint32_t>{0, 2});
    CHECK(mask.cardinality() == 2);
    CHECK(mask.slots(2) == std::vector<std::size_t>{0, 1, 4, 5});
    CHECK(BlockMask::all(3).blocks() == std::vector<std::uint32_t>{0, 1, 2});
    CHECK_THROWS_AS(BlockMask({}, 2), std::invalid_argument);
    CHECK_THROWS_AS(BlockMask({2}, 2), std::invalid_argument);
}

TEST_CASE("exactly representable target gives zero loss") {
    // Single-term Hamiltonian: the one-block ansatz at the Trotter angles
    // implements the step exactly.
    const PauliSum h(2, {{0.8, {{0, Pauli::X}}}});
    const LossContext ctx = make_context(h, 1, 0.1, 8);
    CHECK(pvqd_loss(ctx, trotter_angles(h, 0.1)) < 1e-10);
}

TEST_CASE("loss at zero displacement matches the frozen dense-oracle value") {
    // Frozen from the test-side Kronecker oracle below: TFIM(2), J=-0.25,
    // h=-1, dt=0.01, p=8, theta = d_theta = 0.
    constexpr double kFrozen = 1.9998292396539163;

    const PauliSum h = build_tfim(2, -0.25, -1.0);
    const double dt = 0.01;
    const oracles::Matrix step = oracles::circuit_matrix(trotter_step_circuit(h, dt, 8));
    const oracles::Vector zero = oracles::to_eigen(StateVector(2));
    const double overlap_sq = std::norm((zero.adjoint() * step * zero)(0, 0));
    const double oracle_loss = (1.0 - overlap_sq) / (dt * dt);
    CHECK(oracle_loss == doctest::Approx(kFrozen).epsilon(1e-12));

    const LossContext ctx = make_context(h, 2, dt, 8);
    CHECK(pvqd_loss(ctx, ParamVector(ctx.ansatz().num_parameters(), 0.0)) ==
          doctest::Approx(kFrozen).epsilon(1e-11));
}

TEST_CASE("loss is invariant under a global phase of the initial state") {
    const PauliSum h = build_tfim(3, -0.25, -1.0);
    StateVector init(3);
    const LossContext plain = make_context(h, 2, 0.05, 4);
    StateVector phased = init;
    for (auto& a : phased.amplitudes()) a *= std::polar(1.0, 1.234);
    const LossContext rotated = make_context(h, 2, 0.05, 4, {}, &phased);

    ParamVector d(plain.ansatz().num_parameters(), 0.0);
    d[0] = 0.2;
    d[3] = -0.4;
    CHECK(pvqd_loss(plain, d) == doctest::Approx(pvqd_loss(rotated, d)).epsilon(1e-12));
}

TEST_CASE("loss is non-negative") {
    const PauliSum h = build_xyz(3, 1.0, 0.8, 0.6);
    const LossContext ctx = make_context(h, 2, 0.05, 4);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-1.5, 1.5);
    for (int rep = 0; rep < 20; ++rep) {
        ParamVector d(ctx.ansatz().num_parameters());
        for (auto& v : d) v = dist(rng);
        CHECK(pvqd_loss(ctx, d) >= 0.0);
    }
}

TEST_CASE("masked-out gradient entries are exactly zero") {
    const PauliSum h = build_tfim(4, -0.25, -1.0);
    const LossContext ctx = make_context(h, 2, 0.05, 4);
    ParamVector d(ctx.ansatz().num_parameters(), 0.1);
    const BlockMask mask({0}, 2);
    const ParamVector g = loss_gradient(ctx, d, mask);
    for (std::size_t s = ctx.ansatz().block_size(); s < g.size(); ++s)
        CHECK(g[s] == 0.0);
}

TEST_CASE("gradient agrees with central finite differences") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    for (const PauliSum& h : {build_tfim(4, -0.25, -1.0), build_xyz(4, 1.0, 0.8, 0.6)}) {
        for (int rep = 0; rep < 10; ++rep) {
            const BlockedAnsatz ansatz(h, 2);
            ParamVector theta(ansatz.num_parameters()), d(ansatz.num_parameters());
            for (auto& v : theta) v = dist(rng);
            for (auto& v : d) v = dist(rng);
            const LossContext ctx = make_context(h, 2, 0.05, 4, theta);
            const std::vector<std::vector<std::uint32_t>> masks = {{0}, {1}, {0, 1}};
            const BlockMask mask(masks[rep % masks.size()], 2);
            const ParamVector analytic = loss_gradient(ctx, d, mask);
            const ParamVector numeric = oracles::fd_gradient(ctx, d, mask);
            for (std::size_t i = 0; i < analytic.size(); ++i)
                CHECK(std::abs(analytic[i] - numeric[i]) < 1e-6);
        }
    }
}

TEST_CASE("quasi-Newton converges on the single-term problem") {
    const PauliSum h(2, {{0.8, {{0, Pauli::X}}}});
    const double dt = 0.1;
    const LossContext ctx = make_context(h, 1, dt, 8);
    OptimizerConfig cfg;
    cfg.loss_tolerance = 1e-13;
    cfg.gradient_tolerance = 1e-9;
    const BlockMask mask = BlockMask::all(1);
    const OptimizeResult res = minimize(ctx, mask, ParamVector(1, 0.0), cfg);
    CHECK(res.final_loss < 1e-10);
    CHECK(res.iterations <= 20);
    CHECK(res.d_theta_star[0] == doctest::Approx(2.0 * 0.8 * dt).epsilon(1e-5));
    CHECK_FALSE(res.budget_exhausted);

    SUBCASE("gradient is stationary at the optimum") {
        const ParamVector g = loss_gradient(ctx, res.d_theta_star, mask);
        CHECK(std::abs(g[0]) < 1e-6);
    }

    SUBCASE("restarting at the optimum returns immediately") {
        const OptimizeResult again = minimize(ctx, mask, res.d_theta_star, cfg);
        CHECK(again.iterations <= 1);
        CHECK(again.final_loss <= res.final_loss * (1 + 1e-9) + 1e-18);
    }
}

TEST_CASE("accepted losses are non-increasing with a full mask") {
    const PauliSum h = build_tfim(4, -0.25, -1.0);
    const LossContext ctx = make_context(h, 2, 0.05, 8);
    OptimizerConfig cfg;
    const OptimizeResult res =
        minimize(ctx, BlockMask::all(2), ParamVector(ctx.ansatz().num_parameters(), 0.0),
                 cfg);
    REQUIRE(res.loss_trace.size() >= 2);
    for (std::size_t i = 1; i < res.loss_trace.size(); ++i)
        CHECK(res.loss_trace[i] <= res.loss_trace[i - 1] + 1e-15);
    CHECK(res.final_loss == res.loss_trace.back());
}

TEST_CASE("masked slots stay untouched by minimize") {
    const PauliSum h = build_tfim(3, -0.25, -1.0);
    const LossContext ctx = make_context(h, 2, 0.05, 4);
    OptimizerConfig cfg;
    const OptimizeResult res =
        minimize(ctx, BlockMask({1}, 2), ParamVector(ctx.ansatz().num_parameters(), 0.0),
                 cfg);
    for (std::size_t s = 0; s < ctx.ansatz().block_size(); ++s)
        CHECK(res.d_theta_star[s] == 0.0);
}

TEST_CASE("iteration budget is flagged, not thrown") {
    const PauliSum h = build_xyz(4, 1.0, 0.8, 0.6);
    const LossContext ctx = make_context(h, 2, 0.05, 8);
    OptimizerConfig cfg;
    cfg.max_iterations = 1;
    cfg.loss_tolerance = 1e-300;
    cfg.gradient_tolerance = 1e-300;
    const OptimizeResult res = minimize(
        ctx, BlockMask::all(2), ParamVector(ctx.ansatz().num_parameters(), 0.0), cfg);
    CHECK(res.iterations == 1);
    CHECK(res.budget_exhausted);
}

TEST_CASE("mode mismatch is rejected") {
    const PauliSum h = build_tfim(2, -0.25, -1.0);
    const LossContext ctx = make_context(h, 1, 0.05, 4);
    OptimizerConfig cfg;
    cfg.mode = OptimizerConfig::Mode::Spsa;
    CHECK_THROWS_AS(minimize(ctx, BlockMask::all(1), ParamVector(3, 0.0), cfg),
                    std::invalid_argument);
    cfg.mode = OptimizerConfig::Mode::GradientQuasiNewton;
    CHECK_THROWS_AS(spsa_minimize(ctx, BlockMask::all(1), ParamVector(3, 0.0), cfg),
                    std::invalid_argument);
}

TEST_CASE("spsa is deterministic per seed and respects the mask") {
    const PauliSum h = build_tfim(3, -0.25, -1.0);
    const LossContext ctx = make_context(h, 2, 0.05, 4);
    OptimizerConfig cfg;
    cfg.mode = OptimizerConfig::Mode::Spsa;
    cfg.max_iterations = 50;
    cfg.rng_seed = 42;
    const BlockMask mask({0}, 2);
    const ParamVector d0(ctx.ansatz().num_parameters(), 0.0);
    const OptimizeResult a = spsa_minimize(ctx, mask, d0, cfg);
    const OptimizeResult b = spsa_minimize(ctx, mask, d0, cfg);
    CHECK(a.d_theta_star == b.d_theta_star);
    CHECK(a.final_loss == b.final_loss);
    CHECK(a.loss_evaluations == b.loss_evaluations);
    for (std::size_t s = ctx.ansatz().block_size(); s < d0.size(); ++s)
        CHECK(a.d_theta_star[s] == 0.0);

    cfg.rng_seed = 43;
    const OptimizeResult c = spsa_minimize(ctx, mask, d0, cfg);
    CHECK(c.d_theta_star != a.d_theta_star);
}

TEST_CASE("spsa reaches 1e-3 on the single-term surrogate for most seeds") {
    const PauliSum h(2, {{0.8, {{0, Pauli::X}}}});
    const LossContext ctx = make_context(h, 1, 0.1, 8);
    OptimizerConfig cfg;
    cfg.mode = OptimizerConfig::Mode::Spsa;
    cfg.max_iterations = 200;
    cfg.loss_tolerance = 1e-6;
    std::vector<double> finals;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        cfg.rng_seed = seed;
        finals.push_back(
            spsa_minimize(ctx, BlockMask::all(1), ParamVector(1, 0.0), cfg).final_loss);
    }
    std::sort(finals.begin(), finals.end());
    const double median = 0.5 * (finals[9] + finals[10]);
    CHECK(median < 1e-3);
}
