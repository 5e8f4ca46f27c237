#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pvqd/circuit.hpp"
#include "pvqd/state_vector.hpp"

namespace pvqd {

/// Ansatz blocks whose parameters are free in one optimization. Block indices
/// are kept sorted and distinct; the mask is never empty.
class BlockMask {
  public:
    BlockMask(std::vector<std::uint32_t> blocks, std::size_t num_blocks);

    static BlockMask all(std::size_t num_blocks);

    const std::vector<std::uint32_t>& blocks() const { return blocks_; }
    std::size_t cardinality() const { return blocks_.size(); }

    /// Free parameter slots under the given block size, ascending.
    std::vector<std::size_t> slots(std::size_t block_size) const;

    bool operator==(const BlockMask&) const = default;

  private:
    std::vector<std::uint32_t> blocks_;
};

/// Frozen inputs of one projection step: the ansatz at the committed theta,
/// the Trotterized single-step target, and the time increment. The projected
/// target state |phi> = T U(theta)|init> is computed once at construction.
class LossContext {
  public:
    LossContext(BlockedAnsatz ansatz, ParamVector theta, Circuit target_step,
                double dt, StateVector initial_state);

    const BlockedAnsatz& ansatz() const { return ansatz_; }
    const ParamVector& theta() const { return theta_; }
    double dt() const { return dt_; }
    const StateVector& initial_state() const { return initial_state_; }
    const StateVector& target_state() const { return phi_; }

  private:
    BlockedAnsatz ansatz_;
    ParamVector theta_;
    Circuit target_step_;
    double dt_;
    StateVector initial_state_;
    StateVector phi_;
};

struct SpsaGains {
    double a = 0.0;  // <= 0: calibrated so the first step has magnitude ~0.01
    double c = 0.01;
    double big_a = 10.0;
    double alpha = 0.602;
    double gamma = 0.101;
};

struct OptimizerConfig {
    enum class Mode { GradientQuasiNewton, Spsa };
    Mode mode = Mode::GradientQuasiNewton;
    int max_iterations = 500;
    double gradient_tolerance = 1e-8;
    double loss_tolerance = 1e-9;
    SpsaGains spsa;
    std::uint64_t rng_seed = 0;
};

struct OptimizeResult {
    ParamVector d_theta_star;  // exactly zero outside the mask
    double final_loss = 0.0;
    int iterations = 0;
    long loss_evaluations = 0;
    long gradient_evaluations = 0;
    bool budget_exhausted = false;
    std::vector<double> loss_trace;  // initial loss, then one entry per iteration
};

/// Projection loss (1 - |<phi|U(theta + d_theta)|init>|^2) / dt^2.
double pvqd_loss(const LossContext& ctx, std::span<const double> d_theta);

/// Analytic loss gradient restricted to the masked slots (adjoint-mode
/// differentiation of the overlap); entries outside the mask are exactly 0.
ParamVector loss_gradient(const LossContext& ctx, std::span<const double> d_theta,
                          const BlockMask& mask);

/// Quasi-Newton (L-BFGS, strong Wolfe line search) minimization over the
/// masked slots. Accepted losses are non-increasing; stops on loss tolerance,
/// gradient infinity-norm tolerance, or the iteration budget (the latter is
/// flagged, not an error).
OptimizeResult minimize(const LossContext& ctx, const BlockMask& mask,
                        const ParamVector& d_theta_0, const OptimizerConfig& cfg);

/// SPSA restricted to the masked slots; two loss evaluations per iteration,
/// deterministic for a fixed seed.
OptimizeResult spsa_minimize(const LossContext& ctx, const BlockMask& mask,
                             const ParamVector& d_theta_0, const OptimizerConfig& cfg);

}  // namespace pvqd
