#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "pvqd/optimize.hpp"

namespace pvqd {

struct EscalationConfig {
    int stagnation_window = 5;       // consecutive above-threshold steps
    int max_simultaneous_blocks = 2;
};

/// Block-selection strategy for one evolution run. Immutable and shareable.
struct SweepPolicy {
    enum class Kind { Full, Sequential, Random, Fidelity };
    Kind kind = Kind::Full;
    double loss_threshold = 1e-7;  // L_o, fidelity kind only
    std::uint64_t rng_seed = 0;    // random kind only
    std::optional<EscalationConfig> escalation;
    double warm_start_zeta = 0.0;  // 0 disables warm starting
    bool fidelity_reset_each_step = false;
    bool warm_start_use_increment = false;
};

/// Mutable selection state, owned by one evolution loop.
struct SweepState {
    std::uint32_t current_block = 0;
    int active_width = 1;
    int stagnation_counter = 0;
    std::vector<std::uint32_t> last_blocks;  // previous step's mask, empty initially
    ParamVector last_d_theta_star;
    std::mt19937_64 rng;
};

SweepState make_sweep_state(const SweepPolicy& policy);

/// Chooses the blocks to optimize this step and advances the state.
/// `prev_result` is the previous step's optimization outcome (nullptr on the
/// first step).
BlockMask select_mask(const SweepPolicy& policy, SweepState& state,
                      const OptimizeResult* prev_result, std::size_t num_blocks);

/// Initial iterate for the step: zero, or the previous block's optimized
/// parameters scaled by zeta on each newly selected block.
ParamVector warm_start_initial(const SweepPolicy& policy, const SweepState& state,
                               const ParamVector& theta, const BlockMask& new_mask,
                               std::size_t block_size);

}  // namespace pvqd
