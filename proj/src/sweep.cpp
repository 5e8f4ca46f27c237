#include "pvqd/sweep.hpp"

#include <algorithm>
#include <stdexcept>

namespace pvqd {

namespace {

// Unbiased uniform draw in [0, n) by rejection.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

}  // namespace

SweepState make_sweep_state(const SweepPolicy& policy) {
    if (policy.kind == SweepPolicy::Kind::Fidelity && policy.loss_threshold <= 0.0)
        throw std::invalid_argument("fidelity sweep needs a positive loss threshold");
    if (policy.escalation && policy.escalation->stagnation_window < 1)
        throw std::invalid_argument("escalation window must be at least 1");
    if (policy.escalation && policy.escalation->max_simultaneous_blocks < 1)
        throw std::invalid_argument("escalation width must be at least 1");
    SweepState state;
    state.rng.seed(policy.rng_seed);
    return state;
}

BlockMask select_mask(const SweepPolicy& policy, SweepState& state,
                      const OptimizeResult* prev_result, std::size_t num_blocks) {
    const auto n = static_cast<std::uint32_t>(num_blocks);
    switch (policy.kind) {
        case SweepPolicy::Kind::Full:
            return BlockMask::all(num_blocks);

        case SweepPolicy::Kind::Sequential: {
            const std::uint32_t chosen = state.current_block;
            state.current_block = (state.current_block + 1) % n;
            return BlockMask({chosen}, num_blocks);
        }

        case SweepPolicy::Kind::Random: {
            const auto chosen = static_cast<std::uint32_t>(uniform_below(state.rng, n));
            return BlockMask({chosen}, num_blocks);
        }

        case SweepPolicy::Kind::Fidelity: {
            if (policy.fidelity_reset_each_step) state.current_block = 0;
            if (prev_result) {
                if (prev_result->final_loss > policy.loss_threshold) {
                    ++state.stagnation_counter;
                } else {
                    state.stagnation_counter = 0;
                    state.current_block = (state.current_block + 1) % n;
                }
            }
            if (policy.escalation &&
                state.stagnation_counter >= policy.escalation->stagnation_window) {
                const int cap = std::min<int>(policy.escalation->max_simultaneous_blocks,
                                              static_cast<int>(n));
                state.active_width = std::min(state.active_width + 1, cap);
                state.stagnation_counter = 0;
            }
            std::vector<std::uint32_t> blocks;
            const int width = std::min<int>(state.active_width, static_cast<int>(n));
            for (int i = 0; i < width; ++i)
                blocks.push_back((state.current_block + i) % n);
            return BlockMask(std::move(blocks), num_blocks);
        }
    }
    throw std::logic_error("unreachable sweep kind");
}

ParamVector warm_start_initial(const SweepPolicy& policy, const SweepState& state,
                               const ParamVector& theta, const BlockMask& new_mask,
                               std::size_t block_size) {
    ParamVector init(theta.size(), 0.0);
    if (policy.warm_start_zeta == 0.0) return init;
    if (state.last_blocks.empty()) return init;
    if (new_mask.blocks() == state.last_blocks) return init;

    // Source: the first block of the previous step's mask, taken as its
    // absolute post-update sub-vector (or the increment when configured).
    const std::size_t src = state.last_blocks.front();
    const ParamVector& source = policy.warm_start_use_increment
                                    ? state.last_d_theta_star
                                    : theta;
    for (const std::uint32_t b : new_mask.blocks()) {
        if (std::find(state.last_blocks.begin(), state.last_blocks.end(), b) !=
            state.last_blocks.end())
            continue;  // already optimized last step
        for (std::size_t i = 0; i < block_size; ++i)
            init[b * block_size + i] =
                policy.warm_start_zeta * source[src * block_size + i];
    }
    return init;
}

}  // namespace pvqd
