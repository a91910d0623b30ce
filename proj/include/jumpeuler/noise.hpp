#pragma once

// Compound-Poisson jump streams and Wiener increment grids.
//
// The fine grid is always the source of truth: a rare (coarse) grid is
// obtained by aggregating fine increments, never drawn independently, so a
// rare/fine scheme pair sees coupled noise. Generation order of grid entries
// is fixed as (step-major, dimension-minor) and is part of the
// reproducibility contract: requesting the grid in step slabs must not change
// the draw sequence.

#include <cstdint>
#include <span>
#include <vector>

#include "jumpeuler/model.hpp"
#include "jumpeuler/rng.hpp"

namespace jumpeuler {

// Arrival times and marks of the compound Poisson driver on (0, T].
struct JumpStream {
    std::vector<double> times;  // strictly increasing, in (0, T]
    std::vector<double> marks;  // |times| marks of dimension mark_dim, flattened
    int mark_dim = 1;
    double intensity = 0.0;
    double horizon = 0.0;

    std::size_t count() const { return times.size(); }
    std::span<const double> mark(std::size_t k) const {
        return {marks.data() + k * static_cast<std::size_t>(mark_dim),
                static_cast<std::size_t>(mark_dim)};
    }
};

// Per-step, per-dimension Wiener increments; entry (i,k) = W_k(t_{i+1}) - W_k(t_i).
struct NoiseGrid {
    std::int64_t steps = 0;
    int dims = 0;
    double step_size = 0.0;      // T / steps
    std::vector<double> increments;  // steps x dims, row-major (step-major, dim-minor)

    double at(std::int64_t step, int dim) const {
        return increments[static_cast<std::size_t>(step) * dims + dim];
    }
};

// Arrival times as cumulative iid Exponential(lambda) gaps truncated at T;
// marks drawn eagerly from the law's sampler on the derived Marks channel,
// one per arrival, after all times. key.channel must be Jumps.
JumpStream generate_jump_stream(const JumpLaw& law, double horizon, const StreamKey& key);

// steps x dims of iid Normal(0, T/steps); key.channel must be WienerFine.
// dims may be zero (drift+jumps only schemes).
NoiseGrid generate_fine_grid(int dims, std::int64_t steps, double horizon,
                             const StreamKey& key);

// Rare increment (i,k) = sum of the ratio fine increments under it, summed in
// ascending fine-step order, keeping the first rare_dims dimensions only.
NoiseGrid aggregate_to_rare(const NoiseGrid& fine, std::int64_t ratio, int rare_dims);

}  // namespace jumpeuler
