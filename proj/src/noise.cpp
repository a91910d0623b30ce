#include "jumpeuler/noise.hpp"

#include <cmath>

#include "jumpeuler/errors.hpp"

namespace jumpeuler {

JumpStream generate_jump_stream(const JumpLaw& law, double horizon, const StreamKey& key) {
    if (!(horizon > 0.0)) throw InvalidParameter("horizon", "must be > 0");
    if (!(law.intensity >= 0.0)) throw InvalidParameter("intensity", "must be >= 0");

    JumpStream stream;
    stream.mark_dim = law.mark_dim;
    stream.intensity = law.intensity;
    stream.horizon = horizon;
    if (law.intensity == 0.0) return stream;

    RandomStream gaps(key);
    double t = 0.0;
    for (;;) {
        t += gaps.exponential() / law.intensity;
        if (!(t <= horizon)) break;
        stream.times.push_back(t);
    }

    RandomStream marks(key.with_channel(Channel::Marks));
    const std::size_t dprime = static_cast<std::size_t>(law.mark_dim);
    stream.marks.resize(stream.times.size() * dprime);
    for (std::size_t k = 0; k < stream.times.size(); ++k) {
        if (law.mark_sampler) {
            law.mark_sampler(marks, {stream.marks.data() + k * dprime, dprime});
        }  // no sampler: zero marks (models whose jump coefficient ignores y)
    }
    return stream;
}

NoiseGrid generate_fine_grid(int dims, std::int64_t steps, double horizon,
                             const StreamKey& key) {
    if (steps < 1) throw InvalidParameter("steps", "must be >= 1");
    if (dims < 0) throw InvalidParameter("dims", "must be >= 0");
    if (!(horizon > 0.0)) throw InvalidParameter("horizon", "must be > 0");

    NoiseGrid grid;
    grid.steps = steps;
    grid.dims = dims;
    grid.step_size = horizon / static_cast<double>(steps);
    grid.increments.resize(static_cast<std::size_t>(steps) * dims);
    const double scale = std::sqrt(grid.step_size);
    RandomStream rs(key);
    for (double& entry : grid.increments) entry = rs.normal() * scale;
    return grid;
}

NoiseGrid aggregate_to_rare(const NoiseGrid& fine, std::int64_t ratio, int rare_dims) {
    if (ratio < 1) throw InvalidParameter("ratio", "must be >= 1");
    if (fine.steps % ratio != 0)
        throw DimensionMismatch("fine grid steps (" + std::to_string(fine.steps) +
                                ") not divisible by ratio (" + std::to_string(ratio) + ")");
    if (rare_dims < 0 || rare_dims > fine.dims)
        throw DimensionMismatch("rare_dims (" + std::to_string(rare_dims) +
                                ") exceeds fine dims (" + std::to_string(fine.dims) + ")");

    NoiseGrid rare;
    rare.steps = fine.steps / ratio;
    rare.dims = rare_dims;
    rare.step_size = fine.step_size * static_cast<double>(ratio);
    rare.increments.assign(static_cast<std::size_t>(rare.steps) * rare_dims, 0.0);
    for (std::int64_t i = 0; i < rare.steps; ++i) {
        double* out = rare.increments.data() + static_cast<std::size_t>(i) * rare_dims;
        for (std::int64_t j = 0; j < ratio; ++j) {
            const double* in =
                fine.increments.data() + static_cast<std::size_t>(i * ratio + j) * fine.dims;
            for (int k = 0; k < rare_dims; ++k) out[k] += in[k];
        }
    }
    return rare;
}

}  // namespace jumpeuler
