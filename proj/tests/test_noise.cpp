#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include <algorithm>

#include "jumpeuler/builtin_models.hpp"
#include "jumpeuler/errors.hpp"
#include "jumpeuler/noise.hpp"
#include "jumpeuler/scheme.hpp"
#include "oracles.hpp"

using namespace jumpeuler;

namespace {

JumpLaw unit_mark_law(double intensity) {
    JumpLaw law;
    law.intensity = intensity;
    law.mark_dim = 1;
    law.mark_sampler = [](RandomStream&, std::span<double> out) { out[0] = 1.0; };
    return law;
}

}  // namespace

TEST_CASE("zero intensity gives an empty stream") {
    const auto stream = generate_jump_stream(unit_mark_law(0.0), 1.53,
                                             StreamKey{1, 0, Channel::Jumps});
    CHECK(stream.count() == 0);
    CHECK_THROWS_AS(generate_jump_stream(unit_mark_law(1.0), -1.0,
                                         StreamKey{1, 0, Channel::Jumps}),
                    InvalidParameter);
}

TEST_CASE("jump counts have the Poisson mean and variance") {
    const double lambda = 1.21, horizon = 1.53;
    const std::int64_t streams = 100'000;
    const JumpLaw law = unit_mark_law(lambda);
    std::vector<double> counts(streams);
    for (std::int64_t i = 0; i < streams; ++i) {
        const auto s =
            generate_jump_stream(law, horizon, StreamKey{11, static_cast<std::uint64_t>(i),
                                                         Channel::Jumps});
        counts[i] = static_cast<double>(s.count());
        if (i < 100) {  // structural invariants on a sample
            for (std::size_t k = 0; k < s.count(); ++k) {
                REQUIRE(s.times[k] > 0.0);
                REQUIRE(s.times[k] <= horizon);
                if (k > 0) REQUIRE(s.times[k] > s.times[k - 1]);
            }
        }
    }
    const auto m = oracles::moments(counts);
    const double target = lambda * horizon;
    // E N(T) = Var N(T) = lambda T; mean checked with the known-variance SE.
    CHECK(std::fabs(m.mean - target) < 3.0 * std::sqrt(target / static_cast<double>(streams)));
    const double se_var =
        std::sqrt((target + 2.0 * target * target) / static_cast<double>(streams));
    CHECK(std::fabs(m.var - target) < 5.0 * se_var);
}

TEST_CASE("fine grid entries are Normal(0, T/n)") {
    const double horizon = 1.53;
    const std::int64_t steps = 2000;
    const int dims = 50;  // 1e5 entries per grid
    const auto grid =
        generate_fine_grid(dims, steps, horizon, StreamKey{21, 0, Channel::WienerFine});
    REQUIRE(grid.increments.size() == static_cast<std::size_t>(steps * dims));
    CHECK(grid.step_size == horizon / static_cast<double>(steps));

    // Pooled variance over 10 grids (1e6 entries total).
    double ss = 0.0;
    std::int64_t n_entries = 0;
    for (int rep = 0; rep < 10; ++rep) {
        const auto g = generate_fine_grid(
            dims, steps, horizon, StreamKey{21, static_cast<std::uint64_t>(rep), Channel::WienerFine});
        for (double v : g.increments) ss += v * v;
        n_entries += steps * dims;
    }
    const double var = ss / static_cast<double>(n_entries);
    const double target = horizon / static_cast<double>(steps);
    const double se = target * std::sqrt(2.0 / static_cast<double>(n_entries - 1));
    CHECK(std::fabs(var - target) < 5.0 * se);

    // Kolmogorov-Smirnov at significance 1e-3 on one grid's 1e5 entries.
    const double d = oracles::ks_statistic_normal(grid.increments, std::sqrt(target));
    CHECK(d < oracles::ks_critical(1e-3, grid.increments.size()));
}

TEST_CASE("fine grid edge cases and determinism") {
    const auto empty = generate_fine_grid(0, 16, 1.0, StreamKey{3, 0, Channel::WienerFine});
    CHECK(empty.dims == 0);
    CHECK(empty.increments.empty());

    const StreamKey key{77, 5, Channel::WienerFine};
    const auto a = generate_fine_grid(7, 31, 1.53, key);
    const auto b = generate_fine_grid(7, 31, 1.53, key);
    CHECK(std::memcmp(a.increments.data(), b.increments.data(),
                      a.increments.size() * sizeof(double)) == 0);

    CHECK_THROWS_AS(generate_fine_grid(3, 0, 1.0, key), InvalidParameter);
    CHECK_THROWS_AS(generate_fine_grid(-1, 4, 1.0, key), InvalidParameter);
}

TEST_CASE("aggregate_to_rare: identity, constant sums, reference bit-exactness") {
    const auto fine = generate_fine_grid(5, 100, 2.0, StreamKey{8, 1, Channel::WienerFine});

    const auto same = aggregate_to_rare(fine, 1, fine.dims);
    CHECK(std::memcmp(same.increments.data(), fine.increments.data(),
                      fine.increments.size() * sizeof(double)) == 0);

    NoiseGrid constant;
    constant.steps = 40;
    constant.dims = 3;
    constant.step_size = 0.125;
    constant.increments.assign(40 * 3, 0.125);  // dyadic h: ratio*h is exact
    const auto agg = aggregate_to_rare(constant, 10, 3);
    for (double v : agg.increments) CHECK(v == 1.25);

    // Independent left-to-right reference summation, bit-exact.
    const std::int64_t ratio = 10;
    const int rare_dims = 3;
    const auto rare = aggregate_to_rare(fine, ratio, rare_dims);
    CHECK(rare.steps == 10);
    CHECK(rare.step_size == fine.step_size * static_cast<double>(ratio));
    for (std::int64_t i = 0; i < rare.steps; ++i) {
        for (int k = 0; k < rare_dims; ++k) {
            double sum = 0.0;
            for (std::int64_t j = 0; j < ratio; ++j) sum += fine.at(i * ratio + j, k);
            REQUIRE(rare.at(i, k) == sum);
        }
    }

    CHECK_THROWS_AS(aggregate_to_rare(fine, 3, 2), DimensionMismatch);   // 100 % 3 != 0
    CHECK_THROWS_AS(aggregate_to_rare(fine, 10, 6), DimensionMismatch);  // 6 > 5 dims
}

TEST_CASE("aggregation commutes with column truncation, bit-exactly") {
    const auto fine = generate_fine_grid(6, 60, 1.0, StreamKey{9, 2, Channel::WienerFine});
    const auto agg_then_trunc = aggregate_to_rare(fine, 6, 2);

    NoiseGrid truncated;
    truncated.steps = fine.steps;
    truncated.dims = 2;
    truncated.step_size = fine.step_size;
    truncated.increments.resize(static_cast<std::size_t>(fine.steps) * 2);
    for (std::int64_t i = 0; i < fine.steps; ++i)
        for (int k = 0; k < 2; ++k) truncated.increments[i * 2 + k] = fine.at(i, k);
    const auto trunc_then_agg = aggregate_to_rare(truncated, 6, 2);

    REQUIRE(agg_then_trunc.increments.size() == trunc_then_agg.increments.size());
    CHECK(std::memcmp(agg_then_trunc.increments.data(), trunc_then_agg.increments.data(),
                      agg_then_trunc.increments.size() * sizeof(double)) == 0);
}

TEST_CASE("Wiener and jump channels are empirically uncorrelated") {
    const std::int64_t trials = 100'000;
    const JumpLaw law = unit_mark_law(1.21);
    std::vector<double> first_increment(trials), jump_count(trials);
    for (std::int64_t i = 0; i < trials; ++i) {
        const StreamKey key{1301, static_cast<std::uint64_t>(i), Channel::WienerFine};
        RandomStream ws(key);
        first_increment[i] = ws.normal();
        jump_count[i] =
            static_cast<double>(generate_jump_stream(law, 1.53, key.with_channel(Channel::Jumps))
                                    .count());
    }
    const auto mx = oracles::moments(first_increment);
    const auto my = oracles::moments(jump_count);
    double cov = 0.0;
    for (std::int64_t i = 0; i < trials; ++i)
        cov += (first_increment[i] - mx.mean) * (jump_count[i] - my.mean);
    cov /= static_cast<double>(trials - 1);
    const double corr = cov / std::sqrt(mx.var * my.var);
    CHECK(std::fabs(corr) < 4.0 / std::sqrt(static_cast<double>(trials)));
}

TEST_CASE("slab-wise grid requests preserve the draw sequence") {
    const StreamKey key{64, 4, Channel::WienerFine};
    const auto whole = generate_fine_grid(5, 12, 1.53, key);

    NoiseGrid slabbed;
    slabbed.steps = 12;
    slabbed.dims = 5;
    slabbed.step_size = whole.step_size;
    slabbed.increments.resize(12 * 5);
    RandomStream rs(key);
    for (int slab = 0; slab < 4; ++slab) {  // four 3-step slabs off one stream
        NoiseGrid part;
        part.steps = 3;
        part.dims = 5;
        part.step_size = whole.step_size;
        part.increments.resize(3 * 5);
        jumpeuler::detail::fill_grid(rs, part);
        std::copy(part.increments.begin(), part.increments.end(),
                  slabbed.increments.begin() + slab * 15);
    }
    CHECK(std::memcmp(whole.increments.data(), slabbed.increments.data(),
                      whole.increments.size() * sizeof(double)) == 0);
}

TEST_CASE("merton mark stream uses the Marks channel eagerly") {
    const ModelSpec model = make_merton_model(MertonSpec{});
    const auto s =
        generate_jump_stream(model.jump_law, 1.53, StreamKey{5, 3, Channel::Jumps});
    for (std::size_t k = 0; k < s.count(); ++k) {
        const double m = s.mark(k)[0];
        CHECK((m == -0.5 || m > 0.5));
    }
}
