#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "jumpeuler/builtin_models.hpp"
#include "jumpeuler/errors.hpp"
#include "jumpeuler/estimator.hpp"
#include "oracles.hpp"

using namespace jumpeuler;

namespace {

ModelSpec quiet_model(double drift, double eta) {
    OuJumpSpec spec;
    spec.mean_reversion = 0.0;
    spec.mu = drift;
    spec.sigma = 0.0;
    spec.lambda = 0.0;
    spec.eta = eta;
    spec.horizon = 1.0;
    return make_ou_model(spec);
}

}  // namespace

TEST_CASE("informational cost") {
    CHECK(informational_cost(1, 1) == 1.0);
    CHECK(informational_cost(20, 662) == 13240.0);
    double prev = 0.0;
    for (const auto& [m, n] : std::vector<std::pair<int, int>>{{1, 2}, {2, 2}, {2, 5}, {9, 5}}) {
        const double c = informational_cost(m, n);
        CHECK(c > prev);
        prev = c;
    }
    CHECK_THROWS_AS(informational_cost(0, 5), InvalidParameter);
}

TEST_CASE("coupled error is exactly zero for exactly-integrated models") {
    const ErrorEstimate still =
        mc_error_coupled(quiet_model(0.0, 1.0), 1, 8, {2, 4}, 100, 2.0, 1);
    CHECK(still.error == 0.0);
    CHECK(still.std_error == 0.0);
    CHECK(still.trajectories == 100);

    const ErrorEstimate drift =
        mc_error_coupled(quiet_model(1.0, 0.0), 1, 8, {2, 4}, 100, 2.0, 1);
    CHECK(drift.error == 0.0);
}

TEST_CASE("estimates are bit-identical across worker counts and noise paths") {
    const ModelSpec model = make_ou_model(OuJumpSpec{});
    for (NoisePath path : {NoisePath::PerDim, NoisePath::Collapsed}) {
        EstimatorOptions w1, w2, w4;
        w1.workers = 1;
        w2.workers = 2;
        w4.workers = 4;
        w1.noise = w2.noise = w4.noise = path;
        const auto a = mc_error_coupled(model, 5, 20, {10, 10}, 400, 2.0, 99, w1);
        const auto b = mc_error_coupled(model, 5, 20, {10, 10}, 400, 2.0, 99, w2);
        const auto c = mc_error_coupled(model, 5, 20, {10, 10}, 400, 2.0, 99, w4);
        CHECK(a.error == b.error);
        CHECK(b.error == c.error);
        CHECK(a.std_error == b.std_error);
        CHECK(b.std_error == c.std_error);
        CHECK(a.error > 0.0);
    }
}

TEST_CASE("trajectory failures abort the estimate") {
    ModelSpec model = quiet_model(0.0, 1.0);
    model.affine_drift.reset();
    model.drift = [](double t, std::span<const double>, std::span<double> out) {
        out[0] = t > 0.5 ? std::nan("") : 0.0;  // valid at the probe point, explodes later
    };
    for (int workers : {1, 2}) {
        EstimatorOptions opts;
        opts.workers = workers;
        CHECK_THROWS_AS(mc_error_coupled(model, 1, 8, {1, 2}, 8, 2.0, 1, opts),
                        TrajectoryFailure);
    }
}

TEST_CASE("coupled estimator matches the randomized-quadrature variance formula") {
    // a(t,x) = t^2, b = c = 0: the coupled difference is the difference of two
    // independent randomized Riemann sums; its variance has a closed form.
    ModelSpec model = quiet_model(0.0, 0.0);
    model.affine_drift.reset();
    model.drift = [](double t, std::span<const double>, std::span<double> out) {
        out[0] = t * t;
    };
    const std::int64_t steps = 4, trials = 100'000;
    const int step_mult = 25;
    const ErrorEstimate est = mc_error_coupled(model, 1, steps, {1, step_mult}, trials, 2.0, 7);
    const double want = oracles::randomized_square_sum_variance(1.0, steps) +
                        oracles::randomized_square_sum_variance(1.0, steps * step_mult);
    // est.error^2 estimates E D^2; its SE on the square scale is
    // 2 * error * std_error by the delta method.
    const double se_sq = 2.0 * est.error * est.std_error;
    CHECK(std::fabs(est.error * est.error - want) < 5.0 * se_sq);
}

TEST_CASE("exact-reference estimator basics") {
    {  // sigma-free, jump-free, mu = 0: scheme and reference are both exact
        MertonSpec spec;
        spec.mu = 0.0;
        spec.sigma = 0.0;
        spec.lambda = 0.0;
        const ModelSpec model = make_merton_model(spec);
        const auto est = mc_error_vs_reference(model, 2, 16, 10, 50, 2.0, 3);
        CHECK(est.error == 0.0);
    }
    {  // OU has no exact reference
        const ModelSpec ou = make_ou_model(OuJumpSpec{});
        CHECK_THROWS_AS(mc_error_vs_reference(ou, 2, 16, 10, 50, 2.0, 3), MissingReference);
    }
    {  // collapsed noise is a coupled-only option
        const ModelSpec merton = make_merton_model(MertonSpec{});
        EstimatorOptions opts;
        opts.noise = NoisePath::Collapsed;
        CHECK_THROWS_AS(mc_error_vs_reference(merton, 2, 16, 10, 50, 2.0, 3, opts),
                        InvalidParameter);
    }
}

TEST_CASE("std_error follows the 1/sqrt(K) law (quadrupling halves it)") {
    // Jump-free configuration: with the compound-Poisson factor the fourth
    // moment of the squared difference is enormous and small-K standard
    // errors are dominated by outliers.
    MertonSpec spec;
    spec.lambda = 0.0;
    const ModelSpec model = make_merton_model(spec);
    double ratio_sum = 0.0;
    const int seeds = 5;
    for (int s = 0; s < seeds; ++s) {
        const auto small = mc_error_vs_reference(model, 5, 50, 10, 400, 2.0, 100 + s);
        const auto big = mc_error_vs_reference(model, 5, 50, 10, 1600, 2.0, 200 + s);
        ratio_sum += small.std_error / big.std_error;
    }
    const double ratio = ratio_sum / seeds;
    CHECK(ratio > 2.0 * 0.8);
    CHECK(ratio < 2.0 * 1.2);
}

TEST_CASE("coupled OU estimate is strictly positive with sane uncertainty") {
    const ModelSpec model = make_ou_model(OuJumpSpec{});
    const auto est = mc_error_coupled(model, 5, 81, {10, 100}, 500, 2.0, 17);
    CHECK(est.error > 0.0);
    CHECK(est.std_error > 0.0);
    CHECK(est.std_error < est.error);
    CHECK(est.cost == 405.0);
}
