#include "jumpeuler/estimator.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "jumpeuler/errors.hpp"

namespace jumpeuler {
namespace {

double distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() == 1) return std::fabs(a[0] - b[0]);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double power(double x, double p) { return p == 2.0 ? x * x : std::pow(x, p); }

// Reduction shared by both estimators: ascending-order mean of the p-th
// powers, sample variance on the power scale, delta method through the root.
ErrorEstimate reduce(const std::vector<double>& powers, double order_p, double cost) {
    const auto K = static_cast<std::int64_t>(powers.size());
    double sum = 0.0;
    for (double v : powers) sum += v;
    const double mean = sum / static_cast<double>(K);
    double ss = 0.0;
    for (double v : powers) {
        const double d = v - mean;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(K - 1);
    const double se_mean = std::sqrt(var / static_cast<double>(K));

    ErrorEstimate est;
    est.trajectories = K;
    est.order_p = order_p;
    est.cost = cost;
    est.error = mean > 0.0 ? std::pow(mean, 1.0 / order_p) : 0.0;
    est.std_error =
        mean > 0.0 ? se_mean * (1.0 / order_p) * std::pow(mean, 1.0 / order_p - 1.0) : 0.0;
    return est;
}

void check_estimator_args(std::int64_t trajectories, double order_p) {
    if (trajectories < 2) throw InvalidParameter("trajectories", "must be >= 2");
    if (!(order_p >= 2.0)) throw InvalidParameter("order_p", "must be >= 2");
}

}  // namespace

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("JUMPEULER_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void parallel_for_index(std::int64_t count, int workers,
                        const std::function<void(std::int64_t)>& fn) {
    workers = resolve_workers(workers);
    if (workers <= 1) {
        for (std::int64_t i = 0; i < count; ++i) {
            try {
                fn(i);
            } catch (const std::exception& e) {
                throw TrajectoryFailure(i, e.what());
            }
        }
        return;
    }
#ifdef _OPENMP
    std::atomic<bool> failed{false};
    std::mutex mutex;
    std::int64_t first_index = -1;
    std::string first_cause;
#pragma omp parallel for num_threads(workers) schedule(dynamic)
    for (std::int64_t i = 0; i < count; ++i) {
        if (failed.load(std::memory_order_relaxed)) continue;
        try {
            fn(i);
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(mutex);
            if (first_index < 0 || i < first_index) {
                first_index = i;
                first_cause = e.what();
            }
            failed.store(true, std::memory_order_relaxed);
        }
    }
    if (first_index >= 0) throw TrajectoryFailure(first_index, first_cause);
#else
    for (std::int64_t i = 0; i < count; ++i) {
        try {
            fn(i);
        } catch (const std::exception& e) {
            throw TrajectoryFailure(i, e.what());
        }
    }
#endif
}

ErrorEstimate mc_error_coupled(const ModelSpec& model, int truncation_dim, std::int64_t steps,
                               std::pair<int, int> multipliers, std::int64_t trajectories,
                               double order_p, std::uint64_t base_seed,
                               const EstimatorOptions& opts) {
    check_estimator_args(trajectories, order_p);
    const SchemeParams params{truncation_dim, steps, model.horizon, order_p};
    const auto cm =
        detail::CompiledModel::build(model, truncation_dim * std::max(multipliers.first, 1));

    std::vector<double> powers(static_cast<std::size_t>(trajectories));
    parallel_for_index(trajectories, opts.workers, [&](std::int64_t l) {
        const CoupledPair pair = detail::simulate_coupled_impl(
            cm, params, multipliers.first, multipliers.second,
            detail::CoupledKeys::from(base_seed, static_cast<std::uint64_t>(l)), opts.noise,
            detail::KernelMode::Auto);
        powers[static_cast<std::size_t>(l)] =
            power(distance(pair.fine.value, pair.rare.value), order_p);
    });
    return reduce(powers, order_p, informational_cost(truncation_dim, steps));
}

ErrorEstimate mc_error_vs_reference(const ModelSpec& model, int truncation_dim,
                                    std::int64_t steps, int reference_dim_mult,
                                    std::int64_t trajectories, double order_p,
                                    std::uint64_t base_seed, const EstimatorOptions& opts) {
    check_estimator_args(trajectories, order_p);
    if (!model.exact_reference) throw MissingReference();
    if (opts.noise == NoisePath::Collapsed)
        throw InvalidParameter("noise", "the exact-reference estimator is per-dim only");
    const SchemeParams params{truncation_dim, steps, model.horizon, order_p};
    const auto cm = detail::CompiledModel::build(model, truncation_dim);

    std::vector<double> powers(static_cast<std::size_t>(trajectories));
    parallel_for_index(trajectories, opts.workers, [&](std::int64_t l) {
        const ReferencePair pair = detail::simulate_with_reference_impl(
            cm, params, reference_dim_mult,
            detail::CoupledKeys::from(base_seed, static_cast<std::uint64_t>(l)),
            detail::KernelMode::Auto);
        powers[static_cast<std::size_t>(l)] =
            power(distance(pair.reference, pair.scheme.value), order_p);
    });
    return reduce(powers, order_p, informational_cost(truncation_dim, steps));
}

double informational_cost(std::int64_t truncation_dim, std::int64_t steps) {
    if (truncation_dim < 1) throw InvalidParameter("truncation_dim", "must be >= 1");
    if (steps < 1) throw InvalidParameter("steps", "must be >= 1");
    return static_cast<double>(truncation_dim) * static_cast<double>(steps);
}

}  // namespace jumpeuler
