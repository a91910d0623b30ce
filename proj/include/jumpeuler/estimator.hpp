#pragma once

// Monte Carlo strong-error estimators and the trajectory driver.
//
// Trajectories are independent by construction (per-trajectory streams), so
// any work schedule is allowed; the p-th powers are reduced in ascending
// trajectory order after the parallel map, making estimates bit-identical for
// any worker count.

#include <cstdint>
#include <utility>
#include <vector>

#include "jumpeuler/model.hpp"
#include "jumpeuler/scheme.hpp"

namespace jumpeuler {

struct ErrorEstimate {
    double error = 0.0;      // L^p-error estimate
    double std_error = 0.0;  // SE of the p-th-power mean, delta-method through the 1/p root
    std::int64_t trajectories = 0;
    double order_p = 2.0;
    double cost = 0.0;  // M * n
};

struct EstimatorOptions {
    int workers = 0;  // 0 = auto (JUMPEULER_WORKERS env, then OpenMP max)
    NoisePath noise = NoisePath::PerDim;
};

// Coupled-grid estimate: K pairs (X_{M,n}, X_{M*mult_dim, n*mult_step}) on
// shared noise; error = ( mean_l ||fine_l - rare_l||^p )^(1/p).
ErrorEstimate mc_error_coupled(const ModelSpec& model, int truncation_dim, std::int64_t steps,
                               std::pair<int, int> multipliers, std::int64_t trajectories,
                               double order_p, std::uint64_t base_seed,
                               const EstimatorOptions& opts = {});

// Exact-reference estimate: error = ( mean_l ||X^{refM}_l(T) - scheme_l||^p )^(1/p)
// with refM = reference_dim_mult * truncation_dim; the reference consumes the
// scheme's Wiener endpoints and jump stream (see scheme.hpp).
ErrorEstimate mc_error_vs_reference(const ModelSpec& model, int truncation_dim,
                                    std::int64_t steps, int reference_dim_mult,
                                    std::int64_t trajectories, double order_p,
                                    std::uint64_t base_seed, const EstimatorOptions& opts = {});

// Informational cost of one (M, n) run: M * n coefficient/process evaluations.
double informational_cost(std::int64_t truncation_dim, std::int64_t steps);

// Resolves a requested worker count: >0 passes through; 0 consults
// JUMPEULER_WORKERS, then the OpenMP thread limit, else 1.
int resolve_workers(int requested);

// Runs fn(i) for i in [0, count); workers == 1 is a plain serial loop (the
// reference path), anything else an OpenMP parallel-for. The first failing
// index aborts the whole map as TrajectoryFailure.
void parallel_for_index(std::int64_t count, int workers,
                        const std::function<void(std::int64_t)>& fn);

}  // namespace jumpeuler
