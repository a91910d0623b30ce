#pragma once

// Truncated-dimension randomized Euler scheme.
//
// One step from state x over [t, t+h], with theta uniform on [t, t+h]:
//
//   x' = x + a(theta, x) h + sum_{k<=M} b^(k)(t, x) dW_k + sum_{jumps} c(t, x, xi)
//
// All coefficients are evaluated at the pre-step state (left-point rule, the
// jump coefficient included); accumulation into x' is strict left-to-right:
// drift, then diffusion terms in ascending k, then jumps in arrival order.
// Terminal values are a pure function of (model, params, multipliers, seed,
// trajectory_index) -- bit-identical across runs and thread counts.
//
// Stream consumption per trajectory (the reproducibility contract):
//   Initial    eta
//   Jumps      exponential gaps until past T, then Marks: one mark/arrival
//   WienerFine grid increments, step-major dim-minor; a coupled run draws the
//              (M*mult_dim, n*mult_step) fine grid this way and derives the
//              rare increments by in-order aggregation; a vs-reference run
//              draws the (M, n) grid then one N(0,T) endpoint per tail dim
//   ThetaRare  one uniform per rare/scheme step, ascending
//   ThetaFine  one uniform per fine step, ascending (coupled runs only)

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "jumpeuler/model.hpp"
#include "jumpeuler/noise.hpp"
#include "jumpeuler/rng.hpp"

namespace jumpeuler {

struct SchemeParams {
    int truncation_dim = 1;    // M
    std::int64_t steps = 1;    // n
    double horizon = 1.0;      // T
    double order_p = 2.0;      // p of the target L^p error; recorded, not used
};

// Inputs of one step. Jump indices address the shared stream: arrivals with
// times in (t, t+h] are [jump_begin, jump_end).
struct StepInputs {
    double t = 0.0;
    double h = 0.0;
    double theta = 0.0;
    std::span<const double> dW;
    const JumpStream* jumps = nullptr;
    std::size_t jump_begin = 0;
    std::size_t jump_end = 0;
};

struct TerminalValue {
    std::vector<double> value;
    std::int64_t jump_count = 0;
    SchemeParams params;
};

struct CoupledPair {
    TerminalValue rare;
    TerminalValue fine;
};

// How coupled-grid Wiener noise is realized. PerDim draws every increment of
// the fine grid. Collapsed (separable diffusions only) draws, per fine step,
// the two sufficient statistics sum_{k<=M} beta_k dW_k and
// sum_{M<k<=Mf} beta_k dW_k -- the same joint law at a fraction of the cost.
enum class NoisePath { PerDim, Collapsed };

// x' for one step; pre: |dW| = truncation and StepInputs invariants hold.
std::vector<double> randomized_euler_step(const ModelSpec& model, int truncation,
                                          std::span<const double> x, const StepInputs& in);

TerminalValue simulate_terminal(const ModelSpec& model, const SchemeParams& params,
                                std::uint64_t base_seed, std::uint64_t trajectory_index);

// Debug aid: the recorded grid path (t_j, X(t_j)) for j = 0..n, same streams
// and same terminal as simulate_terminal. Estimators and benchmarks never
// record paths.
struct PathPoint {
    double t = 0.0;
    std::vector<double> x;
};
std::vector<PathPoint> simulate_path(const ModelSpec& model, const SchemeParams& params,
                                     std::uint64_t base_seed, std::uint64_t trajectory_index);

// Runs X_{M,n} and X_{M*fine_dim_mult, n*fine_step_mult} on shared noise: one
// fine Wiener grid (rare increments aggregated from it), one jump stream, one
// initial value; theta sequences are drawn independently per scheme.
CoupledPair simulate_coupled_pair(const ModelSpec& model, const SchemeParams& params,
                                  int fine_dim_mult, int fine_step_mult,
                                  std::uint64_t base_seed, std::uint64_t trajectory_index,
                                  NoisePath path = NoisePath::PerDim);

// Scheme terminal at (M, n) plus the model's exact_reference terminal at
// truncation reference_dim_mult*M, coupled through shared Wiener endpoints
// (exact column sums of the scheme's grid for k <= M, fresh N(0,T) draws for
// the tail dims) and the shared jump stream.
struct ReferencePair {
    TerminalValue scheme;
    std::vector<double> reference;
    std::int64_t jump_count = 0;
};
ReferencePair simulate_with_reference(const ModelSpec& model, const SchemeParams& params,
                                      int reference_dim_mult, std::uint64_t base_seed,
                                      std::uint64_t trajectory_index);

namespace detail {

// Stream keys of one coupled trajectory; tests perturb individual channels.
struct CoupledKeys {
    StreamKey wiener;
    StreamKey theta_rare;
    StreamKey theta_fine;
    StreamKey jumps;
    StreamKey initial;

    static CoupledKeys from(std::uint64_t base_seed, std::uint64_t trajectory_index);
};

// Kernel selection: Auto routes scalar separable models to the optimized
// kernels; Generic forces the plain reference implementation (materialized
// grids, per-term diffusion evaluation). Results are bit-identical.
enum class KernelMode { Auto, Generic };

// Precompiled view of a model: coefficient table for separable diffusions and
// devirtualized drift. Built once per estimator row, shared read-only across
// worker threads.
struct CompiledModel {
    const ModelSpec* spec = nullptr;
    bool scalar_separable = false;       // dim == 1 and separable diffusion
    std::vector<double> beta;            // coef(1..max_dims), separable only
    bool affine_drift = false;
    double drift_add = 0.0;
    double drift_scale = 0.0;

    static CompiledModel build(const ModelSpec& model, int max_dims);
};

TerminalValue simulate_terminal_impl(const CompiledModel& cm, const SchemeParams& params,
                                     const CoupledKeys& keys, KernelMode mode);
CoupledPair simulate_coupled_impl(const CompiledModel& cm, const SchemeParams& params,
                                  int fine_dim_mult, int fine_step_mult,
                                  const CoupledKeys& keys, NoisePath path, KernelMode mode);
ReferencePair simulate_with_reference_impl(const CompiledModel& cm, const SchemeParams& params,
                                           int reference_dim_mult, const CoupledKeys& keys,
                                           KernelMode mode);

// Fills a grid from an already-positioned stream; single source of truth for
// the (step-major, dim-minor) draw order.
void fill_grid(RandomStream& rs, NoiseGrid& grid);

}  // namespace detail
}  // namespace jumpeuler
