// Throughput comparison: optimized separable kernels vs the generic reference
// kernels, and the serial driver vs the OpenMP driver, on the two built-in
// models at a mid-size coupled configuration.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "jumpeuler/builtin_models.hpp"
#include "jumpeuler/estimator.hpp"
#include "jumpeuler/scheme.hpp"

using namespace jumpeuler;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct KernelCase {
    const char* name;
    detail::KernelMode mode;
    NoisePath path;
};

void bench_kernels(const ModelSpec& model, const char* model_name, int truncation,
                   std::int64_t steps, std::int64_t trajectories) {
    const SchemeParams params{truncation, steps, model.horizon, 2.0};
    const auto cm = detail::CompiledModel::build(model, truncation * 10);
    const KernelCase cases[] = {
        {"generic per-dim", detail::KernelMode::Generic, NoisePath::PerDim},
        {"separable per-dim", detail::KernelMode::Auto, NoisePath::PerDim},
        {"separable collapsed", detail::KernelMode::Auto, NoisePath::Collapsed},
    };
    std::printf("%s coupled pairs, M=%d n=%lld multipliers (10,100), %lld trajectories\n",
                model_name, truncation, static_cast<long long>(steps),
                static_cast<long long>(trajectories));
    double base = 0.0;
    for (const auto& c : cases) {
        const auto t0 = std::chrono::steady_clock::now();
        double acc = 0.0;
        for (std::int64_t l = 0; l < trajectories; ++l) {
            const auto pair = detail::simulate_coupled_impl(
                cm, params, 10, 100, detail::CoupledKeys::from(7, l), c.path, c.mode);
            acc += pair.fine.value[0] - pair.rare.value[0];
        }
        const double dt = seconds_since(t0);
        if (base == 0.0) base = dt;
        std::printf("  %-20s %8.3f s  (%5.1fx, %.3g pairs/s, checksum %g)\n", c.name, dt,
                    base / dt, trajectories / dt, acc);
    }
}

void bench_driver(const ModelSpec& model) {
    const std::int64_t trajectories = 20000;
    const int max_workers = resolve_workers(0);
    std::printf("\ndriver: %lld single trajectories (M=50, n=200), workers 1 vs %d\n",
                static_cast<long long>(trajectories), max_workers);
    const SchemeParams params{50, 200, model.horizon, 2.0};
    std::vector<double> out(trajectories);
    for (int workers : {1, max_workers}) {
        const auto t0 = std::chrono::steady_clock::now();
        parallel_for_index(trajectories, workers, [&](std::int64_t l) {
            out[l] = simulate_terminal(model, params, 7, static_cast<std::uint64_t>(l)).value[0];
        });
        const double dt = seconds_since(t0);
        double acc = 0.0;
        for (double v : out) acc += v;
        std::printf("  workers=%-2d %8.3f s  (%.3g trajectories/s, mean %.6f)\n", workers, dt,
                    trajectories / dt, acc / trajectories);
    }
}

}  // namespace

int main() {
    const ModelSpec ou = make_ou_model(OuJumpSpec{});
    const ModelSpec merton = make_merton_model(MertonSpec{});
    bench_kernels(ou, "ou-jump", 20, 662, 30);
    bench_kernels(merton, "merton", 20, 662, 30);
    bench_driver(ou);
    return 0;
}
