#include "jumpeuler/scheme.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "jumpeuler/errors.hpp"

namespace jumpeuler {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_params(const SchemeParams& params) {
    if (params.truncation_dim < 1) throw InvalidParameter("truncation_dim", "must be >= 1");
    if (params.steps < 1) throw InvalidParameter("steps", "must be >= 1");
    if (!(params.horizon > 0.0)) throw InvalidParameter("horizon", "must be > 0");
}

void check_finite(std::span<const double> x, std::int64_t step) {
    for (double v : x)
        if (!std::isfinite(v)) throw NonFiniteState(step);
}

// ---- scalar separable kernels ------------------------------------------
//
// dim == 1 and b^(j)(t,x) = beta_j * g(t,x). The diffusion contribution per
// step is sum_k (beta_k * g) * dW_k accumulated in ascending k, matching the
// generic kernel's expression tree bit for bit.

struct ScalarOps {
    const detail::CompiledModel& cm;

    double drift(double theta, double x) const {
        if (cm.affine_drift) return cm.drift_add + cm.drift_scale * x;
        double out;
        cm.spec->drift(theta, {&x, 1}, {&out, 1});
        return out;
    }
    double factor(double t, double x) const {
        double out;
        cm.spec->diffusion.separable->factor(t, {&x, 1}, {&out, 1});
        return out;
    }
    // Applies c(t, x_pre, xi_k) for arrivals [lo, hi) onto acc, arrival order.
    double jumps(double t, double x_pre, double acc, const JumpStream& js, std::size_t lo,
                 std::size_t hi) const {
        for (std::size_t k = lo; k < hi; ++k) {
            double out;
            cm.spec->jump_coeff(t, {&x_pre, 1}, js.mark(k), {&out, 1});
            acc += out;
        }
        return acc;
    }
};

TerminalValue scalar_single(const detail::CompiledModel& cm, const SchemeParams& params,
                            const detail::CoupledKeys& keys) {
    const ModelSpec& model = *cm.spec;
    const int M = params.truncation_dim;
    const std::int64_t n = params.steps;
    const double T = params.horizon;
    const double h = T / static_cast<double>(n);
    const double sh = std::sqrt(h);
    const double* beta = cm.beta.data();
    ScalarOps ops{cm};

    RandomStream init(keys.initial);
    double x;
    model.initial_sampler(init, {&x, 1});
    const JumpStream jumps = generate_jump_stream(model.jump_law, T, keys.jumps);
    RandomStream ws(keys.wiener);
    RandomStream theta_stream(keys.theta_rare);

    std::size_t jc = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * h;
        const double theta = t + theta_stream.uniform01() * h;
        const double x_pre = x;
        double xn = x_pre + ops.drift(theta, x_pre) * h;
        const double g = ops.factor(t, x_pre);
        for (int k = 0; k < M; ++k) {
            const double dw = ws.normal() * sh;
            xn += (beta[k] * g) * dw;
        }
        const std::size_t lo = jc;
        const double hi = (i + 1 == n) ? kInf : static_cast<double>(i + 1) * h;
        while (jc < jumps.count() && jumps.times[jc] <= hi) ++jc;
        xn = ops.jumps(t, x_pre, xn, jumps, lo, jc);
        if (!std::isfinite(xn)) throw NonFiniteState(i);
        x = xn;
    }
    return {{x}, static_cast<std::int64_t>(jumps.count()), params};
}

CoupledPair scalar_coupled(const detail::CompiledModel& cm, const SchemeParams& params,
                           int mult_dim, int mult_step, const detail::CoupledKeys& keys,
                           NoisePath path) {
    const ModelSpec& model = *cm.spec;
    const int M = params.truncation_dim;
    const int Mf = M * mult_dim;
    const std::int64_t n = params.steps;
    const std::int64_t nf = n * mult_step;
    const double T = params.horizon;
    const double h = T / static_cast<double>(n);
    const double Hf = T / static_cast<double>(nf);
    const double shf = std::sqrt(Hf);
    const double* beta = cm.beta.data();
    ScalarOps ops{cm};

    // Collapsed path: per fine step only the head/tail aggregates
    // sum_{k<=M} beta_k dW_k and sum_{M<k<=Mf} beta_k dW_k are drawn.
    double sig_head = 0.0, sig_tail = 0.0;
    if (path == NoisePath::Collapsed) {
        double s2 = 0.0;
        for (int k = 0; k < M; ++k) s2 += beta[k] * beta[k];
        const double s2_head = s2;
        for (int k = M; k < Mf; ++k) s2 += beta[k] * beta[k];
        sig_head = shf * std::sqrt(s2_head);
        sig_tail = shf * std::sqrt(s2 - s2_head);
    }

    RandomStream init(keys.initial);
    double x0;
    model.initial_sampler(init, {&x0, 1});
    const JumpStream jumps = generate_jump_stream(model.jump_law, T, keys.jumps);
    RandomStream ws(keys.wiener);
    RandomStream theta_rare(keys.theta_rare);
    RandomStream theta_fine(keys.theta_fine);

    double xr = x0, xf = x0;
    std::vector<double> rare_dw(M);
    std::size_t jc = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        const std::size_t rare_lo = jc;
        double rare_agg = 0.0;  // collapsed: sum of head aggregates over the slab
        if (path == NoisePath::PerDim) std::memset(rare_dw.data(), 0, sizeof(double) * M);

        for (std::int64_t jj = 0; jj < mult_step; ++jj) {
            const std::int64_t fstep = i * mult_step + jj;
            const double tf = static_cast<double>(fstep) * Hf;
            const double theta = tf + theta_fine.uniform01() * Hf;
            const double x_pre = xf;
            double xn = x_pre + ops.drift(theta, x_pre) * Hf;
            const double g = ops.factor(tf, x_pre);
            if (path == NoisePath::PerDim) {
                int k = 0;
                for (; k < M; ++k) {
                    const double dw = ws.normal() * shf;
                    rare_dw[k] += dw;
                    xn += (beta[k] * g) * dw;
                }
                for (; k < Mf; ++k) {
                    const double dw = ws.normal() * shf;
                    xn += (beta[k] * g) * dw;
                }
            } else {
                const double head = ws.normal() * sig_head;
                const double tail = ws.normal() * sig_tail;
                rare_agg += head;
                xn += g * head;
                xn += g * tail;
            }
            const std::size_t lo = jc;
            const double hi = (fstep + 1 == nf) ? kInf : static_cast<double>(fstep + 1) * Hf;
            while (jc < jumps.count() && jumps.times[jc] <= hi) ++jc;
            xn = ops.jumps(tf, x_pre, xn, jumps, lo, jc);
            if (!std::isfinite(xn)) throw NonFiniteState(fstep);
            xf = xn;
        }

        const double tr = static_cast<double>(i) * h;
        const double theta = tr + theta_rare.uniform01() * h;
        const double x_pre = xr;
        double xn = x_pre + ops.drift(theta, x_pre) * h;
        const double g = ops.factor(tr, x_pre);
        if (path == NoisePath::PerDim) {
            for (int k = 0; k < M; ++k) xn += (beta[k] * g) * rare_dw[k];
        } else {
            xn += g * rare_agg;
        }
        xn = ops.jumps(tr, x_pre, xn, jumps, rare_lo, jc);
        if (!std::isfinite(xn)) throw NonFiniteState(i);
        xr = xn;
    }

    const auto count = static_cast<std::int64_t>(jumps.count());
    SchemeParams fine_params{Mf, nf, T, params.order_p};
    return {{{xr}, count, params}, {{xf}, count, fine_params}};
}

ReferencePair scalar_with_reference(const detail::CompiledModel& cm, const SchemeParams& params,
                                    int ref_mult, const detail::CoupledKeys& keys) {
    const ModelSpec& model = *cm.spec;
    const int M = params.truncation_dim;
    const int Mref = M * ref_mult;
    const std::int64_t n = params.steps;
    const double T = params.horizon;
    const double h = T / static_cast<double>(n);
    const double sh = std::sqrt(h);
    const double* beta = cm.beta.data();
    ScalarOps ops{cm};

    RandomStream init(keys.initial);
    double x;
    model.initial_sampler(init, {&x, 1});
    const JumpStream jumps = generate_jump_stream(model.jump_law, T, keys.jumps);
    RandomStream ws(keys.wiener);
    RandomStream theta_stream(keys.theta_rare);

    std::vector<double> endpoints(Mref, 0.0);
    std::size_t jc = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * h;
        const double theta = t + theta_stream.uniform01() * h;
        const double x_pre = x;
        double xn = x_pre + ops.drift(theta, x_pre) * h;
        const double g = ops.factor(t, x_pre);
        for (int k = 0; k < M; ++k) {
            const double dw = ws.normal() * sh;
            endpoints[k] += dw;
            xn += (beta[k] * g) * dw;
        }
        const std::size_t lo = jc;
        const double hi = (i + 1 == n) ? kInf : static_cast<double>(i + 1) * h;
        while (jc < jumps.count() && jumps.times[jc] <= hi) ++jc;
        xn = ops.jumps(t, x_pre, xn, jumps, lo, jc);
        if (!std::isfinite(xn)) throw NonFiniteState(i);
        x = xn;
    }
    // Tail dims are never seen by the scheme; their endpoints continue the
    // same Wiener stream as single N(0,T) draws.
    const double sT = std::sqrt(T);
    for (int k = M; k < Mref; ++k) endpoints[k] = ws.normal() * sT;

    ReferencePair out;
    out.scheme = TerminalValue{{x}, static_cast<std::int64_t>(jumps.count()), params};
    out.reference.resize(model.dim);
    model.exact_reference->terminal(Mref, endpoints, jumps, out.reference);
    out.jump_count = out.scheme.jump_count;
    return out;
}

// ---- generic reference kernels ------------------------------------------
//
// Any state dimension, any diffusion. Noise is materialized exactly as the
// public grid operations describe (fine grid drawn in full, rare grid by
// aggregation); stepping goes through randomized_euler_step. The optimized
// kernels above must reproduce these results bit for bit.

struct GenericRun {
    std::vector<double> x;
    std::int64_t jump_count = 0;
};

GenericRun generic_walk(const ModelSpec& model, int truncation, std::int64_t steps,
                        double horizon, double coeff_step, const NoiseGrid& grid,
                        const JumpStream& jumps, RandomStream& theta_stream,
                        std::vector<double> x, std::int64_t window_stride,
                        std::int64_t window_total, double window_step,
                        std::vector<PathPoint>* recorder = nullptr) {
    // Jump windows are defined on the finest index grid of the run:
    // step i covers fine indices [i*window_stride, (i+1)*window_stride).
    std::size_t jc = 0;
    if (recorder) recorder->push_back({0.0, x});
    for (std::int64_t i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) * coeff_step;
        StepInputs in;
        in.t = t;
        in.h = coeff_step;
        in.theta = t + theta_stream.uniform01() * coeff_step;
        in.dW = std::span<const double>(
            grid.increments.data() + static_cast<std::size_t>(i) * grid.dims,
            static_cast<std::size_t>(truncation));
        in.jumps = &jumps;
        in.jump_begin = jc;
        const std::int64_t edge = (i + 1) * window_stride;
        const double hi = (edge == window_total) ? kInf : static_cast<double>(edge) * window_step;
        while (jc < jumps.count() && jumps.times[jc] <= hi) ++jc;
        in.jump_end = jc;
        x = randomized_euler_step(model, truncation, x, in);
        check_finite(x, i);
        if (recorder) recorder->push_back({static_cast<double>(i + 1) * coeff_step, x});
    }
    (void)horizon;
    return {std::move(x), static_cast<std::int64_t>(jumps.count())};
}

TerminalValue generic_single(const detail::CompiledModel& cm, const SchemeParams& params,
                             const detail::CoupledKeys& keys) {
    const ModelSpec& model = *cm.spec;
    const std::int64_t n = params.steps;
    const double T = params.horizon;
    const double h = T / static_cast<double>(n);

    RandomStream init(keys.initial);
    std::vector<double> x0(model.dim);
    model.initial_sampler(init, x0);
    const JumpStream jumps = generate_jump_stream(model.jump_law, T, keys.jumps);

    NoiseGrid grid;
    grid.steps = n;
    grid.dims = params.truncation_dim;
    grid.step_size = h;
    grid.increments.resize(static_cast<std::size_t>(n) * grid.dims);
    RandomStream ws(keys.wiener);
    detail::fill_grid(ws, grid);

    RandomStream theta_stream(keys.theta_rare);
    GenericRun run = generic_walk(model, params.truncation_dim, n, T, h, grid, jumps,
                                  theta_stream, std::move(x0), 1, n, h);
    return {std::move(run.x), run.jump_count, params};
}

CoupledPair generic_coupled(const detail::CompiledModel& cm, const SchemeParams& params,
                            int mult_dim, int mult_step, const detail::CoupledKeys& keys) {
    const ModelSpec& model = *cm.spec;
    const int M = params.truncation_dim;
    const int Mf = M * mult_dim;
    const std::int64_t n = params.steps;
    const std::int64_t nf = n * mult_step;
    const double T = params.horizon;
    const double h = T / static_cast<double>(n);

    RandomStream init(keys.initial);
    std::vector<double> x0(model.dim);
    model.initial_sampler(init, x0);
    const JumpStream jumps = generate_jump_stream(model.jump_law, T, keys.jumps);

    NoiseGrid fine;
    fine.steps = nf;
    fine.dims = Mf;
    fine.step_size = T / static_cast<double>(nf);
    fine.increments.resize(static_cast<std::size_t>(nf) * Mf);
    RandomStream ws(keys.wiener);
    detail::fill_grid(ws, fine);
    const NoiseGrid rare = aggregate_to_rare(fine, mult_step, M);

    RandomStream theta_fine(keys.theta_fine);
    GenericRun fine_run = generic_walk(model, Mf, nf, T, fine.step_size, fine, jumps,
                                       theta_fine, x0, 1, nf, fine.step_size);
    RandomStream theta_rare(keys.theta_rare);
    GenericRun rare_run = generic_walk(model, M, n, T, h, rare, jumps, theta_rare,
                                       std::move(x0), mult_step, nf, fine.step_size);

    SchemeParams fine_params{Mf, nf, T, params.order_p};
    return {{std::move(rare_run.x), rare_run.jump_count, params},
            {std::move(fine_run.x), fine_run.jump_count, fine_params}};
}

ReferencePair generic_with_reference(const detail::CompiledModel& cm,
                                     const SchemeParams& params, int ref_mult,
                                     const detail::CoupledKeys& keys) {
    const ModelSpec& model = *cm.spec;
    const int M = params.truncation_dim;
    const int Mref = M * ref_mult;
    const std::int64_t n = params.steps;
    const double T = params.horizon;
    const double h = T / static_cast<double>(n);

    RandomStream init(keys.initial);
    std::vector<double> x0(model.dim);
    model.initial_sampler(init, x0);
    const JumpStream jumps = generate_jump_stream(model.jump_law, T, keys.jumps);

    NoiseGrid grid;
    grid.steps = n;
    grid.dims = M;
    grid.step_size = h;
    grid.increments.resize(static_cast<std::size_t>(n) * M);
    RandomStream ws(keys.wiener);
    detail::fill_grid(ws, grid);

    // W_k(T) for k <= M by exact ascending column summation of the scheme's
    // grid; tail dims as fresh N(0,T) draws continuing the same stream.
    std::vector<double> endpoints(Mref, 0.0);
    for (std::int64_t i = 0; i < n; ++i)
        for (int k = 0; k < M; ++k) endpoints[k] += grid.at(i, k);
    const double sT = std::sqrt(T);
    for (int k = M; k < Mref; ++k) endpoints[k] = ws.normal() * sT;

    RandomStream theta_stream(keys.theta_rare);
    GenericRun run = generic_walk(model, M, n, T, h, grid, jumps, theta_stream,
                                  std::move(x0), 1, n, h);

    ReferencePair out;
    out.scheme = TerminalValue{std::move(run.x), run.jump_count, params};
    out.reference.resize(model.dim);
    model.exact_reference->terminal(Mref, endpoints, jumps, out.reference);
    out.jump_count = out.scheme.jump_count;
    return out;
}

}  // namespace

namespace detail {

CoupledKeys CoupledKeys::from(std::uint64_t base_seed, std::uint64_t trajectory_index) {
    StreamKey base{base_seed, trajectory_index, Channel::WienerFine};
    return {base, base.with_channel(Channel::ThetaRare), base.with_channel(Channel::ThetaFine),
            base.with_channel(Channel::Jumps), base.with_channel(Channel::Initial)};
}

CompiledModel CompiledModel::build(const ModelSpec& model, int max_dims) {
    CompiledModel cm;
    cm.spec = &model;
    if (model.dim == 1 && model.diffusion.separable) {
        cm.scalar_separable = true;
        cm.beta.resize(max_dims);
        for (int j = 1; j <= max_dims; ++j) cm.beta[j - 1] = model.diffusion.separable->coef(j);
    }
    if (model.affine_drift) {
        cm.affine_drift = true;
        cm.drift_add = model.affine_drift->add;
        cm.drift_scale = model.affine_drift->scale;
    }
    return cm;
}

void fill_grid(RandomStream& rs, NoiseGrid& grid) {
    const double scale = std::sqrt(grid.step_size);
    for (double& entry : grid.increments) entry = rs.normal() * scale;
}

TerminalValue simulate_terminal_impl(const CompiledModel& cm, const SchemeParams& params,
                                     const CoupledKeys& keys, KernelMode mode) {
    check_params(params);
    if (mode == KernelMode::Auto && cm.scalar_separable) return scalar_single(cm, params, keys);
    return generic_single(cm, params, keys);
}

CoupledPair simulate_coupled_impl(const CompiledModel& cm, const SchemeParams& params,
                                  int fine_dim_mult, int fine_step_mult, const CoupledKeys& keys,
                                  NoisePath path, KernelMode mode) {
    check_params(params);
    if (fine_dim_mult < 1) throw InvalidParameter("fine_dim_mult", "must be >= 1");
    if (fine_step_mult < 1) throw InvalidParameter("fine_step_mult", "must be >= 1");
    if (path == NoisePath::Collapsed) {
        if (!cm.scalar_separable)
            throw InvalidParameter("noise",
                                   "collapsed path requires a scalar separable diffusion");
        return scalar_coupled(cm, params, fine_dim_mult, fine_step_mult, keys, path);
    }
    if (mode == KernelMode::Auto && cm.scalar_separable)
        return scalar_coupled(cm, params, fine_dim_mult, fine_step_mult, keys, path);
    return generic_coupled(cm, params, fine_dim_mult, fine_step_mult, keys);
}

ReferencePair simulate_with_reference_impl(const CompiledModel& cm, const SchemeParams& params,
                                           int reference_dim_mult, const CoupledKeys& keys,
                                           KernelMode mode) {
    check_params(params);
    if (reference_dim_mult < 1) throw InvalidParameter("reference_dim_mult", "must be >= 1");
    if (!cm.spec->exact_reference) throw MissingReference();
    if (mode == KernelMode::Auto && cm.scalar_separable)
        return scalar_with_reference(cm, params, reference_dim_mult, keys);
    return generic_with_reference(cm, params, reference_dim_mult, keys);
}

}  // namespace detail

std::vector<double> randomized_euler_step(const ModelSpec& model, int truncation,
                                          std::span<const double> x, const StepInputs& in) {
    if (static_cast<int>(in.dW.size()) != truncation)
        throw DimensionMismatch("dW has " + std::to_string(in.dW.size()) +
                                " entries, expected " + std::to_string(truncation));
    const int d = model.dim;
    std::vector<double> out(x.begin(), x.end());
    std::vector<double> buf(d);

    model.drift(in.theta, x, buf);
    for (int c = 0; c < d; ++c) out[c] += buf[c] * in.h;

    for (int j = 1; j <= truncation; ++j) {
        model.diffusion.eval_term(j, in.t, x, buf);
        for (int c = 0; c < d; ++c) out[c] += buf[c] * in.dW[j - 1];
    }

    if (in.jumps) {
        for (std::size_t k = in.jump_begin; k < in.jump_end; ++k) {
            model.jump_coeff(in.t, x, in.jumps->mark(k), buf);
            for (int c = 0; c < d; ++c) out[c] += buf[c];
        }
    }
    return out;
}

TerminalValue simulate_terminal(const ModelSpec& model, const SchemeParams& params,
                                std::uint64_t base_seed, std::uint64_t trajectory_index) {
    const auto cm = detail::CompiledModel::build(model, params.truncation_dim);
    return detail::simulate_terminal_impl(cm, params,
                                          detail::CoupledKeys::from(base_seed, trajectory_index),
                                          detail::KernelMode::Auto);
}

std::vector<PathPoint> simulate_path(const ModelSpec& model, const SchemeParams& params,
                                     std::uint64_t base_seed, std::uint64_t trajectory_index) {
    check_params(params);
    const auto keys = detail::CoupledKeys::from(base_seed, trajectory_index);
    const std::int64_t n = params.steps;
    const double T = params.horizon;
    const double h = T / static_cast<double>(n);

    RandomStream init(keys.initial);
    std::vector<double> x0(model.dim);
    model.initial_sampler(init, x0);
    const JumpStream jumps = generate_jump_stream(model.jump_law, T, keys.jumps);
    NoiseGrid grid;
    grid.steps = n;
    grid.dims = params.truncation_dim;
    grid.step_size = h;
    grid.increments.resize(static_cast<std::size_t>(n) * grid.dims);
    RandomStream ws(keys.wiener);
    detail::fill_grid(ws, grid);
    RandomStream theta_stream(keys.theta_rare);

    std::vector<PathPoint> path;
    path.reserve(static_cast<std::size_t>(n) + 1);
    generic_walk(model, params.truncation_dim, n, T, h, grid, jumps, theta_stream,
                 std::move(x0), 1, n, h, &path);
    return path;
}

CoupledPair simulate_coupled_pair(const ModelSpec& model, const SchemeParams& params,
                                  int fine_dim_mult, int fine_step_mult,
                                  std::uint64_t base_seed, std::uint64_t trajectory_index,
                                  NoisePath path) {
    const auto cm =
        detail::CompiledModel::build(model, params.truncation_dim * std::max(fine_dim_mult, 1));
    return detail::simulate_coupled_impl(cm, params, fine_dim_mult, fine_step_mult,
                                         detail::CoupledKeys::from(base_seed, trajectory_index),
                                         path, detail::KernelMode::Auto);
}

ReferencePair simulate_with_reference(const ModelSpec& model, const SchemeParams& params,
                                      int reference_dim_mult, std::uint64_t base_seed,
                                      std::uint64_t trajectory_index) {
    const auto cm = detail::CompiledModel::build(model, params.truncation_dim);
    return detail::simulate_with_reference_impl(
        cm, params, reference_dim_mult, detail::CoupledKeys::from(base_seed, trajectory_index),
        detail::KernelMode::Auto);
}

}  // namespace jumpeuler
