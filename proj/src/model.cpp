#include "jumpeuler/model.hpp"

#include <cmath>
#include <cstring>

#include "jumpeuler/errors.hpp"

namespace jumpeuler {
namespace {

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

bool same_bits(std::span<const double> a, std::span<const double> b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::memcmp(&a[i], &b[i], sizeof(double)) != 0) return false;
    return true;
}

}  // namespace

void validate_model(const ModelSpec& model) {
    if (!(model.horizon > 0.0)) throw InvalidParameter("horizon", "must be > 0");
    if (model.dim < 1) throw InvalidParameter("dim", "must be >= 1");
    if (!(model.jump_law.intensity >= 0.0))
        throw InvalidParameter("jump_law.intensity", "must be >= 0");
    if (model.jump_law.mark_dim < 1) throw InvalidParameter("jump_law.mark_dim", "must be >= 1");
    const ClassParams& cp = model.class_params;
    if (!(cp.order_p >= 2.0)) throw InvalidParameter("class_params.order_p", "must be >= 2");
    if (!(cp.rho1 > 0.0 && cp.rho1 <= 1.0))
        throw InvalidParameter("class_params.rho1", "must be in (0,1]");
    if (!(cp.rho2 > 0.0 && cp.rho2 <= 1.0))
        throw InvalidParameter("class_params.rho2", "must be in (0,1]");
    if (!model.drift) throw InvalidParameter("drift", "missing");
    if (!model.diffusion.eval_term) throw InvalidParameter("diffusion.eval_term", "missing");
    if (!model.diffusion.tail_delta) throw InvalidParameter("diffusion.tail_delta", "missing");
    if (!model.jump_coeff) throw InvalidParameter("jump_coeff", "missing");
    if (!model.initial_sampler) throw InvalidParameter("initial_sampler", "missing");

    // Probe every coefficient at (t,x) = (0, 0-vector) and spot-check purity
    // by double evaluation (a documented contract, not a proof).
    const std::vector<double> origin(model.dim, 0.0);
    const std::vector<double> zero_mark(model.jump_law.mark_dim, 0.0);
    std::vector<double> out1(model.dim), out2(model.dim);

    model.drift(0.0, origin, out1);
    if (!all_finite(out1)) throw NonFiniteCoefficient("drift", "probe at (0, 0)");
    model.drift(0.0, origin, out2);
    if (!same_bits(out1, out2)) throw InvalidParameter("drift", "purity spot check failed");
    if (model.affine_drift) {
        const double expect = model.affine_drift->add;
        for (double v : out1)
            if (v != expect)
                throw InvalidParameter("affine_drift", "disagrees with drift at probe point");
    }

    model.diffusion.eval_term(1, 0.0, origin, out1);
    if (!all_finite(out1)) throw NonFiniteCoefficient("diffusion", "term 1 at (0, 0)");
    model.diffusion.eval_term(1, 0.0, origin, out2);
    if (!same_bits(out1, out2))
        throw InvalidParameter("diffusion.eval_term", "purity spot check failed");

    model.jump_coeff(0.0, origin, zero_mark, out1);
    if (!all_finite(out1)) throw NonFiniteCoefficient("jump_coeff", "probe at (0, 0, 0)");
    model.jump_coeff(0.0, origin, zero_mark, out2);
    if (!same_bits(out1, out2)) throw InvalidParameter("jump_coeff", "purity spot check failed");

    // tail_delta must be positive and strictly decreasing; sampled on a
    // geometric ladder (the limit itself is not checkable from finitely
    // many terms).
    double prev = model.diffusion.tail_delta(1);
    if (!(prev > 0.0) || !std::isfinite(prev))
        throw InvalidParameter("diffusion.tail_delta", "delta(1) must be finite and > 0");
    for (int k = 2; k <= 1024; k *= 2) {
        const double cur = model.diffusion.tail_delta(k);
        if (!std::isfinite(cur) || !(cur < prev) || !(cur > 0.0))
            throw InvalidParameter("diffusion.tail_delta",
                                   "must be strictly decreasing and positive (k=" +
                                       std::to_string(k) + ")");
        prev = cur;
    }
}

std::vector<double> truncated_diffusion_apply(const ModelSpec& model, int truncation, double t,
                                              std::span<const double> x,
                                              std::span<const double> dW, bool compensated) {
    if (truncation < 1) throw InvalidParameter("truncation", "must be >= 1");
    if (static_cast<int>(dW.size()) != truncation)
        throw DimensionMismatch("dW has " + std::to_string(dW.size()) + " entries, expected " +
                                std::to_string(truncation));
    std::vector<double> acc(model.dim, 0.0);
    std::vector<double> comp(compensated ? model.dim : 0, 0.0);
    std::vector<double> term(model.dim);
    for (int j = 1; j <= truncation; ++j) {
        model.diffusion.eval_term(j, t, x, term);
        for (int c = 0; c < model.dim; ++c) {
            const double v = term[c] * dW[j - 1];
            if (!compensated) {
                acc[c] += v;
            } else {
                const double y = v - comp[c];
                const double s = acc[c] + y;
                comp[c] = (s - acc[c]) - y;
                acc[c] = s;
            }
        }
    }
    return acc;
}

double power_tail_delta(double alpha, std::int64_t truncation) {
    if (!(alpha >= 1.0)) throw InvalidParameter("alpha", "must be >= 1");
    if (truncation < 0) throw InvalidParameter("truncation", "must be >= 0");
    const double s = 2.0 * alpha;
    // Midpoint rule: sum_{j>J} j^-s ~ integral_{J+1/2}^inf u^-s du, with error
    // bounded by ~ s/24 * J^-(s+1) (Euler-Maclaurin). Sum explicit terms until
    // that bound is < 1e-14, then add the corrected remainder.
    double sum = 0.0;
    std::int64_t j = truncation + 1;
    while (s / 24.0 * std::pow(static_cast<double>(j), -s - 1.0) >= 1e-14) {
        sum += std::pow(static_cast<double>(j), -s);
        ++j;
    }
    sum += std::pow(static_cast<double>(j) - 0.5, 1.0 - s) / (s - 1.0);
    return std::sqrt(sum);
}

}  // namespace jumpeuler
