#include "jumpeuler/builtin_models.hpp"

#include <cmath>

#include "jumpeuler/errors.hpp"

namespace jumpeuler {
namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779;

// Adaptive Simpson with absolute tolerance; plenty for smooth integrands.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double both = left + right;
    if (depth <= 0 || std::fabs(both - whole) <= 15.0 * tol) {
        return both + (both - whole) / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Shared series machinery: beta_j = sigma / j^alpha. tail_delta stays
// strictly decreasing even for sigma = 0 (the bound then holds with C = 0).
SeparableSeries power_series(double sigma, double alpha,
                             std::function<void(double, std::span<const double>, std::span<double>)>
                                 factor) {
    SeparableSeries s;
    s.coef = [sigma, alpha](int j) { return sigma * std::pow(static_cast<double>(j), -alpha); };
    s.factor = std::move(factor);
    return s;
}

SeriesDiffusion power_diffusion(double sigma, double alpha, bool state_factor) {
    SeriesDiffusion diff;
    if (state_factor) {
        diff.separable = power_series(sigma, alpha, [](double, std::span<const double> x,
                                                       std::span<double> out) { out[0] = x[0]; });
    } else {
        diff.separable = power_series(
            sigma, alpha, [](double, std::span<const double>, std::span<double> out) {
                out[0] = 1.0;
            });
    }
    const auto coef = diff.separable->coef;
    const auto factor = diff.separable->factor;
    diff.eval_term = [coef, factor](int j, double t, std::span<const double> x,
                                    std::span<double> out) {
        factor(t, x, out);
        out[0] = coef(j) * out[0];
    };
    const double delta_scale = sigma > 0.0 ? sigma : 1.0;
    diff.tail_delta = [delta_scale, alpha](int k) {
        return delta_scale * power_tail_delta(alpha, k);
    };
    return diff;
}

}  // namespace

ModelSpec make_ou_model(const OuJumpSpec& spec) {
    if (!(spec.horizon > 0.0)) throw InvalidParameter("horizon", "must be > 0");
    if (!(spec.alpha >= 1.0)) throw InvalidParameter("alpha", "must be >= 1");
    if (!(spec.lambda >= 0.0)) throw InvalidParameter("lambda", "must be >= 0");
    if (!(spec.sigma >= 0.0)) throw InvalidParameter("sigma", "must be >= 0");

    std::function<double(double)> c1 = spec.jump_c1;
    if (!c1) c1 = [](double t) { return t; };

    ModelSpec model;
    model.dim = 1;
    model.horizon = spec.horizon;
    model.affine_drift = ModelSpec::AffineDrift{spec.mu, -spec.mean_reversion};
    const double add = spec.mu, scale = -spec.mean_reversion;
    model.drift = [add, scale](double, std::span<const double> x, std::span<double> out) {
        out[0] = add + scale * x[0];
    };
    model.diffusion = power_diffusion(spec.sigma, spec.alpha, /*state_factor=*/false);
    model.jump_coeff = [c1](double t, std::span<const double>, std::span<const double>,
                            std::span<double> out) { out[0] = c1(t); };
    model.jump_law.intensity = spec.lambda;
    model.jump_law.mark_dim = 1;
    model.jump_law.mark_sampler = [](RandomStream&, std::span<double> out) { out[0] = 0.0; };
    const double eta = spec.eta;
    model.initial_sampler = [eta](RandomStream&, std::span<double> out) { out[0] = eta; };
    model.class_params.order_p = 2.0;
    model.class_params.rho1 = 1.0;
    model.class_params.rho2 = 1.0;
    model.class_params.lipschitz_L = std::max(std::fabs(spec.mean_reversion), 1.0);
    model.class_params.growth_D = std::max(std::fabs(spec.mu), spec.sigma);
    model.class_params.tail_C = spec.sigma;
    return model;
}

double ou_mean(const OuJumpSpec& spec, double t) {
    if (t < 0.0 || t > spec.horizon) throw InvalidParameter("t", "must lie in [0, horizon]");
    std::function<double(double)> c1 = spec.jump_c1;
    if (!c1) c1 = [](double s) { return s; };
    const double a = spec.mean_reversion;
    const double i1 = integrate([a](double s) { return std::exp(a * s); }, 0.0, t, 1e-11);
    const double i2 =
        integrate([a, &c1](double s) { return std::exp(a * s) * c1(s); }, 0.0, t, 1e-11);
    return std::exp(-a * t) * (spec.eta + spec.mu * i1 + spec.lambda * i2);
}

ModelSpec make_merton_model(const MertonSpec& spec) {
    if (!(spec.horizon > 0.0)) throw InvalidParameter("horizon", "must be > 0");
    if (!(spec.alpha >= 1.0)) throw InvalidParameter("alpha", "must be >= 1");
    if (!(spec.lambda >= 0.0)) throw InvalidParameter("lambda", "must be >= 0");
    if (!(spec.sigma >= 0.0)) throw InvalidParameter("sigma", "must be >= 0");
    if (!(spec.eta > 0.0)) throw InvalidParameter("eta", "must be > 0 for the log-form solution");

    ModelSpec model;
    model.dim = 1;
    model.horizon = spec.horizon;
    model.affine_drift = ModelSpec::AffineDrift{0.0, spec.mu};
    const double mu = spec.mu;
    model.drift = [mu](double, std::span<const double> x, std::span<double> out) {
        out[0] = 0.0 + mu * x[0];
    };
    model.diffusion = power_diffusion(spec.sigma, spec.alpha, /*state_factor=*/true);
    model.jump_coeff = [](double, std::span<const double> x, std::span<const double> y,
                          std::span<double> out) { out[0] = x[0] * y[0]; };
    model.jump_law.intensity = spec.lambda;
    model.jump_law.mark_dim = 1;
    model.jump_law.mark_sampler = [](RandomStream& rs, std::span<double> out) {
        const double y = rs.normal();
        out[0] = y <= 0.0 ? -0.5 : 0.5 + y;
    };
    // kappa_2: E xi^2 = 1/8 + 1/8 + 1/sqrt(2 pi) + 1/2.
    model.jump_law.mark_p_moment = std::sqrt(0.75 + kInvSqrt2Pi);
    const double eta = spec.eta;
    model.initial_sampler = [eta](RandomStream&, std::span<double> out) { out[0] = eta; };

    const MertonSpec snapshot = spec;
    model.exact_reference = ExactReference{
        [snapshot](int truncation, std::span<const double> endpoints, const JumpStream& jumps,
                   std::span<double> out) {
            out[0] = merton_exact_terminal(snapshot, truncation, endpoints, jumps);
        }};

    model.class_params.order_p = 2.0;
    model.class_params.rho1 = 1.0;
    model.class_params.rho2 = 1.0;
    model.class_params.lipschitz_L = std::max(std::fabs(spec.mu), spec.sigma);
    model.class_params.growth_D = spec.sigma;
    model.class_params.tail_C = spec.sigma;
    return model;
}

double merton_exact_terminal(const MertonSpec& spec, int truncation,
                             std::span<const double> wiener_endpoints, const JumpStream& jumps) {
    if (truncation < 0) throw InvalidParameter("truncation", "must be >= 0");
    if (static_cast<int>(wiener_endpoints.size()) != truncation)
        throw DimensionMismatch("endpoints has " + std::to_string(wiener_endpoints.size()) +
                                " entries, expected " + std::to_string(truncation));
    double s2 = 0.0;
    double sw = 0.0;
    for (int j = 1; j <= truncation; ++j) {
        const double beta = spec.sigma * std::pow(static_cast<double>(j), -spec.alpha);
        s2 += beta * beta;
        sw += beta * wiener_endpoints[j - 1];
    }
    double x = spec.eta * std::exp((spec.mu - 0.5 * s2) * spec.horizon + sw);
    for (std::size_t k = 0; k < jumps.count(); ++k) x *= 1.0 + jumps.mark(k)[0];
    return x;
}

double merton_mean(const MertonSpec& spec, double t) {
    if (t < 0.0 || t > spec.horizon) throw InvalidParameter("t", "must lie in [0, horizon]");
    return spec.eta * std::exp((spec.mu + spec.lambda * kInvSqrt2Pi) * t);
}

}  // namespace jumpeuler
