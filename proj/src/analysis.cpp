#include "jumpeuler/analysis.hpp"

#include <cmath>
#include <limits>

#include "jumpeuler/errors.hpp"

namespace jumpeuler {

std::pair<double, double> fit_loglog_slope(const std::vector<ConvergenceRow>& rows) {
    if (rows.size() < 2) throw InvalidParameter("rows", "need >= 2 rows for a regression");
    const auto n = static_cast<double>(rows.size());
    double mx = 0.0, my = 0.0;
    for (const auto& r : rows) {
        if (!(r.cost > 0.0)) throw InvalidParameter("cost", "must be > 0 for the log scale");
        if (!(r.error > 0.0)) throw InvalidParameter("error", "must be > 0 for the log scale");
        mx += std::log(r.cost);
        my += std::log(r.error);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& r : rows) {
        const double dx = std::log(r.cost) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(r.error) - my);
    }
    if (!(sxx > 0.0)) throw InvalidParameter("cost", "need >= 2 distinct costs");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

RatePrediction predict_rate(const ClassParams& params, double alpha) {
    if (!(alpha >= 1.0)) throw InvalidParameter("alpha", "must be >= 1");
    RatePrediction out;
    out.alpha = alpha;
    out.gamma = std::min(std::min(params.rho1, params.rho2), 1.0 / params.order_p);
    if (out.gamma == 0.5) out.slope = 1.0 / (4.0 * alpha) - 0.5;
    return out;
}

std::int64_t delta_inverse(const std::function<double(std::int64_t)>& delta, double x) {
    if (!(x > 0.0)) throw InvalidParameter("x", "must be > 0");
    if (delta(1) <= x) return 1;
    // Exponential bracketing: find hi with delta(hi) <= x.
    std::int64_t lo = 1, hi = 2;
    constexpr std::int64_t kCeiling = std::int64_t{1} << 56;
    while (delta(hi) > x) {
        lo = hi;
        if (hi > kCeiling)
            throw InvalidParameter("delta", "does not reach the target within 2^57");
        hi *= 2;
    }
    // Invariant: delta(lo) > x >= delta(hi); shrink to hi == lo + 1.
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        (delta(mid) > x ? lo : hi) = mid;
    }
    return hi;
}

std::pair<std::int64_t, std::int64_t> optimal_params(
    double epsilon, double gamma, const std::function<double(std::int64_t)>& delta,
    double rate_constant) {
    if (!(epsilon > 0.0)) throw InvalidParameter("epsilon", "must be > 0");
    if (!(gamma > 0.0)) throw InvalidParameter("gamma", "must be > 0");
    if (!(rate_constant > 0.0)) throw InvalidParameter("rate_constant", "must be > 0");
    const double half_budget = epsilon / (2.0 * rate_constant);
    const double n_real = std::pow(1.0 / half_budget, 1.0 / gamma);
    if (!(n_real < 9e15)) throw InvalidParameter("epsilon", "step count overflows");
    const std::int64_t steps = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(n_real)));
    const std::int64_t truncation = delta_inverse(delta, half_budget);
    return {truncation, steps};
}

}  // namespace jumpeuler
