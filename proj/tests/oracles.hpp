#pragma once

// Test-only oracles, independent of the library's implementation paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace oracles {

// Brute-force tail sum sum_{j=M+1..inf} j^(-2 alpha): J explicit terms under
// Kahan compensation (a plain 1e7-term sum loses ~1e-10), then the average of
// the two integral bounds (bracket width J^(-2 alpha) < 1e-14 for J = 1e7 and
// alpha >= 1).
inline double tail_sum_brute(double alpha, std::int64_t truncation, std::int64_t terms = 10'000'000) {
    const double s = 2.0 * alpha;
    double sum = 0.0, comp = 0.0;
    const std::int64_t last = truncation + terms;
    for (std::int64_t j = truncation + 1; j <= last; ++j) {
        const double y = std::pow(static_cast<double>(j), -s) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    const double lower = std::pow(static_cast<double>(last + 1), 1.0 - s) / (s - 1.0);
    const double upper = std::pow(static_cast<double>(last), 1.0 - s) / (s - 1.0);
    return sum + 0.5 * (lower + upper);
}

inline double power_delta_brute(double alpha, std::int64_t truncation) {
    return std::sqrt(tail_sum_brute(alpha, truncation));
}

// Composite trapezoid rule on a uniform grid.
template <class F>
double trapezoid(F&& f, double a, double b, std::int64_t panels) {
    const double h = (b - a) / static_cast<double>(panels);
    double sum = 0.5 * (f(a) + f(b));
    for (std::int64_t i = 1; i < panels; ++i) sum += f(a + h * static_cast<double>(i));
    return sum * h;
}

// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Two-sided Kolmogorov-Smirnov statistic against N(0, sigma^2).
inline double ks_statistic_normal(std::vector<double> sample, double sigma) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double cdf = normal_cdf(sample[i] / sigma);
        d = std::max(d, std::fabs((static_cast<double>(i) + 1.0) / n - cdf));
        d = std::max(d, std::fabs(cdf - static_cast<double>(i) / n));
    }
    return d;
}

// KS critical value at significance level a (asymptotic): sqrt(ln(2/a)/2)/sqrt(n).
inline double ks_critical(double a, std::size_t n) {
    return std::sqrt(std::log(2.0 / a) / 2.0) / std::sqrt(static_cast<double>(n));
}

// Variance of the randomized Riemann sum sum_i f(theta_i) h for f(t) = t^2,
// theta_i ~ U[t_i, t_i + h] independent: per-step h^2 Var(theta^2) from the
// exact uniform moments.
inline double randomized_square_sum_variance(double horizon, std::int64_t steps) {
    const double h = horizon / static_cast<double>(steps);
    double var = 0.0;
    for (std::int64_t i = 0; i < steps; ++i) {
        const double a = static_cast<double>(i) * h;
        const double b = a + h;
        const double m2 = (a * a + a * b + b * b) / 3.0;
        const double m4 =
            (a * a * a * a + a * a * a * b + a * a * b * b + a * b * b * b + b * b * b * b) / 5.0;
        var += h * h * (m4 - m2 * m2);
    }
    return var;
}

struct Moments {
    double mean = 0.0;
    double var = 0.0;       // sample variance
    double se_mean = 0.0;   // sqrt(var / n)
};

inline Moments moments(std::span<const double> xs) {
    Moments m;
    const double n = static_cast<double>(xs.size());
    for (double x : xs) m.mean += x;
    m.mean /= n;
    for (double x : xs) m.var += (x - m.mean) * (x - m.mean);
    m.var /= (n - 1.0);
    m.se_mean = std::sqrt(m.var / n);
    return m;
}

}  // namespace oracles
