#pragma once

// Log-log convergence regression, theoretical rate prediction, and the
// optimal (M, n) planner derived from the complexity bound: with
// gamma = min(rho1, rho2, 1/p), picking the minimal n with K n^-gamma <= eps/2
// and minimal M with K delta(M) <= eps/2 achieves error <= eps at cost M*n.

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "jumpeuler/model.hpp"

namespace jumpeuler {

struct ConvergenceRow {
    int truncation_dim = 0;    // M
    std::int64_t steps = 0;    // n
    double cost = 0.0;         // M * n
    double error = 0.0;
    double std_error = 0.0;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    std::optional<double> slope;       // undefined with < 2 rows or zero errors
    std::optional<double> intercept;
    std::optional<double> predicted_slope;
};

struct RatePrediction {
    double gamma = 0.5;                  // min(rho1, rho2, 1/p)
    double alpha = 1.0;                  // power-diffusion exponent
    std::optional<double> slope;         // 1/(4 alpha) - 1/2, only when gamma == 1/2
};

// Ordinary least squares of ln(error) on ln(cost); exact for collinear
// points. Requires >= 2 rows with positive costs and errors.
std::pair<double, double> fit_loglog_slope(const std::vector<ConvergenceRow>& rows);

// gamma from the class parameters; the error-vs-cost slope is only defined on
// the gamma == 1/2 branch.
RatePrediction predict_rate(const ClassParams& params, double alpha);

// Smallest positive M with delta(M) <= x, for decreasing delta; exponential
// bracketing then binary search, exact minimality.
std::int64_t delta_inverse(const std::function<double(std::int64_t)>& delta, double x);

// Minimal (M, n) for target accuracy epsilon given the error constant KC:
// n = ceil((2 KC / eps)^(1/gamma)), M = delta_inverse(delta, eps / (2 KC)).
std::pair<std::int64_t, std::int64_t> optimal_params(
    double epsilon, double gamma, const std::function<double(std::int64_t)>& delta,
    double rate_constant);

}  // namespace jumpeuler
