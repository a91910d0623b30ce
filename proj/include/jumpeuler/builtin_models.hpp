#pragma once

// The two experiment models, with reference solutions and closed-form means.
//
// Ornstein-Uhlenbeck with jumps (scalar):
//   dX = (mu - A X) dt + sum_j (sigma/j^alpha) dW_j + c1(t) dN(t)
// The diffusion terms are state-independent; jumps add c1 evaluated at the
// arrival's step time, marks unused.
//
// Merton / Black-Scholes with compound Poisson jumps (scalar, eta > 0):
//   dX = mu X dt + sum_j (sigma/j^alpha) X dW_j + X(t-) dL(t)
// with mark law  xi = -0.5            if Y <= 0
//                xi = 0.5 + Y         if Y > 0,   Y ~ N(0,1),
// so E xi = 1/sqrt(2 pi). The truncated solution
//   X^m(T) = eta exp[(mu - s2_m/2) T + sum_{j<=m} (sigma/j^alpha) W_j(T)]
//            * prod_{k<=N(T)} (1 + xi_k),   s2_m = sum_{j<=m} sigma^2/j^(2 alpha),
// serves as the exact reference.

#include <functional>
#include <span>

#include "jumpeuler/model.hpp"
#include "jumpeuler/noise.hpp"

namespace jumpeuler {

struct OuJumpSpec {
    double mean_reversion = 0.5;  // A
    double mu = 0.08;
    double sigma = 0.4;
    double alpha = 1.2;
    double lambda = 1.21;
    std::function<double(double)> jump_c1;  // default: c1(t) = t
    double eta = 1.0;
    double horizon = 1.53;
};

struct MertonSpec {
    double mu = 0.08;
    double sigma = 0.4;
    double alpha = 1.0;
    double lambda = 1.21;
    double eta = 1.0;  // must be > 0
    double horizon = 1.53;
};

ModelSpec make_ou_model(const OuJumpSpec& spec);

// E X(t) = e^{-At} ( eta + mu I1(t) + lambda I2(t) ),
// I1 = int_0^t e^{As} ds, I2 = int_0^t e^{As} c1(s) ds (adaptive quadrature,
// absolute tolerance 1e-10; A = 0 needs no special casing).
double ou_mean(const OuJumpSpec& spec, double t);

ModelSpec make_merton_model(const MertonSpec& spec);

// Truncated closed-form terminal X^m(T); series sums in ascending j.
double merton_exact_terminal(const MertonSpec& spec, int truncation,
                             std::span<const double> wiener_endpoints, const JumpStream& jumps);

// E X(t) = eta exp((mu + lambda E xi) t), E xi = 1/sqrt(2 pi): the lognormal
// factor has unit mean at every truncation and jumps are independent.
double merton_mean(const MertonSpec& spec, double t);

}  // namespace jumpeuler
