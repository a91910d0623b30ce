#pragma once

// Domain types for jump-diffusion SDE models driven by a countably
// dimensional Wiener process and a finite-intensity Poisson random measure:
//
//   dX(t) = a(t,X) dt + sum_j b^(j)(t,X) dW_j(t) + jumps c(t,X(t-),xi),
//   X(0) = eta,  t in [0,T].
//
// The diffusion is a series of d-vector terms b^(j); only the first M terms
// are ever simulated, and the neglected tail is controlled by a user-supplied
// decreasing sequence delta(k) with
//   sup_t ||b(t,x) - P_k b(t,x)|| <= C (1 + ||x||) delta(k).
//
// All types are immutable after construction and safe to share across
// concurrent workers; coefficient callbacks must be pure and reentrant.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "jumpeuler/rng.hpp"

namespace jumpeuler {

struct JumpStream;  // noise.hpp

// Smoothness/growth metadata of the input-data class. Not enforced at
// runtime; consumed by the rate predictor and kept for the record.
struct ClassParams {
    double order_p = 2.0;    // error norm order, >= 2
    double rho1 = 1.0;       // diffusion time-Hoelder exponent, in (0,1]
    double rho2 = 1.0;       // jump time-Hoelder exponent, in (0,1]
    double lipschitz_L = 0.0;
    double growth_D = 0.0;
    double tail_C = 0.0;
};

// Finite Levy measure nu represented as intensity lambda times a mark
// distribution nu/lambda. General (non-finite) Levy measures are not
// representable by construction.
struct JumpLaw {
    double intensity = 0.0;  // lambda, jumps per unit time
    int mark_dim = 1;        // d'
    // Draws one mark (d'-vector) distributed as nu(dy)/lambda; draws must be
    // iid across calls on one stream.
    std::function<void(RandomStream&, std::span<double> out)> mark_sampler;
    std::optional<double> mark_p_moment;  // kappa_p when known
};

// Separable series term b^(j)(t,x) = coef(j) * factor(t,x). Both built-in
// models have this form; kernels exploit it to precompute the coefficient
// table once and the collapsed noise path requires it.
struct SeparableSeries {
    std::function<double(int j)> coef;                                   // j >= 1
    std::function<void(double t, std::span<const double> x, std::span<double> out)> factor;
};

struct SeriesDiffusion {
    // b^(j)(t,x) for j >= 1; writes a d-vector. Pure: same inputs, same output.
    std::function<void(int j, double t, std::span<const double> x, std::span<double> out)>
        eval_term;
    // The (B4) tail sequence delta(k): strictly decreasing to zero. Property
    // of the whole series, so it is supplied, not derived; only the power
    // family has a built-in computation (power_tail_delta).
    std::function<double(int k)> tail_delta;
    std::optional<SeparableSeries> separable;
};

// Exact/reference terminal value X^m(T) evaluated from a closed-form solution
// at truncation dimension m, given the Wiener endpoints W_1(T)..W_m(T) and
// the jump stream.
struct ExactReference {
    std::function<void(int truncation, std::span<const double> wiener_endpoints,
                       const JumpStream& jumps, std::span<double> out)>
        terminal;
};

struct ModelSpec {
    int dim = 1;  // d
    std::function<void(double t, std::span<const double> x, std::span<double> out)> drift;
    SeriesDiffusion diffusion;
    // c(t, x, y); y is a mark of dimension jump_law.mark_dim.
    std::function<void(double t, std::span<const double> x, std::span<const double> y,
                       std::span<double> out)>
        jump_coeff;
    JumpLaw jump_law;
    std::function<void(RandomStream&, std::span<double> out)> initial_sampler;  // eta
    double horizon = 1.0;  // T > 0
    ClassParams class_params;
    std::optional<ExactReference> exact_reference;

    // Affine drift a(t,x) = add + scale*x (state-wise); lets kernels skip the
    // std::function call per step. Semantically identical to `drift`.
    struct AffineDrift {
        double add = 0.0;
        double scale = 0.0;
    };
    std::optional<AffineDrift> affine_drift;
};

// Checks structural invariants (horizon > 0, dim >= 1, intensity >= 0, class
// parameter ranges), probes the coefficients at (t,x) = (0,0) rejecting
// non-finite outputs, spot-checks purity by double evaluation, and samples
// tail_delta for strict decrease. Throws InvalidParameter /
// NonFiniteCoefficient.
void validate_model(const ModelSpec& model);

// sum_{j=1..M} b^(j)(t,x) * dW[j-1], accumulated in ascending j order
// (reproducibility contract: identical inputs give bit-identical output).
// Plain accumulation by default; compensated = true switches to Kahan
// summation for ill-conditioned series. Throws DimensionMismatch if
// |dW| != M.
std::vector<double> truncated_diffusion_apply(const ModelSpec& model, int truncation, double t,
                                              std::span<const double> x,
                                              std::span<const double> dW,
                                              bool compensated = false);

// delta(M) = ( sum_{j=M+1..inf} j^(-2 alpha) )^(1/2) for the normalized power
// diffusion family, to 1e-12 absolute accuracy: terms are summed until the
// midpoint-corrected integral remainder's own error bound drops below 1e-14,
// then the remainder integral_{J+1/2}^inf u^(-2 alpha) du is added.
// Requires alpha >= 1 (and M >= 0).
double power_tail_delta(double alpha, std::int64_t truncation);

}  // namespace jumpeuler
