#pragma once

#include "heatctrl/coeffs.hpp"
#include "heatctrl/kernels.hpp"

namespace heatctrl {

struct TransformOptions {
    std::size_t x_nodes = 2049;
    std::size_t lambda_nodes = 2049;
    std::size_t kernel_nodes = 0;      ///< 0 = auto (target step ~0.01, capped)
    std::size_t l_kernel_nodes = 0;    ///< 0 = auto
    double kernel_tol = 1e-10;
    int kernel_max_sweeps = 50;
    DerivedOptions derived;
};

/// Everything needed to move functions between the lambda side (constant
/// coefficients) and the x side (variable coefficients).
struct TransformContext {
    CoefficientSet coeffs;
    DerivedData derived;
    KernelK kernel_k;
    KernelL kernel_l;
    SampledFunction k_boundary;   ///< K_{y1}(0, .)
    BoundReport bounds;
    GridSpec x_grid;              ///< [0, truncation_x]
    GridSpec lambda_grid;         ///< [0, lambda_max]
};

TransformContext build_context(const CoefficientSet& c, const TransformOptions& opt = {});

/// (S psi)(x) = psi(sigma(x)) / (rho k)(x)^{1/4}; input lives on the lambda
/// side, output on the x grid.
SampledFunction apply_S(const TransformContext& ctx, const SampledFunction& psi);

/// (S^{-1} phi)(lambda) = ((rho k)^{1/4} phi)(sigma^{-1}(lambda)).
SampledFunction apply_S_inv(const TransformContext& ctx, const SampledFunction& phi);

/// (T_r g)(lambda) = g(lambda) + int_lambda^inf K(lambda, s) g(s) ds,
/// quadrature over g's grid; the tail beyond the grid is dropped (bounded by
/// tr_tail_bound).
SampledFunction apply_Tr(const TransformContext& ctx, const SampledFunction& g);

/// (T_r^{-1} f)(s) = f(s) + int_s^inf L(s, lambda) f(lambda) dlambda.
SampledFunction apply_Tr_inv(const TransformContext& ctx, const SampledFunction& f);

/// That = S T_r and its inverse That^{-1} = T_r^{-1} S^{-1}.
SampledFunction apply_That(const TransformContext& ctx, const SampledFunction& g);
SampledFunction apply_That_inv(const TransformContext& ctx, const SampledFunction& f);

/// Error bound M0 sigma0(lambda_max) ||g||_inf for the dropped T_r tail.
double tr_tail_bound(const TransformContext& ctx, const SampledFunction& g);

/// D_{rho k} phi = sqrt(k/rho) phi' + Q1 phi on the x grid; the value at
/// x = 0 is the one-sided derivative from the right.
SampledFunction apply_D_rhok(const TransformContext& ctx, const SampledFunction& phi);

/// Discrete norms of even functions stored on the half-line: the L^2(R)
/// factor 2 is included. ||f||^1 = (||f||^2 + ||f'||^2)^{1/2}.
double norm_H0(const SampledFunction& f);
double norm_H1(const SampledFunction& f);
/// Weighted counterparts with rho and D_{rho k} in place of the derivative.
double norm_HH0(const TransformContext& ctx, const SampledFunction& f);
double norm_HH1(const TransformContext& ctx, const SampledFunction& f);

} // namespace heatctrl
