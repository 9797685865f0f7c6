#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "heatctrl/grid.hpp"

namespace heatctrl {

/// Node weights of the composite rule used for all norm-type integrals:
/// Simpson pairs on uniform grids (a trailing trapezoid cell when the cell
/// count is odd), plain trapezoid on graded grids. Integrals computed with
/// these weights are diagonal quadratic forms in the node values, which the
/// synthesis least-squares relies on.
std::vector<double> quadrature_weights(const GridSpec& grid);

/// Integral of f over its whole grid using quadrature_weights.
double integrate(const SampledFunction& f);

/// Integral of f over [a, b] (inside the grid): per-cell 3-point
/// Gauss-Legendre applied to the interpolant, so partial end cells are fine.
double integrate(const SampledFunction& f, double a, double b);

/// Weights (wa, wb) with  int_a^b (linear through fa, fb) / sqrt(t - xi) dxi
/// = wa * fa + wb * fb, for a < b <= t. Exact for the weight.
std::pair<double, double> sqrt_kernel_cell_weights(double a, double b, double t);

/// int_0^t g(xi)/sqrt(t - xi) dxi by product integration: g is taken linear
/// on each grid cell and the 1/sqrt weight is integrated exactly. g's grid
/// must cover [0, t].
double integrate_sqrt_singular(const SampledFunction& g, double t);

/// Adaptive Simpson on a callable.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 30);

/// Second-order one-sided first derivative at the left (a+) or right (b-)
/// endpoint from the first/last three nodes.
double differentiate_one_sided(const SampledFunction& f, bool at_left_end);

/// First derivative sampled on f's grid: 3-point stencils, one-sided at the
/// endpoints, central (non-uniform aware) inside.
std::vector<double> derivative_samples(const SampledFunction& f);
SampledFunction derivative_function(const SampledFunction& f);

/// Modified Bessel function I_n(y) by its power series, summed to machine
/// tolerance. Intended range n <= 10, 0 <= y <= 50.
double bessel_i(unsigned n, double y);

/// Least-squares fit |f| ~ coef * exp(-rate * x) on the trailing part of the
/// samples, used to close half-axis integrals of decaying functions.
struct ExpTailFit {
    double rate = 0.0;       ///< decay rate (> 0 when usable)
    double coef = 0.0;       ///< amplitude at x = 0
    double residual = 0.0;   ///< rms misfit of log|f| over the fit window
    bool all_zero = false;   ///< samples in the window were identically zero
    /// int_b^inf coef * e^{-rate x} dx for the grid end b.
    double mass_beyond(double b) const;
    /// int_b^inf x * coef * e^{-rate x} dx.
    double first_moment_beyond(double b) const;
};

/// Fits the last `window_fraction` of the grid (points with |f| above an
/// absolute floor). Throws TailDivergenceError when the fitted rate is <= 0.
ExpTailFit fit_exponential_tail(const SampledFunction& f, double window_fraction = 0.25);

} // namespace heatctrl
