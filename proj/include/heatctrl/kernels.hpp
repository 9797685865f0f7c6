#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "heatctrl/grid.hpp"
#include "heatctrl/numerics.hpp"

namespace heatctrl {

/// Transmutation kernel K on the triangle y2 >= y1 >= 0, stored in the
/// characteristic variables xi = (y1+y2)/2, eta = (y2-y1)/2 on the simplex
/// 0 <= eta <= xi <= xi_max. It solves
///     K_{y1 y1} - K_{y2 y2} = r(y1) K,
///     K(y,y) = (1/2) int_y^inf r,
///     K_{y1}, K_{y2} -> 0 as y1 + y2 -> inf,
/// which in characteristic form is the integral equation
///     K(xi,eta) = G(xi) + int_0^eta int_xi^inf r(s - e) K(s, e) ds de,
/// iterated by successive approximations. Beyond xi_max the kernel is taken
/// as 0; the induced error is of order M0 * sigma0(xi_max).
class KernelK {
public:
    static KernelK solve_goursat(const SampledFunction& r, double y_max, double tol,
                                 int max_sweeps = 50, std::size_t nodes = 0);

    /// K(y1, y2); piecewise-linear on the characteristic simplex, 0 beyond
    /// xi_max, y2 >= y1 >= 0 required.
    double operator()(double y1, double y2) const;

    /// Diagonal value K(y, y).
    double diagonal(double y) const;

    double xi_max() const { return xi_max_; }
    double step() const { return h_; }
    std::size_t axis_nodes() const { return n_; }
    bool trivial_zero() const { return trivial_; }
    bool converged() const { return converged_; }
    const std::vector<double>& sweep_residuals() const { return residuals_; }

    /// Node value at characteristic indices (i = xi index, j = eta index <= i).
    double at(std::size_t i, std::size_t j) const { return v_[row_off_[i] + j]; }

    /// sigma0(x) = int_x^inf |r| (grid part plus tail fit), used by the bounds.
    const SampledFunction& sigma0() const { return sigma0_; }
    /// Signed tail integral of r from xi to infinity (the diagonal data is
    /// half of this).
    double r_tail_integral(double xi) const;
    const SampledFunction& r() const { return r_; }

private:
    std::size_t n_ = 0;
    double xi_max_ = 0.0;
    double h_ = 0.0;
    bool trivial_ = false;
    bool converged_ = false;
    std::vector<double> v_;
    std::vector<std::size_t> row_off_;
    std::vector<double> residuals_;
    SampledFunction r_;
    SampledFunction sigma0_;
    SampledFunction r_cum_;   // signed int_xi^inf r on the xi nodes

    double& mut(std::size_t i, std::size_t j) { return v_[row_off_[i] + j]; }
};

/// K_{y1}(0, x) sampled on x in [0, ~2 xi_max]: one-sided differencing along
/// the y1 characteristic direction from the hypotenuse nodes, plus the
/// diagonal identity for the first two samples (quadratic extrapolation).
SampledFunction boundary_derivative(const KernelK& k);

/// Smallest constants making the kernel bounds hold on the grid:
///   |K(y1,y2)|     <= M0 sigma0((y1+y2)/2)
///   |K_{y1}(y1,y2)| <= (1/4)|r((y1+y2)/2)| + M1 sigma0((y1+y2)/2)
struct BoundReport {
    double M0 = 0.0;
    double M1 = 0.0;
    double max_ratio_xi = 0.0;     ///< xi where |K|/sigma0 peaks
    double truncation_bound = 0.0; ///< M0 * sigma0(xi_max)
    bool consistent = true;        ///< false when sigma0 vanishes where K does not
    std::string note;
};

BoundReport verify_kernel_bounds(const KernelK& k);

/// Kernel L of the inverse operator, recovered from
///     L(y1,y2) + K(y1,y2) + int_{y1}^{y2} L(y1,xi) K(xi,y2) dxi = 0
/// by forward substitution in y2 for each fixed y1 (second-kind Volterra).
class KernelL {
public:
    static KernelL from_kernel(const KernelK& k, double y_max, std::size_t nodes = 0);

    double operator()(double y1, double y2) const;

    double y_max() const { return y_max_; }
    double step() const { return h_; }
    std::size_t axis_nodes() const { return n_; }
    double at(std::size_t i, std::size_t j) const { return v_[row_off_[i] + j - i]; }

private:
    std::size_t n_ = 0;
    double y_max_ = 0.0;
    double h_ = 0.0;
    bool trivial_ = false;
    std::vector<double> v_;
    std::vector<std::size_t> row_off_;   // row i holds y2 indices j = i..n-1
};

} // namespace heatctrl
