#pragma once

#include "heatctrl/heat.hpp"

namespace heatctrl {

/// Data of the weakly singular Volterra equation
///     v(t) = f(t) + int_0^t v(s) P(t - s) ds,   P(t) = p~(t)/sqrt(pi t),
/// assembled by the inverse control map. p~ is tabulated against
/// s = sqrt(tau) where it is smooth.
struct VolterraProblem {
    SampledFunction f;         ///< forcing on the (graded) time grid
    SampledFunction p_smooth;  ///< p~ against sqrt(tau) on [0, sqrt(T)]
    double N0 = 0.0;           ///< sup |f|
    double N1 = 0.0;           ///< sup |p~|  (so |P(t)| <= N1/sqrt(pi t))
    double r_integral = 0.0;
    double T = 0.0;

    double p_smooth_at(double tau) const;
};

/// Geometric time grid refined at t = 0 (first step ~ first_step_fraction*T,
/// growth `ratio`) switching to uniform steps of T/uniform_cells.
GridSpec volterra_time_grid(double T, double first_step_fraction = 1e-5,
                            double ratio = 1.15, std::size_t uniform_cells = 256);

/// u^{rho k gamma}(t) = (rho k)(0)^{-1/4} [ u110(t)
///     + int_0^inf K_{y1}(0,x) Z(x,t) dx - (1/2) Z(0+,t) int_0^inf r ]
/// evaluated at the times of the supplied states.
ControlSignal map_control_forward(const TransformContext& ctx, const ControlSignal& u110,
                                  const std::vector<HeatState>& z_states);

VolterraProblem build_volterra_problem(const TransformContext& ctx,
                                       const ControlSignal& u_rkg,
                                       const SampledFunction& z0,
                                       const GridSpec& time_grid,
                                       const HeatSolveOptions& opt = {});

struct VolterraSolveInfo {
    int sweeps = 0;
    double last_change = 0.0;
    double sup_norm = 0.0;
    double gronwall_bound = 0.0;   ///< N0 (1 + 2 N1 sqrt(T/pi) e^{N1^2 T})
    bool gronwall_ok = true;
    std::vector<double> sweep_changes;
};

/// Successive approximations with the product-integration rule.
SampledFunction solve_volterra(const VolterraProblem& p, double tol,
                               int max_sweeps = 200, VolterraSolveInfo* info = nullptr);

/// Inverse map: given u^{rho k gamma} and W0, recovers u110 by solving the
/// Volterra equation with Z0 = That^{-1} W0.
ControlSignal map_control_inverse(const TransformContext& ctx, const ControlSignal& u_rkg,
                                  const SampledFunction& w0, const GridSpec& time_grid,
                                  VolterraSolveInfo* info = nullptr,
                                  const HeatSolveOptions& opt = {});

/// Both sides of the paper-chain estimates with fitted surrogate constants.
struct EstimateReport {
    double T = 0.0;
    double sup_u110 = 0.0;
    double sup_urkg = 0.0;
    double z0_h1 = 0.0;
    double w0_hh1 = 0.0;
    double sigma0_0 = 0.0, R = 0.0, R0 = 0.0;
    double M1 = 0.0;               ///< fitted kernel-derivative constant
    double G0 = 0.0;
    double E1_surrogate = 0.0;
    bool est2_ok = false;          ///< ||u_rkg|| <= G0 ||u110|| + E1 ||Z0||^1
    double E2_fitted = 0.0;        ///< ||Z0||^1 / [[W0]]^1 (per-run surrogate)
    double G1 = 0.0;
    double E3_surrogate = 0.0;
    bool est4_ok = false;          ///< ||u110|| <= G1 (||u_rkg|| + E3 [[W0]]^1)
    double z_h1_max = 0.0;         ///< max over supplied states of ||Z(.,t)||^1
    double zz_bound = 0.0;         ///< ||Z0||^1 + 2(T+3)/sqrt(pi) ||u110||
    bool estzz_ok = false;
    double volterra_sup = 0.0;
    double gronwall_bound = 0.0;
    bool estvvv_ok = true;
};

EstimateReport verify_estimates(const TransformContext& ctx, const ControlSignal& u110,
                                const ControlSignal& u_rkg, const SampledFunction& z0,
                                const SampledFunction& w0,
                                const std::vector<HeatState>& z_states,
                                const VolterraSolveInfo* volterra = nullptr);

} // namespace heatctrl
