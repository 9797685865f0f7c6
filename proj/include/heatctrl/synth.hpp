#pragma once

#include "heatctrl/controlmap.hpp"

namespace heatctrl {

/// Piecewise-constant control synthesis for the constant-coefficient system:
/// N uniform intervals on [0, T], amplitudes by regularized least squares in
/// the discrete H^1 norm of the terminal residual.
struct SynthesisSpec {
    std::size_t intervals = 4;
    double horizon = 0.5;
    SampledFunction target;          ///< Z^T on the synthesis grid
    double regularization = 1e-10;   ///< Tikhonov weight on the amplitudes
};

struct SynthesisResult {
    ControlSignal control;
    HeatState achieved;              ///< Z(., T)
    std::vector<double> amplitudes;
    double residual_h1 = 0.0;        ///< ||Z^T - Z(., T)||^1
    double condition = 0.0;          ///< estimate from the QR factor
    bool condition_warning = false;
};

SynthesisResult synthesize_piecewise(const SynthesisSpec& spec, const SampledFunction& z0,
                                     const HeatSolveOptions& opt = {});

/// Lift of a synthesized control to the variable-coefficient system:
/// u^{rho k gamma} by the forward map along the solved Z states, the end
/// state W(., T) = That Z(., T), and its [[.]]^1 residual against w_target.
struct LiftResult {
    ControlSignal control_rkg;
    HeatState achieved_w;
    double residual_hh1 = 0.0;
    double residual_ratio = 0.0;     ///< [[W residual]] / ||Z residual|| (fitted E0 surrogate)
};

LiftResult lift_synthesis(const TransformContext& ctx, const SynthesisResult& synth,
                          const SampledFunction& w_target, std::size_t time_nodes = 65,
                          const HeatSolveOptions& opt = {});

/// ||.||^1 (constant side) or [[.]]^1 (variable side) of achieved - target;
/// grids must match.
double terminal_residual(const HeatState& achieved, const SampledFunction& target,
                         const TransformContext* ctx = nullptr);

} // namespace heatctrl
