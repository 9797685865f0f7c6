#pragma once

#include <functional>
#include <vector>

#include "heatctrl/grid.hpp"
#include "heatctrl/transforms.hpp"

namespace heatctrl {

/// Control u on [0, T]: either time samples (interpolated) or a
/// piecewise-constant step function.
class ControlSignal {
public:
    enum class Kind { Sampled, PiecewiseConstant };

    static ControlSignal sampled(SampledFunction u);
    /// breakpoints.size() == amplitudes.size() + 1, breakpoints from 0 to T.
    static ControlSignal piecewise_constant(std::vector<double> breakpoints,
                                            std::vector<double> amplitudes);
    static ControlSignal from_function(const std::function<double(double)>& u,
                                       double horizon, std::size_t nodes = 513);
    static ControlSignal zero(double horizon);

    double operator()(double t) const;
    double horizon() const { return horizon_; }
    double sup_norm() const;
    Kind kind() const { return kind_; }
    /// Points where the signal may lose smoothness (piece edges); includes
    /// both endpoints. For sampled signals just {0, T}.
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& amplitudes() const { return amplitudes_; }
    const SampledFunction& samples() const { return samples_; }

private:
    Kind kind_ = Kind::Sampled;
    double horizon_ = 0.0;
    SampledFunction samples_;
    std::vector<double> breakpoints_;
    std::vector<double> amplitudes_;
};

struct HeatSolveOptions {
    double quad_tol = 1e-11;        ///< adaptive tolerance of the control integral
    double smooth_halfwidth = 8.0;  ///< Gauss window half-width in s units
    std::size_t smooth_nodes = 257; ///< Simpson nodes of the smoothing window
};

/// State of either system at one time.
struct HeatState {
    enum class Side { ConstantCoeff, VariableCoeff };
    Side side = Side::ConstantCoeff;
    SampledFunction field;   ///< stored on the half-line, even by convention
    double time = 0.0;
};

/// (e^{-x^2/4t}/sqrt(4 pi t) * z0)(x) via the substitution y = x + 2 sqrt(t) s:
/// robust for every t >= 0. z0 is taken even and zero beyond its grid.
double heat_free_term(const SampledFunction& z0, double t, double x,
                      const HeatSolveOptions& opt = {});

/// -(sqrt(2/pi)) int_0^t u(s) e^{-x^2/(4(t-s))} / sqrt(2(t-s)) ds, computed
/// after the substitution t - s = w^2 with adaptive quadrature per smooth
/// piece of u.
double heat_control_term(const ControlSignal& u, double t, double x,
                         const HeatSolveOptions& opt = {});

/// Z(x, t) = free + control term on the grid for each requested time.
/// t = 0 returns z0 resampled.
std::vector<HeatState> solve_heat_line(const SampledFunction& z0, const ControlSignal& u,
                                       const std::vector<double>& t_eval,
                                       const GridSpec& x_grid,
                                       const HeatSolveOptions& opt = {});

/// Spectral-side solution (F Z)(sigma, t) = e^{-sigma^2 t} (F Z0)(sigma)
/// - sqrt(2/pi) int_0^t e^{-(t-s) sigma^2} u(s) ds on a cosine-transform grid.
struct SpectralState {
    GridSpec sigma_grid;
    std::vector<double> values;
    double time = 0.0;
};

SpectralState solve_heat_fourier(const SampledFunction& z0, const ControlSignal& u,
                                 double t, std::size_t sigma_nodes = 1025,
                                 double sigma_max = 16.0);
/// Back-transform of a spectral state at one point.
double spectral_point_value(const SpectralState& s, double x);
/// ||Z(.,t)||^1 via Plancherel: (int (1+sigma^2) |FZ|^2)^{1/2} over R.
double spectral_h1_norm(const SpectralState& s);

/// Boundary trace: Z_x(0+, t) for constant-coefficient states.
double boundary_trace(const HeatState& state);
/// (D_{rho k} W)(0+, t) for variable-coefficient states.
double boundary_trace(const HeatState& state, const TransformContext& ctx);

} // namespace heatctrl
