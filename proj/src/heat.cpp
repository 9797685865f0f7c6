#include "heatctrl/heat.hpp"

#include <algorithm>
#include <cmath>

namespace heatctrl {

namespace {
constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kSqrt2OverPi = 0.79788456080286536;
}

ControlSignal ControlSignal::sampled(SampledFunction u) {
    ControlSignal c;
    c.kind_ = Kind::Sampled;
    c.horizon_ = u.grid().b();
    if (u.grid().a() != 0.0)
        throw DomainError("control samples must start at t = 0");
    c.breakpoints_ = {0.0, c.horizon_};
    c.samples_ = std::move(u);
    return c;
}

ControlSignal ControlSignal::piecewise_constant(std::vector<double> breakpoints,
                                                std::vector<double> amplitudes) {
    if (breakpoints.size() != amplitudes.size() + 1 || amplitudes.empty())
        throw DomainError("piecewise control needs n+1 breakpoints for n amplitudes");
    for (std::size_t i = 1; i < breakpoints.size(); ++i)
        if (!(breakpoints[i] > breakpoints[i - 1]))
            throw DomainError("control breakpoints must increase");
    if (breakpoints.front() != 0.0)
        throw DomainError("control must start at t = 0");
    ControlSignal c;
    c.kind_ = Kind::PiecewiseConstant;
    c.horizon_ = breakpoints.back();
    c.breakpoints_ = std::move(breakpoints);
    c.amplitudes_ = std::move(amplitudes);
    return c;
}

ControlSignal ControlSignal::from_function(const std::function<double(double)>& u,
                                           double horizon, std::size_t nodes) {
    return sampled(SampledFunction::from_function(
        GridSpec::uniform(0.0, horizon, nodes), u));
}

ControlSignal ControlSignal::zero(double horizon) {
    return piecewise_constant({0.0, horizon}, {0.0});
}

double ControlSignal::operator()(double t) const {
    if (t < 0.0 || t > horizon_ * (1.0 + 1e-12))
        throw DomainError("control evaluated outside [0, T]");
    t = std::clamp(t, 0.0, horizon_);
    if (kind_ == Kind::Sampled)
        return samples_(t);
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    std::size_t idx = static_cast<std::size_t>(it - breakpoints_.begin());
    if (idx == 0) idx = 1;
    return amplitudes_[std::min(idx - 1, amplitudes_.size() - 1)];
}

double ControlSignal::sup_norm() const {
    if (kind_ == Kind::PiecewiseConstant) {
        double m = 0.0;
        for (double a : amplitudes_) m = std::max(m, std::abs(a));
        return m;
    }
    return samples_.max_abs();
}

namespace {
double simpson_fixed(const std::function<double(double)>& f, double a, double b,
                     std::size_t n) {
    n |= 1;
    if (n < 3) n = 3;
    const double h = (b - a) / static_cast<double>(n - 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * f(a + h * static_cast<double>(i));
    }
    return acc * h / 3.0;
}
} // namespace

double heat_free_term(const SampledFunction& z0, double t, double x,
                      const HeatSolveOptions& opt) {
    const double ax = std::abs(x);
    if (t <= 0.0)
        return z0.grid().contains(ax) ? z0(ax) : 0.0;
    const double hw = opt.smooth_halfwidth;
    const double scale = 2.0 * std::sqrt(t);
    const double hi = z0.grid().b();
    auto integrand = [&](double s) {
        const double y = std::abs(ax + scale * s);
        return (y <= hi) ? z0(y) * std::exp(-s * s) : 0.0;
    };
    // The |.| composition puts a kink at s = -x/(2 sqrt t); give each smooth
    // side its own Simpson rule.
    const double kink = -ax / scale;
    const std::size_t n = opt.smooth_nodes | 1;
    double acc = 0.0;
    if (kink > -hw && kink < hw) {
        const double frac = (kink + hw) / (2.0 * hw);
        const auto n_left = static_cast<std::size_t>(
            std::max(33.0, std::ceil(frac * static_cast<double>(n))));
        const auto n_right = static_cast<std::size_t>(
            std::max(33.0, std::ceil((1.0 - frac) * static_cast<double>(n))));
        acc = simpson_fixed(integrand, -hw, kink, n_left) +
              simpson_fixed(integrand, kink, hw, n_right);
    } else {
        acc = simpson_fixed(integrand, -hw, hw, n);
    }
    return acc / kSqrtPi;
}

double heat_control_term(const ControlSignal& u, double t, double x,
                         const HeatSolveOptions& opt) {
    if (t <= 0.0) return 0.0;
    if (t > u.horizon() * (1.0 + 1e-12))
        throw DomainError("heat_control_term: t beyond the control horizon");
    const double ax = std::abs(x);
    // -(2/sqrt(pi)) int_0^{sqrt t} u(t - w^2) e^{-x^2/(4 w^2)} dw, split at
    // the control's smoothness breakpoints.
    auto integrand = [&](double w) {
        if (w <= 0.0) return ax == 0.0 ? u(t) : 0.0;
        const double e = ax == 0.0 ? 1.0 : std::exp(-ax * ax / (4.0 * w * w));
        return u(std::clamp(t - w * w, 0.0, u.horizon())) * e;
    };
    std::vector<double> cuts{0.0};
    for (double tb : u.breakpoints())
        if (tb < t && tb > 0.0)
            cuts.push_back(std::sqrt(t - tb));
    cuts.push_back(std::sqrt(t));
    std::sort(cuts.begin(), cuts.end());
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        if (cuts[i + 1] > cuts[i])
            acc += adaptive_simpson(integrand, cuts[i], cuts[i + 1], opt.quad_tol);
    return -(2.0 / kSqrtPi) * acc;
}

std::vector<HeatState> solve_heat_line(const SampledFunction& z0, const ControlSignal& u,
                                       const std::vector<double>& t_eval,
                                       const GridSpec& x_grid,
                                       const HeatSolveOptions& opt) {
    std::vector<HeatState> out;
    out.reserve(t_eval.size());
    for (double t : t_eval) {
        if (t < 0.0)
            throw DomainError("solve_heat_line: negative time");
        std::vector<double> v(x_grid.size());
        if (t == 0.0) {
            for (std::size_t i = 0; i < x_grid.size(); ++i) {
                const double x = x_grid[i];
                v[i] = z0.grid().contains(x) ? z0(x) : 0.0;
            }
        } else {
            for (std::size_t i = 0; i < x_grid.size(); ++i) {
                const double x = x_grid[i];
                v[i] = heat_free_term(z0, t, x, opt) + heat_control_term(u, t, x, opt);
            }
        }
        out.push_back(HeatState{HeatState::Side::ConstantCoeff,
                                SampledFunction(x_grid, std::move(v)), t});
    }
    return out;
}

SpectralState solve_heat_fourier(const SampledFunction& z0, const ControlSignal& u,
                                 double t, std::size_t sigma_nodes, double sigma_max) {
    if (!z0.grid().is_uniform())
        throw GridError("solve_heat_fourier expects a uniform spatial grid");
    SpectralState s;
    s.sigma_grid = GridSpec::uniform(0.0, sigma_max, sigma_nodes);
    s.values.resize(sigma_nodes);
    s.time = t;
    const auto wx = quadrature_weights(z0.grid());
    const double root_2_pi = kSqrt2OverPi;
    for (std::size_t j = 0; j < sigma_nodes; ++j) {
        const double sg = s.sigma_grid[j];
        double hat0 = 0.0;   // sqrt(2/pi) int_0^X z0 cos(sigma x) dx
        for (std::size_t i = 0; i < wx.size(); ++i)
            hat0 += wx[i] * z0.values()[i] * std::cos(sg * z0.grid()[i]);
        hat0 *= root_2_pi;
        double ctrl = 0.0;
        if (t > 0.0 && u.sup_norm() > 0.0) {
            for (std::size_t p = 0; p + 1 < u.breakpoints().size(); ++p) {
                const double a = std::min(u.breakpoints()[p], t);
                const double b = std::min(u.breakpoints()[p + 1], t);
                if (b > a)
                    ctrl += adaptive_simpson(
                        [&](double s2) { return std::exp(-(t - s2) * sg * sg) * u(s2); },
                        a, b, 1e-12);
            }
        }
        s.values[j] = std::exp(-sg * sg * t) * hat0 - root_2_pi * ctrl;
    }
    return s;
}

double spectral_point_value(const SpectralState& s, double x) {
    const auto w = quadrature_weights(s.sigma_grid);
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j)
        acc += w[j] * s.values[j] * std::cos(s.sigma_grid[j] * x);
    return kSqrt2OverPi * acc;
}

double spectral_h1_norm(const SpectralState& s) {
    const auto w = quadrature_weights(s.sigma_grid);
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        const double sg = s.sigma_grid[j];
        acc += w[j] * (1.0 + sg * sg) * s.values[j] * s.values[j];
    }
    return std::sqrt(2.0 * acc);
}

double boundary_trace(const HeatState& state) {
    if (state.side != HeatState::Side::ConstantCoeff)
        throw DomainError("this trace overload handles constant-coefficient states");
    return differentiate_one_sided(state.field, /*at_left_end=*/true);
}

double boundary_trace(const HeatState& state, const TransformContext& ctx) {
    if (state.side == HeatState::Side::ConstantCoeff)
        return boundary_trace(state);
    auto d = apply_D_rhok(ctx, state.field);
    return d.values().front();
}

} // namespace heatctrl
