#include "heatctrl/synth.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace heatctrl {

SynthesisResult synthesize_piecewise(const SynthesisSpec& spec, const SampledFunction& z0,
                                     const HeatSolveOptions& opt) {
    if (spec.intervals < 1)
        throw DomainError("synthesize_piecewise: need at least one interval");
    const double T = spec.horizon;
    const auto& grid = spec.target.grid();
    const std::size_t nx = grid.size();
    const auto N = static_cast<std::ptrdiff_t>(spec.intervals);

    std::vector<double> breaks(spec.intervals + 1);
    for (std::size_t p = 0; p <= spec.intervals; ++p)
        breaks[p] = T * static_cast<double>(p) / static_cast<double>(spec.intervals);

    // Unit-amplitude terminal profiles of each interval.
    std::vector<SampledFunction> basis;
    basis.reserve(spec.intervals);
    for (std::size_t p = 0; p < spec.intervals; ++p) {
        // indicator control of [breaks[p], breaks[p+1]]
        std::vector<double> bp, amp;
        if (breaks[p] > 0.0) {
            bp = {0.0, breaks[p], breaks[p + 1]};
            amp = {0.0, 1.0};
        } else {
            bp = {0.0, breaks[p + 1]};
            amp = {1.0};
        }
        if (breaks[p + 1] < T) {
            bp.push_back(T);
            amp.push_back(0.0);
        }
        auto sig = ControlSignal::piecewise_constant(std::move(bp), std::move(amp));
        std::vector<double> prof(nx);
        for (std::size_t i = 0; i < nx; ++i)
            prof[i] = heat_control_term(sig, T, grid[i], opt);
        basis.emplace_back(grid, std::move(prof));
    }

    // Defect to match: target minus the freely evolved initial state.
    std::vector<double> free_part(nx, 0.0);
    if (z0.max_abs() > 0.0)
        for (std::size_t i = 0; i < nx; ++i)
            free_part[i] = heat_free_term(z0, T, grid[i], opt);
    std::vector<double> defect(nx);
    for (std::size_t i = 0; i < nx; ++i)
        defect[i] = spec.target.values()[i] - free_part[i];

    // Least squares in the discrete H^1 form: value block and derivative
    // block share the quadrature weights of norm_H1, plus Tikhonov rows.
    const auto w = quadrature_weights(grid);
    std::vector<double> sw(nx);
    for (std::size_t i = 0; i < nx; ++i)
        sw[i] = std::sqrt(2.0 * w[i]);

    const auto rows = static_cast<std::ptrdiff_t>(2 * nx) + N;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, N);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
    for (std::ptrdiff_t p = 0; p < N; ++p) {
        const auto& prof = basis[static_cast<std::size_t>(p)];
        const auto dprof = derivative_samples(prof);
        for (std::size_t i = 0; i < nx; ++i) {
            A(static_cast<std::ptrdiff_t>(i), p) = sw[i] * prof.values()[i];
            A(static_cast<std::ptrdiff_t>(nx + i), p) = sw[i] * dprof[i];
        }
        A(static_cast<std::ptrdiff_t>(2 * nx) + p, p) = std::sqrt(spec.regularization);
    }
    {
        SampledFunction d(grid, defect);
        const auto dd = derivative_samples(d);
        for (std::size_t i = 0; i < nx; ++i) {
            b(static_cast<std::ptrdiff_t>(i)) = sw[i] * defect[i];
            b(static_cast<std::ptrdiff_t>(nx + i)) = sw[i] * dd[i];
        }
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    Eigen::VectorXd a = qr.solve(b);
    const auto& Rdiag = qr.matrixR().diagonal();
    double cond = 1.0;
    if (N > 0) {
        const double r0 = std::abs(Rdiag(0));
        const double rn = std::abs(Rdiag(N - 1));
        cond = rn > 0.0 ? r0 / rn : std::numeric_limits<double>::infinity();
    }

    SynthesisResult out;
    out.amplitudes.assign(a.data(), a.data() + N);
    out.condition = cond;
    out.condition_warning = !(cond < 1e12);
    out.control = ControlSignal::piecewise_constant(breaks, out.amplitudes);

    std::vector<double> achieved(nx);
    for (std::size_t i = 0; i < nx; ++i) {
        double s = free_part[i];
        for (std::ptrdiff_t p = 0; p < N; ++p)
            s += a(p) * basis[static_cast<std::size_t>(p)].values()[i];
        achieved[i] = s;
    }
    out.achieved = HeatState{HeatState::Side::ConstantCoeff,
                             SampledFunction(grid, std::move(achieved)), T};

    std::vector<double> resid(nx);
    for (std::size_t i = 0; i < nx; ++i)
        resid[i] = spec.target.values()[i] - out.achieved.field.values()[i];
    out.residual_h1 = norm_H1(SampledFunction(grid, std::move(resid)));
    return out;
}

LiftResult lift_synthesis(const TransformContext& ctx, const SynthesisResult& synth,
                          const SampledFunction& w_target, std::size_t time_nodes,
                          const HeatSolveOptions& opt) {
    const double T = synth.achieved.time;
    std::vector<double> times(time_nodes);
    for (std::size_t j = 0; j < time_nodes; ++j)
        times[j] = T * static_cast<double>(j) / static_cast<double>(time_nodes - 1);

    // Z states along the run feed the forward control map.
    SampledFunction z0_like = SampledFunction::zero(ctx.lambda_grid);
    auto states = solve_heat_line(z0_like, synth.control, times, ctx.lambda_grid, opt);
    // Replace the terminal state with the synthesized one resampled onto the
    // lambda grid when the grids differ.
    LiftResult out;
    out.control_rkg = map_control_forward(ctx, synth.control, states);

    SampledFunction z_term = synth.achieved.field;
    if (z_term.grid().size() != ctx.lambda_grid.size() ||
        z_term.grid().b() != ctx.lambda_grid.b()) {
        std::vector<double> v(ctx.lambda_grid.size());
        for (std::size_t i = 0; i < ctx.lambda_grid.size(); ++i) {
            const double lam = ctx.lambda_grid[i];
            v[i] = z_term.grid().contains(lam) ? z_term(lam) : 0.0;
        }
        z_term = SampledFunction(ctx.lambda_grid, std::move(v));
    }
    out.achieved_w = HeatState{HeatState::Side::VariableCoeff,
                               apply_That(ctx, z_term), T};
    out.residual_hh1 = terminal_residual(out.achieved_w, w_target, &ctx);
    out.residual_ratio = synth.residual_h1 > 0.0 ? out.residual_hh1 / synth.residual_h1
                                                 : 0.0;
    return out;
}

double terminal_residual(const HeatState& achieved, const SampledFunction& target,
                         const TransformContext* ctx) {
    const auto& g = achieved.field.grid();
    if (g.size() != target.grid().size() ||
        std::abs(g.b() - target.grid().b()) > 1e-12 * (1.0 + g.b()))
        throw GridError("terminal_residual: achieved and target grids differ");
    std::vector<double> diff(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        diff[i] = achieved.field.values()[i] - target.values()[i];
    SampledFunction d(g, std::move(diff));
    if (achieved.side == HeatState::Side::VariableCoeff) {
        if (!ctx)
            throw DomainError("terminal_residual: variable-coefficient side needs a context");
        return norm_HH1(*ctx, d);
    }
    return norm_H1(d);
}

} // namespace heatctrl
