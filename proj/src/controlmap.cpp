#include "heatctrl/controlmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace heatctrl {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrtPi = 1.7724538509055160273;
}

double VolterraProblem::p_smooth_at(double tau) const {
    if (tau < 0.0) throw DomainError("p_smooth_at: negative lag");
    const double s = std::sqrt(tau);
    const double hi = p_smooth.grid().b();
    return p_smooth(std::min(s, hi));
}

GridSpec volterra_time_grid(double T, double first_step_fraction, double ratio,
                            std::size_t uniform_cells) {
    if (!(T > 0)) throw DomainError("volterra_time_grid: T must be positive");
    return GridSpec::geometric_at_left(0.0, T, first_step_fraction * T, ratio,
                                       T / static_cast<double>(uniform_cells));
}

ControlSignal map_control_forward(const TransformContext& ctx, const ControlSignal& u110,
                                  const std::vector<HeatState>& z_states) {
    if (z_states.empty())
        throw DomainError("map_control_forward: no states supplied");
    const double quarter = ctx.derived.rhok0_quarter;
    const double rint = ctx.derived.r_integral;
    std::vector<double> times, vals;
    times.reserve(z_states.size());
    vals.reserve(z_states.size());
    for (const auto& st : z_states) {
        if (st.side != HeatState::Side::ConstantCoeff)
            throw DomainError("map_control_forward expects constant-coefficient states");
        const auto& g = st.field.grid();
        const auto w = quadrature_weights(g);
        double ker = 0.0;
        const double kb_hi = ctx.k_boundary.grid().b();
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double x = g[i];
            if (x > kb_hi) break;
            ker += w[i] * ctx.k_boundary(x) * st.field.values()[i];
        }
        const double z0p = st.field.values().front();
        times.push_back(st.time);
        vals.push_back((u110(st.time) + ker - 0.5 * z0p * rint) / quarter);
    }
    return ControlSignal::sampled(SampledFunction(GridSpec(std::move(times)),
                                                  std::move(vals)));
}

VolterraProblem build_volterra_problem(const TransformContext& ctx,
                                       const ControlSignal& u_rkg,
                                       const SampledFunction& z0,
                                       const GridSpec& time_grid,
                                       const HeatSolveOptions& opt) {
    VolterraProblem p;
    p.T = time_grid.b();
    p.r_integral = ctx.derived.r_integral;
    const double quarter = ctx.derived.rhok0_quarter;
    const bool z0_zero = z0.max_abs() == 0.0;

    // The kernel-weighted integrals are smooth and decaying; a decimated
    // lambda grid keeps the Gaussian-smoothing cost down without moving the
    // quadrature error anywhere near the solver tolerances.
    std::size_t stride = 1;
    while ((ctx.lambda_grid.size() - 1) / stride > 512) stride *= 2;
    std::vector<double> lam_nodes;
    for (std::size_t i = 0; i < ctx.lambda_grid.size(); i += stride)
        lam_nodes.push_back(ctx.lambda_grid[i]);
    if (lam_nodes.back() != ctx.lambda_grid.b())
        lam_nodes.push_back(ctx.lambda_grid.b());
    GridSpec lam(std::move(lam_nodes));
    const auto wl = quadrature_weights(lam);
    const double kb_hi = ctx.k_boundary.grid().b();
    std::vector<double> kb(lam.size(), 0.0);
    for (std::size_t i = 0; i < lam.size(); ++i)
        if (lam[i] <= kb_hi) kb[i] = ctx.k_boundary(lam[i]);

    // forcing f on the time grid
    std::vector<double> fv(time_grid.size());
    for (std::size_t j = 0; j < time_grid.size(); ++j) {
        const double t = time_grid[j];
        double val = quarter * u_rkg(std::min(t, u_rkg.horizon()));
        if (!z0_zero) {
            const double g0 = heat_free_term(z0, t, 0.0, opt);
            double ker = 0.0;
            for (std::size_t i = 0; i < lam.size(); ++i) {
                if (kb[i] == 0.0) continue;
                ker += wl[i] * kb[i] * heat_free_term(z0, t, lam[i], opt);
            }
            val += 0.5 * p.r_integral * g0 - ker;
        }
        fv[j] = val;
    }
    p.f = SampledFunction(time_grid, std::move(fv));

    // p~ against s = sqrt(tau):  p~(s^2) = int K_{y1}(0,x) e^{-x^2/(4 s^2)} dx
    // - (1/2) int r. The integral vanishes like s at 0.
    const std::size_t ns = 1025;
    auto sgrid = GridSpec::uniform(0.0, std::sqrt(p.T), ns);
    std::vector<double> ps(ns);
    for (std::size_t m = 0; m < ns; ++m) {
        const double s = sgrid[m];
        double ker = 0.0;
        if (s > 0.0) {
            const double inv4t = 1.0 / (4.0 * s * s);
            for (std::size_t i = 0; i < lam.size(); ++i) {
                if (kb[i] == 0.0) continue;
                const double e = std::exp(-lam[i] * lam[i] * inv4t);
                if (e < 1e-300) continue;
                ker += wl[i] * kb[i] * e;
            }
        }
        ps[m] = ker - 0.5 * p.r_integral;
    }
    p.p_smooth = SampledFunction(sgrid, std::move(ps));

    p.N0 = p.f.max_abs();
    p.N1 = p.p_smooth.max_abs();
    return p;
}

SampledFunction solve_volterra(const VolterraProblem& p, double tol, int max_sweeps,
                               VolterraSolveInfo* info) {
    const auto& tg = p.f.grid();
    const std::size_t n = tg.size();
    const auto& fv = p.f.values();
    std::vector<double> v(fv), vn(n);
    VolterraSolveInfo local;
    const double scale = 1.0 + p.N0;

    // cache p~(t_j - t_m) per target node: lags only depend on index pairs
    bool converged = false;
    int grow_streak = 0;
    double prev_change = std::numeric_limits<double>::infinity();
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        vn[0] = fv[0];
        for (std::size_t j = 1; j < n; ++j) {
            const double t = tg[j];
            double acc = 0.0;
            for (std::size_t m = 0; m < j; ++m) {
                const double a = tg[m], b = tg[m + 1];
                // Per cell, v is linear and p~(t-xi) is matched by
                // a0 + b0 sqrt(t-xi) through the endpoints; then
                // p~(t-xi)/sqrt(t-xi) = a0/sqrt(t-xi) + b0 and both pieces
                // integrate exactly against the linear v.
                const double A = t - a, B = t - b;
                const double sA = std::sqrt(A), sB = std::sqrt(std::max(B, 0.0));
                const double Pa = p.p_smooth_at(A), Pb = p.p_smooth_at(B);
                double b0 = 0.0;
                if (sA - sB > 1e-300) b0 = (Pa - Pb) / (sA - sB);
                const double a0 = Pa - b0 * sA;
                const auto [wa, wb] = sqrt_kernel_cell_weights(a, b, t);
                acc += a0 * (wa * v[m] + wb * v[m + 1]);
                acc += b0 * 0.5 * (b - a) * (v[m] + v[m + 1]);
            }
            vn[j] = fv[j] + acc / kSqrtPi;
        }
        double change = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            change = std::max(change, std::abs(vn[j] - v[j]));
        v.swap(vn);
        local.sweeps = sweep + 1;
        local.last_change = change;
        local.sweep_changes.push_back(change);
        if (change < tol * scale) {
            converged = true;
            break;
        }
        grow_streak = (change > prev_change) ? grow_streak + 1 : 0;
        prev_change = change;
        if (grow_streak > 25)
            throw ConvergenceError("Volterra iteration diverging", change);
    }
    if (!converged)
        throw ConvergenceError("Volterra iteration did not converge in " +
                                   std::to_string(max_sweeps) + " sweeps",
                               local.last_change);
    double sup = 0.0;
    for (double x : v) sup = std::max(sup, std::abs(x));
    local.sup_norm = sup;
    // N0 (1 + 2 N1 sqrt(T/pi)) e^{N1^2 T}: the Picard-series bound
    // N0 E_{1/2}(N1 sqrt T) <= this, with the exponential on both terms as in
    // the G1 chain. (The Abel resolvent e^t(1+erf sqrt t) already exceeds the
    // variant with the exponential on the second term only.)
    local.gronwall_bound = p.N0 * (1.0 + 2.0 * p.N1 * std::sqrt(p.T / kPi)) *
                           std::exp(p.N1 * p.N1 * p.T);
    local.gronwall_ok = sup <= local.gronwall_bound * (1.0 + 1e-9);
    if (info) *info = local;
    return SampledFunction(tg, std::move(v));
}

ControlSignal map_control_inverse(const TransformContext& ctx, const ControlSignal& u_rkg,
                                  const SampledFunction& w0, const GridSpec& time_grid,
                                  VolterraSolveInfo* info, const HeatSolveOptions& opt) {
    SampledFunction z0 = apply_That_inv(ctx, w0);
    auto problem = build_volterra_problem(ctx, u_rkg, z0, time_grid, opt);
    auto v = solve_volterra(problem, 1e-12, 200, info);
    return ControlSignal::sampled(std::move(v));
}

EstimateReport verify_estimates(const TransformContext& ctx, const ControlSignal& u110,
                                const ControlSignal& u_rkg, const SampledFunction& z0,
                                const SampledFunction& w0,
                                const std::vector<HeatState>& z_states,
                                const VolterraSolveInfo* volterra) {
    EstimateReport r;
    r.T = u110.horizon();
    r.sup_u110 = u110.sup_norm();
    r.sup_urkg = u_rkg.sup_norm();
    r.z0_h1 = norm_H1(z0);
    r.w0_hh1 = norm_HH1(ctx, w0);
    r.sigma0_0 = ctx.derived.sigma0_0;
    r.R = ctx.derived.R;
    r.R0 = ctx.derived.R0;
    r.M1 = ctx.bounds.M1;
    const double quarter = ctx.derived.rhok0_quarter;

    const double mix = std::sqrt(r.sigma0_0 * (r.R0 + r.M1 * r.M1 * r.R));
    r.G0 = (1.0 / quarter) *
           (1.0 + (r.T + 3.0) * (2.0 * std::sqrt(r.sigma0_0) / kSqrtPi *
                                     std::sqrt(r.R0 + r.M1 * r.M1 * r.R) +
                                 r.sigma0_0 / std::sqrt(2.0 * kPi)));
    r.E1_surrogate = (mix + r.sigma0_0 / (2.0 * std::sqrt(2.0))) / quarter;
    r.est2_ok = r.sup_urkg <= r.G0 * r.sup_u110 + r.E1_surrogate * r.z0_h1 + 1e-9;

    r.E2_fitted = (r.w0_hh1 > 0.0) ? r.z0_h1 / r.w0_hh1 : 1.0;
    const double gexp = r.sigma0_0 + 2.0 * r.M1 * r.R;
    r.G1 = quarter * std::exp(gexp * gexp * r.T) *
           (1.0 + 2.0 * std::sqrt(r.T / kPi) * gexp);
    r.E3_surrogate = (r.E2_fitted / quarter) * (r.sigma0_0 / (2.0 * std::sqrt(2.0)) + mix);
    r.est4_ok = r.sup_u110 <= r.G1 * (r.sup_urkg + r.E3_surrogate * r.w0_hh1) + 1e-9;

    r.zz_bound = r.z0_h1 + 2.0 * (r.T + 3.0) / kSqrtPi * r.sup_u110;
    for (const auto& st : z_states)
        r.z_h1_max = std::max(r.z_h1_max, norm_H1(st.field));
    r.estzz_ok = r.z_h1_max <= r.zz_bound + 1e-9;

    if (volterra) {
        r.volterra_sup = volterra->sup_norm;
        r.gronwall_bound = volterra->gronwall_bound;
        r.estvvv_ok = volterra->gronwall_ok;
    }
    return r;
}

} // namespace heatctrl
