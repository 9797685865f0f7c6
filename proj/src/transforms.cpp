#include "heatctrl/transforms.hpp"

#include <algorithm>
#include <cmath>

namespace heatctrl {

TransformContext build_context(const CoefficientSet& c, const TransformOptions& opt) {
    TransformContext ctx;
    ctx.coeffs = c;
    DerivedOptions dopt = opt.derived;
    dopt.x_nodes = opt.x_nodes;
    dopt.lambda_nodes = opt.lambda_nodes;
    ctx.derived = build_derived(c, dopt);
    ctx.x_grid = GridSpec::uniform(0.0, c.truncation_x, opt.x_nodes);
    ctx.lambda_grid = GridSpec::uniform(0.0, ctx.derived.lambda_max, opt.lambda_nodes);
    ctx.kernel_k = KernelK::solve_goursat(ctx.derived.r_samples, ctx.derived.lambda_max,
                                          opt.kernel_tol, opt.kernel_max_sweeps,
                                          opt.kernel_nodes);
    ctx.kernel_l = KernelL::from_kernel(ctx.kernel_k, ctx.derived.lambda_max,
                                        opt.l_kernel_nodes);
    ctx.k_boundary = boundary_derivative(ctx.kernel_k);
    ctx.bounds = verify_kernel_bounds(ctx.kernel_k);
    return ctx;
}

SampledFunction apply_S(const TransformContext& ctx, const SampledFunction& psi) {
    const double lam_hi = psi.grid().b();
    std::vector<double> v(ctx.x_grid.size());
    for (std::size_t i = 0; i < ctx.x_grid.size(); ++i) {
        const double x = ctx.x_grid[i];
        double lam = ctx.derived.sigma_table(x);
        if (lam > lam_hi) {
            if (lam > lam_hi * (1.0 + 1e-9))
                throw DomainError("apply_S: sigma(x) beyond the input grid");
            lam = lam_hi;
        }
        v[i] = psi(lam) / std::pow(ctx.coeffs.rhok_at(x), 0.25);
    }
    return SampledFunction(ctx.x_grid, std::move(v), psi.interp());
}

SampledFunction apply_S_inv(const TransformContext& ctx, const SampledFunction& phi) {
    std::vector<double> v(ctx.lambda_grid.size());
    for (std::size_t j = 0; j < ctx.lambda_grid.size(); ++j) {
        const double x = invert_sigma(ctx.derived, ctx.lambda_grid[j]);
        v[j] = std::pow(ctx.coeffs.rhok_at(x), 0.25) * phi(std::min(x, phi.grid().b()));
    }
    return SampledFunction(ctx.lambda_grid, std::move(v), phi.interp());
}

namespace {

template <typename Kernel>
SampledFunction tail_transform(const SampledFunction& g, const Kernel& kernel) {
    const auto& grid = g.grid();
    const std::size_t n = grid.size();
    std::vector<double> out(n);
    // int_{lambda_m}^{end} K(lambda_m, s) g(s) ds over the trailing sub-grid.
    for (std::size_t m = 0; m < n; ++m) {
        const double lam = grid[m];
        double acc = 0.0;
        const std::size_t count = n - m;
        if (count >= 2) {
            std::vector<double> sub(grid.nodes().begin() + static_cast<long>(m),
                                    grid.nodes().end());
            GridSpec subgrid(std::move(sub));
            const auto w = quadrature_weights(subgrid);
            for (std::size_t s = 0; s < count; ++s)
                acc += w[s] * kernel(lam, subgrid[s]) * g.values()[m + s];
        }
        out[m] = g.values()[m] + acc;
    }
    return SampledFunction(grid, std::move(out), g.interp());
}

} // namespace

SampledFunction apply_Tr(const TransformContext& ctx, const SampledFunction& g) {
    return tail_transform(g, [&](double a, double b) { return ctx.kernel_k(a, b); });
}

SampledFunction apply_Tr_inv(const TransformContext& ctx, const SampledFunction& f) {
    const double ymax = ctx.kernel_l.y_max();
    return tail_transform(f, [&](double a, double b) {
        if (a >= ymax) return 0.0;
        return ctx.kernel_l(a, std::min(b, ymax));
    });
}

SampledFunction apply_That(const TransformContext& ctx, const SampledFunction& g) {
    return apply_S(ctx, apply_Tr(ctx, g));
}

SampledFunction apply_That_inv(const TransformContext& ctx, const SampledFunction& f) {
    return apply_Tr_inv(ctx, apply_S_inv(ctx, f));
}

double tr_tail_bound(const TransformContext& ctx, const SampledFunction& g) {
    return ctx.bounds.M0 * ctx.derived.sigma0.values().back() * g.max_abs();
}

SampledFunction apply_D_rhok(const TransformContext& ctx, const SampledFunction& phi) {
    auto d = derivative_samples(phi);
    const auto& grid = phi.grid();
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid[i];
        v[i] = ctx.coeffs.sqrt_k_over_rho(x) * d[i] + ctx.coeffs.q1(x) * phi.values()[i];
    }
    return SampledFunction(grid, std::move(v), phi.interp());
}

namespace {
double weighted_l2_sq(const SampledFunction& f, const std::vector<double>& w,
                      const std::function<double(double)>& weight) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double v = f.values()[i];
        const double rho = weight ? weight(f.grid()[i]) : 1.0;
        s += w[i] * rho * v * v;
    }
    return 2.0 * s;   // even extension over the whole line
}
} // namespace

double norm_H0(const SampledFunction& f) {
    const auto w = quadrature_weights(f.grid());
    return std::sqrt(weighted_l2_sq(f, w, nullptr));
}

double norm_H1(const SampledFunction& f) {
    const auto w = quadrature_weights(f.grid());
    const double a = weighted_l2_sq(f, w, nullptr);
    const double b = weighted_l2_sq(derivative_function(f), w, nullptr);
    return std::sqrt(a + b);
}

double norm_HH0(const TransformContext& ctx, const SampledFunction& f) {
    const auto w = quadrature_weights(f.grid());
    auto rho = [&](double x) { return ctx.coeffs.rho_at(x); };
    return std::sqrt(weighted_l2_sq(f, w, rho));
}

double norm_HH1(const TransformContext& ctx, const SampledFunction& f) {
    const auto w = quadrature_weights(f.grid());
    auto rho = [&](double x) { return ctx.coeffs.rho_at(x); };
    const double a = weighted_l2_sq(f, w, rho);
    const double b = weighted_l2_sq(apply_D_rhok(ctx, f), w, rho);
    return std::sqrt(a + b);
}

} // namespace heatctrl
