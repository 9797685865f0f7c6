#include "doctest.h"

#include <cmath>

#include "heatctrl/transforms.hpp"
#include "support/oracles.hpp"

using namespace heatctrl;

namespace {

const TransformContext& ctx_constant() {
    static TransformContext ctx = build_context(preset_constant());
    return ctx;
}

const TransformContext& ctx_example1() {
    static TransformContext ctx = build_context(preset_example1());
    return ctx;
}

const TransformContext& ctx_example2() {
    static TransformContext ctx = build_context(preset_example2());
    return ctx;
}

// Finer spatial grids for the tight-tolerance invariants; the composed
// functions vary fastest near x = 0 where sigma is steep for example 1.
const TransformContext& ctx_example1_fine() {
    static TransformContext ctx = [] {
        TransformOptions opt;
        opt.x_nodes = 16385;
        opt.lambda_nodes = 4097;
        opt.kernel_nodes = 257;
        return build_context(preset_example1(20.0), opt);
    }();
    return ctx;
}

const TransformContext& ctx_constant_fine() {
    static TransformContext ctx = [] {
        TransformOptions opt;
        opt.x_nodes = 16385;
        return build_context(preset_constant(), opt);
    }();
    return ctx;
}

SampledFunction on_lambda(const TransformContext& ctx,
                          const std::function<double(double)>& f) {
    return SampledFunction::from_function(ctx.lambda_grid, f);
}

} // namespace

TEST_CASE("S is the identity for identity coefficients") {
    const auto& ctx = ctx_constant();
    auto psi = on_lambda(ctx, [](double l) { return std::exp(-l / 2.0) * std::cos(l); });
    auto sp = apply_S(ctx, psi);
    double worst = 0.0;
    for (std::size_t i = 0; i < sp.size(); ++i)
        worst = std::max(worst, std::abs(sp.values()[i] - psi.values()[i]));
    CHECK(worst <= 1e-12);
}

TEST_CASE("S at the origin for example 1: (rho k)(0) = 4") {
    const auto& ctx = ctx_example1();
    auto one = on_lambda(ctx, [](double) { return 1.0; });
    auto sp = apply_S(ctx, one);
    CHECK(sp.values().front() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("S for example 2 matches the closed substitution form") {
    const auto& ctx = ctx_example2();
    auto psi = on_lambda(ctx, [](double l) { return std::exp(-l / 5.0) * (1.0 + l); });
    auto sp = apply_S(ctx, psi);
    for (double x : {0.0, 0.4, 1.3, 2.9}) {
        const double lam = 0.5 * x * (x + 6.0);
        const double expected = psi(lam) / std::sqrt(4.0 + x * x);
        CHECK(sp(x) == doctest::Approx(expected).epsilon(1e-7));
    }
}

TEST_CASE("S inverse undoes S") {
    for (const auto* ctx : {&ctx_example1_fine(), &ctx_example2()}) {
        auto psi = on_lambda(*ctx, [](double l) { return std::exp(-l / 2.0); });
        auto round = apply_S_inv(*ctx, apply_S(*ctx, psi));
        double worst = 0.0;
        for (std::size_t i = 0; i < round.size(); ++i)
            worst = std::max(worst, std::abs(round.values()[i] - psi.values()[i]));
        CHECK(worst <= 1e-8);
    }
    // Example 2 closed inverse: (S^-1 phi)(l) = sqrt(4 + x^2) phi(x), x = sigma^-1(l)
    const auto& ctx = ctx_example2();
    auto phi = SampledFunction::from_function(ctx.x_grid,
                                              [](double x) { return std::exp(-x); });
    auto si = apply_S_inv(ctx, phi);
    for (double lam : {0.0, 2.0, 8.0}) {
        const double x = invert_sigma(ctx.derived, lam);
        CHECK(si(lam) ==
              doctest::Approx(std::sqrt(4.0 + x * x) * std::exp(-x)).epsilon(1e-7));
    }
}

TEST_CASE("T_r is the identity when r = 0") {
    const auto& ctx = ctx_constant();
    auto g = on_lambda(ctx, [](double l) { return std::exp(-l / 3.0); });
    auto tg = apply_Tr(ctx, g);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        worst = std::max(worst, std::abs(tg.values()[i] - g.values()[i]));
    CHECK(worst <= 1e-14);
}

TEST_CASE("T_r reproduces the closed transform of the example-1 initial state") {
    // T_r(e^{-|l|/2}) = 2 I_1(e^{-|l|/2}) pointwise.
    const auto& ctx = ctx_example1();
    auto g = on_lambda(ctx, [](double l) { return std::exp(-l / 2.0); });
    auto tg = apply_Tr(ctx, g);
    CHECK(tg.values().front() ==
          doctest::Approx(2.0 * oracles::bessel_i_series(1, 1.0)).epsilon(1e-4));
    double worst = 0.0;
    for (int i = 0; i <= 240; ++i) {
        const double lam = 6.0 * i / 240.0;
        const double expected = 2.0 * oracles::bessel_i_series(1, std::exp(-lam / 2.0));
        worst = std::max(worst, std::abs(tg(lam) - expected));
    }
    CHECK(worst <= 1e-3);
    CHECK(tr_tail_bound(ctx, g) <= 1e-5);
}

TEST_CASE("T_r inverse round trips") {
    const auto& ctx = ctx_example1();
    auto g = on_lambda(ctx, [](double l) { return std::exp(-l / 2.0); });
    auto round = apply_Tr_inv(ctx, apply_Tr(ctx, g));
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double lam = ctx.lambda_grid.b() * i / 200.0;
        worst = std::max(worst, std::abs(round(lam) - g(lam)));
    }
    CHECK(worst <= 1e-4);

    // inverse of the closed transform recovers the exponential
    auto f = on_lambda(ctx, [](double l) {
        return 2.0 * oracles::bessel_i_series(1, std::exp(-l / 2.0));
    });
    auto back = apply_Tr_inv(ctx, f);
    double worst2 = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double lam = 6.0 * i / 200.0;
        worst2 = std::max(worst2, std::abs(back(lam) - std::exp(-lam / 2.0)));
    }
    CHECK(worst2 <= 1e-4);
}

TEST_CASE("That maps the example-1 initial state to the paper's W0") {
    const auto& ctx = ctx_example1();
    auto z0 = on_lambda(ctx, [](double l) { return std::exp(-l / 2.0); });
    auto w0 = apply_That(ctx, z0);
    // W0(x) = sqrt(2 / cosh x) I_1((1+2|x|)^{-3/2})
    auto closed = [](double x) {
        return std::sqrt(2.0 / std::cosh(x)) *
               oracles::bessel_i_series(1, std::pow(1.0 + 2.0 * x, -1.5));
    };
    CHECK(w0.values().front() ==
          doctest::Approx(std::sqrt(2.0) * oracles::bessel_i_series(1, 1.0)).epsilon(1e-3));
    double worst = 0.0;
    for (double x : {0.0, 0.3, 1.0, 2.5, 6.0, 12.0})
        worst = std::max(worst, std::abs(w0(x) - closed(x)));
    CHECK(worst <= 1e-3);

    // That round trip through the inverse
    auto back = apply_That_inv(ctx, w0);
    double worst2 = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double lam = 6.0 * i / 100.0;
        worst2 = std::max(worst2, std::abs(back(lam) - z0(lam)));
    }
    CHECK(worst2 <= 1e-4);
}

TEST_CASE("That is the identity for identity coefficients") {
    const auto& ctx = ctx_constant();
    auto g = on_lambda(ctx, [](double l) { return std::exp(-l) * (1.0 + l); });
    auto w = apply_That(ctx, g);
    auto back = apply_That_inv(ctx, w);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        worst = std::max(worst, std::abs(w.values()[i] - g.values()[i]));
        worst = std::max(worst, std::abs(back.values()[i] - g.values()[i]));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("D_rhok: plain derivative for identity coefficients") {
    const auto& ctx = ctx_constant_fine();
    auto phi = SampledFunction::from_function(ctx.x_grid,
                                              [](double x) { return std::sin(x); });
    auto d = apply_D_rhok(ctx, phi);
    for (double x : {0.5, 2.0, 11.0})
        CHECK(d(x) == doctest::Approx(std::cos(x)).epsilon(1e-6));
    auto flat = SampledFunction::from_function(ctx.x_grid, [](double) { return 2.0; });
    CHECK(apply_D_rhok(ctx, flat).max_abs() <= 1e-12);
}

TEST_CASE("intertwining: D_rhok S psi = S psi'") {
    const auto& ctx = ctx_example1_fine();
    auto psi = on_lambda(ctx, [](double l) { return std::exp(-l / 2.0); });
    auto psi_prime = on_lambda(ctx, [](double l) { return -0.5 * std::exp(-l / 2.0); });
    auto lhs = apply_D_rhok(ctx, apply_S(ctx, psi));
    auto rhs = apply_S(ctx, psi_prime);
    double worst = 0.0;
    for (double x : {0.1, 0.5, 1.0, 3.0, 8.0})
        worst = std::max(worst, std::abs(lhs(x) - rhs(x)));
    CHECK(worst <= 1e-5);
}

TEST_CASE("H1 norm closed form") {
    auto grid = GridSpec::uniform(0.0, 40.0, 4097);
    auto f = SampledFunction::from_function(grid,
                                            [](double x) { return std::exp(-x / 2.0); });
    CHECK(norm_H1(f) == doctest::Approx(std::sqrt(2.5)).epsilon(1e-6));
    CHECK(norm_H1(SampledFunction::zero(grid)) == 0.0);
    CHECK(norm_H0(f) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("weighted norms collapse to plain norms for identity coefficients") {
    const auto& ctx = ctx_constant();
    auto f = SampledFunction::from_function(ctx.x_grid,
                                            [](double x) { return std::exp(-x / 2.0); });
    CHECK(norm_HH1(ctx, f) == doctest::Approx(norm_H1(f)).epsilon(1e-12));
    CHECK(norm_HH0(ctx, f) == doctest::Approx(norm_H0(f)).epsilon(1e-12));
}

TEST_CASE("S is an isometry H0 -> HH0 and H1 -> HH1") {
    for (const auto* ctx : {&ctx_example1_fine(), &ctx_example2()}) {
        auto psi = on_lambda(*ctx, [](double l) { return std::exp(-l / 2.0); });
        auto sp = apply_S(*ctx, psi);
        CHECK(norm_HH0(*ctx, sp) == doctest::Approx(norm_H0(psi)).epsilon(1e-6));
        CHECK(norm_HH1(*ctx, sp) == doctest::Approx(norm_H1(psi)).epsilon(1e-4));
    }
}
