#include "doctest.h"

#include <cmath>

#include "heatctrl/kernels.hpp"
#include "support/oracles.hpp"

using namespace heatctrl;

namespace {

SampledFunction example1_r(double hi = 14.0, std::size_t n = 2049) {
    return SampledFunction::from_function(GridSpec::uniform(0.0, hi, n),
                                          [](double l) { return 0.25 * std::exp(-l); });
}

} // namespace

TEST_CASE("zero potential short-circuits to the zero kernel") {
    auto r = SampledFunction::zero(GridSpec::uniform(0.0, 10.0, 257));
    auto k = KernelK::solve_goursat(r, 10.0, 1e-10);
    CHECK(k.trivial_zero());
    CHECK(k.converged());
    CHECK(k.sweep_residuals().empty());
    CHECK(k(0.0, 3.0) == 0.0);
    CHECK(k.diagonal(1.0) == 0.0);
    auto bd = boundary_derivative(k);
    CHECK(bd.max_abs() == 0.0);
    auto rep = verify_kernel_bounds(k);
    CHECK(rep.M0 == 0.0);
    CHECK(rep.M1 == 0.0);
    auto l = KernelL::from_kernel(k, 10.0);
    CHECK(l(0.0, 5.0) == 0.0);
}

TEST_CASE("diagonal identity pins K(0,0) = 1/8 for the example-1 potential") {
    auto k = KernelK::solve_goursat(example1_r(), 14.0, 1e-10);
    CHECK(k.converged());
    CHECK(k.diagonal(0.0) == doctest::Approx(0.125).epsilon(1e-6));
    CHECK(k(0.0, 0.0) == doctest::Approx(0.125).epsilon(1e-5));
    // K(0, 2 ln 2) = (sqrt 2 / 8) I_1(1/sqrt 2), frozen via the series oracle
    const double expected = std::sqrt(2.0) / 8.0 *
                            oracles::bessel_i_series(1, 1.0 / std::sqrt(2.0));
    CHECK(expected == doctest::Approx(0.06648848323916909).epsilon(1e-10));
    CHECK(k(0.0, 2.0 * std::log(2.0)) == doctest::Approx(expected).epsilon(1e-4));
}

TEST_CASE("kernel oracle: closed form on the y1 = 0 edge, x in [0, 10]") {
    auto k = KernelK::solve_goursat(example1_r(), 14.0, 1e-10);
    double worst = 0.0;
    for (int i = 0; i <= 500; ++i) {
        const double x = 10.0 * i / 500.0;
        worst = std::max(worst,
                         std::abs(k(0.0, x) - oracles::example1_kernel_closed(0.0, x)));
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("kernel oracle: closed form across the whole triangle") {
    auto k = KernelK::solve_goursat(example1_r(), 14.0, 1e-10);
    double worst = 0.0;
    for (int i = 0; i <= 60; ++i)
        for (int j = 0; j <= i; ++j) {
            const double y2 = 10.0 * i / 60.0;
            const double y1 = y2 * j / std::max(i, 1);
            worst = std::max(worst, std::abs(k(y1, y2) -
                                             oracles::example1_kernel_closed(y1, y2)));
        }
    CHECK(worst <= 1e-4);
}

TEST_CASE("diagonal condition holds along the whole diagonal") {
    auto r = example1_r();
    auto k = KernelK::solve_goursat(r, 14.0, 1e-10);
    for (double y : {0.0, 0.5, 1.0, 2.0, 5.0, 8.0}) {
        const double expected = 0.5 * 0.25 * std::exp(-y);   // half the tail of r
        CHECK(k.diagonal(y) == doctest::Approx(expected).epsilon(1e-5));
    }
}

TEST_CASE("boundary derivative K_y1(0, .)") {
    auto k = KernelK::solve_goursat(example1_r(), 14.0, 1e-10);
    auto bd = boundary_derivative(k);
    // Limit x -> 0+ of the closed form's series expansion is -9/128.
    CHECK(oracles::example1_kernel_dy1_closed(1e-9) ==
          doctest::Approx(-9.0 / 128.0).epsilon(1e-6));
    CHECK(bd(0.0) == doctest::Approx(-9.0 / 128.0).epsilon(2e-4));
    // Value at x = 2 ln 2 against the closed form (frozen via the oracle).
    const double x = 2.0 * std::log(2.0);
    CHECK(oracles::example1_kernel_dy1_closed(x) ==
          doctest::Approx(-0.039351603897155).epsilon(1e-9));
    CHECK(bd(x) == doctest::Approx(oracles::example1_kernel_dy1_closed(x)).epsilon(1e-4));
    // And across a sweep of x values.
    double worst = 0.0;
    for (int i = 0; i <= 300; ++i) {
        const double xv = 10.0 * i / 300.0;
        worst = std::max(worst, std::abs(bd(xv) - oracles::example1_kernel_dy1_closed(xv)));
    }
    CHECK(worst <= 1e-4);
}

TEST_CASE("PDE residual of the converged kernel in characteristic form") {
    // K_xi_eta = -r(xi - eta) K at interior nodes by mixed central differences.
    auto r = example1_r();
    const double tol = 1e-6;
    auto k = KernelK::solve_goursat(r, 14.0, tol, 50, 1401);
    const double h = k.step();
    double worst = 0.0;
    for (std::size_t i = 2; i + 1 < k.axis_nodes(); i += 3) {
        for (std::size_t j = 1; j + 1 < i; j += 2) {
            const double mixed = (k.at(i + 1, j + 1) - k.at(i + 1, j - 1) -
                                  k.at(i - 1, j + 1) + k.at(i - 1, j - 1)) /
                                 (4.0 * h * h);
            const double rhs = -r(static_cast<double>(i - j) * h) * k.at(i, j);
            worst = std::max(worst, std::abs(mixed - rhs));
        }
    }
    CHECK(worst <= 10.0 * tol);
}

TEST_CASE("non-convergence reports the last residual") {
    auto k_or_throw = [&] {
        return KernelK::solve_goursat(example1_r(), 14.0, 1e-14, 1, 513);
    };
    CHECK_THROWS_AS(k_or_throw(), ConvergenceError);
}

TEST_CASE("L kernel: diagonal and defining equation") {
    auto k = KernelK::solve_goursat(example1_r(), 14.0, 1e-10);
    auto l = KernelL::from_kernel(k, 14.0);
    // exact at grid nodes by construction
    for (std::size_t i = 0; i < l.axis_nodes(); i += 25) {
        const double y = static_cast<double>(i) * l.step();
        CHECK(l.at(i, i) == doctest::Approx(-k(y, y)).epsilon(1e-12));
    }
    // between nodes the identity holds to interpolation accuracy
    for (double y : {0.4031, 2.017, 5.555})
        CHECK(l(y, y) == doctest::Approx(-k(y, y)).epsilon(5e-3));

    // Residual of L + K + int_{y1}^{y2} L(y1,s) K(s,y2) ds with the same
    // trapezoid rule the solver used.
    const double h = l.step();
    const std::size_t n = l.axis_nodes();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; i += 40) {
        for (std::size_t j = i; j < n; j += 40) {
            double integral = 0.0;
            for (std::size_t m = i; m <= j; ++m) {
                const double w = (m == i || m == j) ? 0.5 * h : h;
                if (j == i) break;
                integral += w * l.at(i, m) *
                            k(static_cast<double>(m) * h, static_cast<double>(j) * h);
            }
            const double res = l.at(i, j) +
                               k(static_cast<double>(i) * h, static_cast<double>(j) * h) +
                               integral;
            worst = std::max(worst, std::abs(res));
        }
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("fitted kernel bounds") {
    auto k = KernelK::solve_goursat(example1_r(), 14.0, 1e-10);
    auto rep = verify_kernel_bounds(k);
    CHECK(rep.consistent);
    CHECK(rep.M0 > 0.0);
    CHECK(rep.M0 < 1.0);   // closed form gives ratios I1(u)/u <= I1(1)
    CHECK(rep.M1 > 0.0);
    CHECK(rep.M1 < 1.0);
    CHECK(rep.truncation_bound <= 1e-5);
    // The M0 bound actually holds on a fresh sample of the triangle.
    for (int i = 1; i <= 40; ++i)
        for (int j = 0; j <= i; ++j) {
            const double y2 = 12.0 * i / 40.0;
            const double y1 = y2 * j / i;
            const double s0 = k.sigma0()(0.5 * (y1 + y2));
            CHECK(std::abs(k(y1, y2)) <= rep.M0 * s0 * (1.0 + 1e-6) + 1e-12);
        }
}
