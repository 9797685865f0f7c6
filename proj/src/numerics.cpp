#include "heatctrl/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace heatctrl {

std::vector<double> quadrature_weights(const GridSpec& grid) {
    const std::size_t n = grid.size();
    std::vector<double> w(n, 0.0);
    if (grid.is_uniform()) {
        const double h = grid.uniform_step();
        std::size_t i = 0;
        // Simpson over pairs of cells, trapezoid on a leftover cell.
        for (; i + 2 <= n - 1; i += 2) {
            w[i] += h / 3.0;
            w[i + 1] += 4.0 * h / 3.0;
            w[i + 2] += h / 3.0;
        }
        if (i < n - 1) {
            w[n - 2] += h / 2.0;
            w[n - 1] += h / 2.0;
        }
        return w;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = grid[i + 1] - grid[i];
        w[i] += h / 2.0;
        w[i + 1] += h / 2.0;
    }
    return w;
}

double integrate(const SampledFunction& f) {
    const auto w = quadrature_weights(f.grid());
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
        s += w[i] * f.values()[i];
    return s;
}

namespace {
// 3-point Gauss-Legendre on [lo, hi].
double gauss3(const SampledFunction& f, double lo, double hi) {
    static const double t = std::sqrt(0.6);
    const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
    return r * ((5.0 / 9.0) * (f(c - r * t) + f(c + r * t)) + (8.0 / 9.0) * f(c));
}
} // namespace

double integrate(const SampledFunction& f, double a, double b) {
    if (a > b) return -integrate(f, b, a);
    if (!f.grid().contains(a) || !f.grid().contains(b))
        throw DomainError("integration interval outside grid");
    if (a == b) return 0.0;
    const auto& xs = f.grid().nodes();
    std::size_t ia = f.grid().cell_of(a);
    std::size_t ib = f.grid().cell_of(b);
    if (ia == ib) return gauss3(f, a, b);
    double s = gauss3(f, a, xs[ia + 1]);
    for (std::size_t i = ia + 1; i < ib; ++i)
        s += gauss3(f, xs[i], xs[i + 1]);
    s += gauss3(f, xs[ib], b);
    return s;
}

std::pair<double, double> sqrt_kernel_cell_weights(double a, double b, double t) {
    // With A = t-a >= B = t-b >= 0:
    //   I0 = int_a^b (t-xi)^{-1/2} dxi = 2(sqrt A - sqrt B)
    //   I1 = int_a^b xi (t-xi)^{-1/2} dxi = t I0 - (2/3)(A^{3/2} - B^{3/2})
    // and the linear interpolant through (a,fa),(b,fb) integrates to
    //   fa*I0 + (fb-fa)/(b-a) * (I1 - a*I0).
    const double A = t - a, B = t - b;
    const double sA = std::sqrt(std::max(A, 0.0)), sB = std::sqrt(std::max(B, 0.0));
    const double I0 = 2.0 * (sA - sB);
    const double I1 = t * I0 - (2.0 / 3.0) * (A * sA - B * sB);
    const double slope_w = (I1 - a * I0) / (b - a);
    return {I0 - slope_w, slope_w};
}

double integrate_sqrt_singular(const SampledFunction& g, double t) {
    if (!(t > 0))
        throw DomainError("integrate_sqrt_singular needs t > 0");
    if (!g.grid().contains(0.0) || !g.grid().contains(t))
        throw DomainError("grid must cover [0, t]");
    const auto& xs = g.grid().nodes();
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < xs.size() && xs[i] < t; ++i) {
        const double a = xs[i];
        const double b = std::min(xs[i + 1], t);
        if (!(b > a)) continue;
        const double fa = g.values()[i];
        const double fb = (b == xs[i + 1]) ? g.values()[i + 1] : g(b);
        const auto [wa, wb] = sqrt_kernel_cell_weights(a, b, t);
        s += wa * fa + wb * fb;
    }
    return s;
}

namespace {
double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                            double fa, double fm, double fb, double whole, double tol,
                            int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    if (!std::isfinite(flm) || !std::isfinite(frm))
        throw EvaluationError("non-finite integrand in adaptive quadrature", lm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}
} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
    if (a == b) return 0.0;
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    if (!std::isfinite(fa) || !std::isfinite(fm) || !std::isfinite(fb))
        throw EvaluationError("non-finite integrand in adaptive quadrature", a);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

namespace {
// Derivative of the quadratic through (x0,f0),(x1,f1),(x2,f2) at x.
double lagrange3_deriv(double x, double x0, double x1, double x2,
                       double f0, double f1, double f2) {
    return f0 * (2.0 * x - x1 - x2) / ((x0 - x1) * (x0 - x2)) +
           f1 * (2.0 * x - x0 - x2) / ((x1 - x0) * (x1 - x2)) +
           f2 * (2.0 * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
}
} // namespace

double differentiate_one_sided(const SampledFunction& f, bool at_left_end) {
    const auto& xs = f.grid().nodes();
    const auto& v = f.values();
    if (xs.size() < 3)
        throw GridError("one-sided derivative needs >= 3 nodes");
    if (at_left_end)
        return lagrange3_deriv(xs[0], xs[0], xs[1], xs[2], v[0], v[1], v[2]);
    const std::size_t n = xs.size();
    return lagrange3_deriv(xs[n - 1], xs[n - 3], xs[n - 2], xs[n - 1],
                           v[n - 3], v[n - 2], v[n - 1]);
}

std::vector<double> derivative_samples(const SampledFunction& f) {
    const auto& xs = f.grid().nodes();
    const auto& v = f.values();
    const std::size_t n = xs.size();
    if (n < 3)
        throw GridError("derivative needs >= 3 nodes");
    std::vector<double> d(n);
    d[0] = lagrange3_deriv(xs[0], xs[0], xs[1], xs[2], v[0], v[1], v[2]);
    for (std::size_t i = 1; i + 1 < n; ++i)
        d[i] = lagrange3_deriv(xs[i], xs[i - 1], xs[i], xs[i + 1], v[i - 1], v[i], v[i + 1]);
    d[n - 1] = lagrange3_deriv(xs[n - 1], xs[n - 3], xs[n - 2], xs[n - 1],
                               v[n - 3], v[n - 2], v[n - 1]);
    return d;
}

SampledFunction derivative_function(const SampledFunction& f) {
    return SampledFunction(f.grid(), derivative_samples(f), f.interp());
}

double bessel_i(unsigned n, double y) {
    if (y < 0)
        throw DomainError("bessel_i defined for y >= 0 here");
    if (y == 0.0) return n == 0 ? 1.0 : 0.0;
    const double half = 0.5 * y;
    // term_0 = (y/2)^n / n!
    double term = 1.0;
    for (unsigned k = 1; k <= n; ++k)
        term *= half / static_cast<double>(k);
    double sum = term;
    const double q = half * half;
    for (unsigned m = 1; m < 400; ++m) {
        term *= q / (static_cast<double>(m) * static_cast<double>(m + n));
        sum += term;
        if (term < sum * std::numeric_limits<double>::epsilon())
            break;
    }
    return sum;
}

double ExpTailFit::mass_beyond(double b) const {
    if (all_zero || coef == 0.0) return 0.0;
    return coef * std::exp(-rate * b) / rate;
}

double ExpTailFit::first_moment_beyond(double b) const {
    if (all_zero || coef == 0.0) return 0.0;
    return coef * std::exp(-rate * b) * (b / rate + 1.0 / (rate * rate));
}

ExpTailFit fit_exponential_tail(const SampledFunction& f, double window_fraction) {
    const auto& xs = f.grid().nodes();
    const auto& v = f.values();
    const std::size_t n = xs.size();
    const auto start = static_cast<std::size_t>(std::floor((1.0 - window_fraction) *
                                                           static_cast<double>(n - 1)));
    const double floor_abs = 1e-300;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = start; i < n; ++i) {
        const double a = std::abs(v[i]);
        if (a <= floor_abs) continue;
        const double lx = xs[i], ly = std::log(a);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++m;
    }
    ExpTailFit fit;
    if (m < 2) {
        // Nothing above the floor in the window: treat as an exactly decayed tail.
        fit.all_zero = true;
        return fit;
    }
    const double denom = static_cast<double>(m) * sxx - sx * sx;
    const double slope = (static_cast<double>(m) * sxy - sx * sy) / denom;
    const double icept = (sy - slope * sx) / static_cast<double>(m);
    fit.rate = -slope;
    fit.coef = std::exp(icept);
    double rss = 0.0;
    for (std::size_t i = start; i < n; ++i) {
        const double a = std::abs(v[i]);
        if (a <= floor_abs) continue;
        const double r = std::log(a) - (icept + slope * xs[i]);
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / static_cast<double>(m));
    if (!(fit.rate > 0.0))
        throw TailDivergenceError("tail fit slope >= 0: samples do not decay "
                                  "(rate " + std::to_string(fit.rate) + ")");
    return fit;
}

} // namespace heatctrl
