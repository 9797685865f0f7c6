#pragma once

// Test-side oracles, kept independent of the implementation paths they check.

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracles {

/// Modified Bessel I_n by a fixed-length long-double series (independent of
/// the adaptive summation in the library).
inline double bessel_i_series(unsigned n, double y, int terms = 30) {
    long double half = static_cast<long double>(y) / 2.0L;
    long double term = 1.0L;
    for (unsigned k = 1; k <= n; ++k)
        term *= half / static_cast<long double>(k);
    long double sum = term;
    for (int m = 1; m < terms; ++m) {
        term *= (half * half) /
                (static_cast<long double>(m) * static_cast<long double>(m + n));
        sum += term;
    }
    return static_cast<double>(sum);
}

/// Reference for int_0^t g(s)/sqrt(t-s) ds: brute-force midpoint rule on the
/// substitution t - s = w^2 with a very fine grid.
inline double abel_integral_reference(const std::function<double(double)>& g, double t,
                                      std::size_t n = 2000000) {
    const double w_max = std::sqrt(t);
    const double h = w_max / static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = (static_cast<double>(i) + 0.5) * h;
        acc += g(t - w * w);
    }
    return 2.0 * acc * h;
}

/// Direct marching solver for
///   v(t) = f(t) + int_0^t v(s) ptil(t-s)/sqrt(pi (t-s)) ds
/// on a given time grid, with the same per-cell rule as the library (v linear,
/// ptil matched by a0 + b0 sqrt(t-s) through the cell endpoints) but solving
/// the discrete system by forward substitution: the top cell couples v(t_j)
/// implicitly. Independent of the Picard route used by the library.
inline std::vector<double> volterra_marching(const std::vector<double>& tg,
                                             const std::function<double(double)>& f,
                                             const std::function<double(double)>& ptil) {
    const double sqrt_pi = 1.7724538509055160273;
    const std::size_t n = tg.size();
    std::vector<double> v(n);
    v[0] = f(tg[0]);
    for (std::size_t j = 1; j < n; ++j) {
        const double t = tg[j];
        double acc = 0.0;
        double w_end = 0.0;
        for (std::size_t m = 0; m < j; ++m) {
            const double a = tg[m], b = tg[m + 1];
            const double A = t - a, B = t - b;
            const double sA = std::sqrt(A), sB = std::sqrt(B > 0 ? B : 0.0);
            const double I0 = 2.0 * (sA - sB);
            const double I1 = t * I0 - (2.0 / 3.0) * (A * sA - B * sB);
            const double wa = I0 - (I1 - a * I0) / (b - a);
            const double wb = (I1 - a * I0) / (b - a);
            const double Pa = ptil(A), Pb = ptil(B > 0 ? B : 0.0);
            const double b0 = (sA - sB > 1e-300) ? (Pa - Pb) / (sA - sB) : 0.0;
            const double a0 = Pa - b0 * sA;
            const double plain = 0.5 * (b - a);
            acc += (a0 * wa + b0 * plain) * v[m];
            if (m + 1 < j)
                acc += (a0 * wb + b0 * plain) * v[m + 1];
            else
                w_end = a0 * wb + b0 * plain;
        }
        v[j] = (f(t) + acc / sqrt_pi) / (1.0 - w_end / sqrt_pi);
    }
    return v;
}

/// Example-1 closed forms (kernel and its y1 derivative at y1 = 0) for
/// r(l) = exp(-l)/4.
inline double example1_kernel_closed(double y1, double y2) {
    const double u2 = std::exp(-y1 / 2.0) * (std::exp(-y1 / 2.0) - std::exp(-y2 / 2.0));
    const double pre = std::exp(-(y1 + y2) / 2.0) / 4.0;
    if (u2 <= 1e-24)
        return pre * 0.5;   // I_1(u)/u -> 1/2
    const double u = std::sqrt(u2);
    return pre * bessel_i_series(1, u) / u;
}

inline double example1_kernel_dy1_closed(double x) {
    const double e = std::exp(-x / 2.0);
    const double s2 = 1.0 - e;
    if (s2 <= 1e-24)
        return -9.0 / 128.0;   // series limit as x -> 0+
    const double s = std::sqrt(s2);
    return -(e / 8.0) * bessel_i_series(1, s) / s -
           (e / 16.0) * bessel_i_series(2, s) * (1.0 + 1.0 / s2);
}

} // namespace oracles
