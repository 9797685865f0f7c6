#include "heatctrl/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace heatctrl {

namespace {

std::size_t auto_nodes(double y_max, double target_h, std::size_t lo, std::size_t hi) {
    auto n = static_cast<std::size_t>(std::ceil(y_max / target_h)) + 1;
    return std::clamp(n, lo, hi);
}

} // namespace

KernelK KernelK::solve_goursat(const SampledFunction& r, double y_max, double tol,
                               int max_sweeps, std::size_t nodes) {
    if (!(y_max > 0))
        throw DomainError("solve_goursat: y_max must be positive");
    if (r.grid().b() < y_max * (1.0 - 1e-12))
        throw DomainError("solve_goursat: r grid must cover [0, y_max]");

    KernelK k;
    k.r_ = r;
    k.n_ = nodes ? nodes : auto_nodes(y_max, 0.01, 257, 2049);
    k.xi_max_ = y_max;
    k.h_ = y_max / static_cast<double>(k.n_ - 1);
    k.row_off_.resize(k.n_);
    std::size_t total = 0;
    for (std::size_t i = 0; i < k.n_; ++i) {
        k.row_off_[i] = total;
        total += i + 1;
    }
    k.v_.assign(total, 0.0);

    auto xi_grid = GridSpec::uniform(0.0, y_max, k.n_);

    if (r.max_abs() <= 1e-12) {   // potentials at FD-noise level collapse
        k.trivial_ = true;
        k.converged_ = true;
        k.sigma0_ = SampledFunction::zero(xi_grid);
        k.r_cum_ = SampledFunction::zero(xi_grid);
        return k;
    }

    // Tail-closed integrals of r on the xi nodes (diagonal data and sigma0).
    auto tails = [&](bool absolute) {
        auto fit = fit_exponential_tail(r);
        const double rb = r.grid().b();
        double beyond = fit.mass_beyond(rb);
        if (!absolute && r.values().back() < 0.0) beyond = -beyond;
        std::vector<double> cum(k.n_, 0.0);
        double acc = beyond;
        // from the grid end back to y_max first (r may extend past y_max)
        {
            const double span = rb - y_max;
            if (span > 1e-14) {
                const int m = std::max(4, static_cast<int>(std::ceil(span / k.h_)));
                double prev = absolute ? std::abs(r(rb)) : r(rb);
                for (int s = m - 1; s >= 0; --s) {
                    const double x = y_max + span * s / m;
                    const double cur = absolute ? std::abs(r(x)) : r(x);
                    acc += 0.5 * (prev + cur) * (span / m);
                    prev = cur;
                }
            }
        }
        cum[k.n_ - 1] = acc;
        for (std::size_t i = k.n_ - 1; i-- > 0;) {
            const double a = absolute ? std::abs(r(xi_grid[i])) : r(xi_grid[i]);
            const double b = absolute ? std::abs(r(xi_grid[i + 1])) : r(xi_grid[i + 1]);
            const double mid = absolute ? std::abs(r(0.5 * (xi_grid[i] + xi_grid[i + 1])))
                                        : r(0.5 * (xi_grid[i] + xi_grid[i + 1]));
            cum[i] = cum[i + 1] + k.h_ / 6.0 * (a + 4.0 * mid + b);
        }
        return SampledFunction(xi_grid, std::move(cum));
    };
    k.sigma0_ = tails(true);
    k.r_cum_ = tails(false);

    const std::size_t n = k.n_;
    const double h = k.h_;
    std::vector<double> cur(total), nxt(total), inner(total);

    // r(s - eta_j) cached per (s index, eta index) lookup via direct eval;
    // precompute on the simplex once (r is fixed through the sweeps).
    std::vector<double> rtab(total);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            rtab[k.row_off_[i] + j] = r(static_cast<double>(i - j) * h);

    // start from the diagonal data G(xi) = (1/2) r_tail(xi)
    for (std::size_t i = 0; i < n; ++i) {
        const double g = 0.5 * k.r_cum_.values()[i];
        for (std::size_t j = 0; j <= i; ++j)
            cur[k.row_off_[i] + j] = g;
    }

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        // inner[i,j] = int_{xi_i}^{xi_max} r(s - eta_j) K(s, j) ds
        // (backward cumulative trapezoid over s = xi index).
        for (std::size_t j = 0; j < n; ++j)
            inner[k.row_off_[n - 1] + j] = 0.0;
        for (std::size_t i = n - 1; i-- > 0;) {
            const std::size_t oi = k.row_off_[i], oi1 = k.row_off_[i + 1];
            for (std::size_t j = 0; j <= i; ++j) {
                const double fa = rtab[oi + j] * cur[oi + j];
                const double fb = rtab[oi1 + j] * cur[oi1 + j];
                inner[oi + j] = inner[oi1 + j] + 0.5 * h * (fa + fb);
            }
        }
        // nxt[i,j] = G(xi_i) + cumulative trapezoid of inner over eta up to j.
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t oi = k.row_off_[i];
            double acc = 0.0;
            const double g = 0.5 * k.r_cum_.values()[i];
            nxt[oi] = g;
            double prev_inner = inner[oi];
            for (std::size_t j = 1; j <= i; ++j) {
                acc += 0.5 * h * (prev_inner + inner[oi + j]);
                prev_inner = inner[oi + j];
                nxt[oi + j] = g + acc;
                delta = std::max(delta, std::abs(nxt[oi + j] - cur[oi + j]));
            }
            delta = std::max(delta, std::abs(nxt[oi] - cur[oi]));
        }
        cur.swap(nxt);
        k.residuals_.push_back(delta);
        if (delta < tol) {
            k.converged_ = true;
            break;
        }
    }
    if (!k.converged_)
        throw ConvergenceError(
            "Goursat iteration did not reach tol " + std::to_string(tol) + " in " +
                std::to_string(max_sweeps) + " sweeps (sigma0(0) may be too large "
                "for this grid)",
            k.residuals_.empty() ? 0.0 : k.residuals_.back());
    k.v_ = std::move(cur);
    return k;
}

double KernelK::operator()(double y1, double y2) const {
    if (y1 < 0 && y1 > -1e-12) y1 = 0.0;
    if (y2 < y1) {
        if (y2 > y1 - 1e-12) y2 = y1;
        else throw DomainError("KernelK: need y2 >= y1 >= 0");
    }
    if (y1 < 0)
        throw DomainError("KernelK: need y1 >= 0");
    const double xi = 0.5 * (y1 + y2);
    const double eta = 0.5 * (y2 - y1);
    if (xi >= xi_max_) return 0.0;
    if (trivial_) return 0.0;
    const auto i = static_cast<std::size_t>(xi / h_);
    auto j = static_cast<std::size_t>(eta / h_);
    if (j > i) j = i;
    const double u = xi / h_ - static_cast<double>(i);
    const double w = eta / h_ - static_cast<double>(j);
    // Linear interpolation on the two triangles of the cell; the one above
    // the cell diagonal is never hit on the simplex edge j == i.
    if (u >= w || j + 1 > i) {
        const double k00 = at(i, j);
        const double k10 = at(i + 1, j);
        const double k11 = at(i + 1, j + 1 <= i + 1 ? j + 1 : j);
        return k00 + u * (k10 - k00) + w * (k11 - k10);
    }
    const double k00 = at(i, j);
    const double k01 = at(i, j + 1);
    const double k11 = at(i + 1, j + 1);
    return k00 + w * (k01 - k00) + u * (k11 - k01);
}

double KernelK::diagonal(double y) const {
    return 0.5 * r_tail_integral(y);
}

double KernelK::r_tail_integral(double xi) const {
    if (trivial_) return 0.0;
    if (xi >= r_cum_.grid().b()) return 0.0;
    return r_cum_(std::max(xi, 0.0));
}

SampledFunction boundary_derivative(const KernelK& k) {
    const std::size_t n = k.axis_nodes();
    const double h = k.step();
    if (n < 5)
        throw GridError("kernel grid too small for the boundary derivative");
    // Sample K_{y1}(0, x_i) at x_i = 2 i h. Moving one characteristic node
    // from (i,i) to (i+1,i-1) changes y1 by 2h and keeps y2 fixed, so a
    // one-sided 3-point stencil along that diagonal has step 2h.
    const std::size_t m = n - 2;
    std::vector<double> vals(m, 0.0);
    if (!k.trivial_zero()) {
        for (std::size_t i = 2; i < m; ++i)
            vals[i] = (-3.0 * k.at(i, i) + 4.0 * k.at(i + 1, i - 1) - k.at(i + 2, i - 2)) /
                      (4.0 * h);
        // Quadratic extrapolation to the first two samples.
        vals[1] = 3.0 * vals[2] - 3.0 * vals[3] + vals[4];
        vals[0] = 3.0 * vals[1] - 3.0 * vals[2] + vals[3];
    }
    auto grid = GridSpec::uniform(0.0, 2.0 * h * static_cast<double>(m - 1), m);
    return SampledFunction(std::move(grid), std::move(vals));
}

BoundReport verify_kernel_bounds(const KernelK& k) {
    BoundReport rep;
    if (k.trivial_zero())
        return rep;   // M0 = M1 = 0, vacuous bounds
    const std::size_t n = k.axis_nodes();
    const double h = k.step();
    const auto& s0 = k.sigma0().values();
    const double floor0 = 1e-14 * (s0.front() + 1e-300);

    for (std::size_t i = 0; i < n; ++i) {
        const double denom = s0[i];
        for (std::size_t j = 0; j <= i; ++j) {
            const double a = std::abs(k.at(i, j));
            if (denom <= floor0) {
                if (a > 1e-12) {
                    rep.consistent = false;
                    rep.note = "sigma0 vanishes at xi = " + std::to_string(i * h) +
                               " where |K| = " + std::to_string(a);
                }
                continue;
            }
            const double ratio = a / denom;
            if (ratio > rep.M0) {
                rep.M0 = ratio;
                rep.max_ratio_xi = static_cast<double>(i) * h;
            }
        }
    }

    // K_{y1} = (K_xi - K_eta)/2 by central differences at interior nodes.
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double denom = s0[i];
        if (denom <= floor0) continue;
        const double rxi = std::abs(k.r()(std::min(static_cast<double>(i) * h,
                                                   k.r().grid().b())));
        for (std::size_t j = 1; j + 1 <= i; ++j) {
            const double kxi = (k.at(i + 1, j) - k.at(i - 1, j)) / (2.0 * h);
            const double keta = (k.at(i, j + 1) - k.at(i, j - 1)) / (2.0 * h);
            const double dy1 = 0.5 * (kxi - keta);
            const double excess = std::abs(dy1) - 0.25 * rxi;
            if (excess > 0.0)
                rep.M1 = std::max(rep.M1, excess / denom);
        }
    }
    // Include the y1 = 0 edge samples.
    auto bd = boundary_derivative(k);
    for (std::size_t i = 0; i < bd.size(); ++i) {
        const double x = bd.grid()[i];
        const double xi = 0.5 * x;
        if (xi >= k.xi_max()) break;
        const double denom = k.sigma0()(xi);
        if (denom <= floor0) continue;
        const double rxi = std::abs(k.r()(std::min(xi, k.r().grid().b())));
        const double excess = std::abs(bd.values()[i]) - 0.25 * rxi;
        if (excess > 0.0)
            rep.M1 = std::max(rep.M1, excess / denom);
    }
    rep.truncation_bound = rep.M0 * s0.back();
    return rep;
}

KernelL KernelL::from_kernel(const KernelK& k, double y_max, std::size_t nodes) {
    if (!(y_max > 0) || y_max > k.xi_max() * (1.0 + 1e-12))
        throw DomainError("KernelL: y_max must lie within the K triangle");
    KernelL l;
    l.n_ = nodes ? nodes : std::min<std::size_t>(k.axis_nodes(), 641);
    l.y_max_ = y_max;
    l.h_ = y_max / static_cast<double>(l.n_ - 1);
    l.row_off_.resize(l.n_);
    std::size_t total = 0;
    for (std::size_t i = 0; i < l.n_; ++i) {
        l.row_off_[i] = total;
        total += l.n_ - i;
    }
    l.v_.assign(total, 0.0);
    l.trivial_ = k.trivial_zero();
    if (l.trivial_)
        return l;

    const double h = l.h_;
    const std::size_t n = l.n_;
    // K tabulated on the L grid once; the marching loops then stay pure.
    std::vector<double> ktab(total);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            ktab[l.row_off_[i] + j - i] =
                k(static_cast<double>(i) * h, static_cast<double>(j) * h);

    // Row i: solve L(y1, y2) = -K(y1,y2) - int_{y1}^{y2} L(y1,s) K(s,y2) ds
    // marching in y2; trapezoid couples the new unknown through the cell end.
    for (std::size_t i = 0; i < n; ++i) {
        double* row = &l.v_[l.row_off_[i]];
        row[0] = -ktab[l.row_off_[i]];
        for (std::size_t j = i + 1; j < n; ++j) {
            double integral = 0.0;   // trapezoid over s = i..j-1
            for (std::size_t m = i; m < j; ++m) {
                const double wl = (m == i) ? 0.5 * h : h;
                integral += wl * row[m - i] * ktab[l.row_off_[m] + j - m];
            }
            const double kdiag = ktab[l.row_off_[j]];   // K(y2, y2)
            const double wend = 0.5 * h * kdiag;
            row[j - i] = (-ktab[l.row_off_[i] + j - i] - integral) / (1.0 + wend);
        }
    }
    return l;
}

double KernelL::operator()(double y1, double y2) const {
    if (y1 < 0 && y1 > -1e-12) y1 = 0.0;
    if (y2 < y1) {
        if (y2 > y1 - 1e-12) y2 = y1;
        else throw DomainError("KernelL: need y2 >= y1 >= 0");
    }
    if (y1 < 0 || y2 > y_max_ * (1.0 + 1e-12))
        throw DomainError("KernelL: point outside triangle");
    if (trivial_)
        return 0.0;
    const double y2c = std::min(y2, y_max_);
    auto i = static_cast<std::size_t>(y1 / h_);
    if (i >= n_ - 1) i = n_ - 2;
    auto j = static_cast<std::size_t>(y2c / h_);
    if (j >= n_ - 1) j = n_ - 2;
    if (j < i) j = i;
    const double u = y1 / h_ - static_cast<double>(i);
    const double w = y2c / h_ - static_cast<double>(j);
    // Bilinear with the (i+1, j) corner folded onto the diagonal when needed.
    auto val = [&](std::size_t a, std::size_t b) {
        if (b < a) b = a;
        return at(a, b);
    };
    const double f00 = val(i, j), f01 = val(i, j + 1);
    const double f10 = val(i + 1, j), f11 = val(i + 1, j + 1);
    return (1 - u) * ((1 - w) * f00 + w * f01) + u * ((1 - w) * f10 + w * f11);
}

} // namespace heatctrl
