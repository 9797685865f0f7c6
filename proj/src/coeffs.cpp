#include "heatctrl/coeffs.hpp"

#include <algorithm>
#include <cmath>

namespace heatctrl {

namespace {

double checked(const std::function<double(double)>& f, double x, const char* what) {
    if (!f)
        throw EvaluationError(std::string(what) + " is not set", x);
    double v;
    try {
        v = f(std::abs(x));
    } catch (const std::exception& e) {
        throw EvaluationError(std::string(what) + " evaluation failed: " + e.what(), x);
    }
    if (!std::isfinite(v))
        throw EvaluationError(std::string(what) + " evaluated to a non-finite value", x);
    return v;
}

} // namespace

double CoefficientSet::rho_at(double x) const { return checked(rho, x, "rho"); }
double CoefficientSet::kappa_at(double x) const { return checked(kappa, x, "kappa"); }
double CoefficientSet::gamma_at(double x) const { return checked(gamma, x, "gamma"); }

double CoefficientSet::rhok_at(double x) const {
    return rho_at(x) * kappa_at(x);
}

double CoefficientSet::sqrt_rho_over_k(double x) const {
    const double v = std::sqrt(rho_at(x) / kappa_at(x));
    if (!std::isfinite(v))
        throw EvaluationError("sqrt(rho/kappa) undefined (sign?)", x);
    return v;
}

double CoefficientSet::sqrt_k_over_rho(double x) const {
    return std::sqrt(kappa_at(x) / rho_at(x));
}

double CoefficientSet::rhok_prime_at(double x) const {
    if (scheme == DerivativeScheme::AnalyticIfProvided && rhok_prime) {
        double v = rhok_prime(std::abs(x));
        if (!std::isfinite(v))
            throw EvaluationError("(rho k)' evaluated to a non-finite value", x);
        return x < 0 ? -v : v;
    }
    // Central difference of the even extension; |.| routing makes the
    // reflection at 0 automatic, so (rho k)'(0) comes out 0 exactly.
    const double ax = std::abs(x);
    const double h = 1e-4 * (1.0 + ax);
    auto central = [&](double step) {
        return (rhok_at(ax + step) - rhok_at(ax - step)) / (2.0 * step);
    };
    const double d1 = central(h);
    const double d2 = central(0.5 * h);
    const double v = (4.0 * d2 - d1) / 3.0;
    return x < 0 ? -v : v;
}

double CoefficientSet::q1(double x) const {
    const double rk = rhok_at(x);
    return sqrt_k_over_rho(x) * rhok_prime_at(x) / (4.0 * rk);
}

double CoefficientSet::q2(double x) const {
    const double ax = std::abs(x);
    const double h = 1e-4 * (1.0 + ax);
    auto q1_of = [&](double s) { return q1(s); };

    auto one_sided = [&](double x0, double dir, double step) {
        return dir * (-3.0 * q1_of(x0) + 4.0 * q1_of(x0 + dir * step) -
                      q1_of(x0 + 2.0 * dir * step)) / (2.0 * step);
    };
    auto central = [&](double x0, double step) {
        return (q1_of(x0 + step) - q1_of(x0 - step)) / (2.0 * step);
    };

    double d1, d2;
    if (ax < 2.0 * h) {
        d1 = one_sided(ax, +1.0, h);
        d2 = one_sided(ax, +1.0, 0.5 * h);
    } else if (ax > truncation_x - 2.0 * h) {
        d1 = one_sided(ax, -1.0, h);
        d2 = one_sided(ax, -1.0, 0.5 * h);
    } else {
        d1 = central(ax, h);
        d2 = central(ax, 0.5 * h);
    }
    const double q1p = (4.0 * d2 - d1) / 3.0;
    const double disagreement = std::abs(d2 - d1) / (1.0 + std::abs(q1p));
    last_fd_disagreement = std::max(last_fd_disagreement, disagreement);
    const double q1v = q1_of(ax);
    return sqrt_k_over_rho(ax) * q1p + q1v * q1v;
}

double CoefficientSet::q(double x) const {
    return q2(x) - gamma_at(x);
}

CoefficientSet preset_constant(double truncation_x) {
    CoefficientSet c;
    c.rho = [](double) { return 1.0; };
    c.kappa = [](double) { return 1.0; };
    c.gamma = [](double) { return 0.0; };
    c.rhok_prime = [](double) { return 0.0; };
    c.truncation_x = truncation_x;
    c.label = "constant";
    return c;
}

CoefficientSet preset_example1(double truncation_x) {
    CoefficientSet c;
    c.rho = [](double x) { return 12.0 * std::cosh(x) / (1.0 + 2.0 * x); };
    c.kappa = [](double x) { return (1.0 + 2.0 * x) * std::cosh(x) / 3.0; };
    c.gamma = [](double x) {
        const double a = 1.0 + 2.0 * x;
        const double ch = std::cosh(x);
        return a * std::tanh(x) / 36.0 + a * a / 144.0 * (1.0 + 1.0 / (ch * ch)) -
               1.0 / (4.0 * a * a * a);
    };
    // rho*kappa = 4 cosh^2 x
    c.rhok_prime = [](double x) { return 4.0 * std::sinh(2.0 * x); };
    c.truncation_x = truncation_x;
    c.label = "example1";
    return c;
}

CoefficientSet preset_example2(double truncation_x) {
    CoefficientSet c;
    c.rho = [](double x) { return (4.0 + x * x) * (3.0 + x); };
    c.kappa = [](double x) { return (4.0 + x * x) / (3.0 + x); };
    c.gamma = [](double x) {
        const double b = 3.0 + x, a = 4.0 + x * x;
        return (12.0 - x * x * x) / (b * b * b * a * a);
    };
    // rho*kappa = (4 + x^2)^2
    c.rhok_prime = [](double x) { return 4.0 * x * (4.0 + x * x); };
    c.truncation_x = truncation_x;
    c.label = "example2";
    return c;
}

std::optional<CoefficientSet> preset_by_name(const std::string& name, double truncation_x) {
    if (name == "constant")
        return preset_constant(truncation_x > 0 ? truncation_x : 30.0);
    if (name == "example1")
        return preset_example1(truncation_x > 0 ? truncation_x : 40.0);
    if (name == "example2")
        return preset_example2(truncation_x > 0 ? truncation_x : 7.0);
    return std::nullopt;
}

bool ValidationReport::all_passed() const {
    return std::all_of(items.begin(), items.end(),
                       [](const ValidationItem& i) { return i.passed; });
}

ValidationReport validate_assumptions(const CoefficientSet& c, const ValidationOptions& opt) {
    ValidationReport rep;
    const std::size_t n = opt.sample_count;
    const double X = c.truncation_x;

    auto guarded = [&rep](const std::string& name, auto&& body) {
        ValidationItem item;
        item.name = name;
        try {
            body(item);
        } catch (const EvaluationError& e) {
            item.passed = false;
            item.detail = std::string(e.what()) + " at x = " + std::to_string(e.where);
        } catch (const std::exception& e) {
            item.passed = false;
            item.detail = e.what();
        }
        rep.items.push_back(std::move(item));
    };

    auto positivity = [&](const char* what, auto eval) {
        return [&, what, eval](ValidationItem& item) {
            double minv = std::numeric_limits<double>::infinity();
            double argmin = 0.0;
            for (std::size_t i = 0; i <= n; ++i) {
                const double x = X * static_cast<double>(i) / static_cast<double>(n);
                const double v = eval(x);
                if (v < minv) {
                    minv = v;
                    argmin = x;
                }
            }
            item.value = minv;
            item.passed = minv > 0.0;
            if (!item.passed)
                item.detail = std::string(what) + " <= 0 at x = " + std::to_string(argmin);
        };
    };

    guarded("rho_positive", positivity("rho", [&](double x) { return c.rho_at(x); }));
    guarded("kappa_positive", positivity("kappa", [&](double x) { return c.kappa_at(x); }));

    guarded("rhok_prime_zero_at_origin", [&](ValidationItem& item) {
        const double d = c.rhok_prime_at(0.0);
        item.value = d;
        item.passed = std::abs(d) <= opt.rhok_prime_tol * (1.0 + std::abs(c.rhok_at(0.0)));
        if (!item.passed)
            item.detail = "(rho k)'(0) = " + std::to_string(d);
    });

    guarded("sigma_growth", [&](ValidationItem& item) {
        const double s = compute_sigma(c, X);
        item.value = s;
        item.passed = s >= opt.sigma_horizon;
        if (!item.passed)
            item.detail = "sigma(" + std::to_string(X) + ") = " + std::to_string(s) +
                          " below horizon " + std::to_string(opt.sigma_horizon);
    });

    guarded("q_bounded", [&](ValidationItem& item) {
        double maxq = 0.0;
        double argmax = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            const double x = X * static_cast<double>(i) / static_cast<double>(n);
            const double v = c.q(x);
            if (!std::isfinite(v))
                throw EvaluationError("q is not finite", x);
            if (std::abs(v) > maxq) {
                maxq = std::abs(v);
                argmax = x;
            }
        }
        item.value = maxq;
        item.passed = true;
        item.detail = "sup|q| at x = " + std::to_string(argmax);
    });

    guarded("q_weighted_integrable", [&](ValidationItem& item) {
        // int_0^X sqrt(rho/k) |q| sigma dx plus a decay proxy on the tail.
        auto grid = GridSpec::uniform(0.0, X, 513);
        double sigma = 0.0;
        double integral = 0.0;
        double prev_x = 0.0;
        double prev_f = c.sqrt_rho_over_k(0.0) * std::abs(c.q(0.0)) * 0.0;
        double f_at_90 = 0.0, f_at_end = 0.0;
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const double x = grid[i];
            sigma += 0.5 * (c.sqrt_rho_over_k(prev_x) + c.sqrt_rho_over_k(x)) * (x - prev_x);
            const double f = c.sqrt_rho_over_k(x) * std::abs(c.q(x)) * sigma;
            integral += 0.5 * (prev_f + f) * (x - prev_x);
            if (grid[i] <= 0.9 * X) f_at_90 = f;
            f_at_end = f;
            prev_x = x;
            prev_f = f;
        }
        item.value = integral;
        item.passed = std::isfinite(integral) && f_at_end <= f_at_90 + 1e-12 * (1.0 + f_at_90);
        if (!item.passed)
            item.detail = "integrand not decaying near truncation_x";
    });

    return rep;
}

double compute_sigma(const CoefficientSet& c, double x, double tol) {
    const double ax = std::abs(x);
    if (ax > c.truncation_x * (1.0 + 1e-12))
        throw DomainError("compute_sigma: |x| beyond truncation_x");
    if (ax == 0.0) return 0.0;
    const double v = adaptive_simpson(
        [&](double s) { return c.sqrt_rho_over_k(s); }, 0.0, ax, tol);
    return x < 0 ? -v : v;
}

SampledFunction compute_q(const CoefficientSet& c, const GridSpec& x_grid,
                          std::vector<std::string>* warnings) {
    c.last_fd_disagreement = 0.0;
    std::vector<double> v(x_grid.size());
    for (std::size_t i = 0; i < x_grid.size(); ++i)
        v[i] = c.q(x_grid[i]);
    if (warnings && c.last_fd_disagreement > 1e-5)
        warnings->push_back("Richardson levels disagree by " +
                            std::to_string(c.last_fd_disagreement) +
                            " while sampling q (derivative estimates may be unstable)");
    return SampledFunction(x_grid, std::move(v));
}

namespace {
// Cumulative integral from the right on the grid, per-cell 3-point Gauss of
// the interpolant, for both f and an optional x-weighted version.
struct RightCumulative {
    std::vector<double> tail;   // tail[i] = int_{x_i}^{x_end} f
    double moment = 0.0;        // int x f over the whole grid
};

RightCumulative right_cumulative(const SampledFunction& f, bool weight_by_x) {
    const auto& xs = f.grid().nodes();
    const std::size_t n = xs.size();
    RightCumulative out;
    out.tail.assign(n, 0.0);
    static const double t = std::sqrt(0.6);
    for (std::size_t k = n - 1; k-- > 0;) {
        const double lo = xs[k], hi = xs[k + 1];
        const double cc = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
        double cell = 0.0, cellm = 0.0;
        const double pts[3] = {cc - r * t, cc, cc + r * t};
        const double ws[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
        for (int m = 0; m < 3; ++m) {
            const double fv = f(pts[m]);
            cell += ws[m] * fv;
            cellm += ws[m] * pts[m] * fv;
        }
        out.tail[k] = out.tail[k + 1] + r * cell;
        if (weight_by_x) out.moment += r * cellm;
    }
    return out;
}
} // namespace

TailConstants tail_constants(const SampledFunction& r) {
    TailConstants out;
    const auto& grid = r.grid();
    const double b = grid.b();

    if (r.max_abs() == 0.0) {
        out.sigma0 = SampledFunction::zero(grid);
        out.fit.all_zero = true;
        return out;
    }

    out.fit = fit_exponential_tail(r);
    const double tail_mass = out.fit.mass_beyond(b);
    const double tail_moment = out.fit.first_moment_beyond(b);
    const double tail_sign = r.values().back() >= 0.0 ? 1.0 : -1.0;

    SampledFunction abs_r(grid, r.values(), r.interp());
    for (double& v : abs_r.values()) v = std::abs(v);
    auto cum_abs = right_cumulative(abs_r, true);
    auto cum_signed = right_cumulative(r, false);

    std::vector<double> s0(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        s0[i] = cum_abs.tail[i] + tail_mass;
    out.sigma0 = SampledFunction(grid, std::move(s0));
    out.sigma0_0 = out.sigma0.values().front();
    out.R = cum_abs.moment + tail_moment;
    out.R0 = r.max_abs() / 16.0;
    out.r_integral = cum_signed.tail.front() + tail_sign * tail_mass;
    return out;
}

DerivedData build_derived(const CoefficientSet& c, const DerivedOptions& opt) {
    DerivedData d;
    d.rhok0_quarter = std::pow(c.rhok_at(0.0), 0.25);

    // sigma on a refined x grid by cumulative per-cell Gauss quadrature.
    const std::size_t ns = (opt.x_nodes - 1) * opt.sigma_refine + 1;
    auto sgrid = GridSpec::uniform(0.0, c.truncation_x, ns);
    std::vector<double> sv(ns, 0.0);
    static const double t = std::sqrt(0.6);
    for (std::size_t i = 1; i < ns; ++i) {
        const double lo = sgrid[i - 1], hi = sgrid[i];
        const double cc = 0.5 * (lo + hi), rr = 0.5 * (hi - lo);
        const double cell = (5.0 / 9.0) * (c.sqrt_rho_over_k(cc - rr * t) +
                                           c.sqrt_rho_over_k(cc + rr * t)) +
                            (8.0 / 9.0) * c.sqrt_rho_over_k(cc);
        sv[i] = sv[i - 1] + rr * cell;
        if (!(sv[i] > sv[i - 1]))
            throw EvaluationError("sigma is not strictly increasing", sgrid[i]);
    }
    d.lambda_max = sv.back();
    d.sigma_table = SampledFunction(sgrid, std::move(sv));

    // Inverse table on the uniform lambda grid by bisection on the table.
    auto lgrid = GridSpec::uniform(0.0, d.lambda_max, opt.lambda_nodes);
    std::vector<double> inv(lgrid.size());
    const auto& st = d.sigma_table;
    for (std::size_t j = 0; j < lgrid.size(); ++j) {
        const double lam = lgrid[j];
        double lo = 0.0, hi = c.truncation_x;
        for (int it = 0; it < 100 && (hi - lo) > 1e-15 * (1.0 + hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            (st(mid) < lam ? lo : hi) = mid;
        }
        inv[j] = 0.5 * (lo + hi);
    }
    inv.front() = 0.0;
    inv.back() = c.truncation_x;
    d.sigma_inverse_table = SampledFunction(lgrid, std::move(inv));

    d.q_samples = compute_q(c, GridSpec::uniform(0.0, c.truncation_x, opt.x_nodes),
                            &d.warnings);
    d.r_samples = compute_r(c, d, lgrid);

    auto tails = tail_constants(d.r_samples);
    d.sigma0 = std::move(tails.sigma0);
    d.sigma0_0 = tails.sigma0_0;
    d.R = tails.R;
    d.R0 = tails.R0;
    d.r_integral = tails.r_integral;
    d.tail = tails.fit;
    if (!tails.fit.all_zero && tails.fit.residual > 0.5)
        d.warnings.push_back("exponential tail fit of r has large misfit (rms " +
                             std::to_string(tails.fit.residual) + " in log space)");
    return d;
}

double invert_sigma(const DerivedData& d, double lam) {
    const double al = std::abs(lam);
    if (al > d.lambda_max * (1.0 + 1e-12))
        throw DomainError("invert_sigma: |lambda| = " + std::to_string(al) +
                          " beyond tabulated range " + std::to_string(d.lambda_max));
    const double clamped = std::min(al, d.lambda_max);
    double x = d.sigma_inverse_table(clamped);
    const double X = d.sigma_table.grid().b();
    // Newton polish against the sigma table interpolant.
    for (int it = 0; it < 3; ++it) {
        x = std::clamp(x, 0.0, X);
        const double f = d.sigma_table(x) - clamped;
        const double step = std::max(1e-9 * (1.0 + x), 1e-12);
        const double xm = std::max(x - step, 0.0), xp = std::min(x + step, X);
        const double deriv = (d.sigma_table(xp) - d.sigma_table(xm)) / (xp - xm);
        if (deriv <= 0.0) break;
        x -= f / deriv;
    }
    x = std::clamp(x, 0.0, X);
    return lam < 0 ? -x : x;
}

SampledFunction compute_r(const CoefficientSet& c, const DerivedData& d,
                          const GridSpec& lambda_grid) {
    std::vector<double> v(lambda_grid.size());
    for (std::size_t j = 0; j < lambda_grid.size(); ++j)
        v[j] = c.q(invert_sigma(d, lambda_grid[j]));
    return SampledFunction(lambda_grid, std::move(v));
}

} // namespace heatctrl
