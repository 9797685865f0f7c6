#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "heatctrl/grid.hpp"
#include "heatctrl/numerics.hpp"

namespace heatctrl {

/// Equation data rho, kappa, gamma of the half-axis problem. The callbacks
/// are defined for x >= 0; every accessor routes through |x|, realizing the
/// even extension implicitly.
struct CoefficientSet {
    enum class DerivativeScheme { AnalyticIfProvided, CentralRichardson };

    std::function<double(double)> rho;
    std::function<double(double)> kappa;
    std::function<double(double)> gamma;
    /// Optional analytic (rho*kappa)' for x >= 0; used when the scheme is
    /// AnalyticIfProvided, otherwise central differences with one Richardson
    /// level estimate it.
    std::function<double(double)> rhok_prime;

    DerivativeScheme scheme = DerivativeScheme::AnalyticIfProvided;
    double truncation_x = 30.0;
    std::string label = "custom";

    double rho_at(double x) const;
    double kappa_at(double x) const;
    double gamma_at(double x) const;
    double rhok_at(double x) const;
    double sqrt_rho_over_k(double x) const;
    double sqrt_k_over_rho(double x) const;

    /// (rho k)'(x) for x >= 0, analytic or finite-difference.
    double rhok_prime_at(double x) const;
    /// Q1(rho,k) = sqrt(k/rho) (k rho)' / (4 k rho).
    double q1(double x) const;
    /// Q2(rho,k) = sqrt(k/rho) Q1' + Q1^2. One-sided stencils near x = 0 and
    /// near truncation_x keep everything on the right branch (q' may jump
    /// at the origin).
    double q2(double x) const;
    /// q = Q2 - gamma.
    double q(double x) const;

    /// Largest Richardson disagreement seen by q2 since the last reset
    /// (diagnostic for the warning machinery).
    mutable double last_fd_disagreement = 0.0;
};

CoefficientSet preset_constant(double truncation_x = 30.0);
CoefficientSet preset_example1(double truncation_x = 40.0);
CoefficientSet preset_example2(double truncation_x = 7.0);
/// Lookup by name: "constant", "example1", "example2". Nullopt when unknown.
std::optional<CoefficientSet> preset_by_name(const std::string& name,
                                             double truncation_x = -1.0);

struct ValidationItem {
    std::string name;
    bool passed = false;
    double value = 0.0;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationItem> items;
    bool all_passed() const;
};

struct ValidationOptions {
    double sigma_horizon = 8.0;        ///< required sigma(truncation_x)
    std::size_t sample_count = 2048;
    double rhok_prime_tol = 1e-6;
};

/// Checks the standing assumptions: positivity of rho and kappa,
/// (rho k)'(0) = 0, sigma growth, boundedness of q and integrability of
/// sqrt(rho/k) |q| sigma. Failures are reported, not thrown; evaluation
/// failures become failed items carrying the offending x.
ValidationReport validate_assumptions(const CoefficientSet& c,
                                      const ValidationOptions& opt = {});

/// sigma(x) = int_0^x sqrt(rho(|s|)/kappa(|s|)) ds, odd in x, by adaptive
/// quadrature.
double compute_sigma(const CoefficientSet& c, double x, double tol = 1e-11);

/// q = Q2(rho,k) - gamma sampled on a grid of x >= 0. Richardson
/// disagreements above 1e-5 (relative) are appended to `warnings`.
SampledFunction compute_q(const CoefficientSet& c, const GridSpec& x_grid,
                          std::vector<std::string>* warnings = nullptr);

struct TailConstants {
    double sigma0_0 = 0.0;     ///< int_0^inf |r|
    double R = 0.0;            ///< int_0^inf xi |r(xi)| dxi
    double R0 = 0.0;           ///< sup|r| / 16
    double r_integral = 0.0;   ///< int_0^inf r (signed)
    SampledFunction sigma0;    ///< sigma0(x) = int_x^inf |r| on r's grid
    ExpTailFit fit;
};

/// Closes the half-axis integrals of r: cumulative quadrature on the grid
/// plus an exponential tail fit beyond it. Throws TailDivergenceError when
/// the tail does not decay.
TailConstants tail_constants(const SampledFunction& r);

struct DerivedOptions {
    std::size_t x_nodes = 2049;
    std::size_t lambda_nodes = 2049;
    std::size_t sigma_refine = 4;   ///< sigma table refinement vs x_nodes
    double quad_tol = 1e-11;
};

/// Everything derived from a CoefficientSet that downstream modules consume.
struct DerivedData {
    SampledFunction sigma_table;          ///< x -> sigma(x), refined x grid
    SampledFunction sigma_inverse_table;  ///< lambda -> sigma^{-1}(lambda)
    SampledFunction q_samples;            ///< q on the x grid
    SampledFunction r_samples;            ///< r = q o sigma^{-1} on the lambda grid
    SampledFunction sigma0;               ///< on the lambda grid
    double sigma0_0 = 0.0;
    double R = 0.0;
    double R0 = 0.0;
    double r_integral = 0.0;
    double rhok0_quarter = 1.0;           ///< (rho k)(0)^{1/4}
    double lambda_max = 0.0;              ///< sigma(truncation_x)
    ExpTailFit tail;
    std::vector<std::string> warnings;
};

DerivedData build_derived(const CoefficientSet& c, const DerivedOptions& opt = {});

/// sigma^{-1}(lambda) for |lambda| <= lambda_max: monotone interpolation of
/// the inverse table plus a local Newton polish against the sigma table.
double invert_sigma(const DerivedData& d, double lam);

/// r(lambda) = q(sigma^{-1}(lambda)) evaluated directly (no resampling of q).
SampledFunction compute_r(const CoefficientSet& c, const DerivedData& d,
                          const GridSpec& lambda_grid);

} // namespace heatctrl
