#pragma once

#include "repeatcap/quadrature.hpp"

namespace repeatcap::specfun {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

/// log Gamma(x) for x > 0.  Throws std::domain_error otherwise.
double log_gamma(double x);

/// psi(x) = Gamma'(x)/Gamma(x) for x > 0.
double digamma(double x);

/// E1(x) = int_1^inf exp(-x t)/t dt for x > 0.
/// Power series below the switch point, continued fraction above it.
double exp_integral_e1(double x);
inline constexpr double kE1SwitchPoint = 1.0;
double exp_integral_e1_series(double x);    // accurate for x <= kE1SwitchPoint
double exp_integral_e1_contfrac(double x);  // accurate for x >= kE1SwitchPoint

/// Li(z) = int_0^z dt/log t for z in [0,1).  Negative on (0,1).
/// Evaluated as -E1(-log z), which avoids the singular quadrature near z -> 1.
double log_integral(double z);

/// eta(z) = int_0^z dt/((1-t) log t) for z in [0,1).
double eta(double z, const QuadratureConfig& cfg = {});
/// Series form sum_{j>=1} Li(z^j); independent cross-check of eta().
double eta_series(double z);

struct LerchResult {
    double value;
    double tail_bound;  // certified bound on the dropped series tail
    bool converged;     // false when the iteration cap stopped the sum early
};

/// Lerch transcendent Phi(z,s,alpha) = sum_{k>=0} z^k/(k+alpha)^s for
/// z in (0,1), alpha > 0.  Direct series with a geometric tail bound;
/// contract-grade for |s| <= 1 (the library only needs s in {-1/2, 0, 1/2}).
LerchResult lerch_phi_ex(double z, double s, double alpha, double rel_tol = 1e-10);
double lerch_phi(double z, double s, double alpha);

/// Binary entropy in nats, with h(0) = h(1) = 0.
double binary_entropy(double p);

/// log C(x, y) over the reals: lgamma(1+x) - lgamma(1+y) - lgamma(1+x-y),
/// for 0 <= y <= x.
double log_binomial_real(double x, double y);

}  // namespace repeatcap::specfun
