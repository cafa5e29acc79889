#pragma once

#include "repeatcap/quadrature.hpp"

namespace repeatcap::integrals {

/// 1 - x*u - (1-u)^x, evaluated without cancellation for small x*u.
double pow_remainder(double x, double u);

struct CalEResult {
    double value;
    bool precision_warning;  // alternating finite sum (p > 1) lost > 6 digits
    double digits_lost;
};

/// E_p(x) = E[log(Y_x!)] for Y_x ~ Bin_{x,p}.
/// p <= 1: quadrature of int_0^1 (1 - p t x - (1-p t)^x)/(t log(1-t)) dt, any real x >= 0.
/// p > 1:  the syntactic binomial-transform extension; x must be a non-negative
///         integer and the alternating finite sum is compensated.
CalEResult cal_e_full(double p, double x, const QuadratureConfig& cfg = {});
double cal_e(double p, double x, const QuadratureConfig& cfg = {});

/// Integrand of E_p(x) with the analytic limits substituted inside
/// cfg.endpoint_shave of t = 0 (limit x(x-1)p^2/2) and t = 1 (limit 0).
double cal_e_integrand(double p, double x, double t, double shave = 1e-12);

/// Lambda_eps(y) = int_0^1 (1 - t y - (1-t)^y)/(t log(1 - eps t)) dt,
/// eps in (0,1], y >= 0 real.  Lambda_1(y) = log Gamma(1+y).
double lambda_trunc(double eps, double y, const QuadratureConfig& cfg = {});
double lambda_trunc_integrand(double eps, double y, double t, double shave = 1e-12);

/// E[Lambda_eps(Y_x)] for Y_x ~ Bin_{x,p} via the closed form
/// E_{p/eps}(x) + x p Li(1-eps)/eps - eta(1-eps) + int_eps^1 (1-t p/eps)^x/(t log(1-t)) dt.
CalEResult expected_lambda_full(double eps, double p, int x, const QuadratureConfig& cfg = {});
double expected_lambda(double eps, double p, int x, const QuadratureConfig& cfg = {});

/// Truncation residual R_p(x) of the dual-feasibility gap; R_1 = 0, R_p(0) = 0,
/// and R_p(x) >= 0 for all x >= 0.
double r_gap(double p, double x, const QuadratureConfig& cfg = {});

}  // namespace repeatcap::integrals
