#pragma once

#include <functional>
#include <utility>

#include "repeatcap/dists.hpp"
#include "repeatcap/tolerances.hpp"

namespace repeatcap::bounds {

enum class Method { Trunc, ExactDist, Lerch, Elementary, Explicit };

std::string to_string(Method m);

// Constants of the analytic sandwich estimates.  The paper-default values are
// configuration data; sigma_hi and the alphas were validated numerically, not
// rigorously, by the source material.
struct EstimateConstants {
    double sigma_lo = 1.0 / 6.0;
    double sigma_hi = 0.177;
    double gamma_lo = 0.41309884965671437;  // 2 / e^{1+gamma}
    double gamma_hi = 0.42888194248035344;  // 1 / sqrt(2e)
    double alpha_lo = 0.19;
    double alpha_hi = 0.12;
    static double beta0(double p);  // (2/p) exp(-h(p)/p); -> 2/e as p -> 0
    static double beta1(double p);  // 1/sqrt(2(1-p))
};

// A capacity upper bound for a repeat channel.
struct BoundResult {
    double value_nats;
    double value_bits;
    double q_star;
    double slope_bits;  // value_bits/(1-d): the c_i column of the data tables
    dists::DistKind dist;
    Method method;
    double d;
    double q_tol;
    bool conditional = false;   // set only by the convexity-conditional bound
    bool flat_warning = false;  // objective varied by < 1e-12 across the scan grid
};

/// The mean-limited channel bound -mu log q - log y0, in nats.
double mean_limited_bound(const dists::DualDistribution& dist);

/// C_Ber(p, q): p (-mu log q - log y0)/(1 + mu) with (mu, y0) from
/// normalize(kind, p, q); kind must be InvBin or BinTrunc.  Nats.
double c_ber(double p, double q, dists::DistKind kind, const Tolerances& tol = {});

struct MaximizeResult {
    double q_star;
    double f_star;
    bool flat_warning;
};

/// Coarse 64-point scan of [0.01, 0.99] followed by golden-section refinement
/// of the bracketing interval down to |dq| <= tol_q.
MaximizeResult maximize_unimodal(const std::function<double(double)>& f, double tol_q);

/// Deletion-channel capacity upper bound (Bernoulli repetitions), kind in
/// {InvBin, BinTrunc}: (1-d) sup_q (-mu log q - log y0)/(1+mu).
BoundResult deletion_bound(double d, dists::DistKind kind, const Tolerances& tol = {});

/// Poisson-repeat capacity upper bound, kind in {PoiLog, PoiDigamma}:
/// sup_q (-mu log q - log y0)/(-mu/log d + 1/(1-d)).
BoundResult poisson_repeat_bound(double d, dists::DistKind kind, const Tolerances& tol = {});

/// Same bounds evaluated through the analytic sandwich estimates instead of
/// the exact series; method in {Lerch, Elementary}.
BoundResult deletion_bound_estimate(double d, Method method, const Tolerances& tol = {},
                                    const EstimateConstants& ec = {});
BoundResult poisson_repeat_bound_estimate(double d, Method method, const Tolerances& tol = {},
                                          const EstimateConstants& ec = {});

/// Fully explicit deletion bound: (1-d) log2(phi) bits for d >= 1/2
/// (unconditional), 1 - d log2(4/phi) for d < 1/2 (conditional on the
/// convexity conjecture).  Returns {value_bits, conditional}.
std::pair<double, bool> explicit_bound(double d);

struct Bracket {
    double lo;
    double hi;
    bool contains(double v) const { return lo <= v && v <= hi; }
    double width() const { return hi - lo; }
};

// Sandwich estimates for the Poisson-channel laws at decay parameter q:
// Lerch-based brackets for the y^y/y! law, elementary brackets for the
// digamma law, and the composite capacity upper estimates built from them.
struct PoissonEstimates {
    Bracket poilog_neg_log_y0, poilog_mu;
    Bracket digamma_neg_log_y0, digamma_mu;
    double poilog_capacity_upper_nats;
    double digamma_capacity_upper_nats;
};
PoissonEstimates poisson_estimates(double q, const EstimateConstants& ec = {});

// Elementary (beta) and special-function (alpha/Lerch) brackets for the
// inverse binomial law.  p = 0 is accepted and evaluates the d -> 1 limits.
struct InvBinEstimates {
    Bracket elem_neg_log_y0, elem_mu;
    Bracket lerch_neg_log_y0, lerch_mu;
    double elem_capacity_upper_nats;
    double lerch_capacity_upper_nats;
};
InvBinEstimates invbin_estimates(double p, double q, const EstimateConstants& ec = {});

struct SlopeResult {
    double slope_bits;
    double q_star;
};

/// d -> 1 limit slopes, evaluated directly on the limiting objectives rather
/// than at d near the boundary.  Poisson kinds: PoiLog | PoiDigamma.  The
/// deletion kinds map onto their Poisson limits (BinTrunc -> PoiDigamma,
/// InvBin -> PoiLog).
SlopeResult poisson_limit_slope(dists::DistKind kind, const Tolerances& tol = {});
SlopeResult poisson_limit_slope_estimate(Method method, const Tolerances& tol = {},
                                         const EstimateConstants& ec = {});
SlopeResult deletion_limit_slope(dists::DistKind kind, const Tolerances& tol = {});
SlopeResult deletion_limit_slope_estimate(Method method, const Tolerances& tol = {},
                                          const EstimateConstants& ec = {});

struct SmallPClosed {
    double slope_bits;
    double q_star;
    double residual;  // |q* - (1-q*)^{beta1 - 1/2}| after the bisection
};

/// Closed-form deletion slope for p <= 1/2: beta0 h(q*)/(2 - (3 - 2 beta1) q*)
/// at the fixed point q* = (1-q*)^{beta1 - 1/2}.
SmallPClosed cber_small_p_closed(double p);

}  // namespace repeatcap::bounds
