#include "repeatcap/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "repeatcap/specfun.hpp"

namespace repeatcap::bounds {

using dists::DistKind;
using specfun::binary_entropy;
using specfun::lerch_phi;

namespace {

constexpr double kLog2 = 0.69314718055994530942;
constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2Pi = 2.50662827463100050242;

void check_d(double d) {
    if (!(d > 0.0 && d < 1.0)) throw std::domain_error("deletion probability d must be in (0,1)");
}

}  // namespace

std::string to_string(Method m) {
    switch (m) {
        case Method::Trunc: return "trunc";
        case Method::ExactDist: return "exact-dist";
        case Method::Lerch: return "lerch";
        case Method::Elementary: return "elementary";
        case Method::Explicit: return "explicit";
    }
    return "?";
}

double EstimateConstants::beta0(double p) {
    if (p == 0.0) return 2.0 / std::exp(1.0);  // limit of (2/p) exp(-h(p)/p)
    return (2.0 / p) * std::exp(-binary_entropy(p) / p);
}

double EstimateConstants::beta1(double p) { return 1.0 / std::sqrt(2.0 * (1.0 - p)); }

double mean_limited_bound(const dists::DualDistribution& dist) {
    return -dist.mu * std::log(dist.q) + dist.neg_log_y0;
}

double c_ber(double p, double q, DistKind kind, const Tolerances& tol) {
    if (kind != DistKind::InvBin && kind != DistKind::BinTrunc)
        throw std::invalid_argument("c_ber: kind must be InvBin or BinTrunc");
    const auto dist = dists::normalize(kind, p, q, tol);
    return p * mean_limited_bound(dist) / (1.0 + dist.mu);
}

MaximizeResult maximize_unimodal(const std::function<double(double)>& f, double tol_q) {
    constexpr int kGridPoints = 64;
    constexpr double kLo = 0.01, kHi = 0.99;
    double best = -HUGE_VAL, worst = HUGE_VAL;
    int best_i = 0;
    double grid[kGridPoints];
    for (int i = 0; i < kGridPoints; ++i) {
        const double q = kLo + (kHi - kLo) * i / (kGridPoints - 1);
        grid[i] = f(q);
        if (grid[i] > best) {
            best = grid[i];
            best_i = i;
        }
        worst = std::min(worst, grid[i]);
    }
    const bool flat = (best - worst) < 1e-12;
    auto at = [&](int i) { return kLo + (kHi - kLo) * i / (kGridPoints - 1); };
    double a = at(std::max(best_i - 1, 0));
    double b = at(std::min(best_i + 1, kGridPoints - 1));
    // Golden-section refinement around the grid argmax.
    const double invphi = 0.6180339887498949;
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol_q) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        }
    }
    const double qs = 0.5 * (a + b);
    const double fs = f(qs);
    if (fs >= f1 && fs >= f2) return {qs, fs, flat};
    return f1 > f2 ? MaximizeResult{x1, f1, flat} : MaximizeResult{x2, f2, flat};
}

namespace {

BoundResult make_result(double value_nats, double q_star, double d, DistKind kind, Method method,
                        const Tolerances& tol, bool flat) {
    BoundResult r;
    r.value_nats = value_nats;
    r.value_bits = value_nats / kLog2;
    r.q_star = q_star;
    r.slope_bits = r.value_bits / (1.0 - d);
    r.dist = kind;
    r.method = method;
    r.d = d;
    r.q_tol = tol.q_tol;
    r.flat_warning = flat;
    return r;
}

}  // namespace

BoundResult deletion_bound(double d, DistKind kind, const Tolerances& tol) {
    check_d(d);
    if (kind != DistKind::InvBin && kind != DistKind::BinTrunc)
        throw std::invalid_argument("deletion_bound: kind must be InvBin or BinTrunc");
    const double p = 1.0 - d;
    QuadratureConfig cfg;
    cfg.abs_tol = tol.quad_abs;
    auto family = dists::make_family(kind, p, cfg);
    auto objective = [&](double q) {
        const auto dist = dists::normalize(family, q, tol);
        return p * mean_limited_bound(dist) / (1.0 + dist.mu);
    };
    const auto m = maximize_unimodal(objective, tol.q_tol);
    const Method method = kind == DistKind::BinTrunc ? Method::Trunc : Method::ExactDist;
    return make_result(m.f_star, m.q_star, d, kind, method, tol, m.flat_warning);
}

BoundResult poisson_repeat_bound(double d, DistKind kind, const Tolerances& tol) {
    check_d(d);
    if (kind != DistKind::PoiLog && kind != DistKind::PoiDigamma)
        throw std::invalid_argument("poisson_repeat_bound: kind must be PoiLog or PoiDigamma");
    const double lambda = -std::log(d);
    const double p = 1.0 - d;
    auto family = dists::make_family(kind, 0.0, {});
    auto objective = [&](double q) {
        const auto dist = dists::normalize(family, q, tol);
        return mean_limited_bound(dist) / (dist.mu / lambda + 1.0 / p);
    };
    const auto m = maximize_unimodal(objective, tol.q_tol);
    const Method method = kind == DistKind::PoiDigamma ? Method::Trunc : Method::ExactDist;
    return make_result(m.f_star, m.q_star, d, kind, method, tol, m.flat_warning);
}

namespace {

// Lerch-based S functions for the y^y/y! Poisson law (generalized Stirling
// with shift sigma).
double s0_poi(double q, double sigma) { return q * lerch_phi(q, 0.5, 1.0 + sigma) / kSqrt2Pi; }
double s1_poi(double q, double sigma) {
    return q * lerch_phi(q, -0.5, 1.0 + sigma) / kSqrt2Pi - sigma * s0_poi(q, sigma);
}

// Lerch-based S functions for the inverse binomial law; p = 0 gives the
// Poisson limit of the binomial channel.
double s0_ibin(double p, double q, double alpha) {
    return 1.0 + q * lerch_phi(q, 0.5, 1.0 + alpha / (1.0 - p)) / std::sqrt(2.0 * kPi * (1.0 - p));
}
double s1_ibin(double p, double q, double alpha) {
    const double c = alpha / (1.0 - p);
    return q * lerch_phi(q, -0.5, 1.0 + c) / std::sqrt(2.0 * kPi * (1.0 - p)) -
           alpha * q * lerch_phi(q, 0.5, 1.0 + c) /
               std::sqrt(2.0 * kPi * (1.0 - p) * (1.0 - p) * (1.0 - p));
}

struct ElemBrackets {
    Bracket neg_log_y0, mu;
};

// Negative-binomial sandwich shared by the digamma law (constants gamma) and
// the inverse binomial law (constants beta).
ElemBrackets negbin_brackets(double q, double c_lo, double c_hi) {
    const double s = std::sqrt(1.0 - q);
    const double grow = 1.0 / s - 1.0;
    ElemBrackets b;
    b.neg_log_y0 = {std::log1p(c_lo * grow), std::log1p(c_hi * grow)};
    b.mu = {c_lo * q / (2.0 * (1.0 - q) * (s + c_hi * (1.0 - s))),
            c_hi * q / (2.0 * (1.0 - q) * (s + c_lo * (1.0 - s)))};
    return b;
}

}  // namespace

PoissonEstimates poisson_estimates(double q, const EstimateConstants& ec) {
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("poisson_estimates: requires q in (0,1)");
    PoissonEstimates e;
    // S0 and S1 decrease in sigma, so sigma_lo gives the upper S values.
    const double s0_hi = s0_poi(q, ec.sigma_lo), s0_lo = s0_poi(q, ec.sigma_hi);
    const double s1_hi = s1_poi(q, ec.sigma_lo), s1_lo = s1_poi(q, ec.sigma_hi);
    e.poilog_neg_log_y0 = {std::log1p(s0_lo), std::log1p(s0_hi)};
    e.poilog_mu = {s1_lo / (1.0 + s0_hi), s1_hi / (1.0 + s0_lo)};
    e.poilog_capacity_upper_nats = -e.poilog_mu.hi * std::log(q) + e.poilog_neg_log_y0.hi;
    const auto dig = negbin_brackets(q, ec.gamma_lo, ec.gamma_hi);
    e.digamma_neg_log_y0 = dig.neg_log_y0;
    e.digamma_mu = dig.mu;
    e.digamma_capacity_upper_nats = -e.digamma_mu.hi * std::log(q) + e.digamma_neg_log_y0.hi;
    return e;
}

InvBinEstimates invbin_estimates(double p, double q, const EstimateConstants& ec) {
    if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("invbin_estimates: requires p in [0,1)");
    if (!(q > 0.0 && q < 1.0)) throw std::domain_error("invbin_estimates: requires q in (0,1)");
    InvBinEstimates e;
    const double b0 = EstimateConstants::beta0(p), b1 = EstimateConstants::beta1(p);
    const auto elem = negbin_brackets(q, std::min(b0, b1), std::max(b0, b1));
    e.elem_neg_log_y0 = elem.neg_log_y0;
    e.elem_mu = elem.mu;
    e.elem_capacity_upper_nats = -e.elem_mu.hi * std::log(q) + e.elem_neg_log_y0.hi;
    // 1/y0 and mu/y0 both decrease in alpha, so alpha_lo = 0.19 is the lower
    // constant of the binomial-coefficient sandwich and gives the lower sums.
    const double inv_y0_lo = s0_ibin(p, q, ec.alpha_lo), inv_y0_hi = s0_ibin(p, q, ec.alpha_hi);
    const double s1_lo = s1_ibin(p, q, ec.alpha_lo), s1_hi = s1_ibin(p, q, ec.alpha_hi);
    e.lerch_neg_log_y0 = {std::log(inv_y0_lo), std::log(inv_y0_hi)};
    e.lerch_mu = {s1_lo / inv_y0_hi, s1_hi / inv_y0_lo};
    e.lerch_capacity_upper_nats = -e.lerch_mu.hi * std::log(q) + e.lerch_neg_log_y0.hi;
    return e;
}

BoundResult deletion_bound_estimate(double d, Method method, const Tolerances& tol,
                                    const EstimateConstants& ec) {
    check_d(d);
    if (method != Method::Lerch && method != Method::Elementary)
        throw std::invalid_argument("deletion_bound_estimate: method must be Lerch or Elementary");
    const double p = 1.0 - d;
    auto objective = [&](double q) {
        const auto e = invbin_estimates(p, q, ec);
        const double upper =
            method == Method::Lerch ? e.lerch_capacity_upper_nats : e.elem_capacity_upper_nats;
        const double mu_lo = method == Method::Lerch ? e.lerch_mu.lo : e.elem_mu.lo;
        return p * upper / (1.0 + mu_lo);
    };
    const auto m = maximize_unimodal(objective, tol.q_tol);
    return make_result(m.f_star, m.q_star, d, DistKind::InvBin, method, tol, m.flat_warning);
}

BoundResult poisson_repeat_bound_estimate(double d, Method method, const Tolerances& tol,
                                          const EstimateConstants& ec) {
    check_d(d);
    if (method != Method::Lerch && method != Method::Elementary)
        throw std::invalid_argument(
            "poisson_repeat_bound_estimate: method must be Lerch or Elementary");
    const double lambda = -std::log(d);
    const double p = 1.0 - d;
    auto objective = [&](double q) {
        const auto e = poisson_estimates(q, ec);
        const double upper = method == Method::Lerch ? e.poilog_capacity_upper_nats
                                                     : e.digamma_capacity_upper_nats;
        const double mu_lo = method == Method::Lerch ? e.poilog_mu.lo : e.digamma_mu.lo;
        return upper / (mu_lo / lambda + 1.0 / p);
    };
    const auto m = maximize_unimodal(objective, tol.q_tol);
    const DistKind kind = method == Method::Lerch ? DistKind::PoiLog : DistKind::PoiDigamma;
    return make_result(m.f_star, m.q_star, d, kind, method, tol, m.flat_warning);
}

std::pair<double, bool> explicit_bound(double d) {
    check_d(d);
    const double log2_phi = std::log2((1.0 + std::sqrt(5.0)) / 2.0);
    if (d >= 0.5) return {(1.0 - d) * log2_phi, false};
    return {1.0 - d * (2.0 - log2_phi), true};
}

namespace {

SlopeResult limit_slope_exact(DistKind kind, const Tolerances& tol) {
    auto family = dists::make_family(kind, 0.0, {});
    auto objective = [&](double q) {
        const auto dist = dists::normalize(family, q, tol);
        return mean_limited_bound(dist) / (1.0 + dist.mu);
    };
    const auto m = maximize_unimodal(objective, tol.q_tol);
    return {m.f_star / kLog2, m.q_star};
}

}  // namespace

SlopeResult poisson_limit_slope(DistKind kind, const Tolerances& tol) {
    if (kind != DistKind::PoiLog && kind != DistKind::PoiDigamma)
        throw std::invalid_argument("poisson_limit_slope: kind must be PoiLog or PoiDigamma");
    return limit_slope_exact(kind, tol);
}

SlopeResult poisson_limit_slope_estimate(Method method, const Tolerances& tol,
                                         const EstimateConstants& ec) {
    auto objective = [&](double q) {
        const auto e = poisson_estimates(q, ec);
        const double upper = method == Method::Lerch ? e.poilog_capacity_upper_nats
                                                     : e.digamma_capacity_upper_nats;
        const double mu_lo = method == Method::Lerch ? e.poilog_mu.lo : e.digamma_mu.lo;
        return upper / (1.0 + mu_lo);
    };
    const auto m = maximize_unimodal(objective, tol.q_tol);
    return {m.f_star / kLog2, m.q_star};
}

SlopeResult deletion_limit_slope(DistKind kind, const Tolerances& tol) {
    // At d -> 1 the truncated law converges to the digamma law and the
    // inverse binomial law to the y^y/y! law; evaluate the limits directly.
    if (kind == DistKind::BinTrunc) return limit_slope_exact(DistKind::PoiDigamma, tol);
    if (kind == DistKind::InvBin) return limit_slope_exact(DistKind::PoiLog, tol);
    throw std::invalid_argument("deletion_limit_slope: kind must be InvBin or BinTrunc");
}

SlopeResult deletion_limit_slope_estimate(Method method, const Tolerances& tol,
                                          const EstimateConstants& ec) {
    auto objective = [&](double q) {
        const auto e = invbin_estimates(0.0, q, ec);
        const double upper =
            method == Method::Lerch ? e.lerch_capacity_upper_nats : e.elem_capacity_upper_nats;
        const double mu_lo = method == Method::Lerch ? e.lerch_mu.lo : e.elem_mu.lo;
        return upper / (1.0 + mu_lo);
    };
    const auto m = maximize_unimodal(objective, tol.q_tol);
    return {m.f_star / kLog2, m.q_star};
}

SmallPClosed cber_small_p_closed(double p) {
    if (!(p > 0.0 && p <= 0.5))
        throw std::domain_error("cber_small_p_closed: requires p in (0, 1/2]");
    const double b0 = EstimateConstants::beta0(p), b1 = EstimateConstants::beta1(p);
    const double e = b1 - 0.5;
    // q - (1-q)^e is increasing in q with a sign change on (0,1); bisect.
    auto g = [&](double q) { return q - std::pow(1.0 - q, e); };
    double lo = 1e-12, hi = 1.0 - 1e-12;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    const double qs = 0.5 * (lo + hi);
    const double slope_nats = b0 * specfun::binary_entropy(qs) / (2.0 - (3.0 - 2.0 * b1) * qs);
    return {slope_nats / kLog2, qs, std::abs(g(qs))};
}

}  // namespace repeatcap::bounds
