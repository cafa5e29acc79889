#include "repeatcap/integrals.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "repeatcap/specfun.hpp"

namespace repeatcap::integrals {

namespace {

// (1-u)^x for u in [0,1], real x >= 0.
double pow1m(double x, double u) {
    if (u >= 1.0) return x == 0.0 ? 1.0 : 0.0;
    return std::exp(x * std::log1p(-u));
}

// x choose k over the reals via the falling-factorial recurrence; used only
// for small k inside the series branch of pow_remainder.
}  // namespace

double pow_remainder(double x, double u) {
    // 1 - x u - (1-u)^x = -sum_{j>=2} C(x,j)(-u)^j.
    if (x == 0.0 || x == 1.0 || u == 0.0) return 0.0;
    if (x * u < 0.5 && u < 0.5) {
        // Direct evaluation cancels catastrophically here; sum the series.
        double term = 0.5 * x * (x - 1.0) * u * u;  // j = 2
        double sum = term;
        for (int j = 2; j < 300; ++j) {
            term *= -(x - j) * u / (j + 1.0);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return -sum;
    }
    return 1.0 - x * u - pow1m(x, u);
}

double cal_e_integrand(double p, double x, double t, double shave) {
    if (t < shave) return 0.5 * x * (x - 1.0) * p * p;
    if (t > 1.0 - shave) return 0.0;
    return pow_remainder(x, p * t) / (t * std::log1p(-t));
}

CalEResult cal_e_full(double p, double x, const QuadratureConfig& cfg) {
    if (!(p > 0.0)) throw std::domain_error("cal_e: requires p > 0");
    if (!(x >= 0.0)) throw std::domain_error("cal_e: requires x >= 0");
    if (p <= 1.0) {
        if (x == 0.0 || x == 1.0) return {0.0, false, 0.0};
        auto f = [&](double t) { return cal_e_integrand(p, x, t, cfg.endpoint_shave); };
        return {integrate_adaptive(f, 0.0, 1.0, cfg), false, 0.0};
    }
    // Syntactic extension to p > 1: finite alternating sum over integer x.
    const double xr = std::round(x);
    if (std::abs(x - xr) > 1e-9)
        throw std::domain_error("cal_e: p > 1 requires integer x");
    const int n = static_cast<int>(xr);
    // Compensated (Neumaier) summation of C(n,k) p^k (1-p)^{n-k} log k!.
    double sum = 0.0, comp = 0.0, abs_sum = 0.0;
    const double lp = std::log(p), lq = std::log(p - 1.0);  // |1-p| = p-1
    for (int k = 2; k <= n; ++k) {
        const double mag = specfun::log_binomial_real(n, k) + k * lp + (n - k) * lq +
                           std::log(specfun::log_gamma(k + 1.0));
        double term = std::exp(mag);
        if ((n - k) & 1) term = -term;  // sign of (1-p)^{n-k}
        abs_sum += std::abs(term);
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    const double value = sum + comp;
    const double digits = (value == 0.0 && abs_sum == 0.0)
                              ? 0.0
                              : std::log10(abs_sum / std::max(std::abs(value), 1e-300));
    return {value, digits > 6.0, std::max(digits, 0.0)};
}

double cal_e(double p, double x, const QuadratureConfig& cfg) {
    return cal_e_full(p, x, cfg).value;
}

double lambda_trunc_integrand(double eps, double y, double t, double shave) {
    if (t < shave) return 0.5 * y * (y - 1.0) / eps;
    if (t > 1.0 - shave && eps >= 1.0 - shave) return 0.0;
    return pow_remainder(y, t) / (t * std::log1p(-eps * t));
}

double lambda_trunc(double eps, double y, const QuadratureConfig& cfg) {
    if (!(eps > 0.0 && eps <= 1.0)) throw std::domain_error("lambda_trunc: requires eps in (0,1]");
    if (!(y >= 0.0)) throw std::domain_error("lambda_trunc: requires y >= 0");
    if (y == 0.0 || y == 1.0) return 0.0;
    auto f = [&](double t) { return lambda_trunc_integrand(eps, y, t, cfg.endpoint_shave); };
    return integrate_adaptive(f, 0.0, 1.0, cfg);
}

namespace {

// (1 - t p/eps)^x with integer x; the base may be negative when p > eps.
double ipow(double base, int x) {
    double r = 1.0;
    double b = base;
    for (int e = x; e > 0; e >>= 1) {
        if (e & 1) r *= b;
        b *= b;
    }
    return r;
}

}  // namespace

CalEResult expected_lambda_full(double eps, double p, int x, const QuadratureConfig& cfg) {
    if (!(eps > 0.0 && eps <= 1.0))
        throw std::domain_error("expected_lambda: requires eps in (0,1]");
    if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("expected_lambda: requires p in (0,1]");
    if (x < 0) throw std::domain_error("expected_lambda: requires x >= 0");
    if (x == 0) return {0.0, false, 0.0};
    CalEResult base = cal_e_full(p / eps, x, cfg);
    double value = base.value + x * p * specfun::log_integral(1.0 - eps) / eps -
                   specfun::eta(1.0 - eps, cfg);
    if (eps < 1.0) {
        const double shave = cfg.endpoint_shave;
        auto f = [&](double t) {
            if (t > 1.0 - shave) return 0.0;
            return ipow(1.0 - t * p / eps, x) / (t * std::log1p(-t));
        };
        value += integrate_adaptive(f, eps, 1.0, cfg);
    }
    return {value, base.precision_warning, base.digits_lost};
}

double expected_lambda(double eps, double p, int x, const QuadratureConfig& cfg) {
    return expected_lambda_full(eps, p, x, cfg).value;
}

double r_gap(double p, double x, const QuadratureConfig& cfg) {
    if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("r_gap: requires p in (0,1]");
    if (!(x >= 0.0)) throw std::domain_error("r_gap: requires x >= 0");
    if (p == 1.0 || x == 0.0) return 0.0;
    const double shave = cfg.endpoint_shave;
    if (p >= 0.5) {
        const double m = pow1m(x, p);
        auto f = [&](double t) {
            if (t > 1.0 - shave) return 0.0;
            return (pow1m(x, t) - m) / (t * std::log1p(-t));
        };
        return integrate_adaptive(f, p, 1.0, cfg);
    }
    // Three-integral decomposition for p < 1/2, term-for-term.
    const double hi = p / (1.0 - p);
    auto f1 = [&](double t) {
        if (t > 1.0 - shave) return 0.0;
        return pow1m(x, t) / (t * std::log1p(-t));
    };
    auto f2 = [&](double t) {
        return std::exp(x * std::log1p(-(1.0 - p) * t)) / (t * std::log1p(-t));
    };
    auto f3 = [](double t) { return 1.0 / (t * std::log1p(-t)); };
    return integrate_adaptive(f1, p, 1.0, cfg) - integrate_adaptive(f2, hi, 1.0, cfg) -
           pow1m(x, p) * integrate_adaptive(f3, p, hi, cfg);
}

}  // namespace repeatcap::integrals
