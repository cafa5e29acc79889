#include "repeatcap/specfun.hpp"

#include <cmath>
#include <stdexcept>

namespace repeatcap::specfun {

double log_gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("log_gamma: requires x > 0");
    return std::lgamma(x);
}

double digamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("digamma: requires x > 0");
    double result = 0.0;
    // Recurrence up to the asymptotic regime.
    while (x < 10.0) {
        result -= 1.0 / x;
        x += 1.0;
    }
    // psi(x) ~ log x - 1/(2x) - sum_k B_{2k}/(2k x^{2k}), terms through x^-12.
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double series =
        inv2 * (1.0 / 12.0 -
                inv2 * (1.0 / 120.0 -
                        inv2 * (1.0 / 252.0 -
                                inv2 * (1.0 / 240.0 -
                                        inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0))))));
    return result + std::log(x) - 0.5 * inv - series;
}

double exp_integral_e1_series(double x) {
    // E1(x) = -gamma - log x - sum_{k>=1} (-x)^k/(k k!)
    double sum = 0.0;
    double term = 1.0;  // will hold x^k/k!
    for (int k = 1; k < 200; ++k) {
        term *= x / k;
        const double add = ((k & 1) ? term : -term) / k;
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return -kEulerGamma - std::log(x) + sum;
}

double exp_integral_e1_contfrac(double x) {
    // E1(x) = exp(-x)/(x+1 - 1/(x+3 - 4/(x+5 - 9/(x+7 - ...)))), modified Lentz.
    const double tiny = 1e-300;
    double f = x + 1.0;
    if (f == 0.0) f = tiny;
    double C = f, D = 0.0;
    for (int n = 1; n < 400; ++n) {
        const double a = -static_cast<double>(n) * n;
        const double b = x + 2.0 * n + 1.0;
        D = b + a * D;
        if (D == 0.0) D = tiny;
        C = b + a / C;
        if (C == 0.0) C = tiny;
        D = 1.0 / D;
        const double delta = C * D;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x) / f;
}

double exp_integral_e1(double x) {
    if (!(x > 0.0)) throw std::domain_error("exp_integral_e1: requires x > 0");
    return x <= kE1SwitchPoint ? exp_integral_e1_series(x) : exp_integral_e1_contfrac(x);
}

double log_integral(double z) {
    if (!(z >= 0.0) || z >= 1.0) throw std::domain_error("log_integral: requires z in [0,1)");
    if (z == 0.0) return 0.0;
    return -exp_integral_e1(-std::log(z));
}

double eta(double z, const QuadratureConfig& cfg) {
    if (!(z >= 0.0) || z >= 1.0) throw std::domain_error("eta: requires z in [0,1)");
    if (z == 0.0) return 0.0;
    const double shave = cfg.endpoint_shave;
    auto f = [shave](double t) {
        if (t < shave) return 0.0;  // 1/log t -> 0 as t -> 0+
        return 1.0 / ((1.0 - t) * std::log(t));
    };
    return integrate_adaptive(f, 0.0, z, cfg);
}

double eta_series(double z) {
    if (!(z >= 0.0) || z >= 1.0) throw std::domain_error("eta_series: requires z in [0,1)");
    if (z == 0.0) return 0.0;
    double sum = 0.0;
    double zj = 1.0;
    for (long j = 1; j < 20000000L; ++j) {
        zj *= z;
        if (zj == 0.0) break;
        const double term = log_integral(zj);
        sum += term;
        if (std::abs(term) < 1e-16 * std::abs(sum) && j > 3) break;
    }
    return sum;
}

LerchResult lerch_phi_ex(double z, double s, double alpha, double rel_tol) {
    if (!(z > 0.0 && z < 1.0)) throw std::domain_error("lerch_phi: requires z in (0,1)");
    if (!(alpha > 0.0)) throw std::domain_error("lerch_phi: requires alpha > 0");
    const long cap = (z > 0.999) ? 2000000L : 50000000L;
    double sum = 0.0;
    double zk = 1.0;
    double tail = HUGE_VAL;
    long k = 0;
    for (; k < cap; ++k) {
        sum += zk * std::pow(k + alpha, -s);
        zk *= z;
        // Tail after index k: sum_{j>k} z^j (j+alpha)^{-s}.
        const double head = std::pow(k + 1 + alpha, -s);
        if (s >= 0.0) {
            tail = zk * head / (1.0 - z);
        } else {
            // (j+alpha)^{|s|} <= (k+1+alpha)^{|s|-1} (j+alpha) for |s| <= 1.
            tail = zk * head / (k + 1 + alpha) *
                   ((k + 1 + alpha) / (1.0 - z) + z / ((1.0 - z) * (1.0 - z)));
        }
        if (tail <= rel_tol * std::abs(sum) && k > 2) {
            return {sum + 0.5 * tail, 0.5 * tail, true};
        }
    }
    return {sum, tail, false};
}

double lerch_phi(double z, double s, double alpha) { return lerch_phi_ex(z, s, alpha).value; }

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("binary_entropy: requires p in [0,1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log(p) - (1.0 - p) * std::log1p(-p);
}

double log_binomial_real(double x, double y) {
    if (!(y >= 0.0 && y <= x)) throw std::domain_error("log_binomial_real: requires 0 <= y <= x");
    return log_gamma(1.0 + x) - log_gamma(1.0 + y) - log_gamma(1.0 + x - y);
}

}  // namespace repeatcap::specfun
