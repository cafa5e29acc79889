#include "repeatcap/kktcheck.hpp"

#include <cmath>
#include <stdexcept>

#include "repeatcap/integrals.hpp"
#include "repeatcap/specfun.hpp"

namespace repeatcap::kkt {

using dists::DistKind;

ConvolutionChannel ConvolutionChannel::binomial(double p) {
    if (!(p > 0.0 && p <= 1.0))
        throw std::domain_error("ConvolutionChannel: requires p in (0,1]");
    return {Kind::Binomial, p};
}

ConvolutionChannel ConvolutionChannel::poisson(double lambda) {
    if (!(lambda > 0.0)) throw std::domain_error("ConvolutionChannel: requires lambda > 0");
    return {Kind::Poisson, lambda};
}

ConvolutionChannel ConvolutionChannel::poisson_from_d(double d) {
    if (!(d > 0.0 && d < 1.0)) throw std::domain_error("ConvolutionChannel: requires d in (0,1)");
    return poisson(-std::log(d));
}

double ConvolutionChannel::log_pmf_yx(int x, int y) const {
    if (kind == Kind::Binomial) {
        if (y > x) return -HUGE_VAL;
        double r = specfun::log_binomial_real(x, y);
        if (y > 0) r += y * std::log(param);
        if (x - y > 0) r += (x - y) * std::log1p(-param);
        return r;
    }
    const double mean = param * x;
    if (mean == 0.0) return y == 0 ? 0.0 : -HUGE_VAL;
    return y * std::log(mean) - mean - specfun::log_gamma(y + 1.0);
}

double kl_divergence(const ConvolutionChannel& ch, int x, const dists::DualDistribution& dist,
                     double tol) {
    if (x < 0) throw std::domain_error("kl_divergence: requires x >= 0");
    if (x == 0) return dist.neg_log_y0 - dist.family->base_log_mass(0);
    double kl = 0.0;
    double mass = 0.0;
    const double mean = ch.mean_out(x);
    const double sd = std::sqrt(mean) + 1.0;
    const int y_hard_max =
        ch.kind == ConvolutionChannel::Kind::Binomial
            ? x
            : static_cast<int>(mean + 20.0 * sd + 60.0);
    for (int y = 0; y <= y_hard_max; ++y) {
        const double lpx = ch.log_pmf_yx(x, y);
        const double px = std::exp(lpx);
        if (px == 0.0) continue;
        const double lpy = dist.log_pmf(y);
        if (!std::isfinite(lpy))
            throw std::runtime_error(
                "kl_divergence: infinite divergence (candidate law lacks support at y=" +
                std::to_string(y) + ")");
        const double lr = lpx - lpy;
        kl += px * lr;
        mass += px;
        // Both pmfs decay at least geometrically past the mean while the log
        // ratio grows linearly; cut once the dropped tail cannot move the sum.
        if (y > mean + 10.0 * sd) {
            const double tail = 1.0 - mass;
            if (tail < tol / (10.0 * (std::abs(lr) + 10.0 + y))) break;
        }
    }
    return kl;
}

KKTReport kkt_gap(const ConvolutionChannel& ch, int x, const dists::DualDistribution& dist,
                  double tol) {
    KKTReport r;
    r.x = x;
    r.kl = kl_divergence(ch, x, dist, tol);
    const double nu1 = -std::log(dist.q);
    const double nu0 = dist.neg_log_y0;
    r.linear_bound = nu1 * ch.mean_out(x) + nu0;
    r.gap = r.linear_bound - r.kl;
    if (dist.kind == DistKind::PoiDigamma && ch.kind == ConvolutionChannel::Kind::Poisson) {
        const double m = ch.mean_out(x);
        r.predicted_gap = x == 0 ? 0.0 : m * specfun::exp_integral_e1(m);
    } else if (dist.kind == DistKind::BinTrunc &&
               ch.kind == ConvolutionChannel::Kind::Binomial) {
        r.predicted_gap = integrals::r_gap(ch.param, x);
    }
    return r;
}

FeasibilityReport verify_dual_feasible(const ConvolutionChannel& ch,
                                       const dists::DualDistribution& dist, int x_max,
                                       double tol) {
    if (x_max < 1) throw std::domain_error("verify_dual_feasible: requires x_max >= 1");
    FeasibilityReport rep{true, 0, HUGE_VAL, x_max, tol, true};
    // The certificate is only meaningful for a probability distribution; the
    // linear bound and the pmf share q and y0, so a corrupted parameter shows
    // up here rather than in the per-x gaps.
    double mass = 0.0;
    for (int y = 0;; ++y) {
        const double m = dist.pmf(y);
        mass += m;
        if (y > 10 && m < 1e-15 * mass) break;
        if (y > 2000000) break;
    }
    rep.normalized = std::abs(mass - 1.0) <= std::max(1e-8, 100.0 * dist.tail_tol);
    for (int x = 0; x <= x_max; ++x) {
        const double gap = kkt_gap(ch, x, dist, tol).gap;
        if (gap < rep.worst_gap) {
            rep.worst_gap = gap;
            rep.worst_x = x;
        }
    }
    rep.pass = rep.normalized && rep.worst_gap >= -tol;
    return rep;
}

}  // namespace repeatcap::kkt
