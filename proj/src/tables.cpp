#include "repeatcap/tables.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "repeatcap/kktcheck.hpp"
#include "repeatcap/specfun.hpp"

namespace repeatcap::tables {

using bounds::Method;
using dists::DistKind;

Grid Grid::parse(const std::string& spec) {
    Grid g{};
    char extra;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf%c", &g.start, &g.stop, &g.step, &extra) != 3)
        throw std::invalid_argument("grid spec must be start:stop:step");
    if (!(g.step > 0.0) || g.stop < g.start)
        throw std::invalid_argument("grid spec requires step > 0 and stop >= start");
    return g;
}

std::vector<double> Grid::points() const {
    std::vector<double> pts;
    for (int i = 0;; ++i) {
        const double v = start + i * step;
        if (v > stop + 1e-9 * step) break;
        pts.push_back(v);
    }
    return pts;
}

std::string format_truncated(double v, int decimals) {
    double scale = 1.0;
    for (int i = 0; i < decimals; ++i) scale *= 10.0;
    const double t = std::floor(v * scale + 1e-6) / scale;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, t);
    return buf;
}

namespace {

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

}  // namespace

std::string poi_mean_csv(const Grid& q_grid, const Tolerances& tol) {
    std::ostringstream out;
    out << "q,ell1,mu1,ell2,mu2\n";
    auto poilog = dists::make_family(DistKind::PoiLog, 0.0);
    auto digamma = dists::make_family(DistKind::PoiDigamma, 0.0);
    for (double q : q_grid.points()) {
        const auto d1 = dists::normalize(poilog, q, tol);
        const auto d2 = dists::normalize(digamma, q, tol);
        out << fmt("%.6f", q) << ',' << format_truncated(d1.neg_log_y0, 6) << ','
            << format_truncated(d1.mu, 6) << ',' << format_truncated(d2.neg_log_y0, 6) << ','
            << format_truncated(d2.mu, 6) << '\n';
    }
    return out.str();
}

namespace {

std::string cap_csv_line(double d, const bounds::BoundResult* results) {
    std::ostringstream out;
    out << fmt("%.2f", d);
    for (int i = 0; i < 4; ++i)
        out << ',' << format_truncated(results[i].slope_bits, 3) << ','
            << format_truncated(results[i].q_star, 3);
    out << '\n';
    return out.str();
}

}  // namespace

std::string poi_cap_csv(const Grid& d_grid, const Tolerances& tol) {
    std::ostringstream out;
    out << "d,c1,q1,c2,q2,c3,q3,c4,q4\n";
    for (double d : d_grid.points()) {
        bounds::BoundResult r[4] = {
            bounds::poisson_repeat_bound(d, DistKind::PoiDigamma, tol),
            bounds::poisson_repeat_bound_estimate(d, Method::Elementary, tol),
            bounds::poisson_repeat_bound(d, DistKind::PoiLog, tol),
            bounds::poisson_repeat_bound_estimate(d, Method::Lerch, tol)};
        out << cap_csv_line(d, r);
    }
    return out.str();
}

std::string del_cap_csv(const Grid& d_grid, const Tolerances& tol) {
    std::ostringstream out;
    out << "d,c1,q1,c2,q2,c3,q3,c4,q4\n";
    for (double d : d_grid.points()) {
        bounds::BoundResult r[4] = {
            bounds::deletion_bound(d, DistKind::BinTrunc, tol),
            bounds::deletion_bound(d, DistKind::InvBin, tol),
            bounds::deletion_bound_estimate(d, Method::Lerch, tol),
            bounds::deletion_bound_estimate(d, Method::Elementary, tol)};
        out << cap_csv_line(d, r);
    }
    return out.str();
}

std::string slope_curve_csv(bool deletion, double d, DistKind kind, Method method,
                            const Grid& q_grid, const Tolerances& tol) {
    constexpr double kLog2 = 0.69314718055994530942;
    std::ostringstream out;
    out << "q,slope_bits\n";
    dists::FamilyPtr family;
    if (method == Method::ExactDist || method == Method::Trunc)
        family = dists::make_family(kind, deletion ? 1.0 - d : 0.0);
    const double lambda = -std::log(d);
    for (double q : q_grid.points()) {
        double slope;
        if (family) {
            const auto dist = dists::normalize(family, q, tol);
            const double numer = bounds::mean_limited_bound(dist);
            slope = deletion ? numer / (1.0 + dist.mu)
                             : numer / ((1.0 - d) * dist.mu / lambda + 1.0);
        } else if (deletion) {
            const auto e = bounds::invbin_estimates(1.0 - d, q);
            const double numer = method == Method::Lerch ? e.lerch_capacity_upper_nats
                                                         : e.elem_capacity_upper_nats;
            const double mu_lo = method == Method::Lerch ? e.lerch_mu.lo : e.elem_mu.lo;
            slope = numer / (1.0 + mu_lo);
        } else {
            const auto e = bounds::poisson_estimates(q);
            const double numer = method == Method::Lerch ? e.poilog_capacity_upper_nats
                                                         : e.digamma_capacity_upper_nats;
            const double mu_lo = method == Method::Lerch ? e.poilog_mu.lo : e.digamma_mu.lo;
            slope = numer / ((1.0 - d) * mu_lo / lambda + 1.0);
        }
        out << fmt("%.6f", q) << ',' << fmt("%.10e", slope / kLog2) << '\n';
    }
    return out.str();
}

std::string gap_curve_csv(bool deletion, double d, DistKind kind, double q, int x_max,
                          const Tolerances& tol) {
    std::ostringstream out;
    out << "x,gap,predicted\n";
    const auto ch = deletion ? kkt::ConvolutionChannel::binomial(1.0 - d)
                             : kkt::ConvolutionChannel::poisson_from_d(d);
    const auto dist = dists::normalize(kind, deletion ? 1.0 - d : 0.0, q, tol);
    for (int x = 0; x <= x_max; ++x) {
        const auto rep = kkt::kkt_gap(ch, x, dist, tol.kkt_tol * 1e-2);
        out << x << ',' << fmt("%.10e", rep.gap) << ',';
        if (rep.predicted_gap) out << fmt("%.10e", *rep.predicted_gap);
        out << '\n';
    }
    return out.str();
}

std::string pmf_curve_csv(DistKind kind, double p, double q, int y_max, const Tolerances& tol) {
    std::ostringstream out;
    out << "y,pmf\n";
    const auto dist = dists::normalize(kind, p, q, tol);
    for (int y = 0; y <= y_max; ++y) out << y << ',' << fmt("%.10e", dist.pmf(y)) << '\n';
    return out.str();
}

std::string estimates_curve_csv(DistKind kind, double p, const Grid& q_grid,
                                const Tolerances& tol) {
    std::ostringstream out;
    out << "q,ell_lo,ell,ell_hi,mu_lo,mu,mu_hi\n";
    auto family = dists::make_family(kind, p);
    for (double q : q_grid.points()) {
        const auto dist = dists::normalize(family, q, tol);
        bounds::Bracket ell, mu;
        if (kind == DistKind::PoiLog) {
            const auto e = bounds::poisson_estimates(q);
            ell = e.poilog_neg_log_y0;
            mu = e.poilog_mu;
        } else if (kind == DistKind::PoiDigamma) {
            const auto e = bounds::poisson_estimates(q);
            ell = e.digamma_neg_log_y0;
            mu = e.digamma_mu;
        } else if (kind == DistKind::InvBin) {
            const auto e = bounds::invbin_estimates(p, q);
            ell = e.lerch_neg_log_y0;
            mu = e.lerch_mu;
        } else {
            throw std::invalid_argument("estimates curve: kind must be PoiLog|PoiDigamma|InvBin");
        }
        out << fmt("%.6f", q) << ',' << fmt("%.10e", ell.lo) << ','
            << fmt("%.10e", dist.neg_log_y0) << ',' << fmt("%.10e", ell.hi) << ','
            << fmt("%.10e", mu.lo) << ',' << fmt("%.10e", dist.mu) << ',' << fmt("%.10e", mu.hi)
            << '\n';
    }
    return out.str();
}

}  // namespace repeatcap::tables
