#include "repeatcap/dists.hpp"

#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "repeatcap/integrals.hpp"
#include "repeatcap/specfun.hpp"

namespace repeatcap::dists {

using specfun::binary_entropy;
using specfun::digamma;
using specfun::eta;
using specfun::log_binomial_real;
using specfun::log_gamma;
using specfun::log_integral;

std::string to_string(DistKind kind) {
    switch (kind) {
        case DistKind::PoiLog: return "poi-log";
        case DistKind::PoiDigamma: return "poi-digamma";
        case DistKind::InvBin: return "inv-bin";
        case DistKind::BinTrunc: return "bin-trunc";
        case DistKind::NegBin: return "neg-bin";
        case DistKind::Geometric: return "geometric";
    }
    return "?";
}

double g_trunc_large_p(double p, int y, const QuadratureConfig& cfg) {
    if (y == 0) return 0.0;
    return integrals::lambda_trunc(p, y, cfg) - integrals::cal_e(1.0 / p - 1.0, y, cfg) -
           y * log_integral(1.0 - p) / p + eta(1.0 - p, cfg);
}

double g_trunc_small_p(double p, int y, const QuadratureConfig& cfg) {
    if (y == 0) return 0.0;
    const double hi = p / (1.0 - p);
    auto f = [](double t) { return 1.0 / (t * std::log1p(-t)); };
    const double corner = integrate_adaptive(f, p, hi, cfg);
    return integrals::lambda_trunc(p, y, cfg) - integrals::lambda_trunc(hi, y, cfg) +
           (y / p) * ((1.0 - p) * log_integral((1.0 - 2.0 * p) / (1.0 - p)) -
                      log_integral(1.0 - p)) +
           corner;
}

double g_trunc(double p, int y, const QuadratureConfig& cfg) {
    if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("g_trunc: requires p in (0,1]");
    if (y < 0) throw std::domain_error("g_trunc: requires y >= 0");
    // The branches agree at p = 1/2; a single code path serves the boundary.
    return p >= 0.5 ? g_trunc_large_p(p, y, cfg) : g_trunc_small_p(p, y, cfg);
}

LambdaPResult lambda_p_exact(double p, int y, const QuadratureConfig& cfg) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("lambda_p_exact: requires p in (0,1)");
    if (y < 0) throw std::domain_error("lambda_p_exact: requires y >= 0");
    const auto a = integrals::cal_e_full(1.0 / p, y, cfg);
    const auto b = integrals::cal_e_full(1.0 / p - 1.0, y, cfg);
    const double value =
        y * binary_entropy(p) / p + log_gamma(y + 1.0) - a.value + b.value;
    return {value, a.precision_warning || b.precision_warning};
}

namespace detail {

namespace {

class PoiLogFamily final : public Family {
  public:
    PoiLogFamily() : Family(DistKind::PoiLog, 0.0) {}
    double base_log_mass(int y) const override {
        if (y == 0) return 0.0;  // 0^0 = 1
        return y * std::log(static_cast<double>(y)) - log_gamma(y + 1.0) - y;
    }
};

class PoiDigammaFamily final : public Family {
  public:
    PoiDigammaFamily() : Family(DistKind::PoiDigamma, 0.0) {}
    double base_log_mass(int y) const override {
        if (y == 0) return 0.0;
        return y * digamma(y) - log_gamma(y + 1.0) - y;
    }
};

class InvBinFamily final : public Family {
  public:
    explicit InvBinFamily(double p)
        : Family(DistKind::InvBin, p), h_over_p_(binary_entropy(p) / p) {}
    double base_log_mass(int y) const override {
        if (y == 0) return 0.0;
        return log_binomial_real(y / param_, y) - y * h_over_p_;
    }

  private:
    double h_over_p_;
};

// Fixed quadrature mesh for integrals of the form
//   int_0^1 (1 - c t y - (1-c t)^y) w(t) dt
// shared across all y up to a design capacity.  Dyadic panels toward t = 0
// resolve the O(1/(c y)) boundary layer of the numerator; the right half uses
// the substitution t = 1 - exp(-v) so logarithmic endpoint weights are smooth.
class FixedMesh {
  public:
    template <typename W>
    void build(const W& w, double layer_scale) {
        nodes_.clear();
        weights_.clear();
        const int K =
            std::max(8, static_cast<int>(std::ceil(std::log2(8.0 * std::max(2.0, layer_scale)))));
        add_panel(w, 0.0, std::ldexp(1.0, -(K + 1)));
        for (int k = K; k >= 1; --k) add_panel(w, std::ldexp(1.0, -(k + 1)), std::ldexp(1.0, -k));
        static constexpr double kVGrid[] = {0.6931471805599453, 1.2, 2.0, 3.2, 5.0,
                                            8.0,                12.5, 19.0, 29.0, 45.0};
        for (int i = 0; i + 1 < 10; ++i) add_panel_v(w, kVGrid[i], kVGrid[i + 1]);
    }

    double apply(double y, double c) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            sum += weights_[i] * integrals::pow_remainder(y, c * nodes_[i]);
        return sum;
    }

  private:
    template <typename W>
    void add_panel(const W& w, double a, double b) {
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        for (int i = 0; i < 8; ++i) {
            const double dx = h * repeatcap::detail::kGK15Nodes[i];
            const double wk = h * repeatcap::detail::kGK15WeightsK[i];
            push(c - dx, wk * w(c - dx));
            if (i != 7) push(c + dx, wk * w(c + dx));
        }
    }
    template <typename W>
    void add_panel_v(const W& w, double va, double vb) {
        const double c = 0.5 * (va + vb), h = 0.5 * (vb - va);
        for (int i = 0; i < 8; ++i) {
            const double dx = h * repeatcap::detail::kGK15Nodes[i];
            const double wk = h * repeatcap::detail::kGK15WeightsK[i];
            auto at = [&](double v) {
                const double jac = std::exp(-v);
                const double t = 1.0 - jac;
                push(t, wk * jac * w(t));
            };
            at(c - dx);
            if (i != 7) at(c + dx);
        }
    }
    void push(double t, double wt) {
        nodes_.push_back(t);
        weights_.push_back(wt);
    }
    std::vector<double> nodes_, weights_;
};

class BinTruncFamily final : public Family {
  public:
    BinTruncFamily(double p, QuadratureConfig cfg)
        : Family(DistKind::BinTrunc, p), cfg_(cfg), h_over_p_(binary_entropy(p) / p) {
        if (p >= 0.5) {
            lin_ = -log_integral(1.0 - p) / p;
            offset_ = eta(1.0 - p, cfg);
            c_cal_ = 1.0 / p - 1.0;
        } else {
            const double hi = p / (1.0 - p);
            lin_ = ((1.0 - p) * log_integral((1.0 - 2.0 * p) / (1.0 - p)) -
                    log_integral(1.0 - p)) /
                   p;
            auto f = [](double t) { return 1.0 / (t * std::log1p(-t)); };
            offset_ = integrate_adaptive(f, p, hi, cfg);
            eps_hi_ = hi;
        }
        grow(1024);
    }

    double base_log_mass(int y) const override {
        return g(y) - y * h_over_p_ - log_gamma(y + 1.0);
    }

  private:
    void grow(int capacity) const {
        capacity_ = capacity;
        const double p = param_;
        mesh_lam_.build([p](double t) { return 1.0 / (t * std::log1p(-p * t)); },
                        static_cast<double>(capacity));
        if (p >= 0.5) {
            mesh_other_.build([](double t) { return 1.0 / (t * std::log1p(-t)); },
                              c_cal_ * capacity);
        } else {
            const double e = eps_hi_;
            mesh_other_.build([e](double t) { return 1.0 / (t * std::log1p(-e * t)); },
                              static_cast<double>(capacity));
        }
    }

    double g(int y) const {
        std::lock_guard<std::mutex> lock(mu_);
        if (y >= static_cast<int>(memo_.size())) {
            if (y >= capacity_) grow(std::max(2 * capacity_, y + 1));
            memo_.reserve(y + 64);
            for (int k = static_cast<int>(memo_.size()); k <= y; ++k) {
                if (k == 0) {
                    memo_.push_back(0.0);
                    continue;
                }
                const double lam_p = mesh_lam_.apply(k, 1.0);
                const double other = param_ >= 0.5 ? mesh_other_.apply(k, c_cal_)
                                                   : mesh_other_.apply(k, 1.0);
                memo_.push_back(lam_p - other + k * lin_ + offset_);
            }
        }
        return memo_[y];
    }

    QuadratureConfig cfg_;
    double h_over_p_;
    double lin_ = 0.0;     // coefficient of y in g
    double offset_ = 0.0;  // constant term of g (y > 0)
    double c_cal_ = 0.0;   // 1/p - 1 for the p >= 1/2 branch
    double eps_hi_ = 0.0;  // p/(1-p) for the p < 1/2 branch
    mutable int capacity_ = 0;
    mutable FixedMesh mesh_lam_, mesh_other_;
    mutable std::vector<double> memo_;
    mutable std::mutex mu_;
};

class NegBinFamily final : public Family {
  public:
    explicit NegBinFamily(double r) : Family(DistKind::NegBin, r) {}
    double base_log_mass(int y) const override {
        if (y == 0) return 0.0;
        return log_gamma(y + param_) - log_gamma(param_) - log_gamma(y + 1.0);
    }
};

class GeometricFamily final : public Family {
  public:
    GeometricFamily() : Family(DistKind::Geometric, 0.0) {}
    double base_log_mass(int) const override { return 0.0; }
};

}  // namespace

}  // namespace detail

FamilyPtr make_family(DistKind kind, double p, const QuadratureConfig& cfg) {
    switch (kind) {
        case DistKind::PoiLog:
            return std::make_shared<detail::PoiLogFamily>();
        case DistKind::PoiDigamma:
            return std::make_shared<detail::PoiDigammaFamily>();
        case DistKind::InvBin:
            if (!(p > 0.0 && p <= 1.0))
                throw std::domain_error("InvBin requires p in (0,1]");
            return std::make_shared<detail::InvBinFamily>(p);
        case DistKind::BinTrunc:
            if (!(p > 0.0 && p <= 1.0))
                throw std::domain_error("BinTrunc requires p in (0,1]");
            return std::make_shared<detail::BinTruncFamily>(p, cfg);
        case DistKind::NegBin:
            if (!(p > 0.0)) throw std::domain_error("NegBin requires order r > 0");
            return std::make_shared<detail::NegBinFamily>(p);
        case DistKind::Geometric:
            return std::make_shared<detail::GeometricFamily>();
    }
    throw std::invalid_argument("make_family: unknown kind");
}

double DualDistribution::y0() const { return std::exp(-neg_log_y0); }

double DualDistribution::log_pmf(int y) const {
    if (y < 0) throw std::domain_error("log_pmf: requires y >= 0");
    return -neg_log_y0 + family->base_log_mass(y) + y * std::log(q);
}

double DualDistribution::pmf(int y) const { return std::exp(log_pmf(y)); }

DualDistribution normalize(const FamilyPtr& family, double q, const Tolerances& tol) {
    tol.validate();
    if (!(q > 0.0 && q < 1.0))
        throw std::domain_error("normalize: series diverges unless q in (0,1)");
    if (q > 1.0 - 1e-6) {
        std::ostringstream msg;
        msg << "normalize: q = " << q
            << " is within 1e-6 of 1; the tail needs more than the iteration cap";
        throw std::runtime_error(msg.str());
    }
    const double lq = std::log(q);
    double s0 = 0.0, s1 = 0.0;
    double achieved = HUGE_VAL;
    const long y_cap = 4000000L;
    for (long y = 0;; ++y) {
        if (y >= y_cap) throw std::runtime_error("normalize: iteration cap exceeded");
        const double mass = std::exp(family->base_log_mass(static_cast<int>(y)) + y * lq);
        s0 += mass;
        s1 += y * mass;
        if (y < 2) continue;
        // Mass ratio is bounded by q(1 + c/y); safety factor 2 on c.
        const double r = std::min(q * (1.0 + 2.0 / y), 0.5 * (1.0 + q));
        const double tail0 = mass * r / (1.0 - r);
        const double tail1 = mass * r * (y + 1.0 / (1.0 - r)) / (1.0 - r);
        if (tail0 <= tol.tail_rel * s0 && tail1 <= tol.tail_rel * s1) {
            achieved = std::max(tail0 / s0, tail1 / s1);
            break;
        }
    }
    DualDistribution d;
    d.kind = family->kind();
    d.p = family->param();
    d.q = q;
    d.neg_log_y0 = std::log(s0);
    d.mu = s1 / s0;
    d.tail_tol = achieved;
    d.family = family;
    return d;
}

DualDistribution normalize(DistKind kind, double p, double q, const Tolerances& tol) {
    QuadratureConfig cfg;
    cfg.abs_tol = tol.quad_abs;
    return normalize(make_family(kind, p, cfg), q, tol);
}

}  // namespace repeatcap::dists
