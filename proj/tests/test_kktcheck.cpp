#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "repeatcap/kktcheck.hpp"
#include "repeatcap/specfun.hpp"

using namespace repeatcap;
using namespace repeatcap::kkt;
using dists::DistKind;

TEST_CASE("KL at x = 0 is exactly -log y0") {
    const auto bin = ConvolutionChannel::binomial(0.6);
    const auto poi = ConvolutionChannel::poisson_from_d(0.5);
    for (DistKind kind : {DistKind::InvBin, DistKind::BinTrunc}) {
        const auto d = dists::normalize(kind, 0.6, 0.5);
        CHECK(kl_divergence(bin, 0, d) == doctest::Approx(d.neg_log_y0).epsilon(1e-14));
        CHECK(kkt_gap(bin, 0, d).gap == doctest::Approx(0.0).epsilon(1e-10));
    }
    for (DistKind kind : {DistKind::PoiLog, DistKind::PoiDigamma}) {
        const auto d = dists::normalize(kind, 0.0, 0.5);
        CHECK(kl_divergence(poi, 0, d) == doctest::Approx(d.neg_log_y0).epsilon(1e-14));
        CHECK(kkt_gap(poi, 0, d).gap == doctest::Approx(0.0).epsilon(1e-10));
    }
}

TEST_CASE("digamma-law gap equals lambda x E1(lambda x)") {
    const auto ch = ConvolutionChannel::poisson_from_d(0.9);
    const auto dist = dists::normalize(DistKind::PoiDigamma, 0.0, 0.5);
    const auto rep = kkt_gap(ch, 10, dist);
    // KL = -log y0 - 10 lambda log q - 10 lambda E1(10 lambda)
    const double lam = -std::log(0.9);
    const double expected_kl = dist.neg_log_y0 - 10.0 * lam * std::log(dist.q) -
                               10.0 * lam * specfun::exp_integral_e1(10.0 * lam);
    CHECK(rep.kl == doctest::Approx(expected_kl).epsilon(1e-9));
    const auto rep5 = kkt_gap(ch, 5, dist);
    REQUIRE(rep5.predicted_gap.has_value());
    CHECK(std::abs(rep5.gap - *rep5.predicted_gap) <= 1e-7);
}

TEST_CASE("truncated-law gap equals the truncation residual R_p(x)") {
    const auto ch = ConvolutionChannel::binomial(0.3);
    const auto dist = dists::normalize(DistKind::BinTrunc, 0.3, 0.5);
    const auto rep = kkt_gap(ch, 12, dist);
    REQUIRE(rep.predicted_gap.has_value());
    CHECK(std::abs(rep.gap - *rep.predicted_gap) <= 1e-6);
}

TEST_CASE("y^y/y! law gap tends to 1/2") {
    const auto ch = ConvolutionChannel::poisson(2.0);
    const auto dist = dists::normalize(DistKind::PoiLog, 0.0, 0.5);
    const auto rep = kkt_gap(ch, 100, dist);  // lambda x = 200
    CHECK(std::abs(rep.gap - 0.5) <= 0.025);
}

TEST_CASE("feasibility over x <= 200") {
    const auto bin = ConvolutionChannel::binomial(0.5);
    const auto ib = dists::normalize(DistKind::InvBin, 0.5, 0.5);
    const auto rep = verify_dual_feasible(bin, ib, 200, 1e-8);
    CHECK(rep.pass);
    const auto poi = ConvolutionChannel::poisson_from_d(0.5);
    const auto dig = dists::normalize(DistKind::PoiDigamma, 0.0, 0.5);
    CHECK(verify_dual_feasible(poi, dig, 200, 1e-8).pass);
    // gaps strictly positive for x >= 1
    for (int x : {1, 2, 10, 60, 200}) CHECK(kkt_gap(poi, x, dig).gap > 0.0);
}

TEST_CASE("corrupted distribution fails the audit") {
    const auto bin = ConvolutionChannel::binomial(0.5);
    auto dist = dists::normalize(DistKind::InvBin, 0.5, 0.5);
    dist.q += 0.2;  // perturb after normalization
    CHECK_FALSE(verify_dual_feasible(bin, dist, 100, 1e-8).pass);
}

TEST_CASE("spot checks far past the default range") {
    // coarser tolerance at x in the thousands, per the scaled-check policy
    const auto bin = ConvolutionChannel::binomial(0.5);
    const auto ib = dists::normalize(DistKind::InvBin, 0.5, 0.5);
    CHECK(kkt_gap(bin, 1000, ib).gap >= -1e-5);
    CHECK(kkt_gap(bin, 10000, ib).gap >= -1e-5);
    const auto bt = dists::normalize(DistKind::BinTrunc, 0.5, 0.5);
    CHECK(kkt_gap(bin, 1000, bt).gap >= -1e-5);
}

TEST_CASE("digamma-function moment identity for Poisson variables") {
    // E[y psi(y)] under Poisson(lambda) equals lambda (E1(lambda) + log lambda)
    for (double lam : {0.5, 2.0, 10.0}) {
        double sum = 0.0;
        for (int y = 1; y <= 400; ++y) {
            const double lp = y * std::log(lam) - lam - specfun::log_gamma(y + 1.0);
            sum += std::exp(lp) * y * specfun::digamma(y);
        }
        const double rhs = lam * (specfun::exp_integral_e1(lam) + std::log(lam));
        CHECK(sum == doctest::Approx(rhs).epsilon(1e-8));
    }
}

TEST_CASE("Jensen direction for the inverse binomial exponent") {
    // E[f(Y_x)] <= 0 with f(y) = log C(x,y) - log C(y/p, y)
    struct Case {
        double p;
        int x;
    };
    for (const Case c : {Case{0.3, 10}, Case{0.7, 15}}) {
        double sum = 0.0;
        for (int y = 0; y <= c.x; ++y) {
            const double lpm = specfun::log_binomial_real(c.x, y) + y * std::log(c.p) +
                               (c.x - y) * std::log1p(-c.p);
            const double f = specfun::log_binomial_real(c.x, y) -
                             specfun::log_binomial_real(y / c.p, y);
            sum += std::exp(lpm) * f;
        }
        CHECK(sum <= 0.0);
    }
}

TEST_CASE("channel constructors validate their parameters") {
    CHECK_THROWS_AS(ConvolutionChannel::binomial(0.0), std::domain_error);
    CHECK_THROWS_AS(ConvolutionChannel::poisson(0.0), std::domain_error);
    CHECK_THROWS_AS(ConvolutionChannel::poisson_from_d(1.0), std::domain_error);
    const auto ch = ConvolutionChannel::binomial(0.5);
    const auto d = dists::normalize(DistKind::InvBin, 0.5, 0.5);
    CHECK_THROWS_AS(kl_divergence(ch, -1, d), std::domain_error);
    CHECK_THROWS_AS(verify_dual_feasible(ch, d, 0, 1e-8), std::domain_error);
}
