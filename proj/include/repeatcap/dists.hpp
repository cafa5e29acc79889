#pragma once

#include <memory>
#include <string>

#include "repeatcap/quadrature.hpp"
#include "repeatcap/tolerances.hpp"

namespace repeatcap::dists {

enum class DistKind { PoiLog, PoiDigamma, InvBin, BinTrunc, NegBin, Geometric };

std::string to_string(DistKind kind);

namespace detail {

// A family fixes everything except the geometric decay parameter q: the
// unnormalized log-mass is base_log_mass(y) + y log q.  Families are cheap to
// create except BinTrunc, whose exponent table is memoized across q values.
class Family {
  public:
    virtual ~Family() = default;
    virtual double base_log_mass(int y) const = 0;
    DistKind kind() const { return kind_; }
    double param() const { return param_; }

  protected:
    Family(DistKind kind, double param) : kind_(kind), param_(param) {}
    DistKind kind_;
    double param_;  // retention p (InvBin/BinTrunc), order r (NegBin), unused otherwise
};

}  // namespace detail

using FamilyPtr = std::shared_ptr<const detail::Family>;

/// Builds a family evaluator.  `p` is the retention probability for
/// InvBin/BinTrunc, the order r for NegBin, and ignored for the rest.
FamilyPtr make_family(DistKind kind, double p, const QuadratureConfig& cfg = {});

// A normalized candidate output law over the non-negative integers.
struct DualDistribution {
    DistKind kind;
    double p = 0.0;        // channel parameter (or NegBin order), when applicable
    double q;              // geometric decay parameter in (0,1)
    double neg_log_y0;     // -log y0 (the dual constant nu0)
    double mu;             // E[Y]
    double tail_tol;       // relative tail bound achieved during normalization
    FamilyPtr family;

    double y0() const;
    double log_pmf(int y) const;
    double pmf(int y) const;
};

/// Normalizes the family at decay parameter q: computes y0 and mu by series
/// summation with a certified geometric tail bound on both series.
DualDistribution normalize(DistKind kind, double p, double q, const Tolerances& tol = {});
DualDistribution normalize(const FamilyPtr& family, double q, const Tolerances& tol = {});

/// Exponent g(y) of the truncated dual law for the binomial channel:
/// g(0) = 0; for y > 0 the branch formula at retention p (branch point 1/2).
double g_trunc(double p, int y, const QuadratureConfig& cfg = {});
/// Branch formulas individually, exposed so the p = 1/2 agreement is testable.
double g_trunc_large_p(double p, int y, const QuadratureConfig& cfg = {});
double g_trunc_small_p(double p, int y, const QuadratureConfig& cfg = {});

struct LambdaPResult {
    double value;
    bool precision_warning;
};

/// lambda_p(y) = y h(p)/p + log y! - E_{1/p}(y) + E_{1/p-1}(y); satisfies
/// E[lambda_p(Y_x)] = H(Bin_{x,p}).  Double precision degrades past y ~ 30.
LambdaPResult lambda_p_exact(double p, int y, const QuadratureConfig& cfg = {});

}  // namespace repeatcap::dists
