#pragma once

#include <optional>

#include "repeatcap/dists.hpp"
#include "repeatcap/tolerances.hpp"

namespace repeatcap::kkt {

// The transition rule of the mean-limited channel: input x, output a sample
// from the x-fold convolution of the repetition distribution.
struct ConvolutionChannel {
    enum class Kind { Binomial, Poisson };
    Kind kind;
    double param;  // retention p, or Poisson mean lambda per input unit

    double mean_out(double x) const { return param * x; }
    double log_pmf_yx(int x, int y) const;

    static ConvolutionChannel binomial(double p);
    static ConvolutionChannel poisson(double lambda);
    static ConvolutionChannel poisson_from_d(double d);  // lambda = -log d
};

// Per-x dual-feasibility record.
struct KKTReport {
    int x;
    double kl;                           // KL(Y_x || Y) in nats
    double linear_bound;                 // nu1 E[Y_x] + nu0
    double gap;                          // linear_bound - kl
    std::optional<double> predicted_gap; // closed form, where one exists
};

/// KL(Y_x || Y) by direct summation with a certified tail cut.
double kl_divergence(const ConvolutionChannel& ch, int x, const dists::DualDistribution& dist,
                     double tol = 1e-10);

/// Gap report with the closed-form prediction attached for the families that
/// have one (PoiDigamma: lambda x E1(lambda x); BinTrunc: R_p(x)).
KKTReport kkt_gap(const ConvolutionChannel& ch, int x, const dists::DualDistribution& dist,
                  double tol = 1e-10);

struct FeasibilityReport {
    bool pass;
    int worst_x;
    double worst_gap;
    int x_max;
    double tol;
    bool normalized;  // sum of the candidate pmf re-checked against 1
};

/// Checks that the candidate law is normalized and that gap >= -tol for all
/// x in {0, ..., x_max}; reports the argmin gap.
FeasibilityReport verify_dual_feasible(const ConvolutionChannel& ch,
                                       const dists::DualDistribution& dist, int x_max,
                                       double tol);

}  // namespace repeatcap::kkt
