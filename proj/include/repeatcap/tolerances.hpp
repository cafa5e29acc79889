#pragma once

namespace repeatcap {

// Numeric tolerances shared by every routine in the library.  The defaults
// reproduce the six printed decimals of the reference tables with margin.
struct Tolerances {
    double tail_rel = 1e-12;  // relative tail bound for series normalization
    double quad_abs = 1e-11;  // absolute quadrature tolerance
    double q_tol = 1e-8;      // maximizer tolerance in q
    double kkt_tol = 1e-8;    // feasibility slack for the dual checks

    void validate() const;
};

// Accuracy contract for the special-function layer.
struct AccuracyContract {
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;  // absolute fallback near zeros
};

}  // namespace repeatcap
