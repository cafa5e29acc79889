#pragma once

#include <string>
#include <vector>

#include "repeatcap/bounds.hpp"
#include "repeatcap/tolerances.hpp"

namespace repeatcap::tables {

// Inclusive numeric grid parsed from "start:stop:step".
struct Grid {
    double start, stop, step;
    static Grid parse(const std::string& spec);
    std::vector<double> points() const;
};

/// Formats v >= 0 truncated toward zero at `decimals` places.  The reference
/// tables truncate rather than round their printed digits.
std::string format_truncated(double v, int decimals);

// Reference-table CSVs.  Deterministic byte output for fixed inputs: LF line
// ends, comma separator, '.' decimal point.
std::string poi_mean_csv(const Grid& q_grid, const Tolerances& tol = {});
std::string poi_cap_csv(const Grid& d_grid, const Tolerances& tol = {});
std::string del_cap_csv(const Grid& d_grid, const Tolerances& tol = {});

// Plot-data CSVs.
std::string slope_curve_csv(bool deletion, double d, dists::DistKind kind, bounds::Method method,
                            const Grid& q_grid, const Tolerances& tol = {});
std::string gap_curve_csv(bool deletion, double d, dists::DistKind kind, double q, int x_max,
                          const Tolerances& tol = {});
std::string pmf_curve_csv(dists::DistKind kind, double p, double q, int y_max,
                          const Tolerances& tol = {});
std::string estimates_curve_csv(dists::DistKind kind, double p, const Grid& q_grid,
                                const Tolerances& tol = {});

}  // namespace repeatcap::tables
