#pragma once

#include <functional>
#include <vector>

namespace qmlab {

// Default step for the central-difference derivative of the given order,
// balancing truncation against roundoff: eps^(1/3), eps^(1/6), eps^(1/7)
// for orders 1, 2, 3, scaled by (1 + |x|).
double fd_default_step(int order, double x);

// Derivative of order 1, 2 or 3 by central differences with one Richardson
// extrapolation step (evaluations at h and h/2). Throws std::domain_error on
// a non-finite function sample.
double fd_derivative(const std::function<double(double)>& f, double x, int order,
                     double h);
double fd_derivative(const std::function<double(double)>& f, double x, int order);

// Five-point node-based derivatives of sampled values on a uniform grid
// (order 1 or 2). Central stencils inside, one-sided at the two nodes on
// each edge. Requires y.size() >= 5.
std::vector<double> derivative_nodes_5pt(const std::vector<double>& y, double h,
                                         int order);

} // namespace qmlab
