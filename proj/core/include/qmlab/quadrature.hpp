#pragma once

#include <cstddef>
#include <functional>

namespace qmlab {

enum class QuadMethod {
    AdaptiveGK,  // adaptive bisection with Gauss-Kronrod 7-15 panels
    FixedPanel,  // composite Kronrod-15 on equal panels (no adaptation)
};

struct QuadratureSpec {
    QuadMethod method = QuadMethod::AdaptiveGK;
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    std::size_t max_panels = 4096;  // subdivision budget (>= 1)
};

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t panels = 0;
};

// Definite integral of f over [lo, hi] (lo > hi integrates backwards).
// Throws ToleranceError if the requested accuracy cannot be certified within
// the panel budget, std::domain_error on a non-finite integrand sample.
QuadResult integrate_full(const std::function<double(double)>& f, double lo,
                          double hi, const QuadratureSpec& spec = {});

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureSpec& spec = {});

} // namespace qmlab
