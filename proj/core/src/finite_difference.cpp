#include "qmlab/finite_difference.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qmlab {
namespace {

double checked(const std::function<double(double)>& f, double x) {
    const double v = f(x);
    if (!std::isfinite(v))
        throw std::domain_error("fd_derivative: non-finite sample at x = " +
                                std::to_string(x));
    return v;
}

double central(const std::function<double(double)>& f, double x, int order, double h) {
    switch (order) {
    case 1:
        return (checked(f, x + h) - checked(f, x - h)) / (2.0 * h);
    case 2:
        return (checked(f, x + h) - 2.0 * checked(f, x) + checked(f, x - h)) / (h * h);
    case 3:
        return (checked(f, x + 2.0 * h) - 2.0 * checked(f, x + h) +
                2.0 * checked(f, x - h) - checked(f, x - 2.0 * h)) /
               (2.0 * h * h * h);
    default:
        throw std::invalid_argument("fd_derivative: order must be 1, 2 or 3");
    }
}

} // namespace

double fd_default_step(int order, double x) {
    const double eps = std::numeric_limits<double>::epsilon();
    double e;
    switch (order) {
    case 1: e = std::cbrt(eps); break;
    case 2: e = std::pow(eps, 1.0 / 6.0); break;
    case 3: e = std::pow(eps, 1.0 / 7.0); break;
    default:
        throw std::invalid_argument("fd_default_step: order must be 1, 2 or 3");
    }
    return e * (1.0 + std::fabs(x));
}

double fd_derivative(const std::function<double(double)>& f, double x, int order,
                     double h) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw std::invalid_argument("fd_derivative: step must be positive and finite");
    // one Richardson step: both base stencils are O(h^2), so (4 D(h/2) - D(h))/3
    const double coarse = central(f, x, order, h);
    const double fine = central(f, x, order, 0.5 * h);
    return (4.0 * fine - coarse) / 3.0;
}

double fd_derivative(const std::function<double(double)>& f, double x, int order) {
    return fd_derivative(f, x, order, fd_default_step(order, x));
}

std::vector<double> derivative_nodes_5pt(const std::vector<double>& y, double h,
                                         int order) {
    const std::size_t n = y.size();
    if (n < 5)
        throw std::invalid_argument("derivative_nodes_5pt: need at least 5 nodes");
    if (!(h > 0.0) || !std::isfinite(h))
        throw std::invalid_argument("derivative_nodes_5pt: step must be positive");
    if (order != 1 && order != 2)
        throw std::invalid_argument("derivative_nodes_5pt: order must be 1 or 2");

    std::vector<double> d(n);
    if (order == 1) {
        const double s = 1.0 / (12.0 * h);
        d[0] = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) * s;
        d[1] = (-3.0 * y[0] - 10.0 * y[1] + 18.0 * y[2] - 6.0 * y[3] + y[4]) * s;
        for (std::size_t i = 2; i + 2 < n; ++i)
            d[i] = (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) * s;
        d[n - 2] = (3.0 * y[n - 1] + 10.0 * y[n - 2] - 18.0 * y[n - 3] +
                    6.0 * y[n - 4] - y[n - 5]) * s;
        d[n - 1] = (25.0 * y[n - 1] - 48.0 * y[n - 2] + 36.0 * y[n - 3] -
                    16.0 * y[n - 4] + 3.0 * y[n - 5]) * s;
    } else {
        const double s = 1.0 / (12.0 * h * h);
        d[0] = (35.0 * y[0] - 104.0 * y[1] + 114.0 * y[2] - 56.0 * y[3] + 11.0 * y[4]) * s;
        d[1] = (11.0 * y[0] - 20.0 * y[1] + 6.0 * y[2] + 4.0 * y[3] - y[4]) * s;
        for (std::size_t i = 2; i + 2 < n; ++i)
            d[i] = (-y[i - 2] + 16.0 * y[i - 1] - 30.0 * y[i] + 16.0 * y[i + 1] -
                    y[i + 2]) * s;
        d[n - 2] = (11.0 * y[n - 1] - 20.0 * y[n - 2] + 6.0 * y[n - 3] +
                    4.0 * y[n - 4] - y[n - 5]) * s;
        d[n - 1] = (35.0 * y[n - 1] - 104.0 * y[n - 2] + 114.0 * y[n - 3] -
                    56.0 * y[n - 4] + 11.0 * y[n - 5]) * s;
    }
    return d;
}

} // namespace qmlab
