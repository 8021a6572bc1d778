#include "qmlab/special_functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qmlab {

double laguerre(int s, int k, double x) {
    if (s < 0 || k < 0)
        throw std::invalid_argument("laguerre: orders must be non-negative (s=" +
                                    std::to_string(s) + ", k=" + std::to_string(k) + ")");
    if (!std::isfinite(x))
        throw std::domain_error("laguerre: non-finite argument");
    double prev = 1.0;                              // L_0
    if (s == 0) return prev;
    double curr = 1.0 + static_cast<double>(k) - x; // L_1
    for (int n = 1; n < s; ++n) {
        const double next =
            ((2.0 * n + k + 1.0 - x) * curr - (n + static_cast<double>(k)) * prev) /
            (n + 1.0);
        prev = curr;
        curr = next;
    }
    return curr;
}

double laguerre_prime(int s, int k, double x) {
    if (s < 0 || k < 0)
        throw std::invalid_argument("laguerre_prime: orders must be non-negative");
    if (s == 0) return 0.0;
    return -laguerre(s - 1, k + 1, x);
}

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240;

double ei_series(double x) {
    // Ei(x) = gamma + ln x + sum_{n>=1} x^n / (n n!); every term is positive
    // for x > 0, so no cancellation. Kahan compensation keeps the long sums
    // near the crossover at full precision.
    double sum = 0.0, comp = 0.0;
    double term = 1.0;
    for (int n = 1; n < 400; ++n) {
        term *= x / n;
        const double add = term / n;
        const double y = add - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (add < sum * std::numeric_limits<double>::epsilon()) break;
    }
    return kEulerGamma + std::log(x) + sum;
}

double ei_asymptotic(double x) {
    // Ei(x) ~ e^x/x sum_{j>=0} j!/x^j, truncated at the smallest term; the
    // omitted remainder is below the first neglected term, ~sqrt(2 pi x) e^-x
    // relative, which is < 1e-16 for x >= 40.
    double sum = 1.0;
    double term = 1.0;
    for (int j = 1; j < 200; ++j) {
        const double next = term * j / x;
        if (next >= term) break; // divergence onset
        term = next;
        sum += term;
        if (term < sum * std::numeric_limits<double>::epsilon()) break;
    }
    return std::exp(x) / x * sum;
}

} // namespace

double expint_ei(double x) {
    if (!std::isfinite(x))
        throw std::domain_error("expint_ei: non-finite argument");
    if (x <= 0.0)
        throw std::domain_error("expint_ei: requires x > 0, got " + std::to_string(x));
    return x < kEiAsymptoticCrossover ? ei_series(x) : ei_asymptotic(x);
}

} // namespace qmlab
