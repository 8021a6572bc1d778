#pragma once

namespace qmlab {

// Generalized Laguerre polynomial L_s^k(x) by the ascending three-term
// recurrence (s+1) L_{s+1}^k = (2s+k+1-x) L_s^k - (s+k) L_{s-1}^k.
// s, k must be non-negative.
double laguerre(int s, int k, double x);

// d/dx L_s^k(x) = -L_{s-1}^{k+1}(x) for s >= 1, zero for s = 0.
double laguerre_prime(int s, int k, double x);

// Exponential integral Ei(x) for x > 0 (Cauchy principal value across the
// t = 0 pole). Power series (all-positive terms for x > 0) below the
// crossover, optimally truncated asymptotic expansion above it; both branches
// are accurate to full double precision at the crossover. Relative accuracy
// degrades only in the immediate neighbourhood of the simple zero of Ei near
// x = 0.372507; overflow to +inf occurs past x ~ 716.
double expint_ei(double x);

inline constexpr double kEiAsymptoticCrossover = 40.0;

} // namespace qmlab
