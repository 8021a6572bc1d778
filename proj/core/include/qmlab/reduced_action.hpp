#pragma once

#include "qmlab/grid.hpp"
#include "qmlab/residual_report.hpp"
#include "qmlab/solution_pair.hpp"

#include <complex>
#include <memory>

namespace qmlab {

// Constants of the wave-form decomposition phi = R (alpha e^{iS0/hbar} +
// beta e^{-iS0/hbar}); alpha and beta must not both vanish.
struct WaveFormConstants {
    std::complex<double> alpha{1.0, 0.0};
    std::complex<double> beta{0.0, 0.0};
};

class ReducedAction1D;

// Monotone change of variable x -> xhat on a classically allowed segment,
// xhat(x) = Int_{x_ref}^{x} S0'(u) / sqrt(2m (E - V(u))) du, in which the
// reduced action obeys the classical Hamilton-Jacobi equation.
class CoordinateMap {
public:
    double xhat(double x) const;
    double x_from_xhat(double xh) const;
    double dxhat_dx(double x) const; // closed form S0'/sqrt(2m(E-V))
    double s0_of_xhat(double xh) const;

    Interval x_range() const;
    Interval xhat_range() const;

    // residual of (1/2m)(dS0/dxhat)^2 + V - E with dS0/dxhat taken by finite
    // differences through the map tables (not algebraically cancelled);
    // tolerance = 0 picks 1e-6 |E|
    ResidualReport classical_residual(const Grid1D& xhat_grid,
                                      double tolerance = 0.0) const;

private:
    friend class ReducedAction1D;
    struct State;
    std::shared_ptr<const State> st_;
};

// Reduced action S0 = hbar arctan(a phi1/phi2 + b) + hbar lambda built on a
// solution pair, with branch unwinding across the zeros of phi2 so that S0 is
// continuous and strictly monotone (sign of S0' = sign of a W). All
// derivative evaluations are closed-form in (phi1, phi2, phi1', phi2'); the
// second derivative of the pair is always eliminated through the stationary
// equation, never taken numerically. Immutable after construction; all
// evaluations are pure and safe to call concurrently.
class ReducedAction1D {
public:
    // a must be non-zero. x_ref anchors the unwinding (branch count zero
    // there); defaults to 0 for analytic pairs and the grid start for
    // numeric ones.
    ReducedAction1D(SolutionPair pair, double a, double b, double lambda = 0.0);
    ReducedAction1D(SolutionPair pair, double a, double b, double lambda,
                    double x_ref);

    double s0(double x) const;
    double ds0_dx(double x) const;
    double d2s0_dx2(double x) const;
    double d3s0_dx3(double x) const;
    double amplitude(double x) const; // R = sqrt(phi2^2 + (a phi1 + b phi2)^2)
    double quantum_potential(double x) const;

    std::complex<double> reconstruct(const WaveFormConstants& c, double x) const;

    // residual of (1/2m) S0'^2 + V - E - Q on the grid; tolerance = 0 picks
    // 1e-6 max(|E|, max|V|)
    ResidualReport qhje_residual(const Grid1D& grid, double tolerance = 0.0) const;
    // relative variation of R^2 S0' around hbar a W; tolerance = 0 picks 1e-8
    ResidualReport continuity_residual(const Grid1D& grid,
                                       double tolerance = 0.0) const;

    // requires E > V strictly on the segment (margin 1e-9 |E|); throws
    // std::domain_error when the segment touches a turning point
    CoordinateMap xhat_map(double x_ref, const Grid1D& segment) const;

    const SolutionPair& pair() const;
    double a() const;
    double b() const;
    double lambda() const;
    double x_ref() const;
    double energy() const;
    double mass() const;
    double hbar() const;

    // same constants on the pair's closed-form energy family; throws
    // std::invalid_argument for numeric pairs
    ReducedAction1D at_energy(double e) const;

private:
    struct State;
    std::shared_ptr<const State> st_;

    double phi1t(double x) const;
    double phi2t(double x) const;
    double dphi1t(double x) const;
    double dphi2t(double x) const;
    double dd(double x) const;       // D = phi1t^2 + phi2t^2
    double dd_prime(double x) const;
    double dd_second(double x) const; // via the stationary equation
    double branch_count(double x) const;
};

} // namespace qmlab
