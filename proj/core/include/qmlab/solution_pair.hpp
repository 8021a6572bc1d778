#pragma once

#include "qmlab/grid.hpp"
#include "qmlab/potential.hpp"
#include "qmlab/residual_report.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace qmlab {

// Node data of a numerically integrated pair (uniform grid).
struct PairGrid {
    double x0 = 0.0;
    double h = 0.0;
    std::vector<double> x;
    std::vector<double> phi1, phi2;
    std::vector<double> dphi1, dphi2;
};

// Two real, linearly independent solutions (phi1, phi2) of the stationary
// equation -hbar^2/(2m) phi'' + V phi = E phi, with their first derivatives
// and the constant Wronskian W = phi1' phi2 - phi1 phi2'.
struct SolutionPair {
    std::function<double(double)> phi1, phi2, dphi1, dphi2;
    double energy = 0.0;
    double mass = 1.0;
    double hbar = 1.0;
    double wronskian = 0.0;
    double wronskian_drift = 0.0; // max relative drift across a numeric grid
    Potential potential = Potential::free_space();
    Interval domain{0.0, 0.0};
    bool analytic = false;
    // closed-form energy family (same potential and constants), set for
    // analytic pairs; empty for numeric ones
    std::function<SolutionPair(double)> at_energy;
    std::shared_ptr<const PairGrid> grid; // numeric pairs only

    double v(double x) const { return potential(x); }
};

// Free-particle pair phi1 = sin(kx), phi2 = cos(kx), k = sqrt(2mE)/hbar.
// Requires E > 0. W = k.
SolutionPair pair_free(double energy, double mass = 1.0, double hbar = 1.0);

// Numerov integration of the pair on a uniform grid from x0 to the upper end
// of the potential's domain, step h. Seeds phi1(x0) = 0, phi1'(x0) = 1,
// phi2(x0) = 1, phi2'(x0) = 0, so W = +1. Node derivatives come from
// five-point stencils; evaluation between nodes is cubic Hermite. Throws
// ToleranceError when the Wronskian drifts by more than 1e-4 relative
// (grid too coarse for the local wavelength).
SolutionPair pair_numeric(const Potential& potential, double energy, double x0,
                          double h, double mass = 1.0, double hbar = 1.0);

// Residual of the stationary equation for one member of the pair
// (which = 1 or 2), from five-point finite differences of the stored node
// values (numeric pairs, evaluated on the pair's own grid restricted to
// [grid.front(), grid.back()]) or of the callables (analytic pairs).
// tolerance = 0 picks 1e-8 * max(|E|, max|V| on the grid).
ResidualReport se_residual(const SolutionPair& pair, int which, const Grid1D& grid,
                           double tolerance = 0.0);

} // namespace qmlab
