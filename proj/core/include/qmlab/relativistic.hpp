#pragma once

#include "qmlab/laws1d.hpp"
#include "qmlab/potential.hpp"
#include "qmlab/reduced_action.hpp"
#include "qmlab/residual_report.hpp"
#include "qmlab/solution_pair.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace qmlab {

// The stationary Klein-Gordon problem in the effective form
//   -(hbar^2/2m) phi'' + U_eff phi = 0,
//   U_eff(x) = (m^2 c^4 - [E - V(x)]^2) / (2 m c^2),
// which is the non-relativistic stationary problem at zero effective energy.
// E is the total energy, rest mass included.
Potential kg_effective_potential(const Potential& v, double energy, double mass,
                                 double c);

// Free pair phi1 = sin(kx), phi2 = cos(kx), hbar k = sqrt(E^2 - m^2 c^4)/c.
// Requires E^2 > m^2 c^4 (and throws on the degenerate k = 0 threshold).
SolutionPair kg_pair_free(double energy, double mass, double c, double hbar = 1.0);

// Numerov pair of the effective problem on v's (finite) domain, from x0
// upward with step h.
SolutionPair kg_pair_numeric(const Potential& v, double energy, double x0,
                             double h, double mass, double c, double hbar = 1.0);

// Relativistic setup: the effective pair, the reduced action on it (same
// (a, b, lambda) recombination freedom as the non-relativistic case), and the
// amplitude normalization k_amp > 0 (it cancels from every law and residual).
class RelSetup {
public:
    RelSetup(Potential v, SolutionPair pair, double energy, double mass,
             double c, double a, double b, double lambda = 0.0,
             double k_amp = 1.0);

    static RelSetup free_setup(double energy, double mass, double c,
                               double hbar = 1.0, double a = 1.0, double b = 0.0,
                               double lambda = 0.0, double k_amp = 1.0);

    const Potential& potential() const { return v_; }
    const ReducedAction1D& action() const { return action_; }
    double energy() const { return energy_; }
    double mass() const { return mass_; }
    double c() const { return c_; }
    double hbar() const { return action_.hbar(); }
    double k_amp() const { return k_amp_; }

    // (E - V)^2 - m^2 c^4; the classically allowed region is where this is
    // positive (threshold guard 1e-9 (mc^2)^2)
    double gap(double x) const;
    bool classically_allowed(double x) const;

private:
    Potential v_;
    double energy_, mass_, c_, k_amp_;
    ReducedAction1D action_;
};

// Residual of (S0')^2/(2m) - (hbar^2/2m) R''/R + (m^2c^4 - [E-V]^2)/(2mc^2)
// on the grid; identical to the zero-energy effective QHJE residual.
// tolerance = 0 picks 1e-8 m c^2.
ResidualReport rel_qhje_residual(const RelSetup& setup, const Grid1D& grid,
                                 double tolerance = 0.0);

// Relative variation of R^2 S0' (the relativistic continuity current);
// tolerance = 0 picks 1e-8.
ResidualReport rel_continuity_residual(const RelSetup& setup, const Grid1D& grid,
                                       double tolerance = 0.0);

// dx/dtau = [(E-V)^2 - m^2 c^4] / (m c^2 S0'); throws std::domain_error
// outside the classically allowed region.
double rel_law_proper(const RelSetup& setup, double x);

// dx/dt = [(E-V)^2 - m^2 c^4] / [(E-V) S0']
double rel_law_lab(const RelSetup& setup, double x);

// (dxhat/dx)^2 = c^2 (S0')^2 / ([E-V]^2 - m^2 c^4)
double xhat_factor_rel(const RelSetup& setup, double x);

// dtau/dt = sqrt(1 - x_dot^2 (S0')^2 / ([E-V]^2 - m^2 c^4)); along the lab
// law this collapses to m c^2 / |E - V|, always in (0, 1].
double rel_dtau_dt(const RelSetup& setup, double x, double x_dot);

// Residual of the multi-dimensional proper-time law on a separable product
// of 1-D setups: sum_i S0_i'(x_i) dx_i/dtau + sum_i [m^2c^4 - (E_i-V_i)^2]/(mc^2).
double rel_contraction_residual(const std::vector<RelSetup>& axes,
                                const std::vector<double>& x);

struct RelSample {
    double t = 0.0, x = 0.0, v = 0.0, tau = 0.0;
};

struct RelTrajectory {
    double a = 1.0, b = 0.0;
    double energy = 0.0, mass = 1.0, c = 1.0;
    std::vector<RelSample> samples;
    TerminationTag termination = TerminationTag::SpanComplete;
    std::optional<double> stall_location;
    std::optional<double> stall_time;
    std::size_t accepted = 0, rejected = 0;
    std::string message;
};

// Lab-time trajectory of the relativistic law with the proper time tau
// carried alongside (dtau/dt from the same chain). Stall scales use the
// light speed and the Compton time pi hbar/(m c^2); approaching the
// classical threshold [E-V]^2 = m^2 c^4 terminates with SingularStep.
RelTrajectory integrate_rel_lab(const RelSetup& setup, double x0, double t0,
                                double t1, const TrajectoryControls& controls = {});

// columns t,x,v,law,a,b,E,tau after a `# scenario <hash>` line; the law
// column reads "rel-lab"
void write_rel_csv(std::ostream& out, const RelTrajectory& trajectory,
                   const std::string& scenario_hash);
std::string rel_sidecar_json(const RelTrajectory& trajectory,
                             const std::string& scenario_hash);

} // namespace qmlab
