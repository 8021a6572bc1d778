#pragma once

#include "qmlab/grid.hpp"
#include "qmlab/laws1d.hpp"

#include <array>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace qmlab {

// Planar hydrogen bound level in atomic units (hbar = m = e^2 = 1, so the
// Bohr radius is 1 and the ionization energy is 1/2).
struct Hydrogen2DLevel {
    int n = 0;
    int l = 0;
    double alpha = 2.0;   // 1 / (n + 1/2)
    double energy = -2.0; // -E_I / (n + 1/2)^2
    double a0 = 1.0;
    double e_ion = 0.5;
};

// Throws std::invalid_argument unless n >= 0 and |l| <= n.
Hydrogen2DLevel hydrogen_level(int n, int l);

// First radial solution rho^{|l|} e^{-alpha rho} L_{n-|l|}^{2|l|}(2 alpha rho)
// and its derivative; rho = r / a0 > 0.
double radial_r1(const Hydrogen2DLevel& level, double rho);
double radial_r1_prime(const Hydrogen2DLevel& level, double rho);

// Second derivative implied by the radial stationary equation
//   R'' = -R'/rho + l^2 R/rho^2 - 2 R/rho - 2 E R
double radial_ode_rhs(const Hydrogen2DLevel& level, double rho, double value,
                      double deriv);

// Second independent radial solution R2 = R1 * Int_{rho0}^{rho} du/(u R1^2),
// realized as an initial-value propagation of the radial equation from rho0
// (R2(rho0) = 0, R2'(rho0) = 1/(rho0 R1(rho0))), which continues R2 across
// the zeros of R1 where the quadrature form degenerates. One-shot evaluation.
double radial_r2(const Hydrogen2DLevel& level, double rho, double rho0);

// Radial pair (R1, R2) with dense quintic-Hermite output for R2 on
// [rho_min, rho_max]. R1 is closed-form. Immutable; evaluations are pure.
class RadialPair {
public:
    RadialPair(Hydrogen2DLevel level, double rho0, double rho_min = 1e-3,
               double rho_max = 40.0);

    double r1(double rho) const;
    double r1_prime(double rho) const;
    double r2(double rho) const;
    double r2_prime(double rho) const;

    // R1 R2' - R1' R2, assembled from the evaluations (identity value 1/rho)
    double wronskian(double rho) const;

    const Hydrogen2DLevel& level() const;
    double rho0() const;
    Interval domain() const;

    // c with R2(.; rho0_new) = R2(.; rho0) + c R1, i.e. the quadrature of
    // 1/(rho R1^2) from rho0_new to rho0. Throws if R1 vanishes between.
    double shift_constant(double rho0_new) const;
    RadialPair with_rho0(double rho0_new) const;

private:
    struct State;
    std::shared_ptr<const State> st_;
};

// Constants of the two-dimensional reduced action
//   S0 = hbar arctan(N / D) + hbar lambda
//   N = R1 T1 + nu2 R1 T2 + nu3 R2 T1 + nu4 R2 T2
//   D = mu1 R1 T1 + mu2 R1 T2 + mu3 R2 T1 + R2 T2
// with T1 = cos(l theta), T2 = sin(l theta).
struct Constants2D {
    double nu2 = 0.0, nu3 = 0.0, nu4 = 0.0;
    double mu1 = 1.0, mu2 = 0.0, mu3 = 0.0;
    double lambda = 0.0;
};

struct Polar {
    double r = 0.0, theta = 0.0;
};

// Two-dimensional reduced action on a radial pair. Internally the numerator
// and denominator are kept as full coefficient rows over the basis
// {R1 T1, R1 T2, R2 T1, R2 T2}, so a rho0 change is an exact linear basis
// change (with_rho0 leaves every S0 value bit-for-bit-meaningfully intact).
// All evaluations are pure and safe to call concurrently.
class ReducedAction2D {
public:
    ReducedAction2D(RadialPair pair, const Constants2D& constants,
                    double hbar = 1.0);

    double s0(double r, double theta) const; // principal branch
    // branch-tracked values along a sampled path (continuity across the
    // isolated zeros of the denominator)
    std::vector<double> s0_along_path(const std::vector<Polar>& path) const;

    double ds0_dr(double r, double theta) const;
    double ds0_dtheta(double r, double theta) const; // exactly 0 when l = 0

    // (r_dot, theta_dot) = ((1/m) dS0/dr, (1/(m r^2)) dS0/dtheta), m = 1
    std::pair<double, double> bohm_velocity(double r, double theta) const;

    bool ground_state() const; // n = 0, l = 0
    // H(r) = (R1 + nu3 R2)^2 + (mu1 R1 + mu3 R2)^2 (ground state only)
    double ground_state_h(double r) const;
    // mu1 nu3 - mu3: coefficient of the ground-state radial motion; both laws
    // are motionless when it vanishes
    double motion_coefficient() const;

    // same action re-expressed on the pair anchored at rho0_new; s0 and both
    // partials are unchanged at every (r, theta)
    ReducedAction2D with_rho0(double rho0_new) const;

    const RadialPair& pair() const;
    const Constants2D& constants() const;
    double hbar() const;
    const std::array<double, 4>& numerator_row() const;
    const std::array<double, 4>& denominator_row() const;

private:
    RadialPair pair_;
    Constants2D k_;
    std::array<double, 4> num_{1.0, 0.0, 0.0, 0.0};
    std::array<double, 4> den_{1.0, 0.0, 0.0, 1.0};
    double hbar_ = 1.0;

    void rows(double r, double theta, double& n, double& d, double& n_r,
              double& d_r) const;
};

// Ground-state constant refit under rho0 -> rho0' (R2 gains c R1): returns
// (nu3', mu1', mu3') with the numerator's R1 coefficient renormalized to 1.
Constants2D refit_ground_state_constants(const Constants2D& k, double c);

struct PolarSample {
    double t = 0.0, r = 0.0, theta = 0.0, r_dot = 0.0, theta_dot = 0.0;
};

struct PolarTrajectory {
    LawTag law = LawTag::EnergyLaw;
    Constants2D constants;
    double energy = 0.0;
    std::vector<PolarSample> samples;
    TerminationTag termination = TerminationTag::SpanComplete;
    std::optional<double> stall_location; // radius
    std::optional<double> stall_time;
    bool theta_undetermined = false; // energy law cannot fix theta(t)
    std::size_t accepted = 0, rejected = 0;
    std::string message;
};

// Ground-state trajectory under the Bohm-form law (theta frozen: the
// deadlock) or the energy law (theta reported undetermined, samples carry
// NaN). Stall handling as in laws1d, anchored on |E0|; leaving
// [1e-3 a0, pair rho_max] terminates with SingularStep. The energy law
// throws for mu1 nu3 - mu3 = 0 (degenerate constants); the Bohm form then
// yields the motionless trajectory.
PolarTrajectory integrate_polar(const ReducedAction2D& action, LawTag law,
                                double r0, double theta0, double t0, double t1,
                                const TrajectoryControls& controls = {});

// columns t,r,theta,r_dot,theta_dot,law after a `# scenario <hash>` line
void write_polar_csv(std::ostream& out, const PolarTrajectory& trajectory,
                     const std::string& scenario_hash);
std::string polar_sidecar_json(const PolarTrajectory& trajectory,
                               const std::string& scenario_hash);

} // namespace qmlab
