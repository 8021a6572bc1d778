#pragma once

#include "qmlab/reduced_action.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace qmlab {

enum class LawTag { EnergyLaw, BohmForm, FloydJacobi };

const char* law_tag_name(LawTag tag); // "energy" | "bohm" | "floyd"

struct LawOfMotion {
    LawTag tag = LawTag::EnergyLaw;
    ReducedAction1D action;
};

// x_dot = 2 (E - V) / S0'; vanishes exactly where E = V
double velocity_energy_law(const ReducedAction1D& action, double x);
// x_dot = S0'/m; never vanishes, sign = sign(a W)
double velocity_bohm_form(const ReducedAction1D& action, double x);
// dt/dx = dP/dE at fixed (a, b), P = S0', by central difference with step dE
// (dE = 0 picks 1e-5 |E|). Requires a closed-form energy family.
double dt_dx_floyd(const ReducedAction1D& action, double x, double dE = 0.0);

enum class TerminationTag { SpanComplete, Stalled, SingularStep };

const char* termination_name(TerminationTag tag);

struct TrajectorySample {
    double t = 0.0, x = 0.0, v = 0.0;
};

struct Trajectory {
    LawTag law = LawTag::EnergyLaw;
    double a = 1.0, b = 0.0, energy = 0.0;
    std::vector<TrajectorySample> samples;
    TerminationTag termination = TerminationTag::SpanComplete;
    std::optional<double> stall_location;
    std::optional<double> stall_time;
    std::size_t accepted = 0, rejected = 0;
    std::string message;

    // position at time t by Hermite interpolation of the samples
    double position_at(double t) const;
};

struct TrajectoryControls {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    std::size_t samples = 257;       // dense output samples over the span
    double v_stall_factor = 1e-8;    // of the characteristic velocity sqrt(2|E|/m)
    double tau_stall_factor = 1e3;   // of the characteristic time pi hbar / |E|
    std::size_t max_steps = 10'000'000;
    double floyd_dE = 0.0;           // 0 -> 1e-5 |E|
};

// Integrate the law's velocity field from (t0, x0). Stall detection: when
// |x_dot| stays below v_stall for longer than tau_stall, the trajectory
// terminates with tag Stalled and records the location (an exact turning
// point start is honored as an immediate stall). Leaving a numeric pair's
// validity domain terminates with SingularStep and a message. The Floyd rule
// is realized by quadrature of dt/dx over x.
Trajectory integrate_trajectory(const LawOfMotion& law, double x0, double t0,
                                double t1, const TrajectoryControls& controls = {});

struct TrajectoryFamily {
    std::vector<Trajectory> members;
    std::vector<std::pair<double, double>> constants; // (a, b) per member
    double x0 = 0.0;
    double energy = 0.0, mass = 1.0, hbar = 1.0;
};

// One trajectory per (a, b), all from the same pair, start point and span;
// members run concurrently and are merged in input order.
TrajectoryFamily integrate_family(const SolutionPair& pair, LawTag law,
                                  const std::vector<std::pair<double, double>>& ab,
                                  double x0, double t0, double t1,
                                  const TrajectoryControls& controls = {});

// Positions where all member trajectories pass within tol of a common point
// at a common time (members aligned so t = 0 is each one's first upward
// crossing of x0). Empirical clustering; tol = 0 picks 1e-3 of the de
// Broglie length 2 pi hbar / sqrt(2 m |E|). Requires >= 3 members.
std::vector<double> detect_nodes(const TrajectoryFamily& family, double tol = 0.0);

// columns t,x,v,law,a,b,E after a `# scenario <hash>` line; LF endings
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory,
                          const std::string& scenario_hash);
// JSON sidecar with termination/stall metadata and the scenario hash
std::string trajectory_sidecar_json(const Trajectory& trajectory,
                                    const std::string& scenario_hash);

} // namespace qmlab
