#pragma once

#include "qmlab/hydrogen2d.hpp"
#include "qmlab/laws1d.hpp"
#include "qmlab/potential.hpp"
#include "qmlab/relativistic.hpp"
#include "qmlab/solution_pair.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace qmlab {

std::uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data); // 16 lowercase hex digits

struct SweepSpec {
    std::size_t count = 0; // 0: no sweep block in the scenario
    double a_min = 0.5, a_max = 2.0;
    double b_min = -1.0, b_max = 1.0;
};

// One scenario per file. Format: flat INI-style sections of key = value
// lines, '#' comments, UTF-8. Unknown sections or keys are rejected with the
// offending line; missing required keys are rejected by name.
struct Scenario {
    // [scenario]
    std::string module;  // laws1d | hydrogen2d | relativistic (required)
    std::string name;
    std::uint64_t seed = 0;
    std::string corrupt = "none"; // none | phi1 (negative-control knob)

    // [potential]
    std::string potential_kind = "free"; // free | linear | harmonic | file
    double slope = 1.0;
    double omega = 1.0;
    Interval domain{-10.0, 10.0};
    std::string potential_file;

    // [physics]
    double energy = 1.0;
    double mass = 1.0;
    double hbar = 1.0;
    double c = 1.0; // relativistic only
    std::string law = "energy";
    double a = 1.0, b = 0.0, lambda = 0.0;
    double x0 = 0.0, t0 = 0.0, t1 = 10.0;
    int n = 0, l = 0;       // hydrogen level
    double rho0 = 0.1;
    double r_init = 0.25, theta_init = 0.0;
    std::string units = "atomic"; // atomic | si (hydrogen output scaling)

    // [constants] (hydrogen reduced-action constants)
    Constants2D constants;

    // [integration]
    TrajectoryControls controls;
    double pair_step = 0.002;
    std::optional<double> pair_start; // numeric pair start (default domain.lo)

    // [sweep]
    SweepSpec sweep;

    // canonical "section.key=value" serialization of the parsed entries, in
    // file order; the basis of the scenario hash
    std::string canonical;

    Potential build_potential() const;
    SolutionPair build_pair() const;     // non-relativistic 1-D pair
    SolutionPair build_rel_pair() const; // effective Klein-Gordon pair
    LawTag law_tag() const;
};

Scenario parse_scenario_text(const std::string& text);
Scenario parse_scenario_file(const std::string& path);

// FNV-1a of the canonical text joined with the effective seed
std::string scenario_hash(const Scenario& scenario, std::uint64_t seed);

struct RunOptions {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed; // overrides the scenario's seed
    double tolerance_scale = 1.0;      // multiplies every verification gate
};

// Subcommand drivers. Outputs land in options.out_dir; one line per artifact
// or check goes to `log`. Returned exit status: 0 pass, 1 tolerance or
// verification failure. Config problems throw ConfigError (exit 2 at the CLI).
int run_verify(const Scenario& scenario, const RunOptions& options,
               std::ostream& log);
int run_simulate(const Scenario& scenario, const RunOptions& options,
                 std::ostream& log);
int run_hydrogen2d(const Scenario& scenario, const RunOptions& options,
                   std::ostream& log);
int run_relativistic(const Scenario& scenario, const RunOptions& options,
                     std::ostream& log);
int run_sweep(const Scenario& scenario, const RunOptions& options,
              std::ostream& log);

} // namespace qmlab
