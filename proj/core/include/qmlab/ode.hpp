#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace qmlab {

using OdeRhs =
    std::function<void(double t, const std::vector<double>& y, std::vector<double>& dydt)>;

// Stop predicate, checked after every accepted step. Returning true ends the
// integration with OdeTermination::Stopped.
using OdeStop =
    std::function<bool(double t, const std::vector<double>& y, const std::vector<double>& dydt)>;

struct OdeControls {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double initial_step = 0.0;       // 0 -> automatic
    double max_step = 0.0;           // 0 -> |span| / 4
    double min_step = 0.0;           // 0 -> automatic underflow guard
    std::size_t max_steps = 10'000'000;
    std::vector<double> sample_times; // sorted along the integration direction
    bool record_steps = false;        // also record every accepted step
    OdeStop stop;
};

enum class OdeTermination {
    SpanComplete, // reached t1
    Stopped,      // stop predicate fired
    SingularStep, // step size underflowed (location in message)
};

struct OdeSample {
    double t = 0.0;
    std::vector<double> y;
    std::vector<double> dydt;
};

struct OdeResult {
    std::vector<OdeSample> samples; // always includes the final state
    OdeTermination termination = OdeTermination::SpanComplete;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::string message; // non-empty for SingularStep
};

// Dormand-Prince 5(4) with a PI step controller. Integrates forwards or
// backwards depending on sign(t1 - t0); sample_times are hit exactly by step
// clamping. A step-size underflow (typically at a singularity of the rhs) is
// reported as OdeTermination::SingularStep with the location in `message`,
// never silently swallowed. Exceeding max_steps throws ToleranceError.
OdeResult ode_solve(const OdeRhs& rhs, std::vector<double> y0, double t0, double t1,
                    const OdeControls& controls = {});

} // namespace qmlab
