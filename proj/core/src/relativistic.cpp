#include "qmlab/relativistic.hpp"

#include "qmlab/errors.hpp"
#include "qmlab/ode.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace qmlab {

namespace {

void check_rel_params(double mass, double c) {
    if (!(mass > 0.0) || !(c > 0.0))
        throw std::invalid_argument("relativistic: need m > 0 and c > 0");
}

} // namespace

Potential kg_effective_potential(const Potential& v, double energy, double mass,
                                 double c) {
    check_rel_params(mass, c);
    const double mc2 = mass * c * c;
    auto val = [v, energy, mc2](double x) {
        const double w = energy - v(x);
        return (mc2 * mc2 - w * w) / (2.0 * mc2);
    };
    auto der = [v, energy, mc2](double x) {
        return (energy - v(x)) * v.derivative(x) / mc2;
    };
    return Potential::custom(val, der, v.domain());
}

SolutionPair kg_pair_free(double energy, double mass, double c, double hbar) {
    check_rel_params(mass, c);
    if (!(hbar > 0.0))
        throw std::invalid_argument("kg_pair_free: hbar must be positive");
    const double mc2 = mass * c * c;
    const double gap = energy * energy - mc2 * mc2;
    if (!(gap > 0.0))
        throw std::invalid_argument(
            "kg_pair_free: need E^2 > (m c^2)^2; the pair degenerates at the "
            "threshold");
    const double k = std::sqrt(gap) / (hbar * c);

    SolutionPair pair;
    pair.phi1 = [k](double x) { return std::sin(k * x); };
    pair.phi2 = [k](double x) { return std::cos(k * x); };
    pair.dphi1 = [k](double x) { return k * std::cos(k * x); };
    pair.dphi2 = [k](double x) { return -k * std::sin(k * x); };
    pair.energy = 0.0; // effective zero-energy problem
    pair.mass = mass;
    pair.hbar = hbar;
    pair.wronskian = k;
    pair.potential = kg_effective_potential(Potential::free_space(), energy,
                                            mass, c);
    pair.domain = pair.potential.domain();
    pair.analytic = true;
    return pair;
}

SolutionPair kg_pair_numeric(const Potential& v, double energy, double x0,
                             double h, double mass, double c, double hbar) {
    return pair_numeric(kg_effective_potential(v, energy, mass, c), 0.0, x0, h,
                        mass, hbar);
}

RelSetup::RelSetup(Potential v, SolutionPair pair, double energy, double mass,
                   double c, double a, double b, double lambda, double k_amp)
    : v_(std::move(v)), energy_(energy), mass_(mass), c_(c), k_amp_(k_amp),
      action_(std::move(pair), a, b, lambda) {
    check_rel_params(mass, c);
    if (!(k_amp > 0.0))
        throw std::invalid_argument("RelSetup: amplitude constant must be > 0");
}

RelSetup RelSetup::free_setup(double energy, double mass, double c, double hbar,
                              double a, double b, double lambda, double k_amp) {
    return RelSetup(Potential::free_space(),
                    kg_pair_free(energy, mass, c, hbar), energy, mass, c, a, b,
                    lambda, k_amp);
}

double RelSetup::gap(double x) const {
    const double w = energy_ - v_(x);
    const double mc2 = mass_ * c_ * c_;
    return w * w - mc2 * mc2;
}

bool RelSetup::classically_allowed(double x) const {
    const double mc2 = mass_ * c_ * c_;
    return gap(x) >= 1e-9 * mc2 * mc2;
}

namespace {

double checked_gap(const RelSetup& s, double x) {
    if (!s.classically_allowed(x))
        throw std::domain_error(
            "relativistic law: point outside the classically allowed region "
            "([E-V]^2 - m^2c^4 below the threshold guard)");
    return s.gap(x);
}

} // namespace

ResidualReport rel_qhje_residual(const RelSetup& setup, const Grid1D& grid,
                                 double tolerance) {
    const double mc2 = setup.mass() * setup.c() * setup.c();
    if (tolerance <= 0.0) tolerance = 1e-8 * mc2;
    return setup.action().qhje_residual(grid, tolerance);
}

ResidualReport rel_continuity_residual(const RelSetup& setup, const Grid1D& grid,
                                       double tolerance) {
    return setup.action().continuity_residual(grid, tolerance);
}

double rel_law_proper(const RelSetup& setup, double x) {
    const double mc2 = setup.mass() * setup.c() * setup.c();
    return checked_gap(setup, x) / (mc2 * setup.action().ds0_dx(x));
}

double rel_law_lab(const RelSetup& setup, double x) {
    const double w = setup.energy() - setup.potential()(x);
    return checked_gap(setup, x) / (w * setup.action().ds0_dx(x));
}

double xhat_factor_rel(const RelSetup& setup, double x) {
    const double sp = setup.action().ds0_dx(x);
    return setup.c() * setup.c() * sp * sp / checked_gap(setup, x);
}

double rel_dtau_dt(const RelSetup& setup, double x, double x_dot) {
    const double sp = setup.action().ds0_dx(x);
    const double ratio = x_dot * x_dot * sp * sp / checked_gap(setup, x);
    if (ratio > 1.0)
        throw std::domain_error("rel_dtau_dt: spacelike rate (x_dot too large "
                                "for the local gap)");
    return std::sqrt(1.0 - ratio);
}

double rel_contraction_residual(const std::vector<RelSetup>& axes,
                                const std::vector<double>& x) {
    if (axes.size() != x.size() || axes.empty())
        throw std::invalid_argument(
            "rel_contraction_residual: one coordinate per axis setup");
    double contraction = 0.0, source = 0.0;
    for (std::size_t i = 0; i < axes.size(); ++i) {
        const double mc2 = axes[i].mass() * axes[i].c() * axes[i].c();
        contraction +=
            axes[i].action().ds0_dx(x[i]) * rel_law_proper(axes[i], x[i]);
        source += -axes[i].gap(x[i]) / mc2; // m^2c^4 - (E-V)^2 over m c^2
    }
    return contraction + source;
}

RelTrajectory integrate_rel_lab(const RelSetup& setup, double x0, double t0,
                                double t1, const TrajectoryControls& controls) {
    if (!(t1 > t0))
        throw std::invalid_argument("integrate_rel_lab: need t1 > t0");
    checked_gap(setup, x0);

    RelTrajectory traj;
    traj.a = setup.action().a();
    traj.b = setup.action().b();
    traj.energy = setup.energy();
    traj.mass = setup.mass();
    traj.c = setup.c();

    const double mc2 = setup.mass() * setup.c() * setup.c();
    const double v_stall = controls.v_stall_factor * setup.c();
    const double tau_stall = controls.tau_stall_factor * std::numbers::pi *
                             setup.hbar() / mc2;

    struct StopState {
        double below_since = std::numeric_limits<double>::quiet_NaN();
        bool stalled = false;
        bool threshold = false;
        double loc = 0.0, time = 0.0;
    };
    auto st = std::make_shared<StopState>();

    double dom_lo = -std::numeric_limits<double>::infinity();
    double dom_hi = std::numeric_limits<double>::infinity();
    if (setup.action().pair().grid) {
        dom_lo = setup.action().pair().domain.lo + 5.0 * setup.action().pair().grid->h;
        dom_hi = setup.action().pair().domain.hi - 5.0 * setup.action().pair().grid->h;
    }

    OdeControls oc;
    oc.abs_tol = controls.abs_tol;
    oc.rel_tol = controls.rel_tol;
    oc.max_steps = controls.max_steps;
    const std::size_t nsamp = std::max<std::size_t>(controls.samples, 2);
    oc.sample_times.resize(nsamp);
    for (std::size_t i = 0; i < nsamp; ++i)
        oc.sample_times[i] = t0 + (t1 - t0) * static_cast<double>(i) /
                                      static_cast<double>(nsamp - 1);
    oc.sample_times.back() = t1;
    oc.stop = [st, v_stall, tau_stall, dom_lo, dom_hi, &setup](
                  double t, const std::vector<double>& y,
                  const std::vector<double>& dy) {
        if (y[0] < dom_lo || y[0] > dom_hi || !setup.classically_allowed(y[0])) {
            st->threshold = true;
            st->loc = y[0];
            st->time = t;
            return true;
        }
        if (std::fabs(dy[0]) < v_stall) {
            if (std::isnan(st->below_since)) st->below_since = t;
            if (t - st->below_since >= tau_stall) {
                st->stalled = true;
                st->loc = y[0];
                st->time = t;
                return true;
            }
        } else {
            st->below_since = std::numeric_limits<double>::quiet_NaN();
        }
        return false;
    };

    auto rhs = [&setup](double, const std::vector<double>& y,
                        std::vector<double>& dy) {
        // trial stages may probe past the threshold, where the law functions
        // refuse; a frozen field there (v = 0, clock at lab rate, the limit
        // from the allowed side) lets the stop predicate end the trajectory
        // at the next accepted step instead of an exception mid-step
        if (!setup.classically_allowed(y[0])) {
            dy[0] = 0.0;
            dy[1] = 1.0;
            return;
        }
        const double v = rel_law_lab(setup, y[0]);
        dy[0] = v;
        dy[1] = rel_dtau_dt(setup, y[0], v);
    };

    OdeResult r = ode_solve(rhs, {x0, 0.0}, t0, t1, oc);
    traj.accepted = r.accepted;
    traj.rejected = r.rejected;
    for (const auto& s : r.samples)
        traj.samples.push_back({s.t, s.y[0], s.dydt[0], s.y[1]});

    switch (r.termination) {
    case OdeTermination::SpanComplete:
        traj.termination = TerminationTag::SpanComplete;
        break;
    case OdeTermination::Stopped:
        if (st->stalled) {
            traj.termination = TerminationTag::Stalled;
            traj.stall_location = st->loc;
            traj.stall_time = st->time;
        } else {
            traj.termination = TerminationTag::SingularStep;
            traj.message =
                "trajectory reached the classical threshold or grid edge at "
                "x = " + std::to_string(st->loc);
        }
        break;
    case OdeTermination::SingularStep:
        traj.termination = TerminationTag::SingularStep;
        traj.message = r.message;
        break;
    }
    return traj;
}

namespace {

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_rel_csv(std::ostream& out, const RelTrajectory& trajectory,
                   const std::string& scenario_hash) {
    out << "# scenario " << scenario_hash << "\n";
    out << "t,x,v,law,a,b,E,tau\n";
    for (const auto& s : trajectory.samples)
        out << fmt_g(s.t) << ',' << fmt_g(s.x) << ',' << fmt_g(s.v)
            << ",rel-lab," << fmt_g(trajectory.a) << ',' << fmt_g(trajectory.b)
            << ',' << fmt_g(trajectory.energy) << ',' << fmt_g(s.tau) << "\n";
}

std::string rel_sidecar_json(const RelTrajectory& trajectory,
                             const std::string& scenario_hash) {
    nlohmann::json j;
    j["scenario"] = scenario_hash;
    j["law"] = "rel-lab";
    j["a"] = trajectory.a;
    j["b"] = trajectory.b;
    j["energy"] = trajectory.energy;
    j["mass"] = trajectory.mass;
    j["c"] = trajectory.c;
    j["termination"] = termination_name(trajectory.termination);
    if (trajectory.stall_location) {
        j["stall"] = {{"location", *trajectory.stall_location},
                      {"time", trajectory.stall_time ? *trajectory.stall_time : 0.0}};
    } else {
        j["stall"] = nullptr;
    }
    j["accepted"] = trajectory.accepted;
    j["rejected"] = trajectory.rejected;
    j["samples"] = trajectory.samples.size();
    if (!trajectory.message.empty()) j["message"] = trajectory.message;
    return j.dump(2);
}

} // namespace qmlab
