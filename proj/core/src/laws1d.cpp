#include "qmlab/laws1d.hpp"

#include "qmlab/errors.hpp"
#include "qmlab/ode.hpp"
#include "qmlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <json.hpp>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qmlab {

const char* law_tag_name(LawTag tag) {
    switch (tag) {
    case LawTag::EnergyLaw: return "energy";
    case LawTag::BohmForm: return "bohm";
    case LawTag::FloydJacobi: return "floyd";
    }
    return "?";
}

const char* termination_name(TerminationTag tag) {
    switch (tag) {
    case TerminationTag::SpanComplete: return "span-complete";
    case TerminationTag::Stalled: return "stalled";
    case TerminationTag::SingularStep: return "singular-step";
    }
    return "?";
}

double velocity_energy_law(const ReducedAction1D& action, double x) {
    const SolutionPair& p = action.pair();
    return 2.0 * (p.energy - p.potential(x)) / action.ds0_dx(x);
}

double velocity_bohm_form(const ReducedAction1D& action, double x) {
    return action.ds0_dx(x) / action.mass();
}

double dt_dx_floyd(const ReducedAction1D& action, double x, double dE) {
    if (!action.pair().at_energy)
        throw std::invalid_argument(
            "dt_dx_floyd: law needs a closed-form energy family; numeric pairs "
            "are unsupported");
    const double e = action.energy();
    if (dE <= 0.0) dE = 1e-5 * std::max(std::fabs(e), 1e-6);
    const ReducedAction1D hiA = action.at_energy(e + dE);
    const ReducedAction1D loA = action.at_energy(e - dE);
    return (hiA.ds0_dx(x) - loA.ds0_dx(x)) / (2.0 * dE);
}

double Trajectory::position_at(double t) const {
    if (samples.empty())
        throw std::logic_error("Trajectory: no samples");
    if (t <= samples.front().t) return samples.front().x;
    if (t >= samples.back().t) return samples.back().x;
    std::size_t lo = 0, hi = samples.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (samples[mid].t <= t)
            lo = mid;
        else
            hi = mid;
    }
    const auto& s0 = samples[lo];
    const auto& s1 = samples[hi];
    const double h = s1.t - s0.t;
    if (h <= 0.0) return s0.x;
    const double u = (t - s0.t) / h;
    const double d = s1.x - s0.x;
    const double m0 = s0.v * h, m1 = s1.v * h;
    const double a2 = 3.0 * d - 2.0 * m0 - m1, a3 = -2.0 * d + m0 + m1;
    return s0.x + u * (m0 + u * (a2 + u * a3));
}

namespace {

struct CharScales {
    double v_char, t_char, lambda;
};

CharScales characteristic_scales(const ReducedAction1D& action) {
    const double e = std::max(std::fabs(action.energy()), 1e-12);
    const double m = action.mass();
    const double hbar = action.hbar();
    CharScales s;
    s.v_char = std::sqrt(2.0 * e / m);
    s.t_char = std::numbers::pi * hbar / e;
    s.lambda = 2.0 * std::numbers::pi * hbar / std::sqrt(2.0 * m * e);
    return s;
}

std::vector<double> uniform_times(double t0, double t1, std::size_t n) {
    n = std::max<std::size_t>(n, 2);
    std::vector<double> ts(n);
    for (std::size_t i = 0; i < n; ++i)
        ts[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
    ts.back() = t1;
    return ts;
}

Trajectory integrate_floyd(const ReducedAction1D& action, double x0, double t0,
                           double t1, const TrajectoryControls& controls) {
    const CharScales cs = characteristic_scales(action);
    const double dx = cs.lambda / 64.0;
    const double d0 = dt_dx_floyd(action, x0, controls.floyd_dE);
    if (d0 == 0.0 || !std::isfinite(d0))
        throw ToleranceError("floyd: dt/dx degenerate at the start point");
    const double dir = d0 > 0.0 ? 1.0 : -1.0;

    QuadratureSpec qs;
    qs.abs_tol = 1e-14;
    qs.rel_tol = 1e-11;
    qs.max_panels = 64;
    auto dtdx = [&](double x) { return dt_dx_floyd(action, x, controls.floyd_dE); };

    Trajectory traj;
    traj.law = LawTag::FloydJacobi;
    traj.a = action.a();
    traj.b = action.b();
    traj.energy = action.energy();

    std::vector<double> ts{t0}, xs{x0};
    double t = t0, x = x0;
    bool complete = false;
    const std::size_t cap = std::max<std::size_t>(controls.max_steps, 16);
    for (std::size_t i = 0; i < cap && !complete; ++i) {
        const double xn = x + dir * dx;
        const double slope_end = dtdx(xn);
        if (!std::isfinite(slope_end) || slope_end * d0 <= 0.0) {
            traj.termination = TerminationTag::SingularStep;
            traj.message = "floyd: dt/dx changed sign near x = " + std::to_string(xn);
            break;
        }
        double tn = t + dir * integrate(dtdx, x, xn, qs);
        if (tn >= t1) {
            // cut the final cell linearly in t
            const double frac = (t1 - t) / (tn - t);
            x = x + dir * dx * frac;
            t = t1;
            ts.push_back(t);
            xs.push_back(x);
            complete = true;
            break;
        }
        t = tn;
        x = xn;
        ts.push_back(t);
        xs.push_back(x);
        ++traj.accepted;
    }
    if (complete)
        traj.termination = TerminationTag::SpanComplete;
    else if (traj.termination != TerminationTag::SingularStep)
        throw ToleranceError("floyd: step budget exceeded before reaching the span end");

    // resample on the uniform time grid via Hermite in t (slopes 1/dtdx)
    Trajectory helper;
    helper.samples.reserve(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i)
        helper.samples.push_back({ts[i], xs[i], 1.0 / dtdx(xs[i])});
    const double t_end = ts.back();
    for (double tt : uniform_times(t0, std::min(t_end, t1), controls.samples)) {
        const double xx = helper.position_at(tt);
        traj.samples.push_back({tt, xx, 1.0 / dtdx(xx)});
    }
    return traj;
}

} // namespace

Trajectory integrate_trajectory(const LawOfMotion& law, double x0, double t0,
                                double t1, const TrajectoryControls& controls) {
    if (!(t1 > t0))
        throw std::invalid_argument("integrate_trajectory: need t1 > t0");
    const ReducedAction1D& action = law.action;
    if (law.tag == LawTag::FloydJacobi)
        return integrate_floyd(action, x0, t0, t1, controls);

    const SolutionPair& pair = action.pair();
    const CharScales cs = characteristic_scales(action);
    const double v_stall = controls.v_stall_factor * cs.v_char;
    const double tau_stall = controls.tau_stall_factor * cs.t_char;

    Trajectory traj;
    traj.law = law.tag;
    traj.a = action.a();
    traj.b = action.b();
    traj.energy = action.energy();

    auto velocity = [&action, tag = law.tag](double x) {
        return tag == LawTag::EnergyLaw ? velocity_energy_law(action, x)
                                        : velocity_bohm_form(action, x);
    };

    const double v0 = velocity(x0);
    if (law.tag == LawTag::EnergyLaw && v0 == 0.0) {
        // exact turning-point start: the constant trajectory, an immediate stall
        traj.samples.push_back({t0, x0, 0.0});
        traj.termination = TerminationTag::Stalled;
        traj.stall_location = x0;
        traj.stall_time = t0;
        return traj;
    }

    struct StallState {
        double below_since = std::numeric_limits<double>::quiet_NaN();
        bool stalled = false;
        bool left_domain = false;
        double loc = 0.0, time = 0.0;
    };
    auto st = std::make_shared<StallState>();

    // numeric pairs live on a finite grid; stop a few cells before its edge
    double dom_lo = -std::numeric_limits<double>::infinity();
    double dom_hi = std::numeric_limits<double>::infinity();
    if (pair.grid) {
        dom_lo = pair.domain.lo + 5.0 * pair.grid->h;
        dom_hi = pair.domain.hi - 5.0 * pair.grid->h;
    }

    OdeControls oc;
    oc.abs_tol = controls.abs_tol;
    oc.rel_tol = controls.rel_tol;
    oc.max_steps = controls.max_steps;
    oc.sample_times = uniform_times(t0, t1, controls.samples);
    oc.stop = [st, v_stall, tau_stall, dom_lo, dom_hi](double t,
                                                       const std::vector<double>& y,
                                                       const std::vector<double>& dy) {
        if (y[0] < dom_lo || y[0] > dom_hi) {
            st->left_domain = true;
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

    auto rhs = [&velocity](double, const std::vector<double>& y,
                           std::vector<double>& dy) { dy[0] = velocity(y[0]); };

    OdeResult r = ode_solve(rhs, {x0}, t0, t1, oc);
    traj.accepted = r.accepted;
    traj.rejected = r.rejected;
    for (const auto& s : r.samples)
        traj.samples.push_back({s.t, s.y[0], s.dydt[0]});

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
            traj.message = "trajectory left the pair's validity domain at x = " +
                           std::to_string(st->loc);
        }
        break;
    case OdeTermination::SingularStep:
        traj.termination = TerminationTag::SingularStep;
        traj.message = r.message;
        break;
    }
    return traj;
}

TrajectoryFamily integrate_family(const SolutionPair& pair, LawTag law,
                                  const std::vector<std::pair<double, double>>& ab,
                                  double x0, double t0, double t1,
                                  const TrajectoryControls& controls) {
    TrajectoryFamily family;
    family.constants = ab;
    family.x0 = x0;
    family.energy = pair.energy;
    family.mass = pair.mass;
    family.hbar = pair.hbar;

    std::vector<std::future<Trajectory>> futures;
    futures.reserve(ab.size());
    for (const auto& [a, b] : ab) {
        futures.push_back(std::async(std::launch::async, [&, a, b] {
            LawOfMotion lom{law, ReducedAction1D(pair, a, b)};
            return integrate_trajectory(lom, x0, t0, t1, controls);
        }));
    }
    family.members.reserve(ab.size());
    for (auto& f : futures) family.members.push_back(f.get()); // input order
    return family;
}

std::vector<double> detect_nodes(const TrajectoryFamily& family, double tol) {
    if (family.members.size() < 3)
        throw std::invalid_argument("detect_nodes: need at least 3 family members");
    const double e = std::max(std::fabs(family.energy), 1e-12);
    const double lambda =
        2.0 * std::numbers::pi * family.hbar / std::sqrt(2.0 * family.mass * e);
    if (tol <= 0.0) tol = 1e-3 * lambda;

    // align: t = 0 at each member's first upward crossing of x0
    std::vector<double> shift(family.members.size());
    std::vector<double> horizon(family.members.size());
    for (std::size_t j = 0; j < family.members.size(); ++j) {
        const auto& s = family.members[j].samples;
        if (s.size() < 2) return {};
        double ts = std::numeric_limits<double>::quiet_NaN();
        if (std::fabs(s.front().x - family.x0) <= 1e-12 * (1.0 + std::fabs(family.x0)))
            ts = s.front().t;
        else
            for (std::size_t i = 0; i + 1 < s.size(); ++i)
                if (s[i].x < family.x0 && s[i + 1].x >= family.x0) {
                    const double f = (family.x0 - s[i].x) / (s[i + 1].x - s[i].x);
                    ts = s[i].t + f * (s[i + 1].t - s[i].t);
                    break;
                }
        if (std::isnan(ts)) return {}; // never reaches the reference point
        shift[j] = ts;
        horizon[j] = s.back().t - ts;
    }
    const double T = *std::min_element(horizon.begin(), horizon.end());
    if (!(T > 0.0)) return {};

    const std::size_t nt = 512;
    std::vector<double> events;
    for (std::size_t k = 0; k < nt; ++k) {
        const double u = T * static_cast<double>(k) / static_cast<double>(nt - 1);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo, mean = 0.0;
        for (std::size_t j = 0; j < family.members.size(); ++j) {
            const double xj = family.members[j].position_at(shift[j] + u);
            lo = std::min(lo, xj);
            hi = std::max(hi, xj);
            mean += xj;
        }
        if (hi - lo <= tol)
            events.push_back(mean / static_cast<double>(family.members.size()));
    }
    if (events.empty()) return {};

    std::sort(events.begin(), events.end());
    std::vector<double> nodes;
    double acc = events[0];
    std::size_t cnt = 1;
    for (std::size_t i = 1; i < events.size(); ++i) {
        if (events[i] - events[i - 1] > 5.0 * tol) {
            nodes.push_back(acc / static_cast<double>(cnt));
            acc = 0.0;
            cnt = 0;
        }
        acc += events[i];
        ++cnt;
    }
    nodes.push_back(acc / static_cast<double>(cnt));
    return nodes;
}

namespace {

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory,
                          const std::string& scenario_hash) {
    out << "# scenario " << scenario_hash << "\n";
    out << "t,x,v,law,a,b,E\n";
    for (const auto& s : trajectory.samples)
        out << fmt_g(s.t) << ',' << fmt_g(s.x) << ',' << fmt_g(s.v) << ','
            << law_tag_name(trajectory.law) << ',' << fmt_g(trajectory.a) << ','
            << fmt_g(trajectory.b) << ',' << fmt_g(trajectory.energy) << "\n";
}

std::string trajectory_sidecar_json(const Trajectory& trajectory,
                                    const std::string& scenario_hash) {
    nlohmann::json j;
    j["scenario"] = scenario_hash;
    j["law"] = law_tag_name(trajectory.law);
    j["a"] = trajectory.a;
    j["b"] = trajectory.b;
    j["energy"] = trajectory.energy;
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
