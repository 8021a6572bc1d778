#include "qmlab/hydrogen2d.hpp"

#include "qmlab/errors.hpp"
#include "qmlab/interpolation.hpp"
#include "qmlab/ode.hpp"
#include "qmlab/quadrature.hpp"
#include "qmlab/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qmlab {

Hydrogen2DLevel hydrogen_level(int n, int l) {
    if (n < 0) throw std::invalid_argument("hydrogen_level: n must be >= 0");
    if (std::abs(l) > n)
        throw std::invalid_argument("hydrogen_level: need |l| <= n");
    Hydrogen2DLevel level;
    level.n = n;
    level.l = l;
    const double half = n + 0.5;
    level.alpha = 1.0 / half;
    level.energy = -level.e_ion / (half * half);
    return level;
}

double radial_r1(const Hydrogen2DLevel& level, double rho) {
    const int la = std::abs(level.l);
    const int s = level.n - la;
    const double mono = la == 0 ? 1.0 : std::pow(rho, la);
    return mono * std::exp(-level.alpha * rho) *
           laguerre(s, 2 * la, 2.0 * level.alpha * rho);
}

double radial_r1_prime(const Hydrogen2DLevel& level, double rho) {
    const int la = std::abs(level.l);
    const int s = level.n - la;
    const double a = level.alpha;
    const double x = 2.0 * a * rho;
    const double e = std::exp(-a * rho);
    const double lg = laguerre(s, 2 * la, x);
    const double lgp = laguerre_prime(s, 2 * la, x);
    const double mono = la == 0 ? 1.0 : std::pow(rho, la);
    double out = mono * e * (2.0 * a * lgp - a * lg);
    if (la > 0) out += la * std::pow(rho, la - 1) * e * lg;
    return out;
}

double radial_ode_rhs(const Hydrogen2DLevel& level, double rho, double value,
                      double deriv) {
    const double l2 = static_cast<double>(level.l) * level.l;
    return -deriv / rho + l2 * value / (rho * rho) - 2.0 * value / rho -
           2.0 * level.energy * value;
}

namespace {

void check_rho0(const Hydrogen2DLevel& level, double rho0) {
    if (!(rho0 > 0.0))
        throw std::invalid_argument("radial pair: rho0 must be positive");
    if (std::fabs(radial_r1(level, rho0)) < 1e-12)
        throw std::invalid_argument(
            "radial pair: rho0 sits on a zero of the first solution");
}

OdeControls radial_controls() {
    OdeControls c;
    c.abs_tol = 1e-14;
    c.rel_tol = 1e-12;
    return c;
}

} // namespace

double radial_r2(const Hydrogen2DLevel& level, double rho, double rho0) {
    if (!(rho > 0.0))
        throw std::invalid_argument("radial_r2: rho must be positive");
    check_rho0(level, rho0);
    if (rho == rho0) return 0.0;
    OdeRhs rhs = [&level](double u, const std::vector<double>& y,
                          std::vector<double>& dy) {
        dy[0] = y[1];
        dy[1] = radial_ode_rhs(level, u, y[0], y[1]);
    };
    const double slope0 = 1.0 / (rho0 * radial_r1(level, rho0));
    OdeResult r = ode_solve(rhs, {0.0, slope0}, rho0, rho, radial_controls());
    if (r.termination != OdeTermination::SpanComplete)
        throw ToleranceError("radial_r2: propagation failed: " + r.message);
    return r.samples.back().y[0];
}

struct RadialPair::State {
    Hydrogen2DLevel level;
    double rho0 = 0.1;
    double rho_min = 1e-3, rho_max = 40.0;
    QuinticHermite r2;
};

RadialPair::RadialPair(Hydrogen2DLevel level, double rho0, double rho_min,
                       double rho_max) {
    check_rho0(level, rho0);
    if (!(rho_min > 0.0 && rho_max > rho_min))
        throw std::invalid_argument("radial pair: need 0 < rho_min < rho_max");
    if (!(rho0 > rho_min && rho0 < rho_max))
        throw std::invalid_argument("radial pair: rho0 outside [rho_min, rho_max]");

    const double target_h = 0.005;
    const std::size_t n =
        std::max<std::size_t>(9, static_cast<std::size_t>(
                                     std::ceil((rho_max - rho_min) / target_h)) +
                                     1);
    std::vector<double> nodes(n);
    for (std::size_t i = 0; i < n; ++i)
        nodes[i] = rho_min + (rho_max - rho_min) * static_cast<double>(i) /
                                 static_cast<double>(n - 1);
    nodes.back() = rho_max;

    OdeRhs rhs = [&level](double u, const std::vector<double>& y,
                          std::vector<double>& dy) {
        dy[0] = y[1];
        dy[1] = radial_ode_rhs(level, u, y[0], y[1]);
    };
    const std::vector<double> y0{0.0, 1.0 / (rho0 * radial_r1(level, rho0))};

    std::vector<double> xs, vs, ds, ss;
    xs.reserve(n);
    vs.reserve(n);
    ds.reserve(n);
    ss.reserve(n);
    auto push = [&](double u, const std::vector<double>& y) {
        xs.push_back(u);
        vs.push_back(y[0]);
        ds.push_back(y[1]);
        ss.push_back(radial_ode_rhs(level, u, y[0], y[1]));
    };

    // nodes strictly below rho0, walked downward, then reversed
    std::vector<double> below, above;
    for (double u : nodes) (u < rho0 ? below : above).push_back(u);

    if (!below.empty()) {
        OdeControls c = radial_controls();
        c.sample_times.assign(below.rbegin(), below.rend());
        OdeResult r = ode_solve(rhs, y0, rho0, rho_min, c);
        if (r.termination != OdeTermination::SpanComplete)
            throw ToleranceError("radial pair: downward propagation failed: " +
                                 r.message);
        // walk the descending samples backwards so xs grows in ascending rho
        for (auto it = r.samples.rbegin(); it != r.samples.rend(); ++it)
            if (std::binary_search(below.begin(), below.end(), it->t) &&
                (xs.empty() || it->t != xs.back()))
                push(it->t, it->y);
    }
    {
        OdeControls c = radial_controls();
        c.sample_times = above;
        OdeResult r = ode_solve(rhs, y0, rho0, rho_max, c);
        if (r.termination != OdeTermination::SpanComplete)
            throw ToleranceError("radial pair: upward propagation failed: " +
                                 r.message);
        for (const auto& s : r.samples)
            if (std::binary_search(above.begin(), above.end(), s.t) &&
                (xs.empty() || s.t != xs.back()))
                push(s.t, s.y);
    }
    if (xs.size() != n)
        throw ToleranceError("radial pair: dense output is incomplete");

    auto st = std::make_shared<State>();
    st->level = level;
    st->rho0 = rho0;
    st->rho_min = rho_min;
    st->rho_max = rho_max;
    st->r2 = QuinticHermite(std::move(xs), std::move(vs), std::move(ds),
                            std::move(ss));
    st_ = std::move(st);
}

double RadialPair::r1(double rho) const { return radial_r1(st_->level, rho); }

double RadialPair::r1_prime(double rho) const {
    return radial_r1_prime(st_->level, rho);
}

double RadialPair::r2(double rho) const {
    if (rho < st_->rho_min || rho > st_->rho_max)
        throw std::domain_error("radial pair: rho outside the tabulated range");
    return st_->r2.value(rho);
}

double RadialPair::r2_prime(double rho) const {
    if (rho < st_->rho_min || rho > st_->rho_max)
        throw std::domain_error("radial pair: rho outside the tabulated range");
    return st_->r2.derivative(rho);
}

double RadialPair::wronskian(double rho) const {
    return r1(rho) * r2_prime(rho) - r1_prime(rho) * r2(rho);
}

const Hydrogen2DLevel& RadialPair::level() const { return st_->level; }
double RadialPair::rho0() const { return st_->rho0; }
Interval RadialPair::domain() const { return {st_->rho_min, st_->rho_max}; }

double RadialPair::shift_constant(double rho0_new) const {
    check_rho0(st_->level, rho0_new);
    if (rho0_new == st_->rho0) return 0.0;
    const Hydrogen2DLevel level = st_->level;
    QuadratureSpec spec;
    spec.abs_tol = 1e-15;
    spec.rel_tol = 1e-12;
    spec.max_panels = 2048;
    return integrate(
        [&level](double u) {
            const double f = radial_r1(level, u);
            return 1.0 / (u * f * f);
        },
        rho0_new, st_->rho0, spec);
}

RadialPair RadialPair::with_rho0(double rho0_new) const {
    return RadialPair(st_->level, rho0_new, st_->rho_min, st_->rho_max);
}

ReducedAction2D::ReducedAction2D(RadialPair pair, const Constants2D& constants,
                                 double hbar)
    : pair_(std::move(pair)), k_(constants), hbar_(hbar) {
    if (!(hbar > 0.0))
        throw std::invalid_argument("ReducedAction2D: hbar must be positive");
    for (double v : {constants.nu2, constants.nu3, constants.nu4, constants.mu1,
                     constants.mu2, constants.mu3, constants.lambda})
        if (!std::isfinite(v))
            throw std::invalid_argument("ReducedAction2D: non-finite constant");
    num_ = {1.0, constants.nu2, constants.nu3, constants.nu4};
    den_ = {constants.mu1, constants.mu2, constants.mu3, 1.0};
}

void ReducedAction2D::rows(double r, double theta, double& n, double& d,
                           double& n_r, double& d_r) const {
    const int l = pair_.level().l;
    const double t1 = std::cos(l * theta);
    const double t2 = std::sin(l * theta);
    const double f1 = pair_.r1(r), f2 = pair_.r2(r);
    const double g1 = pair_.r1_prime(r), g2 = pair_.r2_prime(r);
    const double b0 = f1 * t1, b1 = f1 * t2, b2 = f2 * t1, b3 = f2 * t2;
    const double p0 = g1 * t1, p1 = g1 * t2, p2 = g2 * t1, p3 = g2 * t2;
    n = num_[0] * b0 + num_[1] * b1 + num_[2] * b2 + num_[3] * b3;
    d = den_[0] * b0 + den_[1] * b1 + den_[2] * b2 + den_[3] * b3;
    n_r = num_[0] * p0 + num_[1] * p1 + num_[2] * p2 + num_[3] * p3;
    d_r = den_[0] * p0 + den_[1] * p1 + den_[2] * p2 + den_[3] * p3;
}

double ReducedAction2D::s0(double r, double theta) const {
    double n, d, n_r, d_r;
    rows(r, theta, n, d, n_r, d_r);
    const double principal =
        d == 0.0 ? std::copysign(std::numbers::pi / 2.0, n) : std::atan(n / d);
    return hbar_ * (principal + k_.lambda);
}

std::vector<double> ReducedAction2D::s0_along_path(
    const std::vector<Polar>& path) const {
    std::vector<double> out;
    out.reserve(path.size());
    double offset = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < path.size(); ++i) {
        double n, d, n_r, d_r;
        rows(path[i].r, path[i].theta, n, d, n_r, d_r);
        const double u = d == 0.0 ? std::copysign(std::numbers::pi / 2.0, n)
                                  : std::atan(n / d);
        if (i > 0)
            offset += std::numbers::pi *
                      std::round((prev - (u + offset)) / std::numbers::pi);
        prev = u + offset;
        out.push_back(hbar_ * (prev + k_.lambda));
    }
    return out;
}

double ReducedAction2D::ds0_dr(double r, double theta) const {
    double n, d, n_r, d_r;
    rows(r, theta, n, d, n_r, d_r);
    return hbar_ * (n_r * d - n * d_r) / (n * n + d * d);
}

double ReducedAction2D::ds0_dtheta(double r, double theta) const {
    const int l = pair_.level().l;
    if (l == 0) return 0.0; // no angular content at all
    const double t1 = std::cos(l * theta);
    const double t2 = std::sin(l * theta);
    const double f1 = pair_.r1(r), f2 = pair_.r2(r);
    const double b0 = f1 * t1, b1 = f1 * t2, b2 = f2 * t1, b3 = f2 * t2;
    // d/dtheta swaps the angular basis: T1 -> -l T2, T2 -> l T1
    const double q0 = -l * b1, q1 = l * b0, q2 = -l * b3, q3 = l * b2;
    const double n = num_[0] * b0 + num_[1] * b1 + num_[2] * b2 + num_[3] * b3;
    const double d = den_[0] * b0 + den_[1] * b1 + den_[2] * b2 + den_[3] * b3;
    const double n_t = num_[0] * q0 + num_[1] * q1 + num_[2] * q2 + num_[3] * q3;
    const double d_t = den_[0] * q0 + den_[1] * q1 + den_[2] * q2 + den_[3] * q3;
    return hbar_ * (n_t * d - n * d_t) / (n * n + d * d);
}

std::pair<double, double> ReducedAction2D::bohm_velocity(double r,
                                                         double theta) const {
    return {ds0_dr(r, theta), ds0_dtheta(r, theta) / (r * r)};
}

bool ReducedAction2D::ground_state() const {
    return pair_.level().n == 0 && pair_.level().l == 0;
}

double ReducedAction2D::ground_state_h(double r) const {
    if (!ground_state())
        throw std::logic_error("ground_state_h: level is not the ground state");
    const double f1 = pair_.r1(r), f2 = pair_.r2(r);
    const double n = num_[0] * f1 + num_[2] * f2;
    const double d = den_[0] * f1 + den_[2] * f2;
    return n * n + d * d;
}

double ReducedAction2D::motion_coefficient() const {
    return num_[2] * den_[0] - num_[0] * den_[2];
}

ReducedAction2D ReducedAction2D::with_rho0(double rho0_new) const {
    const double c = pair_.shift_constant(rho0_new);
    ReducedAction2D out(pair_.with_rho0(rho0_new), k_, hbar_);
    // R2_old = R2_new - c R1: each R1 coefficient absorbs -c times the R2 one
    out.num_ = {num_[0] - c * num_[2], num_[1] - c * num_[3], num_[2], num_[3]};
    out.den_ = {den_[0] - c * den_[2], den_[1] - c * den_[3], den_[2], den_[3]};
    if (ground_state() && out.num_[0] != 0.0) {
        // joint rescale (ratio-preserving) back to the canonical form
        const double s = out.num_[0];
        for (auto& v : out.num_) v /= s;
        for (auto& v : out.den_) v /= s;
        out.k_.nu3 = out.num_[2];
        out.k_.mu1 = out.den_[0];
        out.k_.mu3 = out.den_[2];
    }
    return out;
}

const RadialPair& ReducedAction2D::pair() const { return pair_; }
const Constants2D& ReducedAction2D::constants() const { return k_; }
double ReducedAction2D::hbar() const { return hbar_; }
const std::array<double, 4>& ReducedAction2D::numerator_row() const {
    return num_;
}
const std::array<double, 4>& ReducedAction2D::denominator_row() const {
    return den_;
}

Constants2D refit_ground_state_constants(const Constants2D& k, double c) {
    const double s = 1.0 - c * k.nu3;
    if (s == 0.0)
        throw std::invalid_argument(
            "refit_ground_state_constants: renormalization factor vanishes");
    Constants2D out = k;
    out.nu3 = k.nu3 / s;
    out.mu1 = (k.mu1 - c * k.mu3) / s;
    out.mu3 = k.mu3 / s;
    return out;
}

PolarTrajectory integrate_polar(const ReducedAction2D& action, LawTag law,
                                double r0, double theta0, double t0, double t1,
                                const TrajectoryControls& controls) {
    if (!action.ground_state())
        throw std::invalid_argument(
            "integrate_polar: trajectory laws are exercised on the ground "
            "state only");
    if (law == LawTag::FloydJacobi)
        throw std::invalid_argument(
            "integrate_polar: no Jacobi-theorem law in two dimensions");
    if (!(t1 > t0))
        throw std::invalid_argument("integrate_polar: need t1 > t0");

    const Hydrogen2DLevel& level = action.pair().level();
    const double e0 = level.energy;
    const double hbar = action.hbar();
    const double r_lo = std::max(1e-3 * level.a0, action.pair().domain().lo);
    const double r_hi = action.pair().domain().hi - 0.025;
    if (!(r0 > r_lo && r0 < r_hi))
        throw std::invalid_argument("integrate_polar: r0 outside the guarded domain");

    const bool degenerate = action.motion_coefficient() == 0.0;
    if (law == LawTag::EnergyLaw && degenerate)
        throw std::invalid_argument(
            "integrate_polar: degenerate constants (mu1 nu3 - mu3 = 0) leave "
            "the energy law undefined");

    PolarTrajectory traj;
    traj.law = law;
    traj.constants = action.constants();
    traj.energy = e0;
    traj.theta_undetermined = law == LawTag::EnergyLaw;

    auto potential = [&level](double r) { return -1.0 / (r / level.a0); };
    auto r_dot = [&](double r) {
        if (law == LawTag::BohmForm) return action.ds0_dr(r, theta0);
        return 2.0 * (e0 - potential(r)) / action.ds0_dr(r, theta0);
    };

    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto append = [&](double t, double r, double v) {
        if (law == LawTag::EnergyLaw)
            traj.samples.push_back({t, r, nan, v, nan});
        else
            traj.samples.push_back({t, r, theta0, v, 0.0});
    };

    const std::size_t nsamp = std::max<std::size_t>(controls.samples, 2);
    auto sample_times = [&](double end) {
        std::vector<double> ts(nsamp);
        for (std::size_t i = 0; i < nsamp; ++i)
            ts[i] = t0 + (end - t0) * static_cast<double>(i) /
                             static_cast<double>(nsamp - 1);
        ts.back() = end;
        return ts;
    };

    if (law == LawTag::BohmForm && degenerate) {
        for (double t : sample_times(t1)) append(t, r0, 0.0);
        traj.termination = TerminationTag::SpanComplete;
        return traj;
    }

    const double v0 = r_dot(r0);
    if (law == LawTag::EnergyLaw && v0 == 0.0) {
        append(t0, r0, 0.0);
        traj.termination = TerminationTag::Stalled;
        traj.stall_location = r0;
        traj.stall_time = t0;
        return traj;
    }

    const double v_stall =
        controls.v_stall_factor * std::sqrt(2.0 * std::fabs(e0));
    const double tau_stall =
        controls.tau_stall_factor * std::numbers::pi * hbar / std::fabs(e0);

    struct StallState {
        double below_since = std::numeric_limits<double>::quiet_NaN();
        bool stalled = false;
        double loc = 0.0, time = 0.0;
    };
    auto st = std::make_shared<StallState>();

    OdeControls oc;
    oc.abs_tol = controls.abs_tol;
    oc.rel_tol = controls.rel_tol;
    oc.max_steps = controls.max_steps;
    oc.sample_times = sample_times(t1);
    oc.stop = [st, v_stall, tau_stall, r_lo, r_hi](double t,
                                                   const std::vector<double>& y,
                                                   const std::vector<double>& dy) {
        if (y[0] < r_lo || y[0] > r_hi) {
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

    OdeResult r = ode_solve(
        [&r_dot](double, const std::vector<double>& y, std::vector<double>& dy) {
            dy[0] = r_dot(y[0]);
        },
        {r0}, t0, t1, oc);
    traj.accepted = r.accepted;
    traj.rejected = r.rejected;
    for (const auto& s : r.samples) append(s.t, s.y[0], s.dydt[0]);

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
            traj.message = "radius left the guarded domain at r = " +
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

namespace {

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_polar_csv(std::ostream& out, const PolarTrajectory& trajectory,
                     const std::string& scenario_hash) {
    out << "# scenario " << scenario_hash << "\n";
    out << "t,r,theta,r_dot,theta_dot,law\n";
    for (const auto& s : trajectory.samples)
        out << fmt_g(s.t) << ',' << fmt_g(s.r) << ',' << fmt_g(s.theta) << ','
            << fmt_g(s.r_dot) << ',' << fmt_g(s.theta_dot) << ','
            << law_tag_name(trajectory.law) << "\n";
}

std::string polar_sidecar_json(const PolarTrajectory& trajectory,
                               const std::string& scenario_hash) {
    nlohmann::json j;
    j["scenario"] = scenario_hash;
    j["law"] = law_tag_name(trajectory.law);
    j["energy"] = trajectory.energy;
    j["constants"] = {{"nu2", trajectory.constants.nu2},
                      {"nu3", trajectory.constants.nu3},
                      {"nu4", trajectory.constants.nu4},
                      {"mu1", trajectory.constants.mu1},
                      {"mu2", trajectory.constants.mu2},
                      {"mu3", trajectory.constants.mu3},
                      {"lambda", trajectory.constants.lambda}};
    j["termination"] = termination_name(trajectory.termination);
    if (trajectory.stall_location) {
        j["stall"] = {{"location", *trajectory.stall_location},
                      {"time", trajectory.stall_time ? *trajectory.stall_time : 0.0}};
    } else {
        j["stall"] = nullptr;
    }
    j["theta_undetermined"] = trajectory.theta_undetermined;
    j["accepted"] = trajectory.accepted;
    j["rejected"] = trajectory.rejected;
    j["samples"] = trajectory.samples.size();
    if (!trajectory.message.empty()) j["message"] = trajectory.message;
    return j.dump(2);
}

} // namespace qmlab
