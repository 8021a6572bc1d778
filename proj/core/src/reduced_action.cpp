#include "qmlab/reduced_action.hpp"

#include "qmlab/errors.hpp"
#include "qmlab/finite_difference.hpp"
#include "qmlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qmlab {

struct ReducedAction1D::State {
    SolutionPair pair;
    double a = 1.0, b = 0.0, lambda = 0.0;
    double x_ref = 0.0;
    // zeros of phi2 for branch unwinding: explicit list for numeric pairs,
    // the trigonometric pattern cos(kx) for analytic ones (all analytic pairs
    // produced by this library have phi2 = cos kx with k = |W|)
    std::vector<double> zeros;
    bool trig_zeros = false;
    double k = 0.0;
};

namespace {

// zeros of phi2 on a numeric pair's grid: node-level sign scan + bisection
std::vector<double> scan_phi2_zeros(const SolutionPair& pair) {
    const PairGrid& pg = *pair.grid;
    std::vector<double> zeros;
    for (std::size_t i = 0; i + 1 < pg.x.size(); ++i) {
        double fa = pg.phi2[i], fb = pg.phi2[i + 1];
        if (fa == 0.0) {
            zeros.push_back(pg.x[i]);
            continue;
        }
        if (fa * fb < 0.0) {
            double lo = pg.x[i], hi = pg.x[i + 1];
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = pair.phi2(mid);
                if (fm == 0.0) { lo = hi = mid; break; }
                if (fa * fm < 0.0)
                    hi = mid;
                else { lo = mid; fa = fm; }
            }
            zeros.push_back(0.5 * (lo + hi));
        }
    }
    if (!pg.phi2.empty() && pg.phi2.back() == 0.0) zeros.push_back(pg.x.back());
    return zeros;
}

} // namespace

ReducedAction1D::ReducedAction1D(SolutionPair pair, double a, double b, double lambda)
    : ReducedAction1D(std::move(pair), a, b, lambda,
                      std::numeric_limits<double>::quiet_NaN()) {}

ReducedAction1D::ReducedAction1D(SolutionPair pair, double a, double b,
                                 double lambda, double x_ref) {
    if (a == 0.0 || !std::isfinite(a))
        throw std::invalid_argument("ReducedAction1D: 'a' must be non-zero");
    if (!std::isfinite(b) || !std::isfinite(lambda))
        throw std::invalid_argument("ReducedAction1D: constants must be finite");
    if (!pair.phi1 || !pair.phi2 || !pair.dphi1 || !pair.dphi2)
        throw std::invalid_argument("ReducedAction1D: incomplete solution pair");
    if (pair.wronskian == 0.0)
        throw std::invalid_argument("ReducedAction1D: degenerate pair (W = 0)");

    auto st = std::make_shared<State>();
    st->a = a;
    st->b = b;
    st->lambda = lambda;
    if (std::isnan(x_ref))
        st->x_ref = pair.grid ? pair.grid->x0 : 0.0;
    else
        st->x_ref = x_ref;

    if (pair.grid) {
        st->zeros = scan_phi2_zeros(pair);
        st->trig_zeros = false;
    } else if (pair.analytic) {
        st->trig_zeros = true;
        st->k = std::fabs(pair.wronskian);
    } else {
        throw std::invalid_argument(
            "ReducedAction1D: pair carries neither a grid nor a closed form");
    }
    st->pair = std::move(pair);
    st_ = std::move(st);
}

const SolutionPair& ReducedAction1D::pair() const { return st_->pair; }
double ReducedAction1D::a() const { return st_->a; }
double ReducedAction1D::b() const { return st_->b; }
double ReducedAction1D::lambda() const { return st_->lambda; }
double ReducedAction1D::x_ref() const { return st_->x_ref; }
double ReducedAction1D::energy() const { return st_->pair.energy; }
double ReducedAction1D::mass() const { return st_->pair.mass; }
double ReducedAction1D::hbar() const { return st_->pair.hbar; }

double ReducedAction1D::phi1t(double x) const {
    return st_->a * st_->pair.phi1(x) + st_->b * st_->pair.phi2(x);
}
double ReducedAction1D::phi2t(double x) const { return st_->pair.phi2(x); }
double ReducedAction1D::dphi1t(double x) const {
    return st_->a * st_->pair.dphi1(x) + st_->b * st_->pair.dphi2(x);
}
double ReducedAction1D::dphi2t(double x) const { return st_->pair.dphi2(x); }

double ReducedAction1D::dd(double x) const {
    const double f = phi1t(x), g = phi2t(x);
    return f * f + g * g;
}
double ReducedAction1D::dd_prime(double x) const {
    return 2.0 * (phi1t(x) * dphi1t(x) + phi2t(x) * dphi2t(x));
}
double ReducedAction1D::dd_second(double x) const {
    // D'' = 2(phi1t'^2 + phi2t'^2) + 2(phi1t phi1t'' + phi2t phi2t'') with the
    // second derivatives eliminated through phi'' = (2m/hbar^2)(V - E) phi
    const double f = phi1t(x), g = phi2t(x);
    const double fp = dphi1t(x), gp = dphi2t(x);
    const SolutionPair& p = st_->pair;
    const double w = 2.0 * p.mass / (p.hbar * p.hbar) * (p.potential(x) - p.energy);
    return 2.0 * (fp * fp + gp * gp) + 2.0 * w * (f * f + g * g);
}

double ReducedAction1D::branch_count(double x) const {
    const State& st = *st_;
    double n;
    if (st.trig_zeros) {
        // zeros of cos(kx) at (j + 1/2) pi / k
        auto count_below = [&](double xx) {
            return std::floor(st.k * xx / std::numbers::pi - 0.5);
        };
        n = count_below(x) - count_below(st.x_ref);
    } else {
        const auto lo = std::upper_bound(st.zeros.begin(), st.zeros.end(), st.x_ref);
        const auto hi = std::upper_bound(st.zeros.begin(), st.zeros.end(), x);
        n = static_cast<double>(hi - lo);
    }
    return n;
}

double ReducedAction1D::s0(double x) const {
    const State& st = *st_;
    const double f = phi1t(x), g = phi2t(x);
    const double principal = g != 0.0
                                 ? std::atan(f / g)
                                 : std::copysign(std::numbers::pi / 2.0, f);
    const double sigma = st.a * st.pair.wronskian > 0.0 ? 1.0 : -1.0;
    const double hbar = st.pair.hbar;
    return hbar * (principal + sigma * std::numbers::pi * branch_count(x)) +
           hbar * st.lambda;
}

double ReducedAction1D::ds0_dx(double x) const {
    const State& st = *st_;
    return st.pair.hbar * st.a * st.pair.wronskian / dd(x);
}

double ReducedAction1D::d2s0_dx2(double x) const {
    const State& st = *st_;
    const double D = dd(x);
    return -st.pair.hbar * st.a * st.pair.wronskian * dd_prime(x) / (D * D);
}

double ReducedAction1D::d3s0_dx3(double x) const {
    const State& st = *st_;
    const double D = dd(x), Dp = dd_prime(x), Dpp = dd_second(x);
    return st.pair.hbar * st.a * st.pair.wronskian *
           (2.0 * Dp * Dp / (D * D * D) - Dpp / (D * D));
}

double ReducedAction1D::amplitude(double x) const { return std::sqrt(dd(x)); }

double ReducedAction1D::quantum_potential(double x) const {
    // hbar^2/(4m) [ (3/2)(S0''/S0')^2 - S0'''/S0' ], assembled from the
    // closed-form ratios S0''/S0' = -D'/D, S0'''/S0' = 2(D'/D)^2 - D''/D
    const SolutionPair& p = st_->pair;
    const double D = dd(x);
    const double r1 = -dd_prime(x) / D;
    const double r2 = 2.0 * r1 * r1 - dd_second(x) / D;
    return p.hbar * p.hbar / (4.0 * p.mass) * (1.5 * r1 * r1 - r2);
}

std::complex<double> ReducedAction1D::reconstruct(const WaveFormConstants& c,
                                                  double x) const {
    if (c.alpha == std::complex<double>(0.0, 0.0) &&
        c.beta == std::complex<double>(0.0, 0.0))
        throw std::invalid_argument("reconstruct: alpha and beta both zero");
    const double R = amplitude(x);
    const std::complex<double> i(0.0, 1.0);
    const double th = s0(x) / st_->pair.hbar;
    return R * (c.alpha * std::exp(i * th) + c.beta * std::exp(-i * th));
}

ResidualReport ReducedAction1D::qhje_residual(const Grid1D& grid,
                                              double tolerance) const {
    const SolutionPair& p = st_->pair;
    double vmax = 0.0;
    for (double x : grid.points())
        vmax = std::max(vmax, std::fabs(p.potential(x)));
    if (tolerance <= 0.0)
        tolerance = 1e-6 * std::max(std::fabs(p.energy),
                                    std::max(vmax, 1e-6));

    std::vector<double> res;
    res.reserve(grid.size());
    for (double x : grid.points()) {
        const double sp = ds0_dx(x);
        const double spp = d2s0_dx2(x);
        const double sppp = d3s0_dx3(x);
        const double rhs = p.hbar * p.hbar / (4.0 * p.mass) *
                           (1.5 * (spp / sp) * (spp / sp) - sppp / sp);
        res.push_back(sp * sp / (2.0 * p.mass) + p.potential(x) - p.energy - rhs);
    }
    return ResidualReport::from_values(grid.points(), std::move(res), tolerance);
}

ResidualReport ReducedAction1D::continuity_residual(const Grid1D& grid,
                                                    double tolerance) const {
    const State& st = *st_;
    if (tolerance <= 0.0) tolerance = 1e-8;
    const double ref = st.pair.hbar * st.a * st.pair.wronskian;
    std::vector<double> res;
    res.reserve(grid.size());
    for (double x : grid.points()) {
        const double R = amplitude(x);
        res.push_back(R * R * ds0_dx(x) / ref - 1.0);
    }
    return ResidualReport::from_values(grid.points(), std::move(res), tolerance);
}

ReducedAction1D ReducedAction1D::at_energy(double e) const {
    const State& st = *st_;
    if (!st.pair.at_energy)
        throw std::invalid_argument(
            "ReducedAction1D: no closed-form energy family on this pair");
    return ReducedAction1D(st.pair.at_energy(e), st.a, st.b, st.lambda, st.x_ref);
}

// ---------------------------------------------------------------------------
// CoordinateMap

struct CoordinateMap::State {
    std::vector<double> x_nodes, xhat_nodes, dxhat_nodes;
    bool increasing = true;
    std::function<double(double)> s0_fn, v_fn, dxhat_fn;
    double energy = 0.0, mass = 1.0;
};

double CoordinateMap::xhat(double x) const {
    const auto& xs = st_->x_nodes;
    if (x < xs.front() || x > xs.back())
        throw std::domain_error("CoordinateMap: x outside the mapped segment");
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
    i = std::min(i, xs.size() - 2);
    // Hermite interpolation between tabulated map values
    const double h = xs[i + 1] - xs[i];
    const double t = (x - xs[i]) / h;
    const double f0 = st_->xhat_nodes[i], f1 = st_->xhat_nodes[i + 1];
    const double m0 = st_->dxhat_nodes[i] * h, m1 = st_->dxhat_nodes[i + 1] * h;
    const double d = f1 - f0;
    const double a2 = 3.0 * d - 2.0 * m0 - m1, a3 = -2.0 * d + m0 + m1;
    return f0 + t * (m0 + t * (a2 + t * a3));
}

double CoordinateMap::dxhat_dx(double x) const { return st_->dxhat_fn(x); }

double CoordinateMap::x_from_xhat(double xh) const {
    const auto& us = st_->xhat_nodes;
    const auto& xs = st_->x_nodes;
    const double lo = st_->increasing ? us.front() : us.back();
    const double hi = st_->increasing ? us.back() : us.front();
    const double pad = 1e-12 * (std::fabs(lo) + std::fabs(hi) + 1.0);
    if (xh < lo - pad || xh > hi + pad)
        throw std::domain_error("CoordinateMap: xhat outside the mapped segment");

    // bracket on the node table, then Newton with bisection fallback
    std::size_t ilo = 0, ihi = xs.size() - 1;
    while (ihi - ilo > 1) {
        const std::size_t mid = (ilo + ihi) / 2;
        const bool left = st_->increasing ? (us[mid] <= xh) : (us[mid] >= xh);
        if (left)
            ilo = mid;
        else
            ihi = mid;
    }
    double xa = xs[ilo], xb = xs[ihi];
    double x = 0.5 * (xa + xb);
    for (int it = 0; it < 100; ++it) {
        const double f = xhat(x) - xh;
        const bool too_high = st_->increasing ? (f > 0.0) : (f < 0.0);
        (too_high ? xb : xa) = x;
        const double d = st_->dxhat_fn(x);
        double xn = x - f / d;
        if (!(xn > xa) || !(xn < xb)) xn = 0.5 * (xa + xb);
        if (std::fabs(xn - x) < 1e-15 * (1.0 + std::fabs(x))) return xn;
        x = xn;
    }
    return x;
}

double CoordinateMap::s0_of_xhat(double xh) const {
    return st_->s0_fn(x_from_xhat(xh));
}

Interval CoordinateMap::x_range() const {
    return {st_->x_nodes.front(), st_->x_nodes.back()};
}

Interval CoordinateMap::xhat_range() const {
    return st_->increasing ? Interval{st_->xhat_nodes.front(), st_->xhat_nodes.back()}
                           : Interval{st_->xhat_nodes.back(), st_->xhat_nodes.front()};
}

ResidualReport CoordinateMap::classical_residual(const Grid1D& xhat_grid,
                                                 double tolerance) const {
    if (tolerance <= 0.0) tolerance = 1e-6 * std::max(std::fabs(st_->energy), 1e-6);
    std::vector<double> res;
    res.reserve(xhat_grid.size());
    const Interval ur = xhat_range();
    for (double u : xhat_grid.points()) {
        if (!ur.contains(u))
            throw std::domain_error("classical_residual: xhat grid outside map");
        // dS0/dxhat by finite differences through the inverse table
        const double h = 1e-4 * (1.0 + std::fabs(u));
        const double lo = std::max(ur.lo, u - 2.0 * h);
        const double hi = std::min(ur.hi, u + 2.0 * h);
        const double hh = std::min(u - lo, hi - u);
        double dsdu;
        if (hh > 0.25 * h) {
            dsdu = (st_->s0_fn(x_from_xhat(u + hh)) -
                    st_->s0_fn(x_from_xhat(u - hh))) /
                   (2.0 * hh);
        } else {
            const double side = (u - ur.lo < ur.hi - u) ? 1.0 : -1.0;
            dsdu = side *
                   (st_->s0_fn(x_from_xhat(u + side * h)) -
                    st_->s0_fn(x_from_xhat(u))) /
                   h;
        }
        const double x = x_from_xhat(u);
        res.push_back(dsdu * dsdu / (2.0 * st_->mass) + st_->v_fn(x) - st_->energy);
    }
    return ResidualReport::from_values(xhat_grid.points(), std::move(res), tolerance);
}

CoordinateMap ReducedAction1D::xhat_map(double x_ref, const Grid1D& segment) const {
    const SolutionPair& p = st_->pair;
    const double guard = 1e-9 * std::max(std::fabs(p.energy), 1e-6);
    if (!segment.span().contains(x_ref))
        throw std::invalid_argument("xhat_map: x_ref outside the segment");
    for (double x : segment.points())
        if (p.energy - p.potential(x) < guard)
            throw std::domain_error(
                "xhat_map: segment touches a turning point at x = " +
                std::to_string(x) + " (E - V below the 1e-9|E| margin)");

    ReducedAction1D self = *this;
    auto dxhat = [self](double x) {
        const SolutionPair& sp = self.pair();
        return self.ds0_dx(x) /
               std::sqrt(2.0 * sp.mass * (sp.energy - sp.potential(x)));
    };

    auto st = std::make_shared<CoordinateMap::State>();
    st->x_nodes = segment.points();
    st->xhat_nodes.resize(segment.size());
    st->dxhat_nodes.resize(segment.size());
    for (std::size_t i = 0; i < segment.size(); ++i)
        st->dxhat_nodes[i] = dxhat(segment[i]);

    // cumulative quadrature, anchored so xhat(x_ref) = 0
    QuadratureSpec qs;
    qs.abs_tol = 1e-13;
    qs.rel_tol = 1e-12;
    st->xhat_nodes[0] = 0.0;
    for (std::size_t i = 0; i + 1 < segment.size(); ++i)
        st->xhat_nodes[i + 1] =
            st->xhat_nodes[i] + integrate(dxhat, segment[i], segment[i + 1], qs);
    const double at_ref = [&] {
        auto it = std::lower_bound(st->x_nodes.begin(), st->x_nodes.end(), x_ref);
        const std::size_t i =
            std::min(static_cast<std::size_t>(it - st->x_nodes.begin()),
                     st->x_nodes.size() - 1);
        return st->xhat_nodes[i] + integrate(dxhat, st->x_nodes[i], x_ref, qs);
    }();
    for (auto& u : st->xhat_nodes) u -= at_ref;

    st->increasing = st->xhat_nodes.back() > st->xhat_nodes.front();
    // monotonicity of the table (S0' is single-signed, so this is structural)
    for (std::size_t i = 0; i + 1 < st->xhat_nodes.size(); ++i) {
        const bool ok = st->increasing ? st->xhat_nodes[i + 1] > st->xhat_nodes[i]
                                       : st->xhat_nodes[i + 1] < st->xhat_nodes[i];
        if (!ok)
            throw ToleranceError("xhat_map: tabulated map is not monotone; refine "
                                 "the segment grid");
    }

    st->s0_fn = [self](double x) { return self.s0(x); };
    st->v_fn = [pot = p.potential](double x) { return pot(x); };
    st->dxhat_fn = dxhat;
    st->energy = p.energy;
    st->mass = p.mass;

    CoordinateMap map;
    map.st_ = std::move(st);
    return map;
}

} // namespace qmlab
