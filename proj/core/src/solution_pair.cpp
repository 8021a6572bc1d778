#include "qmlab/solution_pair.hpp"

#include "qmlab/errors.hpp"
#include "qmlab/finite_difference.hpp"
#include "qmlab/interpolation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qmlab {

SolutionPair pair_free(double energy, double mass, double hbar) {
    if (!(energy > 0.0))
        throw std::domain_error("pair_free: requires E > 0, got " +
                                std::to_string(energy));
    if (!(mass > 0.0) || !(hbar > 0.0))
        throw std::invalid_argument("pair_free: mass and hbar must be positive");
    const double k = std::sqrt(2.0 * mass * energy) / hbar;

    SolutionPair p;
    p.phi1 = [k](double x) { return std::sin(k * x); };
    p.phi2 = [k](double x) { return std::cos(k * x); };
    p.dphi1 = [k](double x) { return k * std::cos(k * x); };
    p.dphi2 = [k](double x) { return -k * std::sin(k * x); };
    p.energy = energy;
    p.mass = mass;
    p.hbar = hbar;
    p.wronskian = k;
    p.potential = Potential::free_space();
    p.domain = p.potential.domain();
    p.analytic = true;
    p.at_energy = [mass, hbar](double e) { return pair_free(e, mass, hbar); };
    return p;
}

namespace {

// one Numerov seed step by RK4 on (y, y'), 8 substeps: local error ~h^5,
// matching the recurrence's own order
void rk4_seed(const std::function<double(double)>& w, double x0, double h,
              double& y, double& yp) {
    const int nsub = 8;
    const double hs = h / nsub;
    double x = x0;
    for (int i = 0; i < nsub; ++i) {
        const double k1y = yp, k1p = w(x) * y;
        const double k2y = yp + 0.5 * hs * k1p,
                     k2p = w(x + 0.5 * hs) * (y + 0.5 * hs * k1y);
        const double k3y = yp + 0.5 * hs * k2p,
                     k3p = w(x + 0.5 * hs) * (y + 0.5 * hs * k2y);
        const double k4y = yp + hs * k3p, k4p = w(x + hs) * (y + hs * k3y);
        y += hs / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        yp += hs / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        x += hs;
    }
}

} // namespace

SolutionPair pair_numeric(const Potential& potential, double energy, double x0,
                          double h, double mass, double hbar) {
    if (!(mass > 0.0) || !(hbar > 0.0))
        throw std::invalid_argument("pair_numeric: mass and hbar must be positive");
    if (!(h > 0.0) || !std::isfinite(h))
        throw std::invalid_argument("pair_numeric: step must be positive");
    const Interval dom = potential.domain();
    if (!std::isfinite(dom.lo) || !std::isfinite(dom.hi))
        throw std::invalid_argument(
            "pair_numeric: potential must have a finite domain");
    if (!dom.contains(x0))
        throw std::invalid_argument("pair_numeric: x0 outside potential domain");
    const std::size_t n = static_cast<std::size_t>(std::floor((dom.hi - x0) / h)) + 1;
    if (n < 7)
        throw std::invalid_argument(
            "pair_numeric: fewer than 7 grid nodes between x0 and the domain end");

    auto pg = std::make_shared<PairGrid>();
    pg->x0 = x0;
    pg->h = h;
    pg->x.resize(n);
    for (std::size_t i = 0; i < n; ++i) pg->x[i] = x0 + h * static_cast<double>(i);

    const double wscale = 2.0 * mass / (hbar * hbar);
    auto wfun = [&](double x) { return wscale * (potential(x) - energy); };
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = wfun(pg->x[i]);

    auto integrate_member = [&](double y0, double yp0, std::vector<double>& y) {
        y.resize(n);
        y[0] = y0;
        double y1 = y0, yp1 = yp0;
        rk4_seed(wfun, x0, h, y1, yp1);
        y[1] = y1;
        const double h2 = h * h;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double num = 2.0 * y[i] * (1.0 + 5.0 * h2 * w[i] / 12.0) -
                               y[i - 1] * (1.0 - h2 * w[i - 1] / 12.0);
            const double den = 1.0 - h2 * w[i + 1] / 12.0;
            y[i + 1] = num / den;
            if (!std::isfinite(y[i + 1]))
                throw ToleranceError("pair_numeric: solution overflow at x = " +
                                     std::to_string(pg->x[i + 1]));
        }
    };

    integrate_member(0.0, 1.0, pg->phi1);
    integrate_member(1.0, 0.0, pg->phi2);
    pg->dphi1 = derivative_nodes_5pt(pg->phi1, h, 1);
    pg->dphi2 = derivative_nodes_5pt(pg->phi2, h, 1);

    // Abel: W must be constant; drift measures grid adequacy
    const double w0 = pg->dphi1[0] * pg->phi2[0] - pg->phi1[0] * pg->dphi2[0];
    double drift = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = pg->dphi1[i] * pg->phi2[i] - pg->phi1[i] * pg->dphi2[i];
        drift = std::max(drift, std::fabs(wi - w0) / std::fabs(w0));
    }
    if (drift > 1e-4)
        throw ToleranceError(
            "pair_numeric: Wronskian drift " + std::to_string(drift) +
            " exceeds 1e-4; decrease the step for this potential/energy");

    SolutionPair p;
    auto mk_value = [pg](const std::vector<double>* f, const std::vector<double>* fp) {
        auto interp = std::make_shared<CubicHermite>(pg->x, *f, *fp);
        return [interp](double x) { return interp->value(x); };
    };
    auto mk_deriv = [pg](const std::vector<double>* f, const std::vector<double>* fp) {
        auto interp = std::make_shared<CubicHermite>(pg->x, *f, *fp);
        return [interp](double x) { return interp->derivative(x); };
    };
    p.phi1 = mk_value(&pg->phi1, &pg->dphi1);
    p.phi2 = mk_value(&pg->phi2, &pg->dphi2);
    p.dphi1 = mk_deriv(&pg->phi1, &pg->dphi1);
    p.dphi2 = mk_deriv(&pg->phi2, &pg->dphi2);
    p.energy = energy;
    p.mass = mass;
    p.hbar = hbar;
    p.wronskian = w0;
    p.wronskian_drift = drift;
    p.potential = potential;
    p.domain = {x0, pg->x.back()};
    p.analytic = false;
    p.grid = pg;
    return p;
}

ResidualReport se_residual(const SolutionPair& pair, int which, const Grid1D& grid,
                           double tolerance) {
    if (which != 1 && which != 2)
        throw std::invalid_argument("se_residual: which must be 1 or 2");

    double vmax = 0.0;
    for (double x : grid.points())
        vmax = std::max(vmax, std::fabs(pair.potential(x)));
    if (tolerance <= 0.0)
        tolerance = 1e-8 * std::max(std::fabs(pair.energy), vmax);

    const double pref = -pair.hbar * pair.hbar / (2.0 * pair.mass);
    std::vector<double> res;
    std::vector<double> pts;

    if (pair.grid) {
        // node-based: differentiate the stored values, not the interpolant
        const PairGrid& pg = *pair.grid;
        const auto& y = which == 1 ? pg.phi1 : pg.phi2;
        const auto d2 = derivative_nodes_5pt(y, pg.h, 2);
        for (double xq : grid.points()) {
            const double idx = (xq - pg.x0) / pg.h;
            auto i = static_cast<std::size_t>(std::llround(idx));
            if (i >= pg.x.size())
                throw std::domain_error("se_residual: grid point outside pair grid");
            const double x = pg.x[i];
            res.push_back(pref * d2[i] + (pair.potential(x) - pair.energy) * y[i]);
            pts.push_back(x);
        }
    } else {
        const auto& f = which == 1 ? pair.phi1 : pair.phi2;
        for (double x : grid.points()) {
            const double d2 = fd_derivative(f, x, 2);
            res.push_back(pref * d2 + (pair.potential(x) - pair.energy) * f(x));
            pts.push_back(x);
        }
    }
    return ResidualReport::from_values(std::move(pts), std::move(res), tolerance);
}

} // namespace qmlab
