#include "qmlab/ode.hpp"

#include "qmlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qmlab {
namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

bool finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace

OdeResult ode_solve(const OdeRhs& rhs, std::vector<double> y0, double t0, double t1,
                    const OdeControls& controls) {
    const std::size_t n = y0.size();
    if (n == 0) throw std::invalid_argument("ode_solve: empty state");
    if (!std::isfinite(t0) || !std::isfinite(t1) || t0 == t1)
        throw std::invalid_argument("ode_solve: bad time span");
    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double span = std::fabs(t1 - t0);
    const double hmax = controls.max_step > 0.0 ? controls.max_step : span / 4.0;
    const double hmin = controls.min_step > 0.0
                            ? controls.min_step
                            : 16.0 * std::numeric_limits<double>::epsilon() *
                                  std::max(std::fabs(t0), std::fabs(t1));

    for (double ts : controls.sample_times)
        if (dir * (ts - t0) < -1e-14 * span || dir * (ts - t1) > 1e-14 * span)
            throw std::invalid_argument("ode_solve: sample time outside span");

    OdeResult result;
    std::vector<double> y = std::move(y0);
    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    std::vector<double> ytmp(n), ynew(n), yerr(n);

    double t = t0;
    rhs(t, y, k1);
    if (!finite(k1))
        throw std::domain_error("ode_solve: non-finite derivative at initial state");

    auto record = [&](double tt, const std::vector<double>& yy,
                      const std::vector<double>& dd) {
        result.samples.push_back(OdeSample{tt, yy, dd});
    };

    std::size_t next_sample = 0;
    auto emit_samples_at = [&](double tt, const std::vector<double>& yy,
                               const std::vector<double>& dd) {
        while (next_sample < controls.sample_times.size() &&
               std::fabs(controls.sample_times[next_sample] - tt) <=
                   1e-12 * std::max(1.0, std::fabs(tt))) {
            record(controls.sample_times[next_sample], yy, dd);
            ++next_sample;
        }
    };

    if (controls.record_steps) record(t, y, k1);
    emit_samples_at(t, y, k1);

    // initial step heuristic (Hairer II.4)
    double h;
    if (controls.initial_step > 0.0) {
        h = std::min(controls.initial_step, hmax);
    } else {
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = controls.abs_tol + controls.rel_tol * std::fabs(y[i]);
            d0 = std::max(d0, std::fabs(y[i]) / sc);
            d1 = std::max(d1, std::fabs(k1[i]) / sc);
        }
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * span : 0.01 * d0 / d1;
        h = std::min(h, hmax);
    }

    double err_prev = 1.0;
    const double safety = 0.9, alpha = 0.7 / 5.0, beta = 0.4 / 5.0;

    while (dir * (t1 - t) > 0.0) {
        if (result.accepted + result.rejected >= controls.max_steps)
            throw ToleranceError("ode_solve: step budget exceeded at t = " +
                                 std::to_string(t));

        const double h_ctrl = std::min(h, hmax);
        if (h_ctrl < hmin) {
            result.termination = OdeTermination::SingularStep;
            result.message = "step size underflow at t = " + std::to_string(t) +
                             " (h = " + std::to_string(h_ctrl) + ")";
            if (result.samples.empty() || result.samples.back().t != t)
                record(t, y, k1);
            return result;
        }

        // clamp to the next sample time and the span end so both are hit exactly
        double h_eff = h_ctrl;
        double target = t1;
        if (next_sample < controls.sample_times.size())
            target = controls.sample_times[next_sample];
        const double to_target = std::fabs(target - t);
        if (to_target <= h_eff * (1.0 + 1e-12))
            h_eff = to_target;
        const double hs = dir * h_eff;

        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + hs * a21 * k1[i];
        rhs(t + c2 * hs, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * hs, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * hs, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * hs, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                   a64 * k4[i] + a65 * k5[i]);
        rhs(t + hs, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                                   b6 * k6[i]);
        rhs(t + hs, ynew, k7);

        bool ok = finite(ynew) && finite(k7);
        double err = 0.0;
        if (ok) {
            for (std::size_t i = 0; i < n; ++i) {
                yerr[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                e6 * k6[i] + e7 * k7[i]);
                const double sc = controls.abs_tol +
                                  controls.rel_tol *
                                      std::max(std::fabs(y[i]), std::fabs(ynew[i]));
                const double r = yerr[i] / sc;
                err += r * r;
            }
            err = std::sqrt(err / static_cast<double>(n));
        }

        if (!ok) {
            h = 0.25 * h_eff;
            ++result.rejected;
            continue;
        }
        if (err > 1.0) {
            const double factor =
                std::max(0.2, safety * std::pow(err, -0.2)); // plain rejection shrink
            h = factor * h_eff;
            ++result.rejected;
            continue;
        }

        // accepted
        t = (h_eff == to_target) ? target : t + hs;
        y.swap(ynew);
        k1.swap(k7);
        ++result.accepted;

        emit_samples_at(t, y, k1);
        if (controls.record_steps) record(t, y, k1);

        if (controls.stop && controls.stop(t, y, k1)) {
            result.termination = OdeTermination::Stopped;
            if (!controls.record_steps) record(t, y, k1);
            return result;
        }

        const double e = std::max(err, 1e-10);
        double factor = safety * std::pow(e, -alpha) * std::pow(err_prev, beta);
        factor = std::clamp(factor, 0.2, 5.0);
        h = std::min(factor * h_eff, hmax);
        err_prev = e;
    }

    result.termination = OdeTermination::SpanComplete;
    if (!controls.record_steps &&
        (result.samples.empty() || result.samples.back().t != t))
        record(t, y, k1);
    return result;
}

} // namespace qmlab
