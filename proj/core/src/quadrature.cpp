#include "qmlab/quadrature.hpp"

#include "qmlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmlab {
namespace {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    double value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    double fv[15];
    double resg = 0.0, resk = 0.0;
    for (int j = 0; j < 7; ++j) {
        const double x = h * kXgk[j];
        fv[j] = f(c - x);
        fv[14 - j] = f(c + x);
    }
    fv[7] = f(c);
    for (int j = 0; j < 15; ++j) {
        if (!std::isfinite(fv[j]))
            throw std::domain_error(
                "integrate: non-finite integrand sample at x = " +
                std::to_string(c + h * (j < 7 ? -kXgk[j] : (j == 7 ? 0.0 : kXgk[14 - j]))));
    }
    for (int j = 0; j < 7; ++j)
        resk += kWgk[j] * (fv[j] + fv[14 - j]);
    resk += kWgk[7] * fv[7];
    for (int j = 0; j < 3; ++j)
        resg += kWg[j] * (fv[2 * j + 1] + fv[13 - 2 * j]);
    resg += kWg[3] * fv[7];

    const double reskh = 0.5 * resk;
    double resasc = kWgk[7] * std::fabs(fv[7] - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += kWgk[j] * (std::fabs(fv[j] - reskh) + std::fabs(fv[14 - j] - reskh));
    resasc *= std::fabs(h);

    double err = std::fabs((resk - resg) * h);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    return Panel{a, b, resk * h, err};
}

} // namespace

QuadResult integrate_full(const std::function<double(double)>& f, double lo,
                          double hi, const QuadratureSpec& spec) {
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw std::domain_error("integrate: non-finite integration bounds");
    if (spec.max_panels < 1)
        throw std::invalid_argument("integrate: max_panels must be >= 1");
    if (lo == hi)
        return {0.0, 0.0, 0};

    double sign = 1.0;
    double a = lo, b = hi;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }

    const auto tolerance = [&](double total) {
        return std::max(spec.abs_tol, spec.rel_tol * std::fabs(total));
    };

    if (spec.method == QuadMethod::FixedPanel) {
        const std::size_t n = spec.max_panels;
        const double h = (b - a) / static_cast<double>(n);
        double total = 0.0, err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            Panel p = evaluate_panel(f, a + h * static_cast<double>(i),
                                     i + 1 == n ? b : a + h * static_cast<double>(i + 1));
            total += p.value;
            err += p.error;
        }
        if (err > tolerance(total))
            throw ToleranceError(
                "integrate: fixed-panel error estimate " + std::to_string(err) +
                " exceeds tolerance " + std::to_string(tolerance(total)));
        return {sign * total, err, n};
    }

    std::priority_queue<Panel> queue;
    queue.push(evaluate_panel(f, a, b));
    double total = queue.top().value;
    double err = queue.top().error;
    std::size_t used = 1;

    while (err > tolerance(total)) {
        if (used >= spec.max_panels)
            throw ToleranceError(
                "integrate: accuracy not reached within panel budget (" +
                std::to_string(spec.max_panels) + " panels, error estimate " +
                std::to_string(err) + ")");
        Panel worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b)
            throw ToleranceError(
                "integrate: panel width underflow near x = " + std::to_string(mid));
        Panel left = evaluate_panel(f, worst.a, mid);
        Panel right = evaluate_panel(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
        ++used;
    }
    return {sign * total, err, used};
}

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 const QuadratureSpec& spec) {
    return integrate_full(f, lo, hi, spec).value;
}

} // namespace qmlab
