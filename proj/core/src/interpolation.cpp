#include "qmlab/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qmlab {
namespace {

void check_nodes(const std::vector<double>& x, std::size_t nf, std::size_t np,
                 const char* who) {
    if (x.size() < 2 || x.size() != nf || x.size() != np)
        throw std::invalid_argument(std::string(who) + ": inconsistent node arrays");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1]))
            throw std::invalid_argument(std::string(who) +
                                        ": nodes must be strictly increasing");
}

std::size_t locate_in(const std::vector<double>& x, double xq) {
    if (x.empty()) throw std::logic_error("interpolant: empty");
    auto it = std::upper_bound(x.begin(), x.end(), xq);
    if (it == x.begin()) return 0;
    std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
    return std::min(i, x.size() - 2);
}

} // namespace

CubicHermite::CubicHermite(std::vector<double> x, std::vector<double> f,
                           std::vector<double> fp)
    : x_(std::move(x)), f_(std::move(f)), fp_(std::move(fp)) {
    check_nodes(x_, f_.size(), fp_.size(), "CubicHermite");
}

std::size_t CubicHermite::locate(double x) const { return locate_in(x_, x); }

double CubicHermite::value(double x) const {
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double d = f_[i + 1] - f_[i];
    const double m0 = fp_[i] * h, m1 = fp_[i + 1] * h;
    // monomial coefficients in t
    const double a2 = 3.0 * d - 2.0 * m0 - m1;
    const double a3 = -2.0 * d + m0 + m1;
    return f_[i] + t * (m0 + t * (a2 + t * a3));
}

double CubicHermite::derivative(double x) const {
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double d = f_[i + 1] - f_[i];
    const double m0 = fp_[i] * h, m1 = fp_[i + 1] * h;
    const double a2 = 3.0 * d - 2.0 * m0 - m1;
    const double a3 = -2.0 * d + m0 + m1;
    return (m0 + t * (2.0 * a2 + t * 3.0 * a3)) / h;
}

double CubicHermite::second_derivative(double x) const {
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double d = f_[i + 1] - f_[i];
    const double m0 = fp_[i] * h, m1 = fp_[i + 1] * h;
    const double a2 = 3.0 * d - 2.0 * m0 - m1;
    const double a3 = -2.0 * d + m0 + m1;
    return (2.0 * a2 + 6.0 * a3 * t) / (h * h);
}

QuinticHermite::QuinticHermite(std::vector<double> x, std::vector<double> f,
                               std::vector<double> fp, std::vector<double> fpp)
    : x_(std::move(x)), f_(std::move(f)), fp_(std::move(fp)), fpp_(std::move(fpp)) {
    check_nodes(x_, f_.size(), fp_.size(), "QuinticHermite");
    if (fpp_.size() != x_.size())
        throw std::invalid_argument("QuinticHermite: inconsistent node arrays");
}

std::size_t QuinticHermite::locate(double x) const { return locate_in(x_, x); }

namespace {

// quintic monomial coefficients in the scaled variable t on [0,1]
struct Quintic {
    double a[6];
};

Quintic quintic_coeffs(double f0, double f1, double m0, double m1, double s0,
                       double s1) {
    const double d = f1 - f0;
    Quintic q;
    q.a[0] = f0;
    q.a[1] = m0;
    q.a[2] = 0.5 * s0;
    q.a[3] = 10.0 * d - 6.0 * m0 - 4.0 * m1 - 1.5 * s0 + 0.5 * s1;
    q.a[4] = -15.0 * d + 8.0 * m0 + 7.0 * m1 + 1.5 * s0 - s1;
    q.a[5] = 6.0 * d - 3.0 * m0 - 3.0 * m1 - 0.5 * s0 + 0.5 * s1;
    return q;
}

} // namespace

double QuinticHermite::value(double x) const {
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const Quintic q = quintic_coeffs(f_[i], f_[i + 1], fp_[i] * h, fp_[i + 1] * h,
                                     fpp_[i] * h * h, fpp_[i + 1] * h * h);
    double v = q.a[5];
    for (int j = 4; j >= 0; --j) v = v * t + q.a[j];
    return v;
}

double QuinticHermite::derivative(double x) const {
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const Quintic q = quintic_coeffs(f_[i], f_[i + 1], fp_[i] * h, fp_[i + 1] * h,
                                     fpp_[i] * h * h, fpp_[i + 1] * h * h);
    double v = 5.0 * q.a[5];
    for (int j = 4; j >= 1; --j) v = v * t + j * q.a[j];
    return v / h;
}

double QuinticHermite::second_derivative(double x) const {
    const std::size_t i = locate(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const Quintic q = quintic_coeffs(f_[i], f_[i + 1], fp_[i] * h, fp_[i + 1] * h,
                                     fpp_[i] * h * h, fpp_[i + 1] * h * h);
    double v = 20.0 * q.a[5];
    for (int j = 4; j >= 2; --j) v = v * t + j * (j - 1) * q.a[j];
    return v / (h * h);
}

std::vector<double> pchip_slopes(const std::vector<double>& x,
                                 const std::vector<double>& f) {
    const std::size_t n = x.size();
    if (n < 2 || f.size() != n)
        throw std::invalid_argument("pchip_slopes: need matching arrays, n >= 2");
    std::vector<double> d(n);
    if (n == 2) {
        d[0] = d[1] = (f[1] - f[0]) / (x[1] - x[0]);
        return d;
    }
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        if (!(h[i] > 0.0))
            throw std::invalid_argument("pchip_slopes: nodes must be increasing");
        delta[i] = (f[i + 1] - f[i]) / h[i];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    // shape-preserving three-point endpoint slopes (Fritsch-Butland style)
    auto endpoint = [](double h0, double h1, double d0, double d1) {
        double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (s * d0 <= 0.0)
            s = 0.0;
        else if (d0 * d1 < 0.0 && std::fabs(s) > 3.0 * std::fabs(d0))
            s = 3.0 * d0;
        return s;
    };
    d[0] = endpoint(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = endpoint(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    return d;
}

} // namespace qmlab
