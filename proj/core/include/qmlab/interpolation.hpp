#pragma once

#include <cstddef>
#include <vector>

namespace qmlab {

// Piecewise cubic Hermite interpolant from (x, f, f') node data; C^1, exact
// for the node values and slopes. Nodes must be strictly increasing.
class CubicHermite {
public:
    CubicHermite() = default;
    CubicHermite(std::vector<double> x, std::vector<double> f, std::vector<double> fp);

    double value(double x) const;
    double derivative(double x) const;
    double second_derivative(double x) const;

    const std::vector<double>& nodes() const { return x_; }
    bool empty() const { return x_.empty(); }

private:
    std::size_t locate(double x) const;
    std::vector<double> x_, f_, fp_;
};

// Piecewise quintic Hermite interpolant from (x, f, f', f'') node data; C^2.
class QuinticHermite {
public:
    QuinticHermite() = default;
    QuinticHermite(std::vector<double> x, std::vector<double> f,
                   std::vector<double> fp, std::vector<double> fpp);

    double value(double x) const;
    double derivative(double x) const;
    double second_derivative(double x) const;

    const std::vector<double>& nodes() const { return x_; }
    bool empty() const { return x_.empty(); }

private:
    std::size_t locate(double x) const;
    std::vector<double> x_, f_, fp_, fpp_;
};

// Fritsch-Carlson monotonicity-preserving slopes for tabulated data
// (the PCHIP construction); works on non-uniform nodes.
std::vector<double> pchip_slopes(const std::vector<double>& x,
                                 const std::vector<double>& f);

} // namespace qmlab
