#pragma once

#include "qmlab/grid.hpp"
#include "qmlab/interpolation.hpp"

#include <functional>
#include <memory>
#include <string>

namespace qmlab {

enum class PotentialKind {
    Free,
    Linear,
    Harmonic,
    Coulomb2dRadial,
    Tabulated,
    Custom, // internal (e.g. relativistic effective potentials); not parseable
};

// 1-D potential V(x). Analytic kinds carry their defining parameters;
// tabulated data is interpolated with a shape-preserving cubic (PCHIP).
class Potential {
public:
    static Potential free_space();
    static Potential linear(double slope, Interval domain);
    static Potential harmonic(double mass, double omega, Interval domain);
    // V(r) = -e_sq / r on r > 0; domain.lo must be > 0
    static Potential coulomb2d_radial(double e_sq, Interval domain);
    static Potential tabulated(std::vector<double> x, std::vector<double> v,
                               std::string length_unit = "dimensionless",
                               std::string energy_unit = "dimensionless");
    // Two-column text file: position value, '#' comments, mandatory header
    // line `# units: <length> <energy>`. Throws ConfigError with the line
    // number on malformed input.
    static Potential from_file(const std::string& path);
    static Potential custom(std::function<double(double)> v,
                            std::function<double(double)> dv, Interval domain);

    double operator()(double x) const;
    double value(double x) const { return (*this)(x); }
    double derivative(double x) const;

    PotentialKind kind() const { return kind_; }
    Interval domain() const { return domain_; }
    const std::string& length_unit() const { return length_unit_; }
    const std::string& energy_unit() const { return energy_unit_; }

    // defining parameters (meaning depends on kind)
    double slope() const { return p1_; }
    double omega() const { return p2_; }
    double mass() const { return p1_; }
    double e_sq() const { return p1_; }

private:
    Potential() = default;
    void check_domain(double x) const;

    PotentialKind kind_ = PotentialKind::Free;
    Interval domain_{0.0, 0.0};
    double p1_ = 0.0, p2_ = 0.0;
    std::shared_ptr<const CubicHermite> table_;
    std::function<double(double)> fn_, dfn_;
    std::string length_unit_ = "dimensionless";
    std::string energy_unit_ = "dimensionless";
};

} // namespace qmlab
