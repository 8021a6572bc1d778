#pragma once

#include <cstddef>
#include <vector>

namespace qmlab {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

// Strictly increasing 1-D evaluation grid with at least 5 points (enough for
// the five-point difference stencils used throughout).
class Grid1D {
public:
    explicit Grid1D(std::vector<double> points);

    static Grid1D uniform(double lo, double hi, std::size_t n);

    const std::vector<double>& points() const { return pts_; }
    std::size_t size() const { return pts_.size(); }
    double operator[](std::size_t i) const { return pts_[i]; }
    double front() const { return pts_.front(); }
    double back() const { return pts_.back(); }
    Interval span() const { return {pts_.front(), pts_.back()}; }

    // spacing of interval i (between points i and i+1)
    double spacing(std::size_t i) const { return pts_[i + 1] - pts_[i]; }
    bool is_uniform(double rel_tol = 1e-12) const;

private:
    std::vector<double> pts_;
};

} // namespace qmlab
