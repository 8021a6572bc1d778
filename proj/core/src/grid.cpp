#include "qmlab/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qmlab {

Grid1D::Grid1D(std::vector<double> points) : pts_(std::move(points)) {
    if (pts_.size() < 5)
        throw std::invalid_argument("Grid1D: need at least 5 points, got " +
                                    std::to_string(pts_.size()));
    for (std::size_t i = 0; i < pts_.size(); ++i) {
        if (!std::isfinite(pts_[i]))
            throw std::invalid_argument("Grid1D: non-finite point at index " +
                                        std::to_string(i));
        if (i > 0 && pts_[i] <= pts_[i - 1])
            throw std::invalid_argument(
                "Grid1D: points must be strictly increasing (violated at index " +
                std::to_string(i) + ")");
    }
}

Grid1D Grid1D::uniform(double lo, double hi, std::size_t n) {
    if (n < 5)
        throw std::invalid_argument("Grid1D::uniform: need at least 5 points");
    if (!(hi > lo))
        throw std::invalid_argument("Grid1D::uniform: need hi > lo");
    std::vector<double> pts(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        pts[i] = lo + h * static_cast<double>(i);
    pts.back() = hi;
    return Grid1D(std::move(pts));
}

bool Grid1D::is_uniform(double rel_tol) const {
    const double h0 = spacing(0);
    for (std::size_t i = 1; i + 1 < pts_.size(); ++i)
        if (std::fabs(spacing(i) - h0) > rel_tol * std::fabs(h0))
            return false;
    return true;
}

} // namespace qmlab
