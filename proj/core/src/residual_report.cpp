#include "qmlab/residual_report.hpp"

#include <cmath>
#include <json.hpp>
#include <stdexcept>

namespace qmlab {

ResidualReport ResidualReport::from_values(std::vector<double> grid,
                                           std::vector<double> residuals,
                                           double tolerance) {
    if (grid.size() != residuals.size())
        throw std::invalid_argument("ResidualReport: grid/residual size mismatch");
    if (grid.empty())
        throw std::invalid_argument("ResidualReport: empty grid");
    ResidualReport r;
    r.grid = std::move(grid);
    r.residuals = std::move(residuals);
    r.tolerance = tolerance;
    double sumsq = 0.0;
    for (double v : r.residuals) {
        if (!std::isfinite(v))
            throw std::domain_error("ResidualReport: non-finite residual");
        r.max = std::max(r.max, std::fabs(v));
        sumsq += v * v;
    }
    r.rms = std::sqrt(sumsq / static_cast<double>(r.residuals.size()));
    r.pass = r.max <= tolerance;
    return r;
}

std::string ResidualReport::to_json(int indent) const {
    nlohmann::json j;
    j["grid"] = grid;
    j["residuals"] = residuals;
    j["max"] = max;
    j["rms"] = rms;
    j["tolerance"] = tolerance;
    j["pass"] = pass;
    return j.dump(indent);
}

} // namespace qmlab
