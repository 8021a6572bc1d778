#pragma once

#include <string>
#include <vector>

namespace qmlab {

// Pointwise residual of an identity evaluated on a grid, plus the summary
// used by the verification gates.
struct ResidualReport {
    std::vector<double> grid;
    std::vector<double> residuals;
    double max = 0.0;  // max |residual|
    double rms = 0.0;
    double tolerance = 0.0;
    bool pass = false;

    static ResidualReport from_values(std::vector<double> grid,
                                      std::vector<double> residuals,
                                      double tolerance);

    // JSON object with fields {grid, residuals, max, rms, tolerance, pass}
    std::string to_json(int indent = -1) const;
};

} // namespace qmlab
