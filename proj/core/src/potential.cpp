#include "qmlab/potential.hpp"

#include "qmlab/errors.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace qmlab {
namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v))
        throw std::invalid_argument(std::string("Potential: non-finite ") + what);
}

void require_domain(const Interval& d) {
    if (!(d.hi > d.lo))
        throw std::invalid_argument("Potential: empty domain");
}

} // namespace

Potential Potential::free_space() {
    Potential p;
    p.kind_ = PotentialKind::Free;
    p.domain_ = {-std::numeric_limits<double>::infinity(),
                 std::numeric_limits<double>::infinity()};
    return p;
}

Potential Potential::linear(double slope, Interval domain) {
    require_finite(slope, "slope");
    require_domain(domain);
    Potential p;
    p.kind_ = PotentialKind::Linear;
    p.domain_ = domain;
    p.p1_ = slope;
    return p;
}

Potential Potential::harmonic(double mass, double omega, Interval domain) {
    require_finite(mass, "mass");
    require_finite(omega, "omega");
    if (!(mass > 0.0)) throw std::invalid_argument("Potential: mass must be positive");
    require_domain(domain);
    Potential p;
    p.kind_ = PotentialKind::Harmonic;
    p.domain_ = domain;
    p.p1_ = mass;
    p.p2_ = omega;
    return p;
}

Potential Potential::coulomb2d_radial(double e_sq, Interval domain) {
    require_finite(e_sq, "charge");
    require_domain(domain);
    if (!(domain.lo > 0.0))
        throw std::invalid_argument(
            "Potential: coulomb2d_radial domain must exclude r <= 0");
    Potential p;
    p.kind_ = PotentialKind::Coulomb2dRadial;
    p.domain_ = domain;
    p.p1_ = e_sq;
    return p;
}

Potential Potential::tabulated(std::vector<double> x, std::vector<double> v,
                               std::string length_unit, std::string energy_unit) {
    if (x.size() < 4)
        throw std::invalid_argument("Potential: tabulated needs at least 4 samples");
    if (x.size() != v.size())
        throw std::invalid_argument("Potential: tabulated arrays differ in length");
    for (std::size_t i = 0; i < x.size(); ++i) {
        require_finite(x[i], "sample position");
        require_finite(v[i], "sample value");
        if (i > 0 && !(x[i] > x[i - 1]))
            throw std::invalid_argument(
                "Potential: tabulated positions must be strictly increasing");
    }
    Potential p;
    p.kind_ = PotentialKind::Tabulated;
    p.domain_ = {x.front(), x.back()};
    auto slopes = pchip_slopes(x, v);
    p.table_ = std::make_shared<CubicHermite>(std::move(x), std::move(v),
                                              std::move(slopes));
    p.length_unit_ = std::move(length_unit);
    p.energy_unit_ = std::move(energy_unit);
    return p;
}

Potential Potential::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("potential file not readable: " + path);

    std::vector<double> xs, vs;
    std::string length_unit, energy_unit;
    std::string line;
    int lineno = 0;
    bool saw_units = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::string content = line;
        const auto hash = content.find('#');
        if (hash != std::string::npos) {
            // the units declaration lives in a comment-style header
            std::istringstream hdr(content.substr(hash + 1));
            std::string tag;
            hdr >> tag;
            if (tag == "units:") {
                if (!(hdr >> length_unit >> energy_unit))
                    throw ConfigError("malformed units header in " + path, "units",
                                      lineno);
                saw_units = true;
            }
            content = content.substr(0, hash);
        }
        std::istringstream row(content);
        double x, v;
        if (!(row >> x)) continue; // blank or comment-only line
        if (!(row >> v))
            throw ConfigError("expected two columns in " + path, "", lineno);
        std::string extra;
        if (row >> extra)
            throw ConfigError("trailing garbage in " + path + ": '" + extra + "'",
                              "", lineno);
        if (!std::isfinite(x) || !std::isfinite(v))
            throw ConfigError("non-finite sample in " + path, "", lineno);
        xs.push_back(x);
        vs.push_back(v);
    }
    if (!saw_units)
        throw ConfigError("missing '# units: <length> <energy>' header in " + path,
                          "units");
    if (xs.size() < 4)
        throw ConfigError("potential file needs at least 4 samples: " + path);
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1]))
            throw ConfigError("positions must be strictly increasing in " + path);
    try {
        return tabulated(std::move(xs), std::move(vs), std::move(length_unit),
                         std::move(energy_unit));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string(e.what()) + " (" + path + ")");
    }
}

Potential Potential::custom(std::function<double(double)> v,
                            std::function<double(double)> dv, Interval domain) {
    if (!v) throw std::invalid_argument("Potential: custom needs a value callback");
    Potential p;
    p.kind_ = PotentialKind::Custom;
    p.domain_ = domain;
    p.fn_ = std::move(v);
    p.dfn_ = std::move(dv);
    return p;
}

void Potential::check_domain(double x) const {
    if (kind_ == PotentialKind::Coulomb2dRadial && !(x > 0.0))
        throw std::domain_error("Potential: coulomb2d_radial evaluated at r <= 0");
    if (kind_ == PotentialKind::Tabulated && !domain_.contains(x))
        throw std::domain_error("Potential: tabulated evaluated outside its table");
}

double Potential::operator()(double x) const {
    check_domain(x);
    switch (kind_) {
    case PotentialKind::Free: return 0.0;
    case PotentialKind::Linear: return p1_ * x;
    case PotentialKind::Harmonic: return 0.5 * p1_ * p2_ * p2_ * x * x;
    case PotentialKind::Coulomb2dRadial: return -p1_ / x;
    case PotentialKind::Tabulated: return table_->value(x);
    case PotentialKind::Custom: return fn_(x);
    }
    return 0.0;
}

double Potential::derivative(double x) const {
    check_domain(x);
    switch (kind_) {
    case PotentialKind::Free: return 0.0;
    case PotentialKind::Linear: return p1_;
    case PotentialKind::Harmonic: return p1_ * p2_ * p2_ * x;
    case PotentialKind::Coulomb2dRadial: return p1_ / (x * x);
    case PotentialKind::Tabulated: return table_->derivative(x);
    case PotentialKind::Custom:
        if (!dfn_)
            throw std::logic_error("Potential: custom derivative not provided");
        return dfn_(x);
    }
    return 0.0;
}

} // namespace qmlab
