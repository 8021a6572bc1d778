#include "qmlab/scenario.hpp"

#include "qmlab/errors.hpp"
#include "qmlab/grid.hpp"
#include "qmlab/reduced_action.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <random>
#include <sstream>

namespace qmlab {

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view data) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(data);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_f(const std::string& v, const std::string& key, int line) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size() || !std::isfinite(d))
            throw std::invalid_argument(v);
        return d;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        throw ConfigError("expected a finite number for '" + key + "', got '" +
                              v + "' (line " + std::to_string(line) + ")",
                          key, line);
    }
}

long long parse_i(const std::string& v, const std::string& key, int line) {
    try {
        std::size_t pos = 0;
        const long long n = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return n;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        throw ConfigError("expected an integer for '" + key + "', got '" + v +
                              "' (line " + std::to_string(line) + ")",
                          key, line);
    }
}

std::uint64_t parse_u(const std::string& v, const std::string& key, int line) {
    const long long n = parse_i(v, key, line);
    if (n < 0)
        throw ConfigError("expected a non-negative integer for '" + key + "'",
                          key, line);
    return static_cast<std::uint64_t>(n);
}

[[noreturn]] void unknown_key(const std::string& section, const std::string& key,
                              int line) {
    throw ConfigError("unknown key '" + key + "' in section [" + section +
                          "] (line " + std::to_string(line) + ")",
                      section + "." + key, line);
}

void check_choice(const std::string& value, std::initializer_list<const char*> allowed,
                  const std::string& key, int line) {
    for (const char* ok : allowed)
        if (value == ok) return;
    std::string msg = "invalid value '" + value + "' for '" + key + "'; expected one of:";
    for (const char* ok : allowed) msg += std::string(" ") + ok;
    throw ConfigError(msg + " (line " + std::to_string(line) + ")", key, line);
}

} // namespace

Scenario parse_scenario_text(const std::string& text) {
    Scenario s;
    std::istringstream in(text);
    std::string raw, section;
    std::string canonical;
    int lineno = 0;
    bool saw_module = false;

    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (const std::size_t hash = line.find('#'); hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("unterminated section header (line " +
                                      std::to_string(lineno) + ")",
                                  line, lineno);
            section = trim(line.substr(1, line.size() - 2));
            if (section != "scenario" && section != "potential" &&
                section != "physics" && section != "constants" &&
                section != "integration" && section != "sweep")
                throw ConfigError("unknown section [" + section + "] (line " +
                                      std::to_string(lineno) + ")",
                                  section, lineno);
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value' (line " +
                                  std::to_string(lineno) + ")",
                              line, lineno);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("empty key or value (line " +
                                  std::to_string(lineno) + ")",
                              key, lineno);
        if (section.empty())
            throw ConfigError("key '" + key + "' appears before any section "
                                  "(line " + std::to_string(lineno) + ")",
                              key, lineno);

        if (section == "scenario") {
            if (key == "module") {
                check_choice(value, {"laws1d", "hydrogen2d", "relativistic"},
                             key, lineno);
                s.module = value;
                saw_module = true;
            } else if (key == "name") {
                s.name = value;
            } else if (key == "seed") {
                s.seed = parse_u(value, key, lineno);
            } else if (key == "corrupt") {
                check_choice(value, {"none", "phi1"}, key, lineno);
                s.corrupt = value;
            } else {
                unknown_key(section, key, lineno);
            }
        } else if (section == "potential") {
            if (key == "kind") {
                check_choice(value, {"free", "linear", "harmonic", "file"},
                             key, lineno);
                s.potential_kind = value;
            } else if (key == "slope") {
                s.slope = parse_f(value, key, lineno);
            } else if (key == "omega") {
                s.omega = parse_f(value, key, lineno);
            } else if (key == "domain_lo") {
                s.domain.lo = parse_f(value, key, lineno);
            } else if (key == "domain_hi") {
                s.domain.hi = parse_f(value, key, lineno);
            } else if (key == "file") {
                s.potential_file = value;
            } else {
                unknown_key(section, key, lineno);
            }
        } else if (section == "physics") {
            if (key == "energy") s.energy = parse_f(value, key, lineno);
            else if (key == "mass") s.mass = parse_f(value, key, lineno);
            else if (key == "hbar") s.hbar = parse_f(value, key, lineno);
            else if (key == "c") s.c = parse_f(value, key, lineno);
            else if (key == "law") {
                check_choice(value, {"energy", "bohm", "floyd"}, key, lineno);
                s.law = value;
            } else if (key == "a") s.a = parse_f(value, key, lineno);
            else if (key == "b") s.b = parse_f(value, key, lineno);
            else if (key == "lambda") s.lambda = parse_f(value, key, lineno);
            else if (key == "x0") s.x0 = parse_f(value, key, lineno);
            else if (key == "t0") s.t0 = parse_f(value, key, lineno);
            else if (key == "t1") s.t1 = parse_f(value, key, lineno);
            else if (key == "n") s.n = static_cast<int>(parse_i(value, key, lineno));
            else if (key == "l") s.l = static_cast<int>(parse_i(value, key, lineno));
            else if (key == "rho0") s.rho0 = parse_f(value, key, lineno);
            else if (key == "r_init") s.r_init = parse_f(value, key, lineno);
            else if (key == "theta_init") s.theta_init = parse_f(value, key, lineno);
            else if (key == "units") {
                check_choice(value, {"atomic", "si"}, key, lineno);
                s.units = value;
            } else unknown_key(section, key, lineno);
        } else if (section == "constants") {
            if (key == "nu2") s.constants.nu2 = parse_f(value, key, lineno);
            else if (key == "nu3") s.constants.nu3 = parse_f(value, key, lineno);
            else if (key == "nu4") s.constants.nu4 = parse_f(value, key, lineno);
            else if (key == "mu1") s.constants.mu1 = parse_f(value, key, lineno);
            else if (key == "mu2") s.constants.mu2 = parse_f(value, key, lineno);
            else if (key == "mu3") s.constants.mu3 = parse_f(value, key, lineno);
            else if (key == "lambda") s.constants.lambda = parse_f(value, key, lineno);
            else unknown_key(section, key, lineno);
        } else if (section == "integration") {
            if (key == "abs_tol") s.controls.abs_tol = parse_f(value, key, lineno);
            else if (key == "rel_tol") s.controls.rel_tol = parse_f(value, key, lineno);
            else if (key == "samples")
                s.controls.samples = static_cast<std::size_t>(parse_u(value, key, lineno));
            else if (key == "v_stall_factor")
                s.controls.v_stall_factor = parse_f(value, key, lineno);
            else if (key == "tau_stall_factor")
                s.controls.tau_stall_factor = parse_f(value, key, lineno);
            else if (key == "max_steps")
                s.controls.max_steps = static_cast<std::size_t>(parse_u(value, key, lineno));
            else if (key == "floyd_de")
                s.controls.floyd_dE = parse_f(value, key, lineno);
            else if (key == "pair_step")
                s.pair_step = parse_f(value, key, lineno);
            else if (key == "pair_start")
                s.pair_start = parse_f(value, key, lineno);
            else unknown_key(section, key, lineno);
        } else { // sweep
            if (key == "count")
                s.sweep.count = static_cast<std::size_t>(parse_u(value, key, lineno));
            else if (key == "a_min") s.sweep.a_min = parse_f(value, key, lineno);
            else if (key == "a_max") s.sweep.a_max = parse_f(value, key, lineno);
            else if (key == "b_min") s.sweep.b_min = parse_f(value, key, lineno);
            else if (key == "b_max") s.sweep.b_max = parse_f(value, key, lineno);
            else unknown_key(section, key, lineno);
        }

        canonical += section + "." + key + "=" + value + "\n";
    }

    if (!saw_module)
        throw ConfigError("missing required key 'scenario.module'",
                          "scenario.module", 0);
    if (s.potential_kind == "file" && s.potential_file.empty())
        throw ConfigError("potential.kind = file requires 'potential.file'",
                          "potential.file", 0);
    s.canonical = std::move(canonical);
    return s;
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open scenario file '" + path + "'", path, 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

Potential Scenario::build_potential() const {
    if (potential_kind == "free") return Potential::free_space();
    if (potential_kind == "linear") return Potential::linear(slope, domain);
    if (potential_kind == "harmonic")
        return Potential::harmonic(mass, omega, domain);
    return Potential::from_file(potential_file);
}

namespace {

SolutionPair corrupt_phi1(SolutionPair pair) {
    auto p1 = pair.phi1;
    auto d1 = pair.dphi1;
    // position-dependent rescaling: no longer a stationary solution
    pair.phi1 = [p1](double x) { return p1(x) * (1.0 + 1e-3 * x * x); };
    pair.dphi1 = [p1, d1](double x) {
        return d1(x) * (1.0 + 1e-3 * x * x) + p1(x) * 2e-3 * x;
    };
    pair.at_energy = nullptr;
    return pair;
}

} // namespace

SolutionPair Scenario::build_pair() const {
    SolutionPair pair;
    if (potential_kind == "free") {
        pair = pair_free(energy, mass, hbar);
    } else {
        const Potential v = build_potential();
        const double start = pair_start ? *pair_start : v.domain().lo;
        pair = pair_numeric(v, energy, start, pair_step, mass, hbar);
    }
    if (corrupt == "phi1") pair = corrupt_phi1(pair);
    return pair;
}

SolutionPair Scenario::build_rel_pair() const {
    SolutionPair pair;
    if (potential_kind == "free") {
        pair = kg_pair_free(energy, mass, c, hbar);
    } else {
        const Potential v = build_potential();
        const double start = pair_start ? *pair_start : v.domain().lo;
        pair = kg_pair_numeric(v, energy, start, pair_step, mass, c, hbar);
    }
    if (corrupt == "phi1") pair = corrupt_phi1(pair);
    return pair;
}

LawTag Scenario::law_tag() const {
    if (law == "energy") return LawTag::EnergyLaw;
    if (law == "bohm") return LawTag::BohmForm;
    return LawTag::FloydJacobi;
}

std::string scenario_hash(const Scenario& scenario, std::uint64_t seed) {
    return fnv1a64_hex(scenario.canonical + "seed=" + std::to_string(seed));
}

namespace {

std::uint64_t effective_seed(const Scenario& s, const RunOptions& o) {
    return o.seed ? *o.seed : s.seed;
}

// deterministic uniform doubles: 53-bit mantissa straight from the engine
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform_in(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file " + path.string());
    out << content;
    if (!out.good())
        throw std::runtime_error("write failed for " + path.string());
}

std::string report_json(const ResidualReport& r, const std::string& hash,
                        std::uint64_t seed) {
    nlohmann::json j;
    j["grid"] = r.grid;
    j["residuals"] = r.residuals;
    j["max"] = r.max;
    j["rms"] = r.rms;
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    j["scenario"] = hash;
    j["seed"] = seed;
    return j.dump(2) + "\n";
}

std::string patch_sidecar(const std::string& sidecar, std::uint64_t seed,
                          const std::string& name) {
    nlohmann::json j = nlohmann::json::parse(sidecar);
    j["seed"] = seed;
    if (!name.empty()) j["name"] = name;
    return j.dump(2) + "\n";
}

Grid1D verify_grid_1d(const Scenario& s, const SolutionPair& pair,
                      std::size_t points = 500) {
    if (pair.grid) {
        const double lo = pair.domain.lo + 5.0 * pair.grid->h;
        const double hi = pair.domain.hi - 5.0 * pair.grid->h;
        return Grid1D::uniform(lo, hi, points);
    }
    const double k = pair.wronskian; // free-style pairs: W = k
    const double lambda = 2.0 * std::numbers::pi / std::max(k, 1e-12);
    return Grid1D::uniform(s.x0 - 5.0 * lambda, s.x0 + 5.0 * lambda, points);
}

double max_abs_potential(const Potential& v, const Grid1D& grid) {
    double m = 0.0;
    for (double x : grid.points()) m = std::max(m, std::fabs(v(x)));
    return m;
}

struct NamedReport {
    std::string name;
    ResidualReport report;
};

int emit_reports(const std::vector<NamedReport>& reports, const Scenario& s,
                 const RunOptions& o, std::ostream& log) {
    const std::uint64_t seed = effective_seed(s, o);
    const std::string hash = scenario_hash(s, seed);
    std::filesystem::create_directories(o.out_dir);
    bool all_pass = true;
    for (const auto& [name, report] : reports) {
        const auto path = std::filesystem::path(o.out_dir) / (name + ".json");
        write_file(path, report_json(report, hash, seed));
        log << name << ": " << (report.pass ? "pass" : "FAIL")
            << " (max " << report.max << ", tolerance " << report.tolerance
            << ") -> " << path.string() << "\n";
        all_pass = all_pass && report.pass;
    }
    return all_pass ? 0 : 1;
}

std::vector<std::pair<double, double>> draw_ab(std::mt19937_64& rng,
                                               const SweepSpec& sweep,
                                               std::size_t count) {
    std::vector<std::pair<double, double>> ab;
    ab.reserve(count);
    while (ab.size() < count) {
        const double a = uniform_in(rng, sweep.a_min, sweep.a_max);
        const double b = uniform_in(rng, sweep.b_min, sweep.b_max);
        if (std::fabs(a) < 1e-3) continue; // the recombination needs a != 0
        ab.emplace_back(a, b);
    }
    return ab;
}

ResidualReport worst_case(const std::vector<ResidualReport>& reports,
                          double tolerance) {
    std::vector<double> grid = reports.front().grid;
    std::vector<double> worst(grid.size(), 0.0);
    for (const auto& r : reports)
        for (std::size_t i = 0; i < worst.size(); ++i)
            worst[i] = std::max(worst[i], std::fabs(r.residuals[i]));
    return ResidualReport::from_values(std::move(grid), std::move(worst),
                                       tolerance);
}

int verify_laws1d(const Scenario& s, const RunOptions& o, std::ostream& log) {
    const SolutionPair pair = s.build_pair();
    const Grid1D grid = verify_grid_1d(s, pair);
    const double scale = o.tolerance_scale;
    const double vmax = max_abs_potential(pair.potential, grid);
    const double qhje_tol =
        scale * 1e-6 * std::max({std::fabs(pair.energy), vmax, 1e-6});
    const double cont_tol = scale * 1e-8;
    const double se_tol =
        scale * 1e-8 * std::max(std::fabs(pair.energy), std::max(vmax, 1e-12));

    std::vector<NamedReport> reports;
    const ReducedAction1D action(pair, s.a, s.b, s.lambda);
    reports.push_back({"qhje_report", action.qhje_residual(grid, qhje_tol)});
    reports.push_back(
        {"continuity_report", action.continuity_residual(grid, cont_tol)});
    if (pair.grid) {
        reports.push_back({"stationary_phi1_report",
                           se_residual(pair, 1, grid, se_tol)});
        reports.push_back({"stationary_phi2_report",
                           se_residual(pair, 2, grid, se_tol)});
    }

    if (s.sweep.count > 0) {
        std::mt19937_64 rng(effective_seed(s, o));
        const auto ab = draw_ab(rng, s.sweep, s.sweep.count);
        std::vector<ResidualReport> qs, cs;
        for (const auto& [a, b] : ab) {
            const ReducedAction1D member(pair, a, b, s.lambda);
            qs.push_back(member.qhje_residual(grid, qhje_tol));
            cs.push_back(member.continuity_residual(grid, cont_tol));
        }
        reports.push_back({"qhje_sweep_report", worst_case(qs, qhje_tol)});
        reports.push_back(
            {"continuity_sweep_report", worst_case(cs, cont_tol)});
    }
    return emit_reports(reports, s, o, log);
}

int verify_hydrogen2d(const Scenario& s, const RunOptions& o, std::ostream& log) {
    const Hydrogen2DLevel level = hydrogen_level(s.n, s.l);
    const double rho_max = 12.0;
    const RadialPair pair(level, s.rho0, 1e-3, rho_max);
    const double scale = o.tolerance_scale;

    std::vector<NamedReport> reports;
    {
        const Grid1D grid =
            Grid1D::uniform(std::max(0.2, 2.0 * s.rho0), 10.0, 200);
        std::vector<double> resid;
        resid.reserve(grid.size());
        for (double rho : grid.points())
            resid.push_back(pair.wronskian(rho) * rho - 1.0); // relative to 1/rho
        reports.push_back(
            {"wronskian_report",
             ResidualReport::from_values(grid.points(), std::move(resid),
                                         scale * 1e-6)});
    }

    if (level.n == 0 && level.l == 0) {
        // angular deadlock across random constant draws
        std::mt19937_64 rng(effective_seed(s, o));
        const std::size_t count = s.sweep.count > 0 ? s.sweep.count : 8;
        const Grid1D rgrid = Grid1D::uniform(0.15, 5.0, 64);
        std::vector<double> worst(rgrid.size(), 0.0);
        std::size_t drawn = 0;
        while (drawn < count) {
            Constants2D k;
            k.nu3 = uniform_in(rng, -2.0, 2.0);
            k.mu1 = uniform_in(rng, -2.0, 2.0);
            k.mu3 = uniform_in(rng, -2.0, 2.0);
            if (std::fabs(k.mu1 * k.nu3 - k.mu3) < 0.05) continue;
            ++drawn;
            const ReducedAction2D action(pair, k, s.hbar);
            for (std::size_t i = 0; i < rgrid.size(); ++i) {
                const auto [rd, td] =
                    action.bohm_velocity(rgrid.points()[i], 0.7);
                (void)rd;
                worst[i] = std::max(worst[i], std::fabs(td));
            }
        }
        reports.push_back(
            {"deadlock_report",
             ResidualReport::from_values(rgrid.points(), std::move(worst),
                                         scale * 1e-15)});

        // energy-law post-hoc residual along the integrated radius
        const ReducedAction2D action(pair, s.constants, s.hbar);
        if (action.motion_coefficient() != 0.0) {
            const PolarTrajectory traj =
                integrate_polar(action, LawTag::EnergyLaw, s.r_init,
                                s.theta_init, s.t0, s.t1, s.controls);
            std::vector<double> ts, resid;
            for (const auto& sample : traj.samples) {
                ts.push_back(sample.t);
                const double v = -1.0 / sample.r;
                resid.push_back(sample.r_dot *
                                    action.ds0_dr(sample.r, s.theta_init) -
                                2.0 * (level.energy - v));
            }
            reports.push_back(
                {"radial_law_report",
                 ResidualReport::from_values(std::move(ts), std::move(resid),
                                             scale * 1e-6 *
                                                 std::fabs(level.energy))});
        } else {
            log << "radial_law_report: skipped (degenerate constants)\n";
        }
    }
    return emit_reports(reports, s, o, log);
}

int verify_relativistic(const Scenario& s, const RunOptions& o,
                        std::ostream& log) {
    const RelSetup setup(s.build_potential(), s.build_rel_pair(), s.energy,
                         s.mass, s.c, s.a, s.b, s.lambda);
    const double scale = o.tolerance_scale;
    const double mc2 = s.mass * s.c * s.c;

    // verification window: classically allowed section of the 1-D grid
    const Grid1D raw = verify_grid_1d(s, setup.action().pair());
    std::vector<double> pts;
    for (double x : raw.points())
        if (setup.classically_allowed(x)) pts.push_back(x);
    if (pts.size() < 5)
        throw std::invalid_argument(
            "relativistic verify: no classically allowed window on the grid");
    const Grid1D grid(pts);

    std::vector<NamedReport> reports;
    reports.push_back({"rel_qhje_report",
                       rel_qhje_residual(setup, grid, scale * 1e-8 * mc2)});
    reports.push_back(
        {"rel_continuity_report",
         rel_continuity_residual(setup, grid, scale * 1e-8)});

    {
        std::vector<double> chain, dtau_bounds;
        for (double x : grid.points()) {
            const double lab = rel_law_lab(setup, x);
            const double proper = rel_law_proper(setup, x);
            const double dtau = rel_dtau_dt(setup, x, lab);
            chain.push_back(lab - proper * dtau);
            dtau_bounds.push_back(std::max(0.0, dtau - 1.0) +
                                  std::max(0.0, -dtau));
        }
        reports.push_back(
            {"chain_report",
             ResidualReport::from_values(grid.points(), std::move(chain),
                                         scale * 1e-8 * s.c)});
        reports.push_back(
            {"dtau_report",
             ResidualReport::from_values(grid.points(), std::move(dtau_bounds),
                                         scale * 1e-12)});
    }

    if (s.sweep.count > 0) {
        std::mt19937_64 rng(effective_seed(s, o));
        const auto ab = draw_ab(rng, s.sweep, s.sweep.count);
        std::vector<ResidualReport> qs;
        for (const auto& [a, b] : ab) {
            const RelSetup member(s.build_potential(), s.build_rel_pair(),
                                  s.energy, s.mass, s.c, a, b, s.lambda);
            qs.push_back(
                rel_qhje_residual(member, grid, scale * 1e-8 * mc2));
        }
        reports.push_back(
            {"rel_qhje_sweep_report", worst_case(qs, scale * 1e-8 * mc2)});
    }
    return emit_reports(reports, s, o, log);
}

// SI conversion factors (hydrogen output only)
constexpr double kBohrMeters = 5.29177210903e-11;
constexpr double kAtomicSeconds = 2.4188843265857e-17;
constexpr double kHartreeJoules = 4.3597447222071e-18;

PolarTrajectory to_si(PolarTrajectory traj) {
    for (auto& s : traj.samples) {
        s.t *= kAtomicSeconds;
        s.r *= kBohrMeters;
        s.r_dot *= kBohrMeters / kAtomicSeconds;
        s.theta_dot /= kAtomicSeconds;
    }
    if (traj.stall_location) *traj.stall_location *= kBohrMeters;
    if (traj.stall_time) *traj.stall_time *= kAtomicSeconds;
    traj.energy *= kHartreeJoules;
    return traj;
}

} // namespace

int run_verify(const Scenario& s, const RunOptions& o, std::ostream& log) {
    if (s.module == "laws1d") return verify_laws1d(s, o, log);
    if (s.module == "hydrogen2d") return verify_hydrogen2d(s, o, log);
    return verify_relativistic(s, o, log);
}

int run_simulate(const Scenario& s, const RunOptions& o, std::ostream& log) {
    if (s.module != "laws1d")
        throw ConfigError("simulate drives the 1-D module; scenario.module is '" +
                              s.module + "'",
                          "scenario.module", 0);
    const std::uint64_t seed = effective_seed(s, o);
    const std::string hash = scenario_hash(s, seed);
    const SolutionPair pair = s.build_pair();
    const LawOfMotion law{s.law_tag(), ReducedAction1D(pair, s.a, s.b, s.lambda)};
    const Trajectory traj =
        integrate_trajectory(law, s.x0, s.t0, s.t1, s.controls);

    std::filesystem::create_directories(o.out_dir);
    const auto dir = std::filesystem::path(o.out_dir);
    std::ostringstream csv;
    write_trajectory_csv(csv, traj, hash);
    write_file(dir / "trajectory.csv", csv.str());
    write_file(dir / "trajectory.json",
               patch_sidecar(trajectory_sidecar_json(traj, hash), seed, s.name));
    log << "trajectory: " << termination_name(traj.termination) << ", "
        << traj.samples.size() << " samples -> "
        << (dir / "trajectory.csv").string() << "\n";
    return 0;
}

int run_hydrogen2d(const Scenario& s, const RunOptions& o, std::ostream& log) {
    if (s.module != "hydrogen2d")
        throw ConfigError("hydrogen2d needs scenario.module = hydrogen2d",
                          "scenario.module", 0);
    if (s.law == "floyd")
        throw ConfigError("hydrogen2d supports law = energy | bohm",
                          "physics.law", 0);
    const std::uint64_t seed = effective_seed(s, o);
    const std::string hash = scenario_hash(s, seed);
    const Hydrogen2DLevel level = hydrogen_level(s.n, s.l);
    const RadialPair pair(level, s.rho0);
    const ReducedAction2D action(pair, s.constants, s.hbar);
    PolarTrajectory traj = integrate_polar(action, s.law_tag(), s.r_init,
                                           s.theta_init, s.t0, s.t1, s.controls);
    if (s.units == "si") traj = to_si(traj);

    std::filesystem::create_directories(o.out_dir);
    const auto dir = std::filesystem::path(o.out_dir);
    std::ostringstream csv;
    write_polar_csv(csv, traj, hash);
    write_file(dir / "hydrogen.csv", csv.str());
    write_file(dir / "hydrogen.json",
               patch_sidecar(polar_sidecar_json(traj, hash), seed, s.name));
    log << "hydrogen trajectory: " << termination_name(traj.termination) << ", "
        << traj.samples.size() << " samples -> "
        << (dir / "hydrogen.csv").string() << "\n";
    return 0;
}

int run_relativistic(const Scenario& s, const RunOptions& o, std::ostream& log) {
    if (s.module != "relativistic")
        throw ConfigError("relativistic needs scenario.module = relativistic",
                          "scenario.module", 0);
    const std::uint64_t seed = effective_seed(s, o);
    const std::string hash = scenario_hash(s, seed);
    const RelSetup setup(s.build_potential(), s.build_rel_pair(), s.energy,
                         s.mass, s.c, s.a, s.b, s.lambda);
    const RelTrajectory traj =
        integrate_rel_lab(setup, s.x0, s.t0, s.t1, s.controls);

    std::filesystem::create_directories(o.out_dir);
    const auto dir = std::filesystem::path(o.out_dir);
    std::ostringstream csv;
    write_rel_csv(csv, traj, hash);
    write_file(dir / "relativistic.csv", csv.str());
    write_file(dir / "relativistic.json",
               patch_sidecar(rel_sidecar_json(traj, hash), seed, s.name));
    log << "relativistic trajectory: " << termination_name(traj.termination)
        << ", " << traj.samples.size() << " samples -> "
        << (dir / "relativistic.csv").string() << "\n";
    return 0;
}

int run_sweep(const Scenario& s, const RunOptions& o, std::ostream& log) {
    if (s.module != "laws1d")
        throw ConfigError("sweep drives the 1-D module; scenario.module is '" +
                              s.module + "'",
                          "scenario.module", 0);
    if (s.sweep.count < 3)
        throw ConfigError("sweep.count must be at least 3", "sweep.count", 0);

    const std::uint64_t seed = effective_seed(s, o);
    const std::string hash = scenario_hash(s, seed);
    const SolutionPair pair = s.build_pair();

    std::mt19937_64 rng(seed);
    const auto ab = draw_ab(rng, s.sweep, s.sweep.count);
    const TrajectoryFamily family =
        integrate_family(pair, s.law_tag(), ab, s.x0, s.t0, s.t1, s.controls);

    std::filesystem::create_directories(o.out_dir);
    const auto dir = std::filesystem::path(o.out_dir);
    for (std::size_t i = 0; i < family.members.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "member_%03zu.csv", i);
        std::ostringstream csv;
        write_trajectory_csv(csv, family.members[i], hash);
        write_file(dir / name, csv.str());
    }

    const std::vector<double> nodes = detect_nodes(family);
    const double lambda =
        2.0 * std::numbers::pi * pair.hbar /
        std::sqrt(2.0 * pair.mass * std::max(std::fabs(pair.energy), 1e-12));

    nlohmann::json j;
    j["scenario"] = hash;
    j["seed"] = seed;
    if (!s.name.empty()) j["name"] = s.name;
    j["law"] = law_tag_name(s.law_tag());
    j["x0"] = s.x0;
    j["energy"] = pair.energy;
    j["members"] = nlohmann::json::array();
    for (const auto& [a, b] : ab) j["members"].push_back({{"a", a}, {"b", b}});
    j["nodes"] = nodes;
    // exploratory context only: no spacing theorem is asserted
    j["de_broglie_wavelength"] = lambda;
    j["half_wavelength"] = lambda / 2.0;
    write_file(dir / "nodes.json", j.dump(2) + "\n");

    log << "sweep: " << family.members.size() << " members, " << nodes.size()
        << " common-point candidates -> " << (dir / "nodes.json").string()
        << "\n";
    return 0;
}

} // namespace qmlab
