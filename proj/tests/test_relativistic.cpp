#include <catch2/catch_amalgamated.hpp>

#include "qmlab/errors.hpp"
#include "qmlab/finite_difference.hpp"
#include "qmlab/relativistic.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace qmlab;

namespace {

double uniform01(std::mt19937_64& rng) {
    return (double)(rng() >> 11) * 0x1.0p-53;
}

std::pair<double, double> draw_ab(std::mt19937_64& rng) {
    double a = 0.3 + 2.7 * uniform01(rng);
    if (uniform01(rng) < 0.5) a = -a;
    double b = -2.0 + 4.0 * uniform01(rng);
    return {a, b};
}

// smooth step V(x) = V0 / (1 + e^{-x/w}) as a dense table
Potential smooth_step(double v0, double w, Interval dom) {
    std::vector<double> xs, vs;
    for (int i = 0; i <= 1600; ++i) {
        double x = dom.lo + (dom.hi - dom.lo) * i / 1600.0;
        xs.push_back(x);
        vs.push_back(v0 / (1.0 + std::exp(-x / w)));
    }
    return Potential::tabulated(xs, vs);
}

} // namespace

TEST_CASE("effective potential and free pair", "[rel]") {
    // E = 2, m = c = 1: gap = 3, k = sqrt(3)
    auto ueff = kg_effective_potential(Potential::free_space(), 2.0, 1.0, 1.0);
    CHECK(ueff(0.7) == Catch::Approx(-1.5).epsilon(1e-14)); // (1 - 4)/2
    CHECK(ueff.derivative(0.7) == 0.0);

    auto pair = kg_pair_free(2.0, 1.0, 1.0);
    CHECK(pair.analytic);
    CHECK(pair.energy == 0.0); // zero-energy effective problem
    CHECK(pair.wronskian == Catch::Approx(std::sqrt(3.0)).epsilon(1e-15));
    double k = std::sqrt(3.0);
    CHECK(pair.phi1(0.4) == Catch::Approx(std::sin(k * 0.4)).margin(1e-15));
    CHECK(pair.phi2(0.4) == Catch::Approx(std::cos(k * 0.4)).margin(1e-15));

    CHECK_THROWS_AS(kg_pair_free(1.0, 1.0, 1.0), std::invalid_argument); // E = mc^2
    CHECK_THROWS_AS(kg_pair_free(0.5, 1.0, 1.0), std::invalid_argument); // below

    // the effective stationary equation holds to the FD-differentiation floor
    auto g = Grid1D::uniform(-4.0, 4.0, 201);
    for (int which : {1, 2}) {
        auto rep = se_residual(pair, which, g, 1e-8);
        CHECK(rep.pass);
        CHECK(rep.max <= 1e-8);
    }
}

TEST_CASE("free velocities in closed form", "[rel]") {
    // E = 2 m c^2: v_lab = p c^2 / E = sqrt(3)/2 c, dx/dtau = sqrt(3) c
    auto s = RelSetup::free_setup(2.0, 1.0, 1.0);
    for (double x : {-3.0, 0.0, 1.9}) {
        CHECK(std::fabs(s.gap(x) - 3.0) <= 1e-14);
        CHECK(s.classically_allowed(x));
        CHECK(std::fabs(rel_law_proper(s, x) - std::sqrt(3.0)) <= 1e-12);
        CHECK(std::fabs(rel_law_lab(s, x) - std::sqrt(3.0) / 2.0) <= 1e-10);
        CHECK(std::fabs(xhat_factor_rel(s, x) - 1.0) <= 1e-12);
        // dtau/dt along the lab law = mc^2/(E - V) = 1/2
        double dtau = rel_dtau_dt(s, x, rel_law_lab(s, x));
        CHECK(std::fabs(dtau - 0.5) <= 1e-12);
    }
}

TEST_CASE("chain identity lab = proper * dtau/dt", "[rel]") {
    std::mt19937_64 rng(31337);
    auto g = Grid1D::uniform(-5.0, 5.0, 200);
    for (int trial = 0; trial < 10; ++trial) {
        auto [a, b] = draw_ab(rng);
        auto s = RelSetup::free_setup(2.0, 1.0, 1.0, 1.0, a, b);
        for (double x : g.points()) {
            double lab = rel_law_lab(s, x);
            double proper = rel_law_proper(s, x);
            double dtau = rel_dtau_dt(s, x, lab);
            CHECK(std::fabs(lab - proper * dtau) <= 1e-8 * s.c());
            CHECK(dtau > 0.0);
            CHECK(dtau <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("relativistic motion identity and continuity", "[rel]") {
    std::mt19937_64 rng(555);
    auto g = Grid1D::uniform(-6.0, 6.0, 300);
    for (int trial = 0; trial < 10; ++trial) {
        auto [a, b] = draw_ab(rng);
        auto s = RelSetup::free_setup(2.0, 1.0, 1.0, 1.0, a, b);
        auto qr = rel_qhje_residual(s, g);
        CHECK(qr.pass);
        CHECK(qr.max <= 1e-8); // m c^2 = 1 here
        auto cr = rel_continuity_residual(s, g);
        CHECK(cr.pass);
        CHECK(cr.max <= 1e-8);
    }
}

TEST_CASE("numeric setup over a smooth barrier", "[rel]") {
    double E = 2.0, m = 1.0, c = 1.0;
    auto step = smooth_step(0.3, 0.25, {-8.0, 8.0});
    auto pair = kg_pair_numeric(step, E, -8.0, 0.002, m, c);
    RelSetup s(step, pair, E, m, c, 1.2, -0.3);

    // allowed everywhere: (E - V)^2 >= 1.7^2 > 1
    auto g = Grid1D::uniform(-7.5, 7.5, 280);
    for (double x : g.points()) CHECK(s.classically_allowed(x));

    auto qr = rel_qhje_residual(s, g, 1e-6 * m * c * c);
    CHECK(qr.pass);

    // chain identity away from the step
    auto far = Grid1D::uniform(2.0, 6.0, 80);
    for (double x : far.points()) {
        double lab = rel_law_lab(s, x);
        double dtau = rel_dtau_dt(s, x, lab);
        CHECK(std::fabs(lab - rel_law_proper(s, x) * dtau) <= 1e-6 * c);
        // and dtau/dt = mc^2/(E - V) along the law
        CHECK(std::fabs(dtau - m * c * c / (E - step(x))) <= 1e-6);
    }
}

TEST_CASE("threshold guard", "[rel]") {
    // linear ramp driving E - V through mc^2: x crosses the threshold at
    // E - x = 1, i.e. x = 1 for E = 2
    auto ramp = Potential::linear(1.0, {-4.0, 3.0});
    double E = 2.0, m = 1.0, c = 1.0;
    auto pair = kg_pair_numeric(ramp, E, -4.0, 0.002, m, c);
    RelSetup s(ramp, pair, E, m, c, 1.0, 0.0);

    CHECK(s.classically_allowed(0.0));
    CHECK_FALSE(s.classically_allowed(1.0));
    CHECK_FALSE(s.classically_allowed(2.0));
    CHECK_THROWS_AS(rel_law_proper(s, 1.0), std::domain_error);
    CHECK_THROWS_AS(rel_law_lab(s, 1.5), std::domain_error);
    CHECK_THROWS_AS(xhat_factor_rel(s, 2.0), std::domain_error);
}

TEST_CASE("deviation from the slow limit scales as 1/c^2", "[rel]") {
    // fixed kinetic energy E_nr = 1/2, so v_nr = 1; E = mc^2 + E_nr
    double e_nr = 0.5, m = 1.0;
    double v_nr = std::sqrt(2.0 * e_nr / m);
    auto dev = [&](double c) {
        auto s = RelSetup::free_setup(m * c * c + e_nr, m, c);
        return std::fabs(rel_law_lab(s, 0.0) - v_nr);
    };
    double d1 = dev(10.0), d2 = dev(100.0);
    double slope = (std::log(d2) - std::log(d1)) / (std::log(100.0) - std::log(10.0));
    CHECK(slope > -2.2);
    CHECK(slope < -1.8);
}

TEST_CASE("lab trajectory carries its proper time", "[rel][traj]") {
    auto s = RelSetup::free_setup(2.0, 1.0, 1.0);
    auto traj = integrate_rel_lab(s, -1.0, 0.0, 6.0);
    REQUIRE(traj.termination == TerminationTag::SpanComplete);
    double v = std::sqrt(3.0) / 2.0;
    for (const auto& smp : traj.samples) {
        CHECK(std::fabs(smp.x - (-1.0 + v * smp.t)) <= 1e-7);
        CHECK(std::fabs(smp.v - v) <= 1e-8);
        // dtau/dt = 1/2 for the free setup at E = 2 mc^2
        CHECK(std::fabs(smp.tau - 0.5 * smp.t) <= 1e-7);
    }
    CHECK(traj.samples.front().t == 0.0);
    CHECK(traj.samples.back().t == 6.0);
}

TEST_CASE("lab trajectory stops at the classical threshold", "[rel][traj]") {
    auto ramp = Potential::linear(1.0, {-4.0, 3.0});
    double E = 2.0;
    auto pair = kg_pair_numeric(ramp, E, -4.0, 0.002, 1.0, 1.0);
    RelSetup s(ramp, pair, E, 1.0, 1.0, 1.0, 0.0);

    auto traj = integrate_rel_lab(s, -1.0, 0.0, 500.0);
    CHECK(traj.termination != TerminationTag::SpanComplete);
    // never past the threshold at x = 1
    for (const auto& smp : traj.samples) CHECK(smp.x <= 1.0 + 1e-6);
    // tau is monotone and subluminal: tau <= t
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        CHECK(traj.samples[i].tau >= traj.samples[i - 1].tau);
        CHECK(traj.samples[i].tau <= traj.samples[i].t + 1e-12);
    }

    CHECK_THROWS_AS(integrate_rel_lab(s, 1.5, 0.0, 1.0), std::domain_error);
}

TEST_CASE("separable contraction residual", "[rel]") {
    std::vector<RelSetup> axes{RelSetup::free_setup(2.0, 1.0, 1.0),
                               RelSetup::free_setup(3.0, 1.0, 1.0)};
    CHECK(std::fabs(rel_contraction_residual(axes, {0.3, -0.8})) <= 1e-10);
    CHECK(std::fabs(rel_contraction_residual(axes, {2.0, 5.0})) <= 1e-10);
    CHECK_THROWS_AS(rel_contraction_residual(axes, {1.0}), std::invalid_argument);
}

TEST_CASE("rel csv and sidecar", "[rel][io]") {
    auto s = RelSetup::free_setup(2.0, 1.0, 1.0);
    TrajectoryControls c;
    c.samples = 9;
    auto traj = integrate_rel_lab(s, 0.0, 0.0, 2.0, c);
    std::ostringstream out;
    write_rel_csv(out, traj, "beadfeed00000000");
    auto text = out.str();
    CHECK(text.rfind("# scenario beadfeed00000000\n", 0) == 0);
    CHECK(text.find("t,x,v,law,a,b,E,tau\n") != std::string::npos);
    CHECK(text.find(",rel-lab,") != std::string::npos);
    CHECK(text.find('\r') == std::string::npos);

    auto side = rel_sidecar_json(traj, "beadfeed00000000");
    CHECK(side.find("\"scenario\": \"beadfeed00000000\"") != std::string::npos);
    CHECK(side.find("\"termination\": \"span-complete\"") != std::string::npos);
}

TEST_CASE("setup validation", "[rel]") {
    CHECK_THROWS_AS(RelSetup::free_setup(2.0, 1.0, 1.0, 1.0, 0.0, 0.0),
                    std::invalid_argument); // a = 0
    CHECK_THROWS_AS(RelSetup::free_setup(2.0, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(RelSetup::free_setup(2.0, 1.0, 0.0), std::invalid_argument);
    // the negative-energy branch is legitimate as long as the gap is open
    auto anti = RelSetup::free_setup(-2.0, 1.0, 1.0);
    CHECK(anti.gap(0.0) == Catch::Approx(3.0).epsilon(1e-14));
}
