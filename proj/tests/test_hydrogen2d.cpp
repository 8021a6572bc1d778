#include <catch2/catch_amalgamated.hpp>

#include "qmlab/errors.hpp"
#include "qmlab/finite_difference.hpp"
#include "qmlab/hydrogen2d.hpp"
#include "qmlab/special_functions.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace qmlab;

namespace {

double uniform01(std::mt19937_64& rng) {
    return (double)(rng() >> 11) * 0x1.0p-53;
}

Constants2D ground_constants(double nu3, double mu1, double mu3) {
    Constants2D k;
    k.nu3 = nu3;
    k.mu1 = mu1;
    k.mu3 = mu3;
    return k;
}

} // namespace

TEST_CASE("bound levels are exact rationals of the half-integer", "[hydro]") {
    for (int n = 0; n <= 5; ++n) {
        for (int l = -n; l <= n; ++l) {
            auto lev = hydrogen_level(n, l);
            double half = n + 0.5;
            CHECK(lev.alpha == 1.0 / half);
            CHECK(lev.energy == -0.5 / (half * half));
            CHECK(lev.a0 == 1.0);
            CHECK(lev.e_ion == 0.5);
        }
    }
    auto ground = hydrogen_level(0, 0);
    CHECK(ground.alpha == 2.0);
    CHECK(ground.energy == -2.0);         // -4 E_I
    CHECK(ground.energy == -4.0 * ground.e_ion);

    CHECK_THROWS_AS(hydrogen_level(-1, 0), std::invalid_argument);
    CHECK_THROWS_AS(hydrogen_level(1, 2), std::invalid_argument);
    CHECK_THROWS_AS(hydrogen_level(2, -3), std::invalid_argument);
}

TEST_CASE("first radial solution in closed form", "[hydro]") {
    auto g = hydrogen_level(0, 0);
    auto e10 = hydrogen_level(1, 0);
    auto e11 = hydrogen_level(1, 1);
    for (double rho : {0.05, 0.3, 0.75, 1.0, 2.5, 6.0}) {
        CHECK(std::fabs(radial_r1(g, rho) - std::exp(-2.0 * rho)) <= 1e-14);
        CHECK(std::fabs(radial_r1(e10, rho) -
                        std::exp(-2.0 * rho / 3.0) * (1.0 - 4.0 * rho / 3.0)) <= 1e-14);
        CHECK(std::fabs(radial_r1(e11, rho) - rho * std::exp(-2.0 * rho / 3.0)) <= 1e-14);
    }
    CHECK(std::fabs(radial_r1(e11, 1.0) - std::exp(-2.0 / 3.0)) <= 1e-15);

    // derivative consistent with finite differences
    for (double rho : {0.2, 0.8, 1.7, 4.0}) {
        for (const auto* lev : {&g, &e10, &e11}) {
            double fd = fd_derivative([&](double u) { return radial_r1(*lev, u); }, rho, 1);
            CHECK(std::fabs(radial_r1_prime(*lev, rho) - fd) <= 1e-8);
        }
    }
}

TEST_CASE("first radial solution satisfies the radial equation", "[hydro]") {
    for (auto [n, l] : {std::pair{0, 0}, {1, 0}, {1, 1}, {2, 1}}) {
        auto lev = hydrogen_level(n, l);
        for (int i = 0; i <= 60; ++i) {
            double rho = 0.05 + (10.0 - 0.05) * i / 60.0;
            double fd2 = fd_derivative([&](double u) { return radial_r1(lev, u); }, rho, 2);
            double rhs = radial_ode_rhs(lev, rho, radial_r1(lev, rho),
                                        radial_r1_prime(lev, rho));
            CHECK(std::fabs(fd2 - rhs) <= 1e-8 * (1.0 + std::fabs(rhs)));
        }
    }
}

TEST_CASE("ground-state second solution equals its exponential-integral form",
          "[hydro]") {
    auto g = hydrogen_level(0, 0);
    double rho0 = 0.1;
    RadialPair pair(g, rho0, 1e-3, 12.0);
    for (double rho : {0.2, 0.5, 1.0, 2.0, 3.0}) {
        double want = std::exp(-2.0 * rho) *
                      (expint_ei(4.0 * rho) - expint_ei(4.0 * rho0));
        CHECK(std::fabs(radial_r2(g, rho, rho0) - want) <= 1e-8 * std::fabs(want));
        CHECK(std::fabs(pair.r2(rho) - want) <= 1e-8 * std::fabs(want));
    }
    CHECK(radial_r2(g, rho0, rho0) == 0.0);
    // the pair answers from dense-output tables: ~1e-11 interpolation floor
    CHECK(pair.r2(rho0) == Catch::Approx(0.0).margin(1e-9));
    // seeded slope 1/(rho0 R1(rho0))
    double slope = 1.0 / (rho0 * std::exp(-2.0 * rho0));
    CHECK(std::fabs(pair.r2_prime(rho0) - slope) <= 1e-7 * slope);
}

TEST_CASE("second solution satisfies the radial equation", "[hydro]") {
    auto lev = hydrogen_level(1, 1);
    RadialPair pair(lev, 0.1, 1e-3, 12.0);
    for (int i = 0; i <= 40; ++i) {
        double rho = 0.2 + (5.0 - 0.2) * i / 40.0;
        double fd2 = fd_derivative([&](double u) { return pair.r2(u); }, rho, 2);
        double rhs = radial_ode_rhs(lev, rho, pair.r2(rho), pair.r2_prime(rho));
        CHECK(std::fabs(fd2 - rhs) <= 1e-6 * (1.0 + std::fabs(rhs)));
    }
}

TEST_CASE("radial wronskian is 1/rho across the whole window", "[hydro]") {
    // includes (1,0), whose R1 vanishes at rho = 3/4: the initial-value
    // continuation keeps the pair regular there
    for (auto [n, l] : {std::pair{0, 0}, {1, 0}, {1, 1}}) {
        RadialPair pair(hydrogen_level(n, l), 0.1, 1e-3, 12.0);
        for (int i = 0; i <= 49; ++i) {
            double rho = 0.2 + (10.0 - 0.2) * i / 49.0;
            CHECK(std::fabs(pair.wronskian(rho) * rho - 1.0) <= 1e-6);
        }
    }
}

TEST_CASE("anchor must avoid zeros of R1", "[hydro]") {
    CHECK_THROWS_AS(RadialPair(hydrogen_level(1, 0), 0.75), std::invalid_argument);
    CHECK_THROWS_AS(RadialPair(hydrogen_level(0, 0), -0.2), std::invalid_argument);
    CHECK_THROWS_AS(RadialPair(hydrogen_level(0, 0), 0.0), std::invalid_argument);
}

TEST_CASE("anchor shift adds a multiple of R1", "[hydro]") {
    auto g = hydrogen_level(0, 0);
    RadialPair pair(g, 0.1, 1e-3, 12.0);
    double c = pair.shift_constant(0.3);
    // closed form: -(Ei(1.2) - Ei(0.4))
    double want = -(expint_ei(1.2) - expint_ei(0.4));
    CHECK(std::fabs(c - want) <= 1e-10 * std::fabs(want));

    auto moved = pair.with_rho0(0.3);
    CHECK(moved.rho0() == 0.3);
    for (double rho : {0.25, 0.6, 1.4, 3.2}) {
        double composed = pair.r2(rho) + c * pair.r1(rho);
        CHECK(std::fabs(moved.r2(rho) - composed) <= 1e-9 * (1.0 + std::fabs(composed)));
    }

    // a shift across a zero of R1 has no finite constant (the integrand is
    // non-integrable at the zero; the quadrature refuses one way or another)
    RadialPair excited(hydrogen_level(1, 0), 0.1, 1e-3, 12.0);
    CHECK_THROWS(excited.shift_constant(1.0));
}

TEST_CASE("reduced action rows and closed-form gradient", "[hydro][action]") {
    auto g = hydrogen_level(0, 0);
    RadialPair pair(g, 0.1, 1e-3, 12.0);
    auto k = ground_constants(0.8, 1.2, -0.5);
    ReducedAction2D act(pair, k);

    CHECK(act.ground_state());
    CHECK(act.numerator_row()[0] == 1.0);
    CHECK(act.denominator_row()[3] == 1.0);
    double coeff = k.mu1 * k.nu3 - k.mu3;
    CHECK(act.motion_coefficient() == Catch::Approx(coeff).epsilon(1e-15));

    for (double r : {0.2, 0.5, 1.1, 2.4}) {
        // H from the raw pair evaluations
        double r1 = pair.r1(r), r2 = pair.r2(r);
        double h = std::pow(r1 + k.nu3 * r2, 2) + std::pow(k.mu1 * r1 + k.mu3 * r2, 2);
        CHECK(std::fabs(act.ground_state_h(r) - h) <= 1e-12 * h);
        // dS0/dr = hbar (mu1 nu3 - mu3) / (r H); the identity trades the
        // Wronskian for 1/rho, so the numeric pair's W offset (~1e-10) is
        // the agreement floor
        double want = coeff / (r * h);
        CHECK(std::fabs(act.ds0_dr(r, 0.3) - want) <= 1e-8 * std::fabs(want));
        // theta derivative vanishes identically for l = 0
        CHECK(act.ds0_dtheta(r, 0.3) == 0.0);
        CHECK(act.bohm_velocity(r, 0.3).second == 0.0);
    }
}

TEST_CASE("gradient matches finite differences of S0", "[hydro][action]") {
    auto lev = hydrogen_level(1, 1);
    RadialPair pair(lev, 0.1, 1e-3, 12.0);
    Constants2D k;
    k.nu2 = 0.3;
    k.nu3 = -0.7;
    k.nu4 = 0.2;
    k.mu1 = 1.1;
    k.mu2 = -0.2;
    k.mu3 = 0.4;
    ReducedAction2D act(pair, k);
    CHECK_FALSE(act.ground_state());
    CHECK_THROWS_AS(act.ground_state_h(1.0), std::logic_error);

    for (auto [r, th] : {std::pair{0.8, 0.4}, {1.3, 0.9}, {2.1, -1.2}, {3.4, 2.8}}) {
        double fr = fd_derivative([&](double u) { return act.s0(u, th); }, r, 1);
        double ft = fd_derivative([&](double u) { return act.s0(r, u); }, th, 1);
        CHECK(std::fabs(act.ds0_dr(r, th) - fr) <= 1e-7 * (1.0 + std::fabs(fr)));
        CHECK(std::fabs(act.ds0_dtheta(r, th) - ft) <= 1e-7 * (1.0 + std::fabs(ft)));
        auto [rd, td] = act.bohm_velocity(r, th);
        CHECK(rd == Catch::Approx(act.ds0_dr(r, th)).epsilon(1e-14));
        CHECK(td == Catch::Approx(act.ds0_dtheta(r, th) / (r * r)).epsilon(1e-14));
    }
}

TEST_CASE("S0 is single-valued under a full angular turn", "[hydro][action]") {
    // cos/sin of l(theta + 2 pi) differ from cos/sin of l theta only by the
    // rounding of the shifted argument, so equality holds to ~1e-14, not
    // bitwise
    Constants2D k;
    k.nu2 = 0.4;
    k.nu3 = 0.6;
    k.mu1 = 1.3;
    k.mu3 = -0.2;
    for (auto [n, l] : {std::pair{1, 1}, {2, 2}, {1, -1}}) {
        RadialPair pair(hydrogen_level(n, l), 0.1, 1e-3, 12.0);
        ReducedAction2D act(pair, k);
        for (double th : {-2.0, 0.0, 0.7, 2.9}) {
            double s_lo = act.s0(1.4, th);
            double s_hi = act.s0(1.4, th + 2.0 * M_PI);
            CHECK(std::fabs(s_hi - s_lo) <= 1e-12);
        }
    }
    // for l = 0 the angle never enters: equality is exact
    RadialPair gp(hydrogen_level(0, 0), 0.1, 1e-3, 12.0);
    ReducedAction2D gact(gp, ground_constants(0.5, 1.0, 0.2));
    CHECK(gact.s0(1.0, 0.3) == gact.s0(1.0, 0.3 + 2.0 * M_PI));
}

TEST_CASE("branch tracking along a path", "[hydro][action]") {
    auto lev = hydrogen_level(1, 1);
    RadialPair pair(lev, 0.1, 1e-3, 12.0);
    Constants2D k;
    k.nu2 = -0.5;
    k.nu3 = 0.9;
    k.mu1 = 0.7;
    k.mu3 = 0.3;
    ReducedAction2D act(pair, k);

    std::vector<Polar> path;
    for (int i = 0; i <= 4000; ++i)
        path.push_back({1.2, 4.0 * M_PI * i / 4000.0});
    auto vals = act.s0_along_path(path);
    REQUIRE(vals.size() == path.size());
    CHECK(vals.front() == Catch::Approx(act.s0(1.2, 0.0)).margin(1e-12));
    for (std::size_t i = 1; i < vals.size(); ++i)
        CHECK(std::fabs(vals[i] - vals[i - 1]) <= 0.2); // no pi-sized branch jumps
}

TEST_CASE("anchor covariance of the action", "[hydro][action]") {
    auto g = hydrogen_level(0, 0);
    RadialPair pair(g, 0.1, 1e-3, 12.0);
    auto k = ground_constants(0.8, 1.2, -0.5);
    ReducedAction2D act(pair, k);
    auto moved = act.with_rho0(0.3);

    CHECK(moved.pair().rho0() == 0.3);
    // S0 and the gradient are unchanged at every probe
    for (double r : {0.2, 0.7, 1.5, 3.0}) {
        CHECK(std::fabs(moved.s0(r, 0.1) - act.s0(r, 0.1)) <= 1e-8);
        CHECK(std::fabs(moved.ds0_dr(r, 0.1) - act.ds0_dr(r, 0.1)) <=
              1e-8 * (1.0 + std::fabs(act.ds0_dr(r, 0.1))));
    }
    // the bare coefficient is basis-dependent: under R2 -> R2 + c R1 with the
    // numerator renormalized, it rescales by (1 - c nu3)^-2 — only its sign
    // and vanishing are invariant (the gradient above already is)
    double c = pair.shift_constant(0.3);
    double scale = (1.0 - c * k.nu3) * (1.0 - c * k.nu3);
    CHECK(std::fabs(moved.motion_coefficient() - act.motion_coefficient() / scale) <=
          1e-9 * std::fabs(act.motion_coefficient() / scale));

    // the refit constants reproduce the moved action from scratch
    auto refit = refit_ground_state_constants(k, c);
    CHECK(moved.constants().nu3 == Catch::Approx(refit.nu3).epsilon(1e-12));
    CHECK(moved.constants().mu1 == Catch::Approx(refit.mu1).epsilon(1e-12));
    CHECK(moved.constants().mu3 == Catch::Approx(refit.mu3).epsilon(1e-12));
    ReducedAction2D rebuilt(pair.with_rho0(0.3), refit);
    for (double r : {0.4, 1.1, 2.6})
        CHECK(std::fabs(rebuilt.s0(r, 0.0) - act.s0(r, 0.0)) <= 1e-8);

    // excited actions move covariantly too
    auto e11 = hydrogen_level(1, 1);
    RadialPair ep(e11, 0.1, 1e-3, 12.0);
    Constants2D ek;
    ek.nu2 = 0.3;
    ek.nu3 = -0.7;
    ek.mu1 = 1.1;
    ek.mu3 = 0.4;
    ReducedAction2D ea(ep, ek);
    auto em = ea.with_rho0(0.25);
    for (auto [r, th] : {std::pair{0.5, 0.2}, {1.4, 1.9}, {2.8, -0.6}})
        CHECK(std::fabs(em.s0(r, th) - ea.s0(r, th)) <= 1e-8);
}

TEST_CASE("random ground-state sets: angular deadlock, radial motion",
          "[hydro][action]") {
    auto g = hydrogen_level(0, 0);
    RadialPair pair(g, 0.1, 1e-3, 12.0);
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 10; ++trial) {
        double nu3 = -2.0 + 4.0 * uniform01(rng);
        double mu1 = -2.0 + 4.0 * uniform01(rng);
        double mu3 = -2.0 + 4.0 * uniform01(rng);
        if (std::fabs(mu1 * nu3 - mu3) < 0.05) {
            --trial;
            continue;
        }
        ReducedAction2D act(pair, ground_constants(nu3, mu1, mu3));
        bool moving = false;
        for (int i = 0; i <= 32; ++i) {
            double r = 0.15 + (5.0 - 0.15) * i / 32.0;
            auto [rd, td] = act.bohm_velocity(r, 0.7);
            CHECK(td == 0.0);                    // the angular deadlock
            if (std::fabs(rd) > 1e-12) moving = true;
        }
        CHECK(moving); // but the radial Bohm velocity is not identically zero
    }
}

TEST_CASE("degenerate constants freeze both laws", "[hydro][action]") {
    auto g = hydrogen_level(0, 0);
    RadialPair pair(g, 0.1, 1e-3, 12.0);
    // mu1 nu3 - mu3 = 0: numerator and denominator rows are proportional
    ReducedAction2D act(pair, ground_constants(0.5, 1.0, 0.5));
    CHECK(act.motion_coefficient() == 0.0);
    for (double r : {0.3, 1.0, 2.2}) CHECK(act.ds0_dr(r, 0.0) == 0.0);

    CHECK_THROWS_AS(integrate_polar(act, LawTag::EnergyLaw, 0.3, 0.0, 0.0, 1.0),
                    std::invalid_argument);
    auto frozen = integrate_polar(act, LawTag::BohmForm, 0.3, 0.0, 0.0, 1.0);
    CHECK(frozen.termination == TerminationTag::SpanComplete);
    for (const auto& s : frozen.samples) {
        CHECK(s.r == 0.3);
        CHECK(s.r_dot == 0.0);
    }
}

TEST_CASE("energy-law radial trajectory stalls at half the length unit",
          "[hydro][traj]") {
    auto g = hydrogen_level(0, 0);
    RadialPair pair(g, 0.1, 1e-3, 12.0);
    ReducedAction2D act(pair, ground_constants(0.8, 1.2, -0.5)); // coeff > 0
    double e0 = g.energy;

    // from below: E0 - V > 0, coeff > 0, so r grows toward the turning radius
    auto up = integrate_polar(act, LawTag::EnergyLaw, 0.25, 0.0, 0.0, 4000.0);
    CHECK(up.theta_undetermined);
    CHECK(up.termination == TerminationTag::Stalled);
    REQUIRE(up.stall_location.has_value());
    CHECK(std::fabs(*up.stall_location - 0.5) <= 1e-4);
    for (const auto& s : up.samples) {
        CHECK(std::isnan(s.theta));
        CHECK(std::isnan(s.theta_dot));
    }
    // post-hoc law residual from the samples
    for (const auto& s : up.samples) {
        if (s.r <= 0.0) continue;
        double resid = s.r_dot * act.ds0_dr(s.r, 0.0) - 2.0 * (e0 + 1.0 / s.r);
        CHECK(std::fabs(resid) <= 1e-6 * std::fabs(e0));
    }

    // from above: approaches the same radius downhill
    auto down = integrate_polar(act, LawTag::EnergyLaw, 0.8, 0.0, 0.0, 4000.0);
    CHECK(down.termination == TerminationTag::Stalled);
    REQUIRE(down.stall_location.has_value());
    CHECK(std::fabs(*down.stall_location - 0.5) <= 1e-4);

    // exact start on the turning radius: V(1/2) = -2 = E0 in floating point
    auto pinned = integrate_polar(act, LawTag::EnergyLaw, 0.5, 0.0, 0.0, 10.0);
    CHECK(pinned.termination == TerminationTag::Stalled);
    REQUIRE(pinned.stall_location.has_value());
    CHECK(*pinned.stall_location == 0.5);
    CHECK(*pinned.stall_time == 0.0);
}

TEST_CASE("bohm-form radial trajectory crosses the turning radius",
          "[hydro][traj]") {
    auto g = hydrogen_level(0, 0);
    RadialPair pair(g, 0.1, 1e-3, 12.0);
    ReducedAction2D act(pair, ground_constants(0.8, 1.2, -0.5));

    auto traj = integrate_polar(act, LawTag::BohmForm, 0.25, 1.1, 0.0, 40.0);
    CHECK_FALSE(traj.theta_undetermined);
    CHECK(traj.termination == TerminationTag::SpanComplete);
    bool crossed = false;
    for (const auto& s : traj.samples) {
        CHECK(s.theta == 1.1);    // frozen angle: the deadlock made visible
        CHECK(s.theta_dot == 0.0);
        CHECK(s.r_dot > 0.0);
        if (s.r > 0.52) crossed = true;
    }
    CHECK(crossed);
}

TEST_CASE("polar trajectory guards", "[hydro][traj]") {
    auto lev = hydrogen_level(1, 1);
    RadialPair ep(lev, 0.1, 1e-3, 12.0);
    Constants2D ek;
    ek.nu3 = 0.4;
    ReducedAction2D excited(ep, ek);
    CHECK_THROWS_AS(integrate_polar(excited, LawTag::BohmForm, 0.5, 0.0, 0.0, 1.0),
                    std::invalid_argument);

    auto g = hydrogen_level(0, 0);
    RadialPair pair(g, 0.1, 1e-3, 12.0);
    ReducedAction2D act(pair, ground_constants(0.8, 1.2, -0.5));
    CHECK_THROWS_AS(integrate_polar(act, LawTag::FloydJacobi, 0.3, 0.0, 0.0, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(integrate_polar(act, LawTag::EnergyLaw, 20.0, 0.0, 0.0, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(integrate_polar(act, LawTag::EnergyLaw, 0.3, 0.0, 1.0, 1.0),
                    std::invalid_argument);
}

TEST_CASE("polar csv and sidecar", "[hydro][io]") {
    auto g = hydrogen_level(0, 0);
    RadialPair pair(g, 0.1, 1e-3, 12.0);
    ReducedAction2D act(pair, ground_constants(0.8, 1.2, -0.5));

    TrajectoryControls c;
    c.samples = 17;
    auto energy = integrate_polar(act, LawTag::EnergyLaw, 0.25, 0.0, 0.0, 50.0, c);
    std::ostringstream out;
    write_polar_csv(out, energy, "cafe0000cafe0000");
    auto text = out.str();
    CHECK(text.rfind("# scenario cafe0000cafe0000\n", 0) == 0);
    CHECK(text.find("t,r,theta,r_dot,theta_dot,law\n") != std::string::npos);
    CHECK(text.find("nan") != std::string::npos); // undetermined angle
    CHECK(text.find(",energy\n") != std::string::npos);
    CHECK(text.find('\r') == std::string::npos);

    auto side = polar_sidecar_json(energy, "cafe0000cafe0000");
    CHECK(side.find("\"theta_undetermined\": true") != std::string::npos);
    CHECK(side.find("\"nu3\"") != std::string::npos);
    CHECK(side.find("\"scenario\": \"cafe0000cafe0000\"") != std::string::npos);

    auto bohm = integrate_polar(act, LawTag::BohmForm, 0.25, 0.7, 0.0, 5.0, c);
    std::ostringstream out2;
    write_polar_csv(out2, bohm, "cafe0000cafe0000");
    CHECK(out2.str().find(",bohm\n") != std::string::npos);
    CHECK(out2.str().find("nan") == std::string::npos);
}
