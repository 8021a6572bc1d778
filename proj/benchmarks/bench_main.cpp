#include "qmlab/hydrogen2d.hpp"
#include "qmlab/laws1d.hpp"
#include "qmlab/quadrature.hpp"
#include "qmlab/reduced_action.hpp"
#include "qmlab/special_functions.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace qmlab;

namespace {

void bm_reduced_action_eval(benchmark::State& state) {
    ReducedAction1D act(pair_free(1.0), 0.7, -0.3);
    double x = -8.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(act.s0(x));
        x += 1e-4;
        if (x > 8.0) x = -8.0;
    }
}
BENCHMARK(bm_reduced_action_eval);

void bm_quantum_potential(benchmark::State& state) {
    ReducedAction1D act(pair_free(1.0), 0.7, -0.3);
    double x = -8.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(act.quantum_potential(x));
        x += 1e-4;
        if (x > 8.0) x = -8.0;
    }
}
BENCHMARK(bm_quantum_potential);

void bm_qhje_residual_500(benchmark::State& state) {
    ReducedAction1D act(pair_free(1.0), 0.7, -0.3);
    auto grid = Grid1D::uniform(-10.0, 10.0, 500);
    for (auto _ : state)
        benchmark::DoNotOptimize(act.qhje_residual(grid).max);
}
BENCHMARK(bm_qhje_residual_500);

void bm_pair_numeric_ramp(benchmark::State& state) {
    auto ramp = Potential::linear(1.0, {-4.0, 3.0});
    for (auto _ : state)
        benchmark::DoNotOptimize(pair_numeric(ramp, 1.0, -4.0, 0.01).wronskian);
}
BENCHMARK(bm_pair_numeric_ramp);

void bm_quadrature_gauss(benchmark::State& state) {
    auto f = [](double t) { return std::exp(-t) * std::sin(3.0 * t); };
    for (auto _ : state)
        benchmark::DoNotOptimize(integrate(f, 0.0, 10.0));
}
BENCHMARK(bm_quadrature_gauss);

void bm_expint_ei(benchmark::State& state) {
    double x = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(expint_ei(x));
        x += 0.37;
        if (x > 80.0) x = 0.5;
    }
}
BENCHMARK(bm_expint_ei);

void bm_trajectory_bohm(benchmark::State& state) {
    LawOfMotion law{LawTag::BohmForm, ReducedAction1D(pair_free(1.0), 1.0, 0.5)};
    for (auto _ : state) {
        auto traj = integrate_trajectory(law, 0.0, 0.0, 10.0);
        benchmark::DoNotOptimize(traj.samples.back().x);
    }
}
BENCHMARK(bm_trajectory_bohm);

void bm_radial_pair_build(benchmark::State& state) {
    auto level = hydrogen_level(1, 1);
    for (auto _ : state) {
        RadialPair pair(level, 0.1, 1e-3, 12.0);
        benchmark::DoNotOptimize(pair.wronskian(1.0));
    }
}
BENCHMARK(bm_radial_pair_build);

void bm_polar_gradient(benchmark::State& state) {
    Constants2D k;
    k.nu3 = 0.8;
    k.mu1 = 1.2;
    k.mu3 = -0.5;
    ReducedAction2D act(RadialPair(hydrogen_level(0, 0), 0.1, 1e-3, 12.0), k);
    double r = 0.15;
    for (auto _ : state) {
        benchmark::DoNotOptimize(act.ds0_dr(r, 0.3));
        r += 1e-3;
        if (r > 5.0) r = 0.15;
    }
}
BENCHMARK(bm_polar_gradient);

} // namespace

BENCHMARK_MAIN();
