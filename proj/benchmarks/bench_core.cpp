// Microbenchmarks for the solver's hot paths: kernel convolutions, the
// spectral elliptic inverses, the viscous solve, whole integrator steps in
// each regime, and the energy functional.

#include <benchmark/benchmark.h>

#include "nlchns/config.hpp"
#include "nlchns/elliptic.hpp"
#include "nlchns/kernel.hpp"
#include "nlchns/ops.hpp"
#include "nlchns/rng.hpp"
#include "nlchns/sim.hpp"

using namespace nlchns;

namespace {

Grid make_grid(int n, BoundaryMode bc) { return Grid(n, n, 1.0, 1.0, bc); }

ScalarField smooth(const Grid& g, std::uint64_t seed) {
    Rng rng(seed);
    return random_smooth(g, rng, 6, 0.4);
}

SimConfig regime_config(int n, PotentialKind pot, MobilityKind mob,
                        ViscosityKind visc) {
    SimConfig c;
    c.grid = make_grid(n, BoundaryMode::Periodic);
    c.kernel.eps = 0.08;
    c.kernel.scale = pot == PotentialKind::DoubleWell ? 4.3 : 1.0;
    c.potential.kind = pot;
    c.mobility.kind = mob;
    c.viscosity.kind = visc;
    if (visc == ViscosityKind::TanhBlend) {
        c.viscosity.nu1 = 0.05;
        c.viscosity.nu2 = 0.15;
    } else {
        c.viscosity.nu = 0.1;
    }
    c.init.u_kind = VelocityInit::TaylorGreen;
    c.init.u_amp = 0.2;
    c.init.phi_kind = PhaseInit::RandomSmooth;
    c.init.phi_mean = 0.0;
    c.init.phi_amp = 0.2;
    c.scheme.dt = 5e-4;
    return c;
}

void bench_convolve(benchmark::State& state, BoundaryMode bc) {
    const Grid g = make_grid(static_cast<int>(state.range(0)), bc);
    KernelSpec ks;
    ks.eps = 0.08;
    ks.scale = 4.3;
    ConvolutionPlan plan(g, ks);
    const ScalarField f = smooth(g, 7);
    for (auto _ : state) benchmark::DoNotOptimize(plan.convolve(f));
    state.SetItemsProcessed(state.iterations() * g.nx * g.ny);
}

void bench_grad_convolve(benchmark::State& state) {
    const Grid g = make_grid(static_cast<int>(state.range(0)),
                             BoundaryMode::Periodic);
    KernelSpec ks;
    ks.eps = 0.08;
    ks.scale = 4.3;
    ConvolutionPlan plan(g, ks);
    const ScalarField f = smooth(g, 7);
    for (auto _ : state) benchmark::DoNotOptimize(plan.grad_convolve(f));
    state.SetItemsProcessed(state.iterations() * g.nx * g.ny);
}

void bench_poisson_inverse(benchmark::State& state, BoundaryMode bc) {
    const Grid g = make_grid(static_cast<int>(state.range(0)), bc);
    SpectralPoisson poisson(g);
    ScalarField f = smooth(g, 11);
    const double m = mean(f);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f(i, j) -= m;
    for (auto _ : state) benchmark::DoNotOptimize(poisson.inverse(f));
    state.SetItemsProcessed(state.iterations() * g.nx * g.ny);
}

void bench_viscous_solve(benchmark::State& state) {
    const Grid g = make_grid(static_cast<int>(state.range(0)),
                             BoundaryMode::Periodic);
    ViscousSolver solver(g);
    const ScalarField nu(g, 0.1);
    Rng rng(13);
    const VectorField rhs = random_solenoidal(g, rng, 6, 0.5);
    const double dt = 5e-4;
    for (auto _ : state)
        benchmark::DoNotOptimize(solver.solve(rhs, nu, dt));
    state.SetItemsProcessed(state.iterations() * g.nx * g.ny);
}

void bench_step(benchmark::State& state, PotentialKind pot, MobilityKind mob,
                ViscosityKind visc) {
    const SimConfig cfg =
        regime_config(static_cast<int>(state.range(0)), pot, mob, visc);
    Simulator sim(cfg);
    SimState s = sim.make_initial();
    for (auto _ : state) benchmark::DoNotOptimize(sim.step(s));
    state.SetItemsProcessed(state.iterations() * cfg.grid.nx * cfg.grid.ny);
}

void bench_energy(benchmark::State& state) {
    const SimConfig cfg =
        regime_config(static_cast<int>(state.range(0)),
                      PotentialKind::DoubleWell, MobilityKind::Constant,
                      ViscosityKind::Constant);
    Simulator sim(cfg);
    const SimState s = sim.make_initial();
    for (auto _ : state) benchmark::DoNotOptimize(sim.energy(s));
    state.SetItemsProcessed(state.iterations() * cfg.grid.nx * cfg.grid.ny);
}

}  // namespace

BENCHMARK_CAPTURE(bench_convolve, periodic, BoundaryMode::Periodic)
    ->Arg(64)->Arg(128)->Arg(256);
BENCHMARK_CAPTURE(bench_convolve, box, BoundaryMode::Box)
    ->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(bench_grad_convolve)->Arg(128);
BENCHMARK_CAPTURE(bench_poisson_inverse, periodic, BoundaryMode::Periodic)
    ->Arg(128)->Arg(256);
BENCHMARK_CAPTURE(bench_poisson_inverse, box, BoundaryMode::Box)
    ->Arg(128)->Arg(256);
BENCHMARK(bench_viscous_solve)->Arg(128);
BENCHMARK_CAPTURE(bench_step, regular, PotentialKind::DoubleWell,
                  MobilityKind::Constant, ViscosityKind::Constant)
    ->Arg(64)->Arg(128);
BENCHMARK_CAPTURE(bench_step, logarithmic, PotentialKind::Logarithmic,
                  MobilityKind::Constant, ViscosityKind::Constant)
    ->Arg(64)->Arg(128);
BENCHMARK_CAPTURE(bench_step, degenerate, PotentialKind::SplitSingular,
                  MobilityKind::Degenerate, ViscosityKind::Constant)
    ->Arg(64)->Arg(128);
BENCHMARK_CAPTURE(bench_step, variable_viscosity, PotentialKind::DoubleWell,
                  MobilityKind::Constant, ViscosityKind::TanhBlend)
    ->Arg(64)->Arg(128);
BENCHMARK(bench_energy)->Arg(256);

BENCHMARK_MAIN();
