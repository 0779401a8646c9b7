#include <benchmark/benchmark.h>

#include "fbsde/catalog.hpp"
#include "fbsde/expansion.hpp"
#include "fbsde/levy_poly.hpp"
#include "fbsde/monte_carlo.hpp"
#include "fbsde/reference.hpp"

using namespace fbsde;

namespace {

void BM_CoefficientSolve(benchmark::State& state) {
    const CatalogModel cat = make_model("cir_like_smooth");
    const TimeGrid grid(0.0, 1.0, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        const Order0Solution o0 = solve_order0(cat.problem, grid);
        const FrozenCoefficients fr = freeze(cat.problem, o0, cat.measure);
        const Order1Coefficients o1 = solve_order1(fr);
        const Order2Coefficients o2 = solve_order2(fr, o1);
        benchmark::DoNotOptimize(o2.y0(0));
    }
}
BENCHMARK(BM_CoefficientSolve)->Arg(128)->Arg(512);

void BM_LevyCoefficients(benchmark::State& state) {
    const CatalogModel cat = make_model("exp_levy");
    const TimeGrid grid(0.0, 1.0, 256);
    const GridFunction y0 = solve_levy_order0(*cat.levy, grid);
    const int order = static_cast<int>(state.range(0));
    for (auto _ : state) {
        const LevyCoefficients coeffs = solve_levy_coeffs(*cat.levy, y0, order, grid);
        benchmark::DoNotOptimize(coeffs.order(order)(0));
    }
}
BENCHMARK(BM_LevyCoefficients)->Arg(2)->Arg(4)->Arg(8);

void BM_SimulateFlows(benchmark::State& state) {
    const CatalogModel cat = make_model("cir_like_smooth");
    const TimeGrid grid(0.0, 1.0, 512);
    const Order0Solution o0 = solve_order0(cat.problem, grid);
    const FrozenCoefficients fr = freeze(cat.problem, o0, cat.measure);
    std::uint64_t path = 0;
    for (auto _ : state) {
        const PathBundle bundle = simulate_noise(grid, cat.measure, Rng::mix(7, path++));
        const FlowPaths flows = simulate_flows(cat.problem, fr, 0.2, bundle);
        benchmark::DoNotOptimize(flows.x2.terminal());
    }
}
BENCHMARK(BM_SimulateFlows);

void BM_Reconstruct(benchmark::State& state) {
    const CatalogModel cat = make_model("cir_like_smooth");
    const TimeGrid grid(0.0, 1.0, 512);
    const Order0Solution o0 = solve_order0(cat.problem, grid);
    const FrozenCoefficients fr = freeze(cat.problem, o0, cat.measure);
    const Order1Coefficients o1 = solve_order1(fr);
    const Order2Coefficients o2 = solve_order2(fr, o1);
    const PathBundle bundle = simulate_noise(grid, cat.measure, 99);
    const FlowPaths flows = simulate_flows(cat.problem, fr, 0.2, bundle);
    for (auto _ : state) {
        const ReconstructedPath rec = reconstruct(o0, &o1, &o2, fr, flows, 0.2, 2);
        benchmark::DoNotOptimize(rec.y_path.terminal());
    }
}
BENCHMARK(BM_Reconstruct);

void BM_LsmcSolve(benchmark::State& state) {
    const CatalogModel cat = make_model("cir_like_smooth");
    LSMCConfig rc;
    rc.n_paths = static_cast<int>(state.range(0));
    rc.basis_degree = 3;
    rc.grid = TimeGrid(0.0, 1.0, 64);
    rc.seed = 5;
    rc.threads = 1;
    for (auto _ : state) {
        const LSMCResult r = lsmc_solve(cat.problem, cat.measure, 0.2, rc);
        benchmark::DoNotOptimize(r.y0);
    }
}
BENCHMARK(BM_LsmcSolve)->Arg(4000)->Arg(16000)->Unit(benchmark::kMillisecond);

void BM_CharFn(benchmark::State& state) {
    const CatalogModel cat = make_model("gauss_jump");
    const TimeGrid grid(0.0, 1.0, 256);
    for (auto _ : state) {
        const CharFnEstimate est = estimate_charfn(*cat.levy, 1.0, 0.1, static_cast<int>(state.range(0)), grid);
        benchmark::DoNotOptimize(est.value);
    }
}
BENCHMARK(BM_CharFn)->Arg(4)->Arg(6);

} // namespace

BENCHMARK_MAIN();
