#include <benchmark/benchmark.h>

#include "dimer/dynamics.hpp"
#include "dimer/phasemap.hpp"
#include "dimer/stability.hpp"
#include "dimer/steadystate.hpp"

using namespace dimer;

namespace {

DimerParams params(double lambda, double j) {
    CavityParams c;
    c.lambda = lambda;
    return symmetric_dimer(c, j);
}

constexpr SrpBranch kAsrp{Symmetry::Antisymmetric, Sign::Plus};

}  // namespace

static void BM_EomRhs(benchmark::State& state) {
    const DimerParams p = params(0.8, 0.3);
    const DimerState s = symmetric_srp_solution(p, kAsrp);
    for (auto _ : state) benchmark::DoNotOptimize(eom_rhs(p, s));
}
BENCHMARK(BM_EomRhs);

static void BM_JacobianEigs(benchmark::State& state) {
    const DimerParams p = params(0.8, 0.3);
    const DimerState s = symmetric_srp_solution(p, kAsrp);
    for (auto _ : state) benchmark::DoNotOptimize(analyze_stability(p, s));
}
BENCHMARK(BM_JacobianEigs);

static void BM_Newton(benchmark::State& state) {
    const DimerParams p = params(0.8, 0.3);
    DimerState guess = symmetric_srp_solution(p, kAsrp);
    guess.cavity1.re_gamma *= 1.1;
    guess.cavity2.x *= 0.9;
    for (auto _ : state) benchmark::DoNotOptimize(solve_steady_numeric(p, guess));
}
BENCHMARK(BM_Newton);

static void BM_Quench(benchmark::State& state) {
    DimerParams p = params(0.7, 0.1);
    p.cavity2.lambda = 0.8;
    QuenchOptions o;
    o.integrate.sample_interval = 10.0;
    const InitialBranchSpec spec = InitialBranchSpec::basin_seed(p, 1, -1);
    for (auto _ : state) benchmark::DoNotOptimize(quench(p, 0.0, 0.1, spec, o));
}
BENCHMARK(BM_Quench)->Unit(benchmark::kMillisecond);

static void BM_AnalyticSweep(benchmark::State& state) {
    const std::vector<Axis> axes{{"lambda", 0.2, 1.0, 32}, {"J", 0.0, 0.5, 32}};
    for (auto _ : state) benchmark::DoNotOptimize(sweep_grid(params(0.3, 0.0), axes, {}, 1));
}
BENCHMARK(BM_AnalyticSweep)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
