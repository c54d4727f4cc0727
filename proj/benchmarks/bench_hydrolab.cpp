#include <memory>
#include <vector>

#include <benchmark/benchmark.h>

#include "hydrolab/equilibrium.hpp"
#include "hydrolab/flux.hpp"
#include "hydrolab/riemann.hpp"
#include "hydrolab/simulation.hpp"

using namespace hydrolab;

namespace {

const FluxModel kDilute{JumpRateSpec::mm1(), DisorderLaw::dirac(1.0, 0.5), 1.0};

std::shared_ptr<const FluxTable> dilute_table() {
  static const auto t = std::make_shared<const FluxTable>(FluxTable::from_model(kDilute));
  return t;
}

std::shared_ptr<const Environment> dilute_env(Window w) {
  DeterministicEnvSpec spec;
  spec.law = kDilute.disorder;
  return std::make_shared<const Environment>(build_deterministic(spec, w));
}

}  // namespace

static void BM_FluxTableBuild(benchmark::State& state) {
  FluxTableOptions opts;
  opts.grid_points = static_cast<std::size_t>(state.range(0));
  const FluxModel model{JumpRateSpec::mm1(), DisorderLaw::uniform(0.5, 1.0), 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(FluxTable::from_model(model, opts));
}
BENCHMARK(BM_FluxTableBuild)->Arg(512)->Arg(4096)->Unit(benchmark::kMillisecond);

static void BM_VariationalSolve(benchmark::State& state) {
  const RiemannSolver solver({2.0, 0.0, 0.0, dilute_table()});
  double v = -1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solver.variational(v));
    v = v > 1.5 ? -1.0 : v + 0.001;
  }
}
BENCHMARK(BM_VariationalSolve);

static void BM_Godunov(benchmark::State& state) {
  GodunovOptions opts;
  opts.dx = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(godunov_solve(*dilute_table(), PiecewiseConstant{{0.0}, {2.0, 0.0}}, 1.0, opts));
}
BENCHMARK(BM_Godunov)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

static void BM_Evolve(benchmark::State& state) {
  const Window w{-5000, 5000};
  const auto env = dilute_env(w);
  const auto init = sample_equilibrium(env, dilute_table(), 0.6, EquilibriumMode::stationary, 1);
  const auto copies = static_cast<std::size_t>(state.range(0));
  std::uint64_t events = 0;
  for (auto _ : state) {
    auto ens = couple(std::vector<LatticeState>(copies, init), env, {JumpRateSpec::mm1(), 1.0}, 2);
    ens.evolve(50.0);
    events += ens.events();
  }
  state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Evolve)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
