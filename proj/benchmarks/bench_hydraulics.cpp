#include <benchmark/benchmark.h>

#include <wnfdi/hydraulics.hpp>
#include <wnfdi/netgen.hpp>

using namespace wnfdi;

namespace {

Network sized_network(int junctions) {
  GenSpec gs;
  gs.n_junctions = junctions;
  gs.n_pipes = junctions + junctions / 4;
  gs.seed = 42;
  return generate_network(gs);
}

}  // namespace

// Cold solve from the default initial guess.
static void BM_SolveSteadyState(benchmark::State& state) {
  Network net = sized_network(static_cast<int>(state.range(0)));
  Eigen::VectorXd c = demand_vector(net, {});
  for (auto _ : state) {
    HydraulicState st = solve_steady_state(net, c);
    benchmark::DoNotOptimize(st.heads.data());
  }
}
BENCHMARK(BM_SolveSteadyState)->Arg(20)->Arg(50)->Arg(100)->Arg(200);

// Re-solve after a demand perturbation, warm-started from the nominal
// state. This is the inner loop of dataset generation.
static void BM_SolveWarmStart(benchmark::State& state) {
  Network net = sized_network(static_cast<int>(state.range(0)));
  Eigen::VectorXd c = demand_vector(net, {});
  HydraulicState nominal = solve_steady_state(net, c);

  DemandSpec faulted;
  faulted.fault = FaultSpec{net.n_junctions() / 2 + 1, 0.02};
  Eigen::VectorXd cf = demand_vector(net, faulted);
  for (auto _ : state) {
    HydraulicState st = solve_steady_state(net, cf, {}, &nominal.heads);
    benchmark::DoNotOptimize(st.heads.data());
  }
}
BENCHMARK(BM_SolveWarmStart)->Arg(20)->Arg(50)->Arg(100)->Arg(200);

// One full measurement scenario: averaged heads over the quiet window.
static void BM_SimulateScenario(benchmark::State& state) {
  Network net = sized_network(static_cast<int>(state.range(0)));
  ProfileBank bank = generate_profiles(10, 0.025, 7);
  std::vector<int> window = default_window();
  DemandSpec spec;
  spec.fault = FaultSpec{1, 0.02};
  for (auto _ : state) {
    ScenarioResult r = simulate_scenario(net, bank, 2, window, spec);
    benchmark::DoNotOptimize(r.mean_heads.data());
  }
}
BENCHMARK(BM_SimulateScenario)->Arg(31)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
