#include <benchmark/benchmark.h>

#include <wnfdi/netgen.hpp>
#include <wnfdi/network.hpp>
#include <wnfdi/placement.hpp>
#include <wnfdi/random.hpp>

using namespace wnfdi;

namespace {

struct Fixture {
  Network net;
  Eigen::MatrixXd dist;
  Eigen::MatrixXd R;  // residual-shaped junctions x scenarios

  explicit Fixture(int junctions, int scenarios) {
    GenSpec gs;
    gs.n_junctions = junctions;
    gs.n_pipes = junctions + junctions / 4;
    gs.seed = 17;
    net = generate_network(gs);
    dist = shortest_paths(net, EdgeWeight::pipe_length);
    SplitMix64 rng(99);
    R.resize(junctions, scenarios);
    for (int i = 0; i < R.rows(); ++i)
      for (int j = 0; j < R.cols(); ++j) R(i, j) = rng.uniform(-1.0, 1.0);
  }
};

}  // namespace

static void BM_GraphGsPlace(benchmark::State& state) {
  static Fixture fx(100, 800);
  int s = static_cast<int>(state.range(0));
  for (auto _ : state) {
    SensorSelection sel = graph_gs_place(fx.R, fx.dist, s, 1e6);
    benchmark::DoNotOptimize(sel.indices.data());
  }
}
BENCHMARK(BM_GraphGsPlace)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_GreedyCover(benchmark::State& state) {
  SplitMix64 rng(3);
  int n = static_cast<int>(state.range(0));
  Eigen::MatrixXi M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = rng.uniform01() < 0.2 ? 1 : 0;
  for (auto _ : state) {
    SensorSelection sel = greedy_cover(M, n / 5);
    benchmark::DoNotOptimize(sel.indices.data());
  }
}
BENCHMARK(BM_GreedyCover)->Arg(50)->Arg(100)->Arg(200);

// Pairwise discrimination targets grow quadratically with the class count;
// this tracks the matrix expansion cost on its own.
static void BM_MtcMatrix(benchmark::State& state) {
  SplitMix64 rng(5);
  int n = static_cast<int>(state.range(0));
  Eigen::MatrixXi M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = rng.uniform01() < 0.2 ? 1 : 0;
  for (auto _ : state) {
    Eigen::MatrixXi T = mtc_matrix(M);
    benchmark::DoNotOptimize(T.data());
  }
}
BENCHMARK(BM_MtcMatrix)->Arg(50)->Arg(100);

static void BM_ShortestPaths(benchmark::State& state) {
  GenSpec gs;
  gs.n_junctions = static_cast<int>(state.range(0));
  gs.n_pipes = gs.n_junctions + gs.n_junctions / 4;
  gs.seed = 11;
  Network net = generate_network(gs);
  for (auto _ : state) {
    Eigen::MatrixXd d = shortest_paths(net, EdgeWeight::pipe_length);
    benchmark::DoNotOptimize(d.data());
  }
}
BENCHMARK(BM_ShortestPaths)->Arg(100)->Arg(200);

BENCHMARK_MAIN();
