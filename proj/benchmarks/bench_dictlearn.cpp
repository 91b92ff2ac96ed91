#include <benchmark/benchmark.h>

#include <wnfdi/dictlearn.hpp>
#include <wnfdi/random.hpp>

#include <vector>

using namespace wnfdi;

namespace {

Eigen::MatrixXd random_dictionary(int m, int b, SplitMix64& rng) {
  Eigen::MatrixXd D(m, b);
  for (int j = 0; j < b; ++j) {
    for (int i = 0; i < m; ++i) D(i, j) = rng.uniform(-1.0, 1.0);
    D.col(j).normalize();
  }
  return D;
}

// Class-structured training set: class c concentrates on axes 2c, 2c+1.
struct TrainingSet {
  Eigen::MatrixXd Y;
  std::vector<int> labels;

  TrainingSet(int n_classes, int per_class, int dim, SplitMix64& rng) {
    Y.resize(dim, n_classes * per_class);
    for (int c = 0; c < n_classes; ++c)
      for (int k = 0; k < per_class; ++k) {
        Eigen::VectorXd y = Eigen::VectorXd::Zero(dim);
        y(2 * c % dim) = rng.uniform(0.8, 2.0);
        y((2 * c + 1) % dim) = rng.uniform(-0.5, 0.5);
        for (int i = 0; i < dim; ++i) y(i) += 0.02 * rng.uniform(-1.0, 1.0);
        Y.col(c * per_class + k) = y;
        labels.push_back(c + 1);
      }
  }
};

}  // namespace

static void BM_Omp(benchmark::State& state) {
  SplitMix64 rng(1);
  int b = static_cast<int>(state.range(0));
  Eigen::MatrixXd D = random_dictionary(30, b, rng);
  Eigen::VectorXd y(30);
  for (int i = 0; i < 30; ++i) y(i) = rng.uniform(-1.0, 1.0);
  for (auto _ : state) {
    Eigen::VectorXd x = omp(D, y, 10);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_Omp)->Arg(60)->Arg(120)->Arg(240);

static void BM_Pretrain(benchmark::State& state) {
  SplitMix64 rng(2);
  int n_classes = static_cast<int>(state.range(0));
  TrainingSet ts(n_classes, 12, 2 * n_classes + 4, rng);
  DLHyper hyper;
  hyper.iters_class = 5;
  hyper.iters_full = 10;
  LabelMatrices lm = build_label_matrices(ts.labels, n_classes,
                                          hyper.atoms_per_class,
                                          hyper.shared_atoms);
  for (auto _ : state) {
    DLModel model = lcksvd_pretrain(ts.Y, lm.H, lm.Q, n_classes, hyper);
    benchmark::DoNotOptimize(model.D.data());
  }
}
BENCHMARK(BM_Pretrain)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

// Online update throughput, the per-signal cost during test streaming.
static void BM_ToddlerUpdate(benchmark::State& state) {
  SplitMix64 rng(3);
  const int n_classes = 10, dim = 24;
  TrainingSet ts(n_classes, 12, dim, rng);
  DLHyper hyper;
  hyper.iters_class = 5;
  hyper.iters_full = 10;
  LabelMatrices lm = build_label_matrices(ts.labels, n_classes,
                                          hyper.atoms_per_class,
                                          hyper.shared_atoms);
  DLModel pretrained = lcksvd_pretrain(ts.Y, lm.H, lm.Q, n_classes, hyper);

  DLModel model = pretrained;
  int col = 0;
  for (auto _ : state) {
    toddler_update(model, ts.Y.col(col), std::nullopt);
    col = (col + 1) % static_cast<int>(ts.Y.cols());
    if (model.processed > 4096) {  // keep the state from drifting unbounded
      state.PauseTiming();
      model = pretrained;
      state.ResumeTiming();
    }
  }
  benchmark::DoNotOptimize(model.D.data());
}
BENCHMARK(BM_ToddlerUpdate);

static void BM_Classify(benchmark::State& state) {
  SplitMix64 rng(4);
  const int n_classes = 10, dim = 24;
  TrainingSet ts(n_classes, 12, dim, rng);
  DLHyper hyper;
  hyper.iters_class = 5;
  hyper.iters_full = 10;
  LabelMatrices lm = build_label_matrices(ts.labels, n_classes,
                                          hyper.atoms_per_class,
                                          hyper.shared_atoms);
  DLModel model = lcksvd_pretrain(ts.Y, lm.H, lm.Q, n_classes, hyper);
  int col = 0;
  for (auto _ : state) {
    Classification c = classify(model, ts.Y.col(col));
    benchmark::DoNotOptimize(c.cls);
    col = (col + 1) % static_cast<int>(ts.Y.cols());
  }
}
BENCHMARK(BM_Classify);

BENCHMARK_MAIN();
