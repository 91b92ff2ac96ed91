#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "wnfdi/dictlearn.hpp"
#include "wnfdi/network.hpp"
#include "wnfdi/placement.hpp"
#include "wnfdi/residuals.hpp"

namespace wnfdi {

// How dataset columns are assigned to the pre-train / online-train / test
// phases.
struct SplitSpec {
  enum class Kind {
    from_tags,   // use the split tags stored in the dataset
    explicit_indices,
    stratified   // seeded per-class ratio split
  };
  Kind kind = Kind::from_tags;

  // explicit_indices: 0-based dataset columns, processed in the given order.
  std::vector<int> pretrain, train, test;

  // stratified: per class, floor(ratio * count) columns go to pre-train and
  // train (at least one to pre-train), the rest to test.
  double ratio_pretrain = 0.4;
  double ratio_train = 0.3;
  std::uint64_t seed = 1;
};

// Per-test-signal outcome.
struct SignalRecord {
  int column = 0;      // 1-based dataset column
  int truth = 0;       // faulted junction
  int predicted = 0;
  double top_score = 0.0;
  double runner_up = 0.0;
  int hops = 0;        // pipe hops between truth and prediction
};

// Localization rates, in percent of test signals: exact node, within one
// hop, within two hops, same community (only when a community map is given).
struct ScoreResult {
  double s1 = 0, s2 = 0, s3 = 0;
  bool has_s4 = false;
  double s4 = 0;
  std::vector<int> hops;  // per signal, truth -> prediction
};

ScoreResult score(const std::vector<int>& predicted,
                  const std::vector<int>& truth, const Network& net,
                  const CommunityMap* communities = nullptr);

struct FDIReport {
  ScoreResult scores;
  std::vector<SignalRecord> records;
  int n_pretrain = 0, n_train = 0, n_test = 0;
  // Wall-clock phase timings; printed for humans, never serialized, so
  // report files stay byte-identical across reruns.
  double t_pretrain = 0, t_train = 0, t_test = 0;
  std::uint64_t dataset_hash = 0;
  std::uint64_t network_hash = 0;
  PlacementMethod method = PlacementMethod::msc;
  int s = 0;
  double lambda = 0.0;
  std::vector<int> sensors;
  DLHyper hyper;
};

struct FdiResult {
  DLModel model;
  FDIReport report;
};

// Full detection-and-isolation run over a residual dataset:
//   1. split columns (pairwise disjoint; every junction class must appear in
//      the pre-train set, checked before any training),
//   2. batch pre-train on the sensor rows of the pre-train columns,
//   3. one labeled online update per online-train column,
//   4. per test column: one self-supervised online update, then classify.
// Columns are processed in dataset order (or the explicit order given).
FdiResult run_fdi(const ResidualMatrix& rm, const SensorSelection& sel,
                  const SplitSpec& split, const DLHyper& hyper,
                  const Network& net, const CommunityMap* communities = nullptr,
                  std::uint64_t dataset_hash = 0);

// Report file I/O (line-oriented text; no timings, reruns are
// byte-identical).
void save_report(const FDIReport& report, const std::string& path);
FDIReport load_report(const std::string& path);

}  // namespace wnfdi
