#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "wnfdi/hydraulics.hpp"
#include "wnfdi/network.hpp"

namespace wnfdi {

enum class ResidualMode { absolute, relative };

// Head residual of one measurement against the fault-free baseline:
// absolute r = measured - nominal, relative r = (measured - nominal) /
// nominal. Relative mode rejects baselines with |nominal_i| <= guard.
Eigen::VectorXd residual(const Eigen::VectorXd& nominal,
                         const Eigen::VectorXd& measured, ResidualMode mode,
                         double guard = 1e-9);

enum class Split : std::uint8_t { pretrain = 0, train = 1, test = 2 };

const char* split_name(Split s);

// One scenario that was planned but dropped (steady state did not converge).
struct DroppedScenario {
  int label = 0;
  int magnitude_index = 0;
  int profile_index = 0;
  Split split = Split::train;
};

// Residual dataset: columns are scenarios, rows are junctions. Column j was
// produced by a fault at junction labels[j] with magnitude
// magnitudes[magnitude_index[j]-1] under profile profile_index[j].
struct ResidualMatrix {
  Eigen::MatrixXd R;                  // n_junctions x n_columns
  std::vector<int> labels;            // fault node, 1-based
  std::vector<int> magnitude_index;   // 1-based into `magnitudes`
  std::vector<int> profile_index;     // 1-based
  std::vector<Split> split;
  ResidualMode mode = ResidualMode::absolute;
  std::vector<double> magnitudes;     // configured magnitude set (m^3/s)
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::uint64_t network_hash = 0;
  double beta = 0.0;
  int n_profiles = 0;
  std::vector<int> window;
  std::vector<DroppedScenario> dropped;

  int rows() const { return static_cast<int>(R.rows()); }
  int cols() const { return static_cast<int>(R.cols()); }
};

// How to populate one split of the dataset.
struct SplitPlan {
  Split split = Split::train;

  // grid: every (node, profile-in-pick, magnitude-in-pick) combination,
  //       `count` times; columns grouped node-major, magnitude fastest.
  // per_class: `count` columns per node; magnitudes cycled over the pick for
  //       balance, profile drawn per the pick.
  // total: `count` columns with node, magnitude and profile all drawn.
  enum class Kind { grid, per_class, total } kind = Kind::grid;
  int count = 1;

  enum class ProfilePick { nominal, random, all } profiles = ProfilePick::all;
  enum class MagnitudePick { all, even, odd } magnitudes = MagnitudePick::all;

  // Shuffle this split's columns (seeded); typically on for the test split
  // so the online phase does not see faults class by class.
  bool shuffle = false;
};

struct DatasetSpec {
  std::vector<SplitPlan> plans;
  std::vector<double> magnitudes;   // m^3/s, may include zero
  std::vector<int> window;          // 0-based sample indices
  ResidualMode mode = ResidualMode::absolute;
  double beta = 0.025;              // demand uncertainty level
  double total_inflow_m3s = -1.0;   // < 0: sum of base demands
  std::uint64_t seed = 1;
  std::uint64_t config_hash = 0;
  std::uint64_t network_hash = 0;
  SolverOptions solver;
};

// Simulates every planned scenario and assembles the residual matrix.
// The fault-free baseline uses profile 1 with no noise. Per-scenario noise:
// each junction draws eta_i ~ U(-beta*base_i, +beta*base_i), held constant
// over the averaging window. Scenario randomness comes from streams derived
// from (seed, column ordinal), so results do not depend on `threads`.
// Non-converged scenarios are dropped and recorded.
ResidualMatrix build_residual_matrix(const Network& net,
                                     const ProfileBank& bank,
                                     const DatasetSpec& spec,
                                     int threads = 1);

// Binary fault signatures. Column j of the result describes fault class j
// (junction j): entry (i, j) is 1 when the magnitude test |R(i, col)| >= tau
// holds for the class-j columns under the chosen policy: `any` column, `all`
// columns, or a `majority` (strictly more than half).
enum class BinarizePolicy { any, all, majority };

struct SignatureMatrix {
  Eigen::MatrixXi M;  // n_junctions x n_junctions, entries 0/1
  double tau = 0.0;
  BinarizePolicy policy = BinarizePolicy::any;
};

SignatureMatrix binarize(const ResidualMatrix& rm, double tau,
                         BinarizePolicy policy);

// Dataset file I/O. The header is line-oriented text; the column payload is
// either text (one line per column) or little-endian IEEE-754 binary.
// Both payloads round-trip exactly. write returns the FNV-1a hash of the
// serialized bytes; load returns it through `file_hash` if non-null.
enum class PayloadFormat { text, binary };

std::uint64_t save_dataset(const ResidualMatrix& rm, const std::string& path,
                           PayloadFormat format);
ResidualMatrix load_dataset(const std::string& path,
                            std::uint64_t* file_hash = nullptr);

}  // namespace wnfdi
