#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "wnfdi/residuals.hpp"

namespace wnfdi {

enum class PlacementMethod { msc, mtc, graph_gs };

const char* method_name(PlacementMethod m);

struct PlacementParams {
  int s = 5;             // number of sensors
  double lambda = 0.0;   // distance penalty weight (graph_gs only)
  double tau = 3.0;      // binarization threshold (msc/mtc only)
  BinarizePolicy policy = BinarizePolicy::any;
};

struct SensorSelection {
  std::vector<int> indices;  // junction indices in selection order, 1-based
  PlacementMethod method = PlacementMethod::msc;
  PlacementParams params;
  std::uint64_t dataset_hash = 0;
};

struct CoverageReport {
  int covered = 0;
  int total = 0;               // number of coverable targets (columns)
  std::vector<int> uncovered;  // 1-based column ids left uncovered
};

// Greedy maximum coverage: rows are candidate sensors, columns are targets
// (fault classes, or fault pairs for the two-fault variant). Each step picks
// the row covering the most yet-uncovered columns; ties go to the lowest row
// index. Once no row adds coverage, remaining slots are filled with the
// lowest-index unselected rows so exactly s sensors return; s must not
// exceed the candidate count.
SensorSelection greedy_cover(const Eigen::MatrixXi& M, int s,
                             CoverageReport* coverage = nullptr);

// Two-fault discrimination targets: for every unordered class pair (a, b)
// the column marks sensors that distinguish the pair. `exclusive` uses XOR
// (the sensor fires for exactly one of the two faults); `product` marks
// sensors that fire for both. Pair columns are ordered (1,2), (1,3), ...,
// (1,n), (2,3), ...
enum class MtcSemantics { exclusive, product };

Eigen::MatrixXi mtc_matrix(const Eigen::MatrixXi& M,
                           MtcSemantics semantics = MtcSemantics::exclusive);

// Graph-aware Gram-Schmidt selection over residual rows. R is the residual
// matrix (junctions x scenarios), dist the junction-to-junction distance
// matrix. The first sensor is the row with the largest norm; each subsequent
// pick minimizes
//   |U^T r_j|_2 + lambda * sum_{i selected} 1 / dist(i, j)
// where U is an orthonormal basis of the selected rows, i.e. the part of
// r_j already explained by the selection plus a crowding penalty. Ties go to
// the lowest junction index. Rows that are (numerically) inside the selected
// span extend the basis by nothing; the rank guard is 1e-12 * |row|.
// If `basis_out` is non-null it receives U (rows x rank).
SensorSelection graph_gs_place(const Eigen::MatrixXd& R,
                               const Eigen::MatrixXd& dist, int s,
                               double lambda,
                               Eigen::MatrixXd* basis_out = nullptr);

// Selection file I/O (line-oriented text).
void save_selection(const SensorSelection& sel, const std::string& path,
                    const CoverageReport* coverage = nullptr);
SensorSelection load_selection(const std::string& path);

}  // namespace wnfdi
