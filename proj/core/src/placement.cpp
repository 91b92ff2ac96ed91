#include "wnfdi/placement.hpp"

#include <cmath>
#include <limits>

#include "wnfdi/errors.hpp"
#include "textio.hpp"

namespace wnfdi {

namespace tio = textio;

const char* method_name(PlacementMethod m) {
  switch (m) {
    case PlacementMethod::msc: return "msc";
    case PlacementMethod::mtc: return "mtc";
    case PlacementMethod::graph_gs: return "graph-gs";
  }
  return "?";
}

SensorSelection greedy_cover(const Eigen::MatrixXi& M, int s,
                             CoverageReport* coverage) {
  const int rows = static_cast<int>(M.rows());
  const int cols = static_cast<int>(M.cols());
  if (rows < 1 || cols < 1)
    throw validation_error("coverage matrix is empty");
  if (s < 1) throw validation_error("sensor count must be positive");
  if (s > rows)
    throw validation_error("sensor count " + tio::fmt(s) +
                           " exceeds candidate count " + tio::fmt(rows));

  std::vector<char> covered(static_cast<std::size_t>(cols), 0);
  std::vector<char> selected_mask(static_cast<std::size_t>(rows), 0);
  SensorSelection sel;
  sel.method = PlacementMethod::msc;
  sel.params.s = s;

  for (int step = 0; step < s; ++step) {
    int best = -1, best_gain = 0;
    for (int r = 0; r < rows; ++r) {
      if (selected_mask[static_cast<std::size_t>(r)]) continue;
      int gain = 0;
      for (int c = 0; c < cols; ++c)
        if (!covered[static_cast<std::size_t>(c)] && M(r, c) != 0) ++gain;
      if (gain > best_gain) {
        best_gain = gain;
        best = r;
      }
    }
    if (best < 0) break;  // nothing uncovered is coverable; stop early
    selected_mask[static_cast<std::size_t>(best)] = 1;
    sel.indices.push_back(best + 1);
    for (int c = 0; c < cols; ++c)
      if (M(best, c) != 0) covered[static_cast<std::size_t>(c)] = 1;
  }
  // Pad with the lowest-index unselected candidates so |selection| == s.
  for (int r = 0; r < rows && static_cast<int>(sel.indices.size()) < s; ++r) {
    if (!selected_mask[static_cast<std::size_t>(r)]) {
      selected_mask[static_cast<std::size_t>(r)] = 1;
      sel.indices.push_back(r + 1);
    }
  }

  if (coverage != nullptr) {
    coverage->covered = 0;
    coverage->total = cols;
    coverage->uncovered.clear();
    for (int c = 0; c < cols; ++c) {
      if (covered[static_cast<std::size_t>(c)])
        ++coverage->covered;
      else
        coverage->uncovered.push_back(c + 1);
    }
  }
  return sel;
}

Eigen::MatrixXi mtc_matrix(const Eigen::MatrixXi& M, MtcSemantics semantics) {
  const int rows = static_cast<int>(M.rows());
  const int n = static_cast<int>(M.cols());
  if (n < 2)
    throw validation_error("two-fault targets need at least two classes");
  Eigen::MatrixXi out(rows, n * (n - 1) / 2);
  int col = 0;
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (int i = 0; i < rows; ++i) {
        bool fa = M(i, a) != 0, fb = M(i, b) != 0;
        bool on = semantics == MtcSemantics::exclusive ? (fa != fb)
                                                       : (fa && fb);
        out(i, col) = on ? 1 : 0;
      }
      ++col;
    }
  }
  return out;
}

SensorSelection graph_gs_place(const Eigen::MatrixXd& R,
                               const Eigen::MatrixXd& dist, int s,
                               double lambda, Eigen::MatrixXd* basis_out) {
  const int n = static_cast<int>(R.rows());
  if (n < 1 || R.cols() < 1)
    throw validation_error("residual matrix is empty");
  if (s < 1) throw validation_error("sensor count must be positive");
  if (s > n)
    throw validation_error("sensor count " + tio::fmt(s) +
                           " exceeds junction count " + tio::fmt(n));
  if (dist.rows() != n || dist.cols() != n)
    throw validation_error("distance matrix shape does not match residuals");
  if (!(lambda >= 0))
    throw validation_error("distance penalty weight must be >= 0");

  Eigen::VectorXd norms(n);
  for (int j = 0; j < n; ++j) norms(j) = R.row(j).norm();
  if (norms.maxCoeff() <= 0)
    throw validation_error("residual matrix is identically zero");

  SensorSelection sel;
  sel.method = PlacementMethod::graph_gs;
  sel.params.s = s;
  sel.params.lambda = lambda;

  std::vector<char> picked(static_cast<std::size_t>(n), 0);
  int first = 0;
  for (int j = 1; j < n; ++j)
    if (norms(j) > norms(first)) first = j;
  picked[static_cast<std::size_t>(first)] = 1;
  sel.indices.push_back(first + 1);

  // Orthonormal basis of the selected rows, grown by Gram-Schmidt. Columns
  // of U live in scenario space (dimension R.cols()).
  Eigen::MatrixXd U(R.cols(), s);
  int rank = 0;
  auto extend_basis = [&](int row) {
    Eigen::VectorXd r = R.row(row).transpose();
    Eigen::VectorXd u = r;
    if (rank > 0) {
      // Two classical Gram-Schmidt passes keep U orthonormal to machine
      // precision.
      u -= U.leftCols(rank) * (U.leftCols(rank).transpose() * u);
      u -= U.leftCols(rank) * (U.leftCols(rank).transpose() * u);
    }
    double nu = u.norm();
    if (nu > 1e-12 * std::max(1e-300, r.norm())) {
      U.col(rank) = u / nu;
      ++rank;
    }
  };
  extend_basis(first);

  while (static_cast<int>(sel.indices.size()) < s) {
    int best = -1;
    double best_score = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (picked[static_cast<std::size_t>(j)]) continue;
      double explained =
          rank > 0 ? (U.leftCols(rank).transpose() * R.row(j).transpose()).norm()
                   : 0.0;
      double crowding = 0.0;
      if (lambda > 0) {
        for (int idx : sel.indices) {
          double d = dist(idx - 1, j);
          crowding += d > 0 ? 1.0 / d
                            : std::numeric_limits<double>::infinity();
        }
      }
      double score = explained + lambda * crowding;
      if (score < best_score) {
        best_score = score;
        best = j;
      }
    }
    if (best < 0) {
      // All remaining scores are +inf (fully crowded); take lowest index.
      for (int j = 0; j < n; ++j)
        if (!picked[static_cast<std::size_t>(j)]) {
          best = j;
          break;
        }
    }
    picked[static_cast<std::size_t>(best)] = 1;
    sel.indices.push_back(best + 1);
    extend_basis(best);
  }

  if (basis_out != nullptr) *basis_out = U.leftCols(rank);
  return sel;
}

namespace {

const char* policy_name(BinarizePolicy p) {
  switch (p) {
    case BinarizePolicy::any: return "any";
    case BinarizePolicy::all: return "all";
    case BinarizePolicy::majority: return "majority";
  }
  return "?";
}

}  // namespace

void save_selection(const SensorSelection& sel, const std::string& path,
                    const CoverageReport* coverage) {
  std::string out;
  out += "wnfdi-selection v1\n";
  out += std::string("method = ") + method_name(sel.method) + "\n";
  out += "s = " + tio::fmt(sel.params.s) + "\n";
  out += "lambda = " + tio::fmt(sel.params.lambda) + "\n";
  out += "tau = " + tio::fmt(sel.params.tau) + "\n";
  out += std::string("policy = ") + policy_name(sel.params.policy) + "\n";
  out += "dataset_hash = " + tio::hex64(sel.dataset_hash) + "\n";
  out += "indices =";
  for (int i : sel.indices) out += " " + tio::fmt(i);
  out += "\n";
  if (coverage != nullptr) {
    out += "covered = " + tio::fmt(coverage->covered) + "\n";
    out += "total = " + tio::fmt(coverage->total) + "\n";
    out += "uncovered =";
    for (int c : coverage->uncovered) out += " " + tio::fmt(c);
    out += "\n";
  }
  tio::write_file(path, out);
}

SensorSelection load_selection(const std::string& path) {
  std::string data = tio::read_file(path);
  auto lines = tio::split_lines(data);
  if (lines.empty() || lines[0] != "wnfdi-selection v1")
    throw io_error("corrupt selection file " + path + ": bad signature line");

  SensorSelection sel;
  bool have_method = false, have_indices = false;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    std::string_view line = tio::trim(lines[k]);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw io_error("corrupt selection file " + path + ": malformed line");
    std::string key(tio::trim(line.substr(0, eq)));
    std::string_view val = tio::trim(line.substr(eq + 1));
    if (key == "method") {
      have_method = true;
      if (val == "msc") sel.method = PlacementMethod::msc;
      else if (val == "mtc") sel.method = PlacementMethod::mtc;
      else if (val == "graph-gs") sel.method = PlacementMethod::graph_gs;
      else throw io_error("corrupt selection file " + path +
                          ": unknown method");
    } else if (key == "s") {
      if (!tio::parse_int(val, sel.params.s))
        throw io_error("corrupt selection file " + path + ": bad s");
    } else if (key == "lambda") {
      if (!tio::parse_double(val, sel.params.lambda))
        throw io_error("corrupt selection file " + path + ": bad lambda");
    } else if (key == "tau") {
      if (!tio::parse_double(val, sel.params.tau))
        throw io_error("corrupt selection file " + path + ": bad tau");
    } else if (key == "policy") {
      if (val == "any") sel.params.policy = BinarizePolicy::any;
      else if (val == "all") sel.params.policy = BinarizePolicy::all;
      else if (val == "majority") sel.params.policy = BinarizePolicy::majority;
      else throw io_error("corrupt selection file " + path +
                          ": unknown policy");
    } else if (key == "dataset_hash") {
      if (!tio::parse_hex64(val, sel.dataset_hash))
        throw io_error("corrupt selection file " + path + ": bad hash");
    } else if (key == "indices") {
      have_indices = true;
      for (auto f : tio::split_ws(val)) {
        int idx;
        if (!tio::parse_int(f, idx) || idx < 1)
          throw io_error("corrupt selection file " + path + ": bad index");
        sel.indices.push_back(idx);
      }
    } else if (key == "covered" || key == "total" || key == "uncovered") {
      // Coverage block is informational; ignored on load.
    } else {
      throw io_error("corrupt selection file " + path + ": unknown key '" +
                     key + "'");
    }
  }
  if (!have_method || !have_indices)
    throw io_error("corrupt selection file " + path + ": incomplete");
  return sel;
}

}  // namespace wnfdi
