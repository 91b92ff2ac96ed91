#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "wnfdi/network.hpp"

namespace wnfdi {

// Steady-state hydraulics under the Hazen-Williams headloss model.
//
// For a pipe carrying flow q (m^3/s), the head drop along the flow direction
// is  dh = (10.67 L / (C^1.852 D^4.87)) * q * |q|^0.852  (meters). We work
// with the pipe conductance  g = C^1.852 D^4.87 / (10.67 L)  and the inverse
// law  q = g^0.54 * dh * |dh|^-0.46.
//
// Near dh = 0 the inverse law has unbounded slope, so the solver uses the
// smoothed form  q = g^0.54 * dh * (dh^2 + eps^2)^-0.23  with a small eps in
// meters. The smoothing error is negligible once |dh| >> eps.

double conductance(const Pipe& p);

// Head drop for a signed flow; odd in q, zero at zero.
double headloss(double q_m3s, const Pipe& p);

// Smoothed inverse law; odd in dh, zero at zero, strictly increasing.
double flow_from_headloss(double conductance, double dh_m, double eps_m);

struct SolverOptions {
  double epsilon_m = 1e-6;   // headloss smoothing scale
  double tol_rel = 1e-8;     // absolute tolerance = tol_rel * max(1, |c|_inf)
  int max_iter = 200;
  int max_backtrack = 30;    // step halvings per Newton iteration
  double init_drop_m = 5.0;  // initial guess: max tank head minus this
};

struct HydraulicState {
  Eigen::VectorXd heads;   // junction heads, meters
  Eigen::VectorXd flows;   // pipe flows, m^3/s, signed from->to
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;   // final mass balance error |B q - c|_inf
};

// Solves the nodal balance B q(h) = c for junction heads by damped Newton.
// The Jacobian is a weighted grounded graph Laplacian (symmetric positive
// definite for a connected network with a tank), factored with dense LDLT.
// Non-convergence is reported via `converged`, not an exception; non-finite
// arithmetic (NaN residual or Jacobian) throws numerical_error.
//
// `c` is the junction demand vector in m^3/s (positive = extraction).
// `init` optionally warm-starts the iteration.
HydraulicState solve_steady_state(const Network& net, const Eigen::VectorXd& c,
                                  const SolverOptions& opts = {},
                                  const Eigen::VectorXd* init = nullptr);

// A single fault: extra extraction of `magnitude_m3s` at one junction.
struct FaultSpec {
  int node = 0;  // 1-based junction index
  double magnitude_m3s = 0.0;
};

// Demand assembly: junction i draws a share of the total inflow
// proportional to its base demand, scaled by the profile value, plus
// uncertainty and an optional fault:
//   c_i = (base_i / sum(base)) * scale * total_inflow + noise_i + fault_i.
// With total_inflow equal to sum(base) (the default) this reduces to
// c_i = base_i * scale + noise_i + fault_i.
struct DemandSpec {
  double scale = 1.0;                   // demand profile value p(t)
  double total_inflow_m3s = -1.0;       // < 0 means "sum of base demands"
  Eigen::VectorXd noise;                // per-junction, empty = zeros
  std::optional<FaultSpec> fault;
};

Eigen::VectorXd demand_vector(const Network& net, const DemandSpec& spec);

// A bank of demand profiles; profiles[p] holds the scale factors over one
// day. Profile 1 is the nominal curve; the rest are noisy variants.
struct ProfileBank {
  std::vector<std::vector<double>> profiles;

  int n_profiles() const { return static_cast<int>(profiles.size()); }
  int n_samples() const {
    return profiles.empty() ? 0 : static_cast<int>(profiles.front().size());
  }
};

// Simulates one measurement scenario: solves the steady state at each time
// index in `window` (profile scale taken from the bank; noise and fault from
// `spec` are held fixed) and averages the junction heads. Samples after the
// first warm-start from the previous solution. `valid` is false if any
// sample failed to converge; the caller decides whether to drop or abort.
struct ScenarioResult {
  Eigen::VectorXd mean_heads;
  bool valid = false;
};

ScenarioResult simulate_scenario(const Network& net, const ProfileBank& bank,
                                 int profile_index,  // 1-based
                                 const std::vector<int>& window,  // 0-based
                                 const DemandSpec& spec,
                                 const SolverOptions& opts = {},
                                 std::vector<Eigen::VectorXd>* samples = nullptr);

}  // namespace wnfdi
