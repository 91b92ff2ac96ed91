#include "wnfdi/hydraulics.hpp"

#include <algorithm>
#include <cmath>

#include "wnfdi/errors.hpp"
#include "textio.hpp"

namespace wnfdi {

double conductance(const Pipe& p) {
  return std::pow(p.roughness, 1.852) * std::pow(p.diameter_m, 4.87) /
         (10.67 * p.length_m);
}

double headloss(double q_m3s, const Pipe& p) {
  double r = 10.67 * p.length_m /
             (std::pow(p.roughness, 1.852) * std::pow(p.diameter_m, 4.87));
  return r * q_m3s * std::pow(std::abs(q_m3s), 0.852);
}

double flow_from_headloss(double conductance, double dh_m, double eps_m) {
  return std::pow(conductance, 0.54) * dh_m *
         std::pow(dh_m * dh_m + eps_m * eps_m, -0.23);
}

namespace {

// Per-pipe data resolved once per solve.
struct EdgeData {
  int a = -1, b = -1;        // junction indices (0-based), -1 if tank end
  double fixed_head = 0.0;   // contribution of tank endpoints to dh
  double gpow = 0.0;         // conductance^0.54
};

// dh along a pipe is h(from) - h(to); tank ends contribute their fixed head.
std::vector<EdgeData> edge_data(const Network& net) {
  std::vector<EdgeData> edges(static_cast<std::size_t>(net.n_pipes()));
  for (int e = 0; e < net.n_pipes(); ++e) {
    const Pipe& p = net.pipes[static_cast<std::size_t>(e)];
    EdgeData& d = edges[static_cast<std::size_t>(e)];
    d.gpow = std::pow(conductance(p), 0.54);
    if (is_junction(p.from))
      d.a = junction_index(p.from) - 1;
    else
      d.fixed_head += net.tanks[static_cast<std::size_t>(tank_index(p.from) - 1)].head_m;
    if (is_junction(p.to))
      d.b = junction_index(p.to) - 1;
    else
      d.fixed_head -= net.tanks[static_cast<std::size_t>(tank_index(p.to) - 1)].head_m;
  }
  return edges;
}

// Mass balance F(h) = B q(h) - c and its infinity norm.
double balance(const std::vector<EdgeData>& edges, const Eigen::VectorXd& h,
               const Eigen::VectorXd& c, double eps, Eigen::VectorXd& F,
               Eigen::VectorXd& dh_out, Eigen::VectorXd& q_out) {
  F = -c;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const EdgeData& d = edges[e];
    double dh = d.fixed_head;
    if (d.a >= 0) dh += h(d.a);
    if (d.b >= 0) dh -= h(d.b);
    double q = d.gpow * dh * std::pow(dh * dh + eps * eps, -0.23);
    dh_out(static_cast<Eigen::Index>(e)) = dh;
    q_out(static_cast<Eigen::Index>(e)) = q;
    // Column e of B has -1 at the from-junction and +1 at the to-junction.
    if (d.a >= 0) F(d.a) -= q;
    if (d.b >= 0) F(d.b) += q;
  }
  return F.lpNorm<Eigen::Infinity>();
}

}  // namespace

Eigen::VectorXd demand_vector(const Network& net, const DemandSpec& spec) {
  const int n = net.n_junctions();
  double base_sum = 0.0;
  for (const Junction& j : net.junctions) base_sum += j.base_demand_m3s;
  if (!(base_sum > 0))
    throw validation_error(
        "total base demand is zero; demands cannot be distributed");
  if (spec.noise.size() != 0 && spec.noise.size() != n)
    throw validation_error("noise vector length does not match junction count");

  double inflow =
      spec.total_inflow_m3s < 0 ? base_sum : spec.total_inflow_m3s;
  Eigen::VectorXd c(n);
  for (int i = 0; i < n; ++i) {
    c(i) = net.junctions[static_cast<std::size_t>(i)].base_demand_m3s /
           base_sum * spec.scale * inflow;
    if (spec.noise.size() == n) c(i) += spec.noise(i);
  }
  if (spec.fault) {
    if (spec.fault->node < 1 || spec.fault->node > n)
      throw validation_error("fault node index out of range: " +
                             textio::fmt(spec.fault->node));
    c(spec.fault->node - 1) += spec.fault->magnitude_m3s;
  }
  return c;
}

HydraulicState solve_steady_state(const Network& net, const Eigen::VectorXd& c,
                                  const SolverOptions& opts,
                                  const Eigen::VectorXd* init) {
  const int n = net.n_junctions();
  const int m = net.n_pipes();
  if (c.size() != n)
    throw validation_error("demand vector length does not match junction count");

  std::vector<EdgeData> edges = edge_data(net);
  const double eps = opts.epsilon_m;
  const double tol = opts.tol_rel * std::max(1.0, c.lpNorm<Eigen::Infinity>());

  HydraulicState st;
  if (init != nullptr) {
    if (init->size() != n)
      throw validation_error("initial head vector length mismatch");
    st.heads = *init;
  } else {
    double h0 = net.tanks.front().head_m;
    for (const Tank& t : net.tanks) h0 = std::max(h0, t.head_m);
    st.heads = Eigen::VectorXd::Constant(n, h0 - opts.init_drop_m);
  }

  Eigen::VectorXd F(n), dh(m), q(m), F_try(n), dh_try(m), q_try(m);
  Eigen::MatrixXd L(n, n);
  Eigen::LDLT<Eigen::MatrixXd> ldlt;

  double fnorm = balance(edges, st.heads, c, eps, F, dh, q);
  for (st.iterations = 0; st.iterations < opts.max_iter; ++st.iterations) {
    if (!std::isfinite(fnorm))
      throw numerical_error("non-finite mass balance residual");
    if (fnorm <= tol) {
      st.converged = true;
      break;
    }

    // Weighted Laplacian: weight per pipe is the derivative of the smoothed
    // flow law, g^0.54 (dh^2+eps^2)^-1.23 (0.54 dh^2 + eps^2) > 0.
    L.setZero();
    for (int e = 0; e < m; ++e) {
      const EdgeData& d = edges[static_cast<std::size_t>(e)];
      double x = dh(e);
      double w = d.gpow * std::pow(x * x + eps * eps, -1.23) *
                 (0.54 * x * x + eps * eps);
      if (!std::isfinite(w)) throw numerical_error("non-finite Jacobian entry");
      if (d.a >= 0) L(d.a, d.a) += w;
      if (d.b >= 0) L(d.b, d.b) += w;
      if (d.a >= 0 && d.b >= 0) {
        L(d.a, d.b) -= w;
        L(d.b, d.a) -= w;
      }
    }

    // Newton step: the residual derivative along heads is -L, so h <- h + s
    // with L s = F.
    ldlt.compute(L);
    if (ldlt.info() != Eigen::Success)
      throw numerical_error("Jacobian factorization failed");
    Eigen::VectorXd s = ldlt.solve(F);
    if (!s.allFinite()) throw numerical_error("non-finite Newton step");

    // Backtracking on the balance norm.
    double alpha = 1.0;
    double fnorm_try = 0.0;
    for (int k = 0; k <= opts.max_backtrack; ++k) {
      Eigen::VectorXd h_try = st.heads + alpha * s;
      fnorm_try = balance(edges, h_try, c, eps, F_try, dh_try, q_try);
      if (fnorm_try < fnorm || k == opts.max_backtrack) {
        st.heads = h_try;
        break;
      }
      alpha *= 0.5;
    }
    F = F_try;
    dh = dh_try;
    q = q_try;
    fnorm = fnorm_try;
  }
  if (!st.converged && fnorm <= tol) st.converged = true;

  st.flows = q;
  st.residual = fnorm;
  return st;
}

ScenarioResult simulate_scenario(const Network& net, const ProfileBank& bank,
                                 int profile_index,
                                 const std::vector<int>& window,
                                 const DemandSpec& spec,
                                 const SolverOptions& opts,
                                 std::vector<Eigen::VectorXd>* samples) {
  if (profile_index < 1 || profile_index > bank.n_profiles())
    throw validation_error("profile index out of range: " +
                           textio::fmt(profile_index));
  if (window.empty()) throw validation_error("empty averaging window");
  const std::vector<double>& profile =
      bank.profiles[static_cast<std::size_t>(profile_index - 1)];
  for (int t : window)
    if (t < 0 || t >= static_cast<int>(profile.size()))
      throw validation_error("window index out of range: " + textio::fmt(t));

  ScenarioResult res;
  res.mean_heads = Eigen::VectorXd::Zero(net.n_junctions());
  res.valid = true;
  if (samples != nullptr) samples->clear();

  Eigen::VectorXd prev;
  bool have_prev = false;
  for (int t : window) {
    DemandSpec at_t = spec;
    at_t.scale = profile[static_cast<std::size_t>(t)];
    Eigen::VectorXd c = demand_vector(net, at_t);
    HydraulicState st =
        solve_steady_state(net, c, opts, have_prev ? &prev : nullptr);
    if (!st.converged) res.valid = false;
    prev = st.heads;
    have_prev = true;
    res.mean_heads += st.heads;
    if (samples != nullptr) samples->push_back(st.heads);
  }
  res.mean_heads /= static_cast<double>(window.size());
  return res;
}

}  // namespace wnfdi
