#include "wnfdi/dictlearn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>

#include "wnfdi/errors.hpp"
#include "textio.hpp"

namespace wnfdi {

namespace tio = textio;

Eigen::VectorXd omp(const Eigen::MatrixXd& D, const Eigen::VectorXd& y,
                    int sparsity, double tol) {
  const int m = static_cast<int>(D.rows());
  const int b = static_cast<int>(D.cols());
  if (b < 1) throw validation_error("omp: dictionary has no atoms");
  if (y.size() != m) throw validation_error("omp: signal length mismatch");
  if (sparsity < 1) throw validation_error("omp: sparsity must be positive");
  if (sparsity > b)
    throw validation_error("omp: sparsity " + tio::fmt(sparsity) +
                           " exceeds atom count " + tio::fmt(b));

  Eigen::VectorXd norms(b);
  for (int j = 0; j < b; ++j) norms(j) = D.col(j).norm();

  Eigen::VectorXd x = Eigen::VectorXd::Zero(b);
  Eigen::VectorXd r = y;
  std::vector<int> support;
  std::vector<char> in_support(static_cast<std::size_t>(b), 0);
  Eigen::VectorXd coef;

  for (int k = 0; k < sparsity; ++k) {
    if (r.norm() <= tol) break;
    // Column-norm compensated correlation; ties keep the lowest index.
    Eigen::VectorXd corr = D.transpose() * r;
    int best = -1;
    double best_val = 0.0;
    for (int j = 0; j < b; ++j) {
      if (in_support[static_cast<std::size_t>(j)] || norms(j) <= 0) continue;
      double v = std::abs(corr(j)) / norms(j);
      if (v > best_val) {
        best_val = v;
        best = j;
      }
    }
    if (best < 0 || best_val <= 0) break;  // residual orthogonal to atoms
    in_support[static_cast<std::size_t>(best)] = 1;
    support.push_back(best);

    Eigen::MatrixXd Ds(m, static_cast<int>(support.size()));
    for (std::size_t i = 0; i < support.size(); ++i)
      Ds.col(static_cast<Eigen::Index>(i)) =
          D.col(support[static_cast<std::size_t>(i)]);
    coef = Ds.colPivHouseholderQr().solve(y);
    r = y - Ds * coef;
  }
  for (std::size_t i = 0; i < support.size(); ++i)
    x(support[i]) = coef(static_cast<Eigen::Index>(i));
  return x;
}

LabelMatrices build_label_matrices(const std::vector<int>& labels,
                                   int n_classes, int atoms_per_class,
                                   int shared_atoms) {
  if (n_classes < 1) throw validation_error("label matrices: no classes");
  if (atoms_per_class < 1)
    throw validation_error("label matrices: atoms per class must be >= 1");
  if (shared_atoms < 0)
    throw validation_error("label matrices: shared atom count is negative");
  const int b = n_classes * atoms_per_class + shared_atoms;
  const int l = static_cast<int>(labels.size());

  LabelMatrices lm;
  lm.H = Eigen::MatrixXd::Zero(n_classes, l);
  lm.Q = Eigen::MatrixXd::Zero(b, l);
  for (int j = 0; j < l; ++j) {
    int cls = labels[static_cast<std::size_t>(j)];
    if (cls < 1 || cls > n_classes)
      throw validation_error("label out of range: " + tio::fmt(cls));
    lm.H(cls - 1, j) = 1.0;
    for (int a = 0; a < atoms_per_class; ++a)
      lm.Q((cls - 1) * atoms_per_class + a, j) = 1.0;
    for (int a = 0; a < shared_atoms; ++a)
      lm.Q(n_classes * atoms_per_class + a, j) = 1.0;
  }
  return lm;
}

ObjectiveParts lcksvd_objective(const Eigen::MatrixXd& D,
                                const Eigen::MatrixXd& W,
                                const Eigen::MatrixXd& A,
                                const Eigen::MatrixXd& X,
                                const Eigen::MatrixXd& Y,
                                const Eigen::MatrixXd& H,
                                const Eigen::MatrixXd& Q, double alpha,
                                double beta) {
  ObjectiveParts parts;
  parts.reconstruction = (Y - D * X).squaredNorm();
  parts.classifier = alpha * (H - W * X).squaredNorm();
  parts.consistency = beta * (Q - A * X).squaredNorm();
  return parts;
}

void aksvd_atom_update(Eigen::MatrixXd& D, Eigen::MatrixXd& X,
                       const Eigen::MatrixXd& Y, int atom, int inner_iters) {
  const int b = static_cast<int>(D.cols());
  const int l = static_cast<int>(Y.cols());
  if (atom < 0 || atom >= b)
    throw validation_error("atom index out of range: " + tio::fmt(atom));
  if (X.rows() != b || X.cols() != l || D.rows() != Y.rows())
    throw validation_error("atom update: shape mismatch");
  if (inner_iters < 1)
    throw validation_error("atom update: inner iteration count must be >= 1");

  std::vector<int> users;
  for (int j = 0; j < l; ++j)
    if (X(atom, j) != 0.0) users.push_back(j);

  if (users.empty()) {
    // Replace a silent atom with the worst represented signal; coefficients
    // stay zero so the objective is untouched.
    int worst = -1;
    double worst_err = -1.0;
    for (int j = 0; j < l; ++j) {
      double err = (Y.col(j) - D * X.col(j)).squaredNorm();
      if (err > worst_err) {
        worst_err = err;
        worst = j;
      }
    }
    if (worst >= 0) {
      double ny = Y.col(worst).norm();
      if (ny > 0) D.col(atom) = Y.col(worst) / ny;
    }
    return;
  }

  // Residual restricted to the users, with this atom's contribution undone.
  const int u = static_cast<int>(users.size());
  Eigen::MatrixXd E(Y.rows(), u);
  Eigen::VectorXd xu(u);
  for (int k = 0; k < u; ++k) {
    int j = users[static_cast<std::size_t>(k)];
    E.col(k) = Y.col(j) - D * X.col(j) + D.col(atom) * X(atom, j);
    xu(k) = X(atom, j);
  }

  Eigen::VectorXd d = D.col(atom);
  for (int it = 0; it < inner_iters; ++it) {
    Eigen::VectorXd v = E * xu;
    double nv = v.norm();
    if (nv > 0) d = v / nv;
    xu = E.transpose() * d;
  }
  D.col(atom) = d;
  for (int k = 0; k < u; ++k)
    X(atom, users[static_cast<std::size_t>(k)]) = xu(k);
}

namespace {

// Ridge-regularized least squares fit  M ~ T X  ->  M X^T (X X^T + I)^-1.
Eigen::MatrixXd ridge_fit(const Eigen::MatrixXd& T, const Eigen::MatrixXd& X) {
  Eigen::MatrixXd gram = X * X.transpose();
  gram.diagonal().array() += 1.0;
  // Solve gram * Z = X T^T, answer is Z^T.
  return gram.ldlt().solve(X * T.transpose()).transpose();
}

Eigen::MatrixXd regularized_inverse(const Eigen::MatrixXd& G, double ridge) {
  const Eigen::Index b = G.rows();
  double scale = std::max(1.0, G.trace() / static_cast<double>(b));
  Eigen::MatrixXd Gr = G;
  Gr.diagonal().array() += ridge * scale;
  return Gr.ldlt().solve(Eigen::MatrixXd::Identity(b, b));
}

// Columns sorted by norm descending (stable: equal norms keep file order).
std::vector<int> by_norm_desc(const Eigen::MatrixXd& Y,
                              const std::vector<int>& cols) {
  std::vector<int> order = cols;
  std::stable_sort(order.begin(), order.end(), [&](int a, int bb) {
    return Y.col(a).norm() > Y.col(bb).norm();
  });
  return order;
}

}  // namespace

DLModel lcksvd_pretrain(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& H,
                        const Eigen::MatrixXd& Q, int n_classes,
                        const DLHyper& hyper, Eigen::MatrixXd* reps_out) {
  const int m = static_cast<int>(Y.rows());
  const int l = static_cast<int>(Y.cols());
  const int apc = hyper.atoms_per_class;
  const int shared = hyper.shared_atoms;
  const int b = n_classes * apc + shared;
  if (l < 1) throw validation_error("pre-training: no signals");
  if (n_classes < 1) throw validation_error("pre-training: no classes");
  if (apc < 1) throw validation_error("pre-training: atoms per class < 1");
  if (H.rows() != n_classes || H.cols() != l)
    throw validation_error("pre-training: label matrix shape mismatch");
  if (Q.rows() != b || Q.cols() != l)
    throw validation_error("pre-training: consistency matrix shape mismatch");
  if (!(hyper.alpha >= 0) || !(hyper.beta >= 0))
    throw validation_error("pre-training: alpha and beta must be >= 0");

  // Column labels and per-class membership.
  std::vector<std::vector<int>> members(static_cast<std::size_t>(n_classes));
  for (int j = 0; j < l; ++j) {
    int cls = -1;
    for (int cIdx = 0; cIdx < n_classes; ++cIdx)
      if (H(cIdx, j) != 0.0) {
        cls = cIdx;
        break;
      }
    if (cls < 0)
      throw validation_error("pre-training: column " + tio::fmt(j + 1) +
                             " has no class label");
    members[static_cast<std::size_t>(cls)].push_back(j);
  }
  std::string missing;
  for (int cIdx = 0; cIdx < n_classes; ++cIdx)
    if (members[static_cast<std::size_t>(cIdx)].empty())
      missing += (missing.empty() ? "" : ", ") + tio::fmt(cIdx + 1);
  if (!missing.empty())
    throw validation_error("pre-training: no signals for classes " + missing);

  const int s0 = std::min(hyper.sparsity, b);

  // Per-class dictionary blocks, initialized from the strongest signals of
  // the class, then refined on the class data alone.
  Eigen::MatrixXd D0(m, b);
  for (int cIdx = 0; cIdx < n_classes; ++cIdx) {
    const std::vector<int>& cols = members[static_cast<std::size_t>(cIdx)];
    std::vector<int> order = by_norm_desc(Y, cols);
    Eigen::MatrixXd Dc(m, apc);
    for (int a = 0; a < apc; ++a) {
      const Eigen::VectorXd& y =
          Y.col(order[static_cast<std::size_t>(a) % order.size()]);
      double ny = y.norm();
      if (ny > 0)
        Dc.col(a) = y / ny;
      else
        Dc.col(a) = Eigen::VectorXd::Unit(m, a % m);
    }
    Eigen::MatrixXd Yc(m, static_cast<int>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k)
      Yc.col(static_cast<Eigen::Index>(k)) = Y.col(cols[k]);
    const int sc = std::min(s0, apc);
    Eigen::MatrixXd Xc(apc, Yc.cols());
    for (int it = 0; it < hyper.iters_class; ++it) {
      for (Eigen::Index j = 0; j < Yc.cols(); ++j)
        Xc.col(j) = omp(Dc, Yc.col(j), sc);
      for (int a = 0; a < apc; ++a) aksvd_atom_update(Dc, Xc, Yc, a);
    }
    D0.middleCols(cIdx * apc, apc) = Dc;
  }
  if (shared > 0) {
    std::vector<int> all(static_cast<std::size_t>(l));
    std::iota(all.begin(), all.end(), 0);
    std::vector<int> order = by_norm_desc(Y, all);
    for (int a = 0; a < shared; ++a) {
      const Eigen::VectorXd& y =
          Y.col(order[static_cast<std::size_t>(a) % order.size()]);
      double ny = y.norm();
      if (ny > 0)
        D0.col(n_classes * apc + a) = y / ny;
      else
        D0.col(n_classes * apc + a) = Eigen::VectorXd::Unit(m, a % m);
    }
  }

  // Classifier and consistency transform start as ridge fits over the
  // initial representations.
  Eigen::MatrixXd X(b, l);
  for (int j = 0; j < l; ++j) X.col(j) = omp(D0, Y.col(j), s0);
  Eigen::MatrixXd W0 = ridge_fit(H, X);
  Eigen::MatrixXd A0 = ridge_fit(Q, X);

  // Joint refinement on the stacked problem.
  const double sa = std::sqrt(hyper.alpha);
  const double sb = std::sqrt(hyper.beta);
  Eigen::MatrixXd Z(m + n_classes + b, b);
  Z.topRows(m) = D0;
  Z.middleRows(m, n_classes) = sa * W0;
  Z.bottomRows(b) = sb * A0;
  for (int j = 0; j < b; ++j) {
    double nz = Z.col(j).norm();
    if (nz > 0) Z.col(j) /= nz;
  }
  Eigen::MatrixXd Yt(m + n_classes + b, l);
  Yt.topRows(m) = Y;
  Yt.middleRows(m, n_classes) = sa * H;
  Yt.bottomRows(b) = sb * Q;

  Eigen::MatrixXd Xs(b, l);
  for (int it = 0; it < hyper.iters_full; ++it) {
    for (int j = 0; j < l; ++j) Xs.col(j) = omp(Z, Yt.col(j), s0);
    for (int a = 0; a < b; ++a) aksvd_atom_update(Z, Xs, Yt, a);
  }
  // Final representations against the final stacked dictionary, so the Gram
  // below matches what the online stage will see.
  for (int j = 0; j < l; ++j) Xs.col(j) = omp(Z, Yt.col(j), s0);

  // Unstack with column-norm compensation: D gets unit columns, W/A and the
  // representations absorb the scaling.
  DLModel model;
  model.hyper = hyper;
  model.n_classes = n_classes;
  Eigen::MatrixXd Draw = Z.topRows(m);
  Eigen::VectorXd g(b);
  for (int j = 0; j < b; ++j) {
    double n = Draw.col(j).norm();
    g(j) = n > 1e-300 ? n : 1.0;
  }
  model.D = Draw * g.cwiseInverse().asDiagonal();
  if (hyper.alpha > 0)
    model.W = (Z.middleRows(m, n_classes) / sa) * g.cwiseInverse().asDiagonal();
  if (hyper.beta > 0)
    model.A = (Z.bottomRows(b) / sb) * g.cwiseInverse().asDiagonal();
  Eigen::MatrixXd Xfinal = g.asDiagonal() * Xs;
  if (hyper.alpha <= 0) model.W = ridge_fit(H, Xfinal);
  if (hyper.beta <= 0) model.A = ridge_fit(Q, Xfinal);

  model.G = Xfinal * Xfinal.transpose();
  model.Ginv = regularized_inverse(model.G, hyper.gram_ridge);
  model.atom_class.assign(static_cast<std::size_t>(b), 0);
  for (int cIdx = 0; cIdx < n_classes; ++cIdx)
    for (int a = 0; a < apc; ++a)
      model.atom_class[static_cast<std::size_t>(cIdx * apc + a)] = cIdx + 1;
  model.processed = 0;
  if (reps_out != nullptr) *reps_out = Xfinal;
  return model;
}

Eigen::MatrixXd tempered_update(const Eigen::MatrixXd& W0,
                                const Eigen::VectorXd& h,
                                const Eigen::VectorXd& x, double lambda) {
  if (W0.rows() != h.size() || W0.cols() != x.size())
    throw validation_error("tempered update: shape mismatch");
  double denom = lambda + x.squaredNorm();
  if (!(denom > 0)) return W0;  // no information in the sample
  return W0 + (h - W0 * x) * (x.transpose() / denom);
}

double spectral_norm_psd(const Eigen::MatrixXd& G, Eigen::VectorXd* warm) {
  const Eigen::Index b = G.rows();
  if (b == 0) return 0.0;
  Eigen::VectorXd v;
  if (warm != nullptr && warm->size() == b && warm->norm() > 0)
    v = *warm / warm->norm();
  else
    v = Eigen::VectorXd::Constant(b, 1.0 / std::sqrt(static_cast<double>(b)));

  double value = 0.0;
  for (int it = 0; it < 50; ++it) {
    Eigen::VectorXd w = G * v;
    double nw = w.norm();
    if (nw <= 0) {
      value = 0.0;
      break;
    }
    v = w / nw;
    if (it > 0 && std::abs(nw - value) <= 1e-8 * std::max(1.0, nw)) {
      value = nw;
      break;
    }
    value = nw;
  }
  if (warm != nullptr) *warm = v;
  return value;
}

namespace {

Eigen::VectorXd class_indicator(const DLModel& model, int cls) {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(model.n_atoms());
  for (int a = 0; a < model.n_atoms(); ++a) {
    int owner = model.atom_class[static_cast<std::size_t>(a)];
    if (owner == cls || owner == 0) q(a) = 1.0;
  }
  return q;
}

int argmax_lowest(const Eigen::VectorXd& scores) {
  int best = 0;
  for (int i = 1; i < scores.size(); ++i)
    if (scores(i) > scores(best)) best = i;
  return best;
}

void renormalize(DLModel& model) {
  for (int j = 0; j < model.n_atoms(); ++j) {
    double g = model.D.col(j).norm();
    if (g <= 1e-300) continue;
    model.D.col(j) /= g;
    model.W.col(j) /= g;
    model.A.col(j) /= g;
    model.G.row(j) *= g;
    model.G.col(j) *= g;
    model.Ginv.row(j) /= g;
    model.Ginv.col(j) /= g;
  }
}

}  // namespace

void toddler_update(DLModel& model, const Eigen::VectorXd& y,
                    std::optional<int> label) {
  if (model.n_atoms() < 1 || model.n_classes < 1)
    throw validation_error("online update on a model that was never "
                           "pre-trained");
  if (y.size() != model.signal_dim())
    throw validation_error("online update: signal length mismatch");

  const int b = model.n_atoms();
  const int s0 = std::min(model.hyper.sparsity, b);
  const double sa = std::sqrt(model.hyper.alpha);
  const double sb = std::sqrt(model.hyper.beta);

  Eigen::VectorXd x, h, q;
  if (label.has_value()) {
    int cls = *label;
    if (cls < 1 || cls > model.n_classes)
      throw validation_error("online update: label out of range: " +
                             tio::fmt(cls));
    h = Eigen::VectorXd::Zero(model.n_classes);
    h(cls - 1) = 1.0;
    q = class_indicator(model, cls);
    // Encode against the stacked dictionary so the supervision rows steer
    // the support toward the labeled class.
    Eigen::MatrixXd Z(model.signal_dim() + model.n_classes + b, b);
    Z.topRows(model.signal_dim()) = model.D;
    Z.middleRows(model.signal_dim(), model.n_classes) = sa * model.W;
    Z.bottomRows(b) = sb * model.A;
    Eigen::VectorXd yt(model.signal_dim() + model.n_classes + b);
    yt.head(model.signal_dim()) = y;
    yt.segment(model.signal_dim(), model.n_classes) = sa * h;
    yt.tail(b) = sb * q;
    x = omp(Z, yt, s0);
  } else {
    x = omp(model.D, y, s0);
    if (!x.isZero(0.0)) {
      int cls = argmax_lowest(model.W * x) + 1;
      h = Eigen::VectorXd::Zero(model.n_classes);
      h(cls - 1) = 1.0;
      q = class_indicator(model, cls);
    }
  }
  if (x.size() == 0 || x.isZero(0.0)) return;  // nothing to learn from

  // Tempering: soft on the very first online signal, then proportional to
  // the energy already accumulated in the Gram.
  double lambda = model.processed == 0
                      ? model.hyper.lambda_init
                      : spectral_norm_psd(model.G, &model.gram_warm);

  // Recursive least-squares dictionary refresh.
  Eigen::VectorXd u = model.Ginv * x;
  double denom = 1.0 + x.dot(u);
  model.D += (y - model.D * x) * (u.transpose() / denom);

  model.W = tempered_update(model.W, h, x, lambda);
  model.A = tempered_update(model.A, q, x, lambda);

  model.G += x * x.transpose();
  model.Ginv -= (u * u.transpose()) / denom;
  model.processed += 1;

  if (model.hyper.renorm_every > 0 &&
      model.processed % model.hyper.renorm_every == 0)
    renormalize(model);
}

Classification classify(const DLModel& model, const Eigen::VectorXd& y) {
  if (model.n_atoms() < 1 || model.W.rows() < 1)
    throw validation_error("classify: model is not trained");
  Classification res;
  res.x = omp(model.D, y, std::min(model.hyper.sparsity, model.n_atoms()));
  res.scores = model.W * res.x;
  res.cls = argmax_lowest(res.scores) + 1;
  return res;
}

namespace {

void put_bytes(std::string& buf, const void* p, std::size_t n) {
  static_assert(std::endian::native == std::endian::little,
                "model files assume a little-endian host");
  buf.append(static_cast<const char*>(p), n);
}

void put_i32(std::string& buf, std::int32_t v) { put_bytes(buf, &v, 4); }
void put_i64(std::string& buf, std::int64_t v) { put_bytes(buf, &v, 8); }
void put_f64(std::string& buf, double v) { put_bytes(buf, &v, 8); }

void put_matrix(std::string& buf, const Eigen::MatrixXd& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) put_f64(buf, m(i, j));
}

struct ByteReader {
  const char* p;
  const char* end;
  const std::string& path;

  void need(std::size_t n) const {
    if (static_cast<std::size_t>(end - p) < n)
      throw io_error("corrupt model file " + path + ": truncated");
  }
  std::int32_t i32() {
    need(4);
    std::int32_t v;
    std::memcpy(&v, p, 4);
    p += 4;
    return v;
  }
  std::int64_t i64() {
    need(8);
    std::int64_t v;
    std::memcpy(&v, p, 8);
    p += 8;
    return v;
  }
  double f64() {
    need(8);
    double v;
    std::memcpy(&v, p, 8);
    p += 8;
    return v;
  }
  Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = f64();
    return m;
  }
};

}  // namespace

void save_model(const DLModel& model, const std::string& path) {
  std::string out = "wnfdi-model v1\n";
  put_i32(out, model.signal_dim());
  put_i32(out, model.n_atoms());
  put_i32(out, model.n_classes);
  put_f64(out, model.hyper.alpha);
  put_f64(out, model.hyper.beta);
  put_f64(out, model.hyper.lambda_init);
  put_i32(out, model.hyper.sparsity);
  put_i32(out, model.hyper.atoms_per_class);
  put_i32(out, model.hyper.shared_atoms);
  put_i32(out, model.hyper.iters_class);
  put_i32(out, model.hyper.iters_full);
  put_i32(out, model.hyper.renorm_every);
  put_f64(out, model.hyper.gram_ridge);
  put_i64(out, model.processed);
  put_i64(out, static_cast<std::int64_t>(model.dataset_hash));
  for (int a : model.atom_class) put_i32(out, a);
  put_matrix(out, model.D);
  put_matrix(out, model.W);
  put_matrix(out, model.A);
  put_matrix(out, model.G);
  tio::write_file(path, out);
}

DLModel load_model(const std::string& path) {
  std::string data = tio::read_file(path);
  const std::string sig = "wnfdi-model v1\n";
  if (data.size() < sig.size() || data.compare(0, sig.size(), sig) != 0)
    throw io_error("corrupt model file " + path + ": bad signature line");
  ByteReader r{data.data() + sig.size(), data.data() + data.size(), path};

  DLModel model;
  std::int32_t dim = r.i32();
  std::int32_t b = r.i32();
  model.n_classes = r.i32();
  if (dim < 1 || b < 1 || model.n_classes < 1)
    throw io_error("corrupt model file " + path + ": bad dimensions");
  model.hyper.alpha = r.f64();
  model.hyper.beta = r.f64();
  model.hyper.lambda_init = r.f64();
  model.hyper.sparsity = r.i32();
  model.hyper.atoms_per_class = r.i32();
  model.hyper.shared_atoms = r.i32();
  model.hyper.iters_class = r.i32();
  model.hyper.iters_full = r.i32();
  model.hyper.renorm_every = r.i32();
  model.hyper.gram_ridge = r.f64();
  model.processed = r.i64();
  model.dataset_hash = static_cast<std::uint64_t>(r.i64());
  model.atom_class.resize(static_cast<std::size_t>(b));
  for (std::int32_t a = 0; a < b; ++a)
    model.atom_class[static_cast<std::size_t>(a)] = r.i32();
  model.D = r.matrix(dim, b);
  model.W = r.matrix(model.n_classes, b);
  model.A = r.matrix(b, b);
  model.G = r.matrix(b, b);
  model.Ginv = regularized_inverse(model.G, model.hyper.gram_ridge);
  return model;
}

}  // namespace wnfdi
