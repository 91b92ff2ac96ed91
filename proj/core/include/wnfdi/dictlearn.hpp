#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wnfdi {

// Discriminative dictionary learning with online updates.
//
// Batch stage: label-consistent K-SVD. The dictionary D, linear classifier W
// and label-consistency transform A are trained jointly by running plain
// dictionary learning on the stacked problem
//     Z = [D; sqrt(alpha) W; sqrt(beta) A],
//     Ytilde = [Y; sqrt(alpha) H; sqrt(beta) Q],
// where H holds one-hot class columns and Q the per-class atom indicators.
//
// Online stage: per signal, D is refreshed by a recursive least-squares
// rank-one update driven by the representation Gram inverse, and W, A by a
// tempered ridge step that pulls them toward reproducing the (known or
// self-assigned) label of the new signal.

// Orthogonal matching pursuit. Selects up to `sparsity` atoms, each step
// picking the atom with the largest |d_j^T residual| / |d_j| (ties -> lowest
// index), then refitting all selected coefficients by least squares.
// Stops early when the residual norm drops below `tol`. Returns the dense
// coefficient vector (zeros off the support).
Eigen::VectorXd omp(const Eigen::MatrixXd& D, const Eigen::VectorXd& y,
                    int sparsity, double tol = 1e-12);

struct LabelMatrices {
  Eigen::MatrixXd H;  // classes x signals, one-hot columns
  Eigen::MatrixXd Q;  // atoms x signals, 1 on the class block + shared atoms
};

// atom_class[b] is the owning class (1-based) of atom b, or 0 for shared
// atoms. Layout: class 1 block, class 2 block, ..., then shared atoms.
LabelMatrices build_label_matrices(const std::vector<int>& labels,
                                   int n_classes, int atoms_per_class,
                                   int shared_atoms);

struct DLHyper {
  double alpha = 4.0;        // classifier term weight
  double beta = 16.0;        // label-consistency term weight
  double lambda_init = 8.0;  // tempering on the first online update
  int sparsity = 5;          // OMP sparsity s0
  int atoms_per_class = 3;
  int shared_atoms = 3;
  int iters_class = 20;      // per-class block iterations
  int iters_full = 50;       // full stacked iterations
  int renorm_every = 100;    // online updates between column renormalizations
  double gram_ridge = 1e-8;  // relative ridge when (re)inverting the Gram
};

struct DLModel {
  Eigen::MatrixXd D;          // signal_dim x n_atoms, unit columns
  Eigen::MatrixXd W;          // n_classes x n_atoms
  Eigen::MatrixXd A;          // n_atoms x n_atoms
  Eigen::MatrixXd G;          // accumulated representation Gram, X X^T
  Eigen::MatrixXd Ginv;       // running inverse of G
  std::vector<int> atom_class;
  int n_classes = 0;
  DLHyper hyper;
  std::int64_t processed = 0;  // online signals folded in so far
  std::uint64_t dataset_hash = 0;  // provenance: dataset the model was fit on
  Eigen::VectorXd gram_warm;   // warm start for the spectral norm iteration

  int n_atoms() const { return static_cast<int>(D.cols()); }
  int signal_dim() const { return static_cast<int>(D.rows()); }
};

// Value of the stacked objective |Ytilde - Z X|_F^2, reported as the triple
// decomposition reconstruction / alpha-classifier / beta-consistency.
struct ObjectiveParts {
  double reconstruction = 0;
  double classifier = 0;
  double consistency = 0;
  double total() const {
    return reconstruction + classifier + consistency;
  }
};

ObjectiveParts lcksvd_objective(const Eigen::MatrixXd& D,
                                const Eigen::MatrixXd& W,
                                const Eigen::MatrixXd& A,
                                const Eigen::MatrixXd& X,
                                const Eigen::MatrixXd& Y,
                                const Eigen::MatrixXd& H,
                                const Eigen::MatrixXd& Q, double alpha,
                                double beta);

// One approximate K-SVD atom update on the implicit error matrix: with the
// signals using atom `atom`, set d <- normalize(E x) and x <- E^T d, with
// E the residual excluding this atom's contribution, repeated `inner_iters`
// times. If no signal uses the atom it is replaced by the direction of the
// worst-represented signal. D and X are updated in place.
void aksvd_atom_update(Eigen::MatrixXd& D, Eigen::MatrixXd& X,
                       const Eigen::MatrixXd& Y, int atom,
                       int inner_iters = 1);

// Batch pre-training. Y: signal_dim x n_signals; H/Q as above. Every class
// must contribute at least one signal. Returns the trained model with the
// Gram of the final representations; `reps_out`, if non-null, receives those
// representations.
DLModel lcksvd_pretrain(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& H,
                        const Eigen::MatrixXd& Q, int n_classes,
                        const DLHyper& hyper,
                        Eigen::MatrixXd* reps_out = nullptr);

// Tempered ridge step  W <- W + (h - W x) x^T / (lambda + x^T x); the
// closed-form minimizer of |h - W x|^2 + lambda |W - W0|_F^2 evaluated at
// the new sample. lambda = +inf leaves W unchanged.
Eigen::MatrixXd tempered_update(const Eigen::MatrixXd& W0,
                                const Eigen::VectorXd& h,
                                const Eigen::VectorXd& x, double lambda);

// One online update. With a label, the signal is encoded against the
// stacked dictionary with its supervision rows; without one, it is encoded
// against D alone and the predicted class substitutes for the label
// (self-supervision). A zero representation leaves the model untouched.
// The tempering weight is lambda_init for the first online signal and the
// spectral norm of G afterwards.
void toddler_update(DLModel& model, const Eigen::VectorXd& y,
                    std::optional<int> label);

struct Classification {
  int cls = 0;              // 1-based predicted class
  Eigen::VectorXd scores;   // W x
  Eigen::VectorXd x;        // representation
};

// Sparse-code y against D and score with W; ties -> lowest class index.
Classification classify(const DLModel& model, const Eigen::VectorXd& y);

// Spectral norm of a symmetric PSD matrix by power iteration (50 rounds or
// relative change < 1e-8); `warm` carries the iterate between calls.
double spectral_norm_psd(const Eigen::MatrixXd& G, Eigen::VectorXd* warm);

// Model file I/O (little-endian binary with a text signature line).
void save_model(const DLModel& model, const std::string& path);
DLModel load_model(const std::string& path);

}  // namespace wnfdi
