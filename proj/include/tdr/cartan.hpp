#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "tdr/group.hpp"

namespace tdr {

// Log-scale singular data of a matrix: kappa is the nonincreasing vector of
// log singular values (sums to ~0 for determinant-one input), left/right are
// the corresponding orthonormal singular bases.
struct CartanFrame {
  Eigen::VectorXd kappa;
  Eigen::MatrixXd left;
  Eigen::MatrixXd right;
};

CartanFrame cartan_projection(const Eigen::MatrixXd& g);

// Long products b1...bn evaluated without overflow: scalar renormalization
// per step, with kappa of the full product recovered from the accumulated
// top log-norms of the exterior powers.
struct RenormProduct {
  CartanFrame frame;          // kappa of the full (unscaled) product
  double log_scale = 0.0;     // renormalized = product * exp(-log_scale)
  Eigen::MatrixXd renormalized;
};

RenormProduct renormalized_product(const Word& w, const WalkConfig& cfg);

struct LyapunovEstimate {
  double lambda = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;
  int n = 0, N = 0;
};

LyapunovEstimate lyapunov_estimate(const WalkConfig& cfg, int n, int N,
                                   std::uint64_t seed, int threads = 1);
// same estimator with caller-chosen replica streams
LyapunovEstimate lyapunov_estimate_with_streams(const WalkConfig& cfg, int n,
                                                const std::vector<std::uint64_t>& replica_seeds);

// Complete flag V_1 c ... c V_{d-1}: V_k is the span of the first k columns
// of an orthonormal matrix.
class Flag {
 public:
  static Flag standard(int d);
  static Flag from_orthonormal(Eigen::MatrixXd q);
  // flag of the top singular directions (left basis)
  static Flag from_frame(const CartanFrame& f, double gap_tol = 1e-9);

  const Eigen::MatrixXd& basis() const { return q_; }
  int dim() const { return static_cast<int>(q_.rows()); }

  // g . flag, re-orthonormalized (Gram-Schmidt via QR, positive diagonal)
  Flag transported(const Eigen::MatrixXd& g) const;

 private:
  Eigen::MatrixXd q_;
};

// Iwasawa cocycle value sigma(g, xi) as a vector in the Cartan space
// {x in R^d : sum x = 0}; partial sums x_1+...+x_k equal the log growth of
// the k-th exterior power along the flag.
Eigen::VectorXd iwasawa_cocycle(const Eigen::MatrixXd& g, const Flag& xi);

struct DensityPoints {
  Eigen::MatrixXd xi_plus;   // top-r left singular subspace (orthonormal cols)
  Eigen::MatrixXd v_minus;   // orthocomplement of top-r right singular subspace
};

// pre: kappa[r-1] - kappa[r] > gap_tol, else GapError
DensityPoints density_points(const CartanFrame& f, int r, double gap_tol = 1e-9);

struct GrowthContractionReport {
  double kappa_top = 0.0;
  double dist_v_minus = 0.0;   // d(Rv, V^-)
  double norm_gv = 0.0;
  double lower = 0.0, upper = 0.0;   // bounds on ||g v||
  double dir_dist = 0.0;             // d(g Rv, top left direction)
  double dir_bound = 0.0;
  bool norm_ok = false, dir_ok = false;
  bool ok() const { return norm_ok && dir_ok; }
};

// Checks the two-sided norm bound and the direction-contraction bound for
// (g, v) with relative slack `slack`.
GrowthContractionReport check_growth_contraction(const Eigen::MatrixXd& g,
                                                 const Eigen::VectorXd& v,
                                                 double slack = 1e-9);

// sigma(b1...bn, xi) where xi approximates the forward limit flag of the
// word tail, realized as the left singular flag of the lookahead product
// b_{n+1}...b_{n+m}.  pre: w.size() >= n + lookahead.
Eigen::VectorXd theta_n(const WalkConfig& cfg, const Word& w, int n, int lookahead);

// lookahead flag used by theta_n, exposed so fiber computations can share it
Flag lookahead_flag(const WalkConfig& cfg, const Word& w, int n, int lookahead);
// sigma(prefix of w up to n, xi) for a caller-supplied flag
Eigen::VectorXd iwasawa_along_word(const WalkConfig& cfg, const Word& w, int n, const Flag& xi);

// Projective distance between equal-dimension subspaces given by orthonormal
// column bases: sin of the largest principal angle.
double subspace_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct DensityConvergenceRow {
  int n = 0;
  double median_dist = 0.0;
  int dropped = 0;
};

struct DensityConvergenceResult {
  std::vector<DensityConvergenceRow> rows;
  double rate = 0.0;  // fitted exponential decay rate of the medians
};

DensityConvergenceResult density_convergence(const WalkConfig& cfg,
                                             const std::vector<int>& n_list, int N,
                                             std::uint64_t seed, int r = 1);

// Exterior power of a matrix: the C(d,k) x C(d,k) matrix of k x k minors,
// rows/columns indexed by lexicographic k-subsets.
Eigen::MatrixXd wedge_matrix(const Eigen::MatrixXd& g, int k);

}  // namespace tdr
