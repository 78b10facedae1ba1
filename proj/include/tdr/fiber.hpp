#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "tdr/cartan.hpp"
#include "tdr/torus.hpp"

namespace tdr {

// Base point of the fibered system: a long driving word, a Cartan-space
// offset z, the sign coordinate (orthogonal group in rank one), and a state.
struct BasePoint {
  Word b_word;
  Eigen::VectorXd z;   // length d, sum 0
  int sign = 1;
  StateXT state;
};

BasePoint make_base_point(const WalkConfig& cfg, int length, std::uint64_t seed,
                          double t0 = 0.0);

// Window in the (Cartan-coordinate, real-coordinate) directions.  U holds
// intervals for the first d-1 coordinates of the Cartan vector; I is the
// real interval and must be long enough that every translate meets the
// integer chi lattice.
struct WindowSpec {
  std::vector<std::pair<double, double>> U;
  std::pair<double, double> I;

  void validate(const WalkConfig& cfg) const;
  static WindowSpec defaults(const WalkConfig& cfg);
};

// Everything fixed per (base point, n, lookahead): the shared tail flag,
// theta_n of the base prefix and its chi value.
struct FiberContext {
  const WalkConfig* cfg = nullptr;
  BasePoint c;
  int n = 0;
  int lookahead = 0;
  Flag xi;                 // approximates the forward limit flag of the tail
  Eigen::VectorXd theta_b; // sigma(b-prefix, xi)
  double chi_b = 0.0;
};

FiberContext make_fiber_context(const WalkConfig& cfg, const BasePoint& c, int n,
                                int lookahead = 200);

struct FiberSample {
  Word a_word;
  Eigen::VectorXd theta_shift;  // theta_n(a-word) - theta_n(b-prefix)
  double chi_shift = 0.0;
  bool accepted = false;
  bool valid = true;            // false when the cocycle evaluation broke down
};

// One fiber element: the length-n word a replacing the base prefix.
// pre: |a| == n.
FiberSample fiber_point(const FiberContext& ctx, const Word& a, const WindowSpec& w);

struct ConditionalSampleResult {
  std::vector<FiberSample> accepted;
  long long draws = 0;
  long long invalid = 0;
  double acceptance_rate = 0.0;
  double rate_ci_lo = 0.0, rate_ci_hi = 0.0;
  bool budget_exhausted = false;
};

// Rejection sampling of the window-conditioned fiber law: i.i.d. words until
// N_target acceptances or the draw budget runs out (reported, not fatal).
ConditionalSampleResult window_conditional_sample(const FiberContext& ctx,
                                                  const WindowSpec& w, int N_target,
                                                  std::uint64_t seed, long long budget);

struct AnglesResult {
  std::vector<double> cond_angles;    // repelling-direction angles, conditioned
  std::vector<double> uncond_angles;  // same statistic, unconditioned walk
  double ks = 0.0;                    // circular KS (d = 2)
  long long dropped = 0;              // gap failures
  long long accepted = 0;
};

// Conditioned vs unconditioned law of the repelling direction (top right
// singular direction of the length-n products).  pre: d == 2 or 3; KS is
// computed for d == 2.  With only a handful of accepted samples the KS
// statistic is degenerate (a single point against a spread sample sits near
// 1); ask for N large enough that the acceptance target is met.
AnglesResult law_of_angles(const WalkConfig& cfg, const BasePoint& c, int n,
                           const WindowSpec& w, int N, std::uint64_t seed,
                           int lookahead = 200, long long budget = 10'000'000);

struct DriftRecord {
  int direction = 0;
  double u_norm = 0.0;
  int n_p = 0;
  double norm_Du = 0.0;
  double log_ratio = 0.0;  // log||D u|| - omega(theta_{n_p}) - log||w_{n_p}||
  double ang_dist = 0.0;   // distance of the transported direction to the
                           // attracting line of the fiber word product
  bool in_window = false;  // |log_ratio| <= log C
};

struct DriftDemoResult {
  std::vector<DriftRecord> records;
  double C = 0.0;           // calibrated norm-control constant
  double delta_hat = 0.0;   // fitted exponential rate of ang_dist in n_p
  double within_fraction = 0.0;
  long long wrap_failures = 0;
  long long skipped_directions = 0;
};

// Exponential-drift demonstration: small torus perturbations u transported
// backwards along the base word, re-expanded through window-conditioned
// fiber words at the first-crossing time n_p, with norm and direction
// control checked against the calibrated constant.
// u norms sweep [u_norm_min, u_norm_max] geometrically across directions so
// that n_p covers a range; every intermediate ||w_k|| < 0.25 is asserted.
DriftDemoResult drift_demo(const WalkConfig& cfg, const BasePoint& c,
                           double u_norm_max, double u_norm_min, int directions,
                           int accepted_per_direction, const WindowSpec& w,
                           double eps1, std::uint64_t seed, int n_max = 60,
                           int lookahead = 200, long long budget_per_direction = 200'000);

struct EquidistCell {
  int theta_bin = 0;
  long long chi_value = 0;
  double mass = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;
};

struct EquidistResult {
  std::vector<int> n_list;
  std::vector<std::vector<EquidistCell>> cells_by_n;
  std::vector<double> l1_diffs;  // successive L1 differences of cell masses
};

// Conditional masses of a partition of the window box (theta bins along the
// first Cartan coordinate, crossed with the chi values inside I),
// per n, with stabilization measured by successive L1 differences.
EquidistResult fiber_equidistribution(const WalkConfig& cfg, const BasePoint& c,
                                      const std::vector<int>& n_list, const WindowSpec& w,
                                      int theta_bins, int N_target, std::uint64_t seed,
                                      int lookahead = 200, long long budget = 10'000'000);

}  // namespace tdr
