#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "tdr/group.hpp"
#include "tdr/stats.hpp"
#include "tdr/torus.hpp"

namespace tdr {

struct Trajectory {
  StateXT start;
  std::vector<StateXT> states;  // states[0] == start, one entry per step after
  Word word;                    // word.letters[k] maps states[k] to states[k+1]
};

// i.i.d. letters drawn per cfg.probs; deterministic given seed.
Trajectory simulate(const WalkConfig& cfg, const StateXT& start, int n, std::uint64_t seed);

// One first-return sample: letters until the cumulative chi returns to 0.
struct ReturnSample {
  long long tau = 0;
  Word word;               // chi_of_word(word) == 0 exactly, length == tau
  double log_norm = 0.0;   // log operator norm of the word product
};

struct Censored {
  long long cap = 0;
};

struct ReturnResult {
  std::optional<ReturnSample> sample;  // empty <=> censored
  std::optional<Censored> censored;
};

// pre: chi integer-valued and centered (checked).
ReturnResult first_return_sampler(const WalkConfig& cfg, std::uint64_t seed, long long cap);

struct TailRow {
  long long k = 0;
  double p_hat = 0.0, ci_lo = 0.0, ci_hi = 0.0;
};

struct TailResult {
  std::vector<TailRow> rows;       // survival estimates P(tau >= k)
  double slope = 0.0;              // log-log fit over the requested window
  double slope_stderr = 0.0;
  long long censored = 0;
  long long N = 0;
};

// Monte Carlo survival curve of tau on a log-spaced k grid up to kmax.
// pre: N >= 1000; chi not identically zero.
TailResult return_tail(const WalkConfig& cfg, long long kmax, long long N,
                       std::uint64_t seed, long long cap,
                       std::pair<long long, long long> fit_window, int threads = 1);

struct ConservativityResult {
  std::vector<std::pair<long long, double>> fraction_by_horizon;  // nondecreasing
};

// Fraction of N trajectories that re-enter B(start, radius) by each horizon
// (returns counted for steps >= 1).
ConservativityResult conservativity_check(const WalkConfig& cfg, const StateXT& start,
                                          double radius,
                                          const std::vector<long long>& horizons, int N,
                                          std::uint64_t seed);

struct HeavyTailResult {
  std::vector<std::pair<long long, double>> truncated_means;  // N -> mean log_norm
  double tail_exponent = 0.0;  // fitted exponent of P(log_norm > s)
  long long censored = 0;
};

// Diagnostic for the missing first moment of the induced return law: means
// of log||product|| over nested samples of the sizes in N_list, plus a tail
// exponent fit.  N_list must be increasing.
HeavyTailResult heavy_tail_diagnostic(const WalkConfig& cfg,
                                      const std::vector<long long>& N_list,
                                      std::uint64_t seed, long long cap, int threads = 1);

struct DriftGridSpec {
  int count = 64;
  double eps_min = 1e-4;   // smallest distance to 0 on the grid
  double eps_max = 0.5;    // largest distance (within the quotient-metric range)
};

struct DriftGridRow {
  Eigen::VectorXd point;
  double u_value = 0.0;    // u(x) = d(x,0)^(-delta)
  double estimate = 0.0;   // mean of u after k returns
  double ucb = 0.0;        // 95% upper confidence bound
  long long censored = 0;
  bool valid = true;       // censored fraction within tolerance
};

struct DriftCertificate {
  bool ok = false;
  double delta = 0.0;
  int k = 0;
  double a = 0.0, C = 0.0;
  double confidence = 0.95;
  std::vector<DriftGridRow> rows;
  std::vector<int> violations;  // indices of rows breaking the fit (on failure)
};

// Foster-Lyapunov certificate for the k-fold induced return walk against
// u(x) = d(x,0)^(-delta): fits (a, C) with ucb_i <= a*u_i + C for all grid
// points (slope from the least-squares fit of ucb against u, intercept
// lifted along the upper convex hull of (u_i, ucb_i)); a chain that fails
// to contract shows up as a >= 1.  pre: delta > 0, k >= 1, integer chi.
DriftCertificate drift_certify(const WalkConfig& cfg, double delta, int k,
                               const DriftGridSpec& grid, int N, std::uint64_t seed,
                               long long cap, int threads = 1,
                               double censor_tolerance = 0.01);

// grid points used by drift_certify (exposed for reporting/tests)
std::vector<Eigen::VectorXd> drift_grid_points(int dim, const DriftGridSpec& grid);

}  // namespace tdr
