#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "tdr/torus.hpp"
#include "tdr/walk.hpp"

namespace tdr {

// Weighted sample multiset on T^d x R with the query operations the
// classification tests need: Weyl sums, atom detection, marginals.
struct EmpiricalMeasure {
  std::vector<std::pair<StateXT, double>> samples;
  double total_weight = 0.0;

  static EmpiricalMeasure from_trajectory(const Trajectory& tr, int burn_in);
  static EmpiricalMeasure uniform_on(const std::vector<TorusPoint>& points);

  void add(StateXT s, double w);
  void validate() const;  // positive weights, consistent total
};

// Weighted average of exp(2 pi i k.x) over the torus coordinates.
std::complex<double> weyl_sum(const EmpiricalMeasure& m, const Eigen::VectorXi& k);

struct Atom {
  Eigen::VectorXd center;
  double mass = 0.0;
};

// Greedy clustering of the torus coordinates; clusters whose mass fraction
// reaches `threshold` are reported, heaviest first.
std::vector<Atom> atom_detect(const EmpiricalMeasure& m, double radius, double threshold);

// Max L1 discrepancy between the t-histogram and its shifted copies over a
// fixed window; edge bins (within max|shift| of the ends) are excluded.
double real_marginal_invariance(const EmpiricalMeasure& m,
                                const std::vector<double>& shifts, int bins,
                                std::pair<double, double> window);

// One-step pushforward of an exact-point measure under the walk: exact
// convolution sum_g p_g * g_* m (torus marginal as weighted exact points).
EmpiricalMeasure pushforward_step_exact(const EmpiricalMeasure& m, const WalkConfig& cfg);

struct PushforwardResult {
  std::vector<int> checkpoints;
  // evaluations[c][f]: test function f integrated against the pushforward at
  // checkpoint c
  std::vector<std::vector<double>> evaluations;
  std::vector<double> cauchy;  // max |delta| between consecutive checkpoints
};

// Evaluations of (b_1...b_n)_* m0 against a fixed dictionary of Weyl
// characters times triangular t-bumps, at the given checkpoints of the word.
PushforwardResult pushforward_convergence(const WalkConfig& cfg, const EmpiricalMeasure& m0,
                                          const Word& word, const std::vector<int>& checkpoints);

}  // namespace tdr
