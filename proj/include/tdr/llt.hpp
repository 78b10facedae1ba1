#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tdr/exact.hpp"
#include "tdr/group.hpp"

namespace tdr {

// Probability distribution on an integer interval [offset, offset+size).
// Float masses always present; rational masses carried alongside when the
// distribution was built exactly.
struct LatticeDist {
  long long offset = 0;
  std::vector<double> mass;
  std::vector<BigRat> rmass;  // empty unless rational

  bool rational() const { return !rmass.empty(); }
  long long min() const { return offset; }
  long long max() const { return offset + static_cast<long long>(mass.size()) - 1; }
  double p(long long k) const {
    const long long i = k - offset;
    return (i < 0 || i >= static_cast<long long>(mass.size())) ? 0.0
                                                               : mass[static_cast<std::size_t>(i)];
  }
  double mean() const;
  double variance() const;
  void validate() const;  // masses nonnegative, total 1 (exact in rational mode)
};

LatticeDist lattice_from_rationals(long long offset, const std::vector<BigRat>& masses);
LatticeDist lattice_from_doubles(long long offset, const std::vector<double>& masses);

// chi-step distribution of a config with integer chi values; exact when the
// probabilities are dyadic doubles (they are rationals by construction).
LatticeDist chi_lattice_of(const WalkConfig& cfg);

// n-fold convolution; exact in rational mode.  Guard: resulting support
// must stay under 10^7 points.
LatticeDist lattice_dp(const LatticeDist& step, long long n);

// First return to 0: P(tau = k) for k = 1..kmax, exact rational mode.
// pre: kmax <= 1000 in rational mode.
std::vector<BigRat> return_time_dp_exact(const LatticeDist& step, int kmax);
std::vector<double> return_time_dp(const LatticeDist& step, int kmax);

struct Llt1dRow {
  long long n = 0;
  double exact = 0.0;   // sqrt(n) * P(S_n = 0), from the convolution
  double limit = 0.0;   // 1 / sqrt(2 pi sigma^2)
  double rel_err = 0.0;
};

// pre: step aperiodic on Z (gcd of support differences 1) and centered;
// rejects periodic distributions reporting the detected period.
std::vector<Llt1dRow> llt_1d_check(const LatticeDist& step,
                                   const std::vector<long long>& n_list);

// gcd of observed chi differences over N sampled words of length n;
// 0 sentinel when fewer than two words are available.
long long period_detect(const WalkConfig& cfg, int N, int n, std::uint64_t seed);

struct JointLltRow {
  int n = 0;
  double p_hat = 0.0;
  double scaled = 0.0;  // n^{(l+1)/2} * p_hat, l = dim of the Cartan space
  double ci_lo = 0.0, ci_hi = 0.0;
  bool wide_ci = false;  // CI wider than the estimate itself: N insufficient
};

struct JointLltResult {
  std::vector<JointLltRow> rows;
  double lambda_hat = 0.0;  // centering, frozen from a Lyapunov run
  int n_cap = 400;          // documented cap: centering error grows past this
};

// Joint window probability p_n = P(top Iwasawa coordinate - n*lambda_hat in U
// and chi in I) along length-n products, with n^{(l+1)/2} scaling (l = 1
// since d = 2).  Windows may be infinite (+-inf).  pre: d == 2.
JointLltResult joint_llt_estimate(const WalkConfig& cfg,
                                  std::pair<double, double> U,
                                  std::pair<double, double> I,
                                  const std::vector<int>& n_list, long long N,
                                  std::uint64_t seed, int threads = 1,
                                  double lambda_hat_override = 0.0);

}  // namespace tdr
