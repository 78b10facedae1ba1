#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace tdr {

// Welford accumulator; merge() is associative so replica results can be
// combined in a fixed order.
class RunningStat {
 public:
  void add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  void merge(const RunningStat& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
    const double delta = o.mean_ - mean_;
    mean_ += delta * nb / (na + nb);
    m2_ += o.m2_ + delta * delta * na * nb / (na + nb);
    n_ += o.n_;
  }
  long long count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double stddev() const { return std::sqrt(variance()); }
  double sem() const { return n_ > 0 ? stddev() / std::sqrt(static_cast<double>(n_)) : 0.0; }

 private:
  long long n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct Interval {
  double lo = 0.0, hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

inline Interval mean_ci95(const RunningStat& s) {
  const double h = 1.959963984540054 * s.sem();
  return {s.mean() - h, s.mean() + h};
}

// Wilson score interval for a binomial proportion, 95%.
inline Interval proportion_ci95(long long hits, long long n) {
  if (n <= 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  const double z2n = z * z / static_cast<double>(n);
  const double denom = 1.0 + z2n;
  const double center = (p + z2n / 2.0) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / static_cast<double>(n) + z2n / (4.0 * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct LineFit {
  double slope = 0.0, intercept = 0.0, slope_stderr = 0.0;
};

// Ordinary least squares y = slope*x + intercept.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  const std::size_t n = x.size();
  if (n < 2) return f;
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - (f.slope * x[i] + f.intercept);
      ss += r * r;
    }
    f.slope_stderr = std::sqrt(ss / ((n - 2) * sxx));
  }
  return f;
}

inline double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  q = std::clamp(q, 0.0, 1.0);
  const auto k = static_cast<std::size_t>(q * (v.size() - 1));
  std::nth_element(v.begin(), v.begin() + k, v.end());
  return v[k];
}

inline double median(std::vector<double> v) { return percentile(std::move(v), 0.5); }

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

// KS on a circle of circumference `period`: minimum plain KS over rotations
// of one sample, so the statistic does not depend on the chosen origin.
// Candidate origins are the data points themselves.
inline double ks_distance_circular(const std::vector<double>& a,
                                   const std::vector<double>& b, double period) {
  auto wrap = [period](double x) {
    double r = std::fmod(x, period);
    return r < 0 ? r + period : r;
  };
  std::vector<double> offsets;
  offsets.push_back(0.0);
  for (std::size_t k = 0; k < b.size(); k += std::max<std::size_t>(1, b.size() / 64))
    offsets.push_back(b[k]);
  double best = 1.0;
  for (double off : offsets) {
    std::vector<double> ra(a.size()), rb(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) ra[i] = wrap(a[i] - off);
    for (std::size_t i = 0; i < b.size(); ++i) rb[i] = wrap(b[i] - off);
    best = std::min(best, ks_distance(std::move(ra), std::move(rb)));
  }
  return best;
}

}  // namespace tdr
