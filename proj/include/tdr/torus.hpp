#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "tdr/group.hpp"

namespace tdr {

// Point on the d-torus.  Exact points keep one shared positive denominator
// and numerators reduced mod it (the matrix action only changes numerators);
// float points keep coordinates in [0,1).
class TorusPoint {
 public:
  static TorusPoint rational(const std::vector<std::pair<long long, long long>>& coords);
  static TorusPoint rational_big(const std::vector<BigInt>& nums, const BigInt& den);
  static TorusPoint floating(const Eigen::VectorXd& x);
  static TorusPoint zero_exact(int dim);

  bool exact() const { return exact_; }
  int dim() const { return exact_ ? static_cast<int>(num_.size()) : static_cast<int>(x_.size()); }

  const BigInt& denominator() const { return den_; }
  const std::vector<BigInt>& numerators() const { return num_; }
  const Eigen::VectorXd& float_coords() const { return x_; }

  Eigen::VectorXd to_double() const;

  // per-coordinate reduced (numerator, denominator) pairs; canonical form
  std::vector<std::pair<BigInt, BigInt>> reduced_coords() const;  // pre: exact
  std::string key() const;                                        // pre: exact

  bool operator==(const TorusPoint& o) const;

 private:
  bool exact_ = false;
  BigInt den_ = 1;
  std::vector<BigInt> num_;
  Eigen::VectorXd x_;
};

struct StateXT {
  TorusPoint x;
  double t = 0.0;
};

TorusPoint apply_torus(const GroupElement& g, const TorusPoint& x);
// g.(x,t) = (g x mod 1, t + chi(g))
StateXT apply(const GroupElement& g, const StateXT& s);

// Quotient metric on the torus: min over integer lifts of the Euclidean
// distance.  Coordinates are assumed already reduced mod 1.
double torus_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
double torus_distance(const TorusPoint& a, const TorusPoint& b);
double torus_distance_to_zero(const Eigen::VectorXd& a);

// Product metric on T^d x R.
double state_distance(const StateXT& a, const StateXT& b);

}  // namespace tdr
