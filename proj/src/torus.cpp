#include "tdr/torus.hpp"

#include <cmath>

namespace tdr {

namespace {

BigInt mod_positive(const BigInt& a, const BigInt& m) {
  BigInt r = a % m;
  if (r < 0) r += m;
  return r;
}

double frac01(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;  // guard against floor rounding at the boundary
  return r;
}

}  // namespace

TorusPoint TorusPoint::rational(const std::vector<std::pair<long long, long long>>& coords) {
  BigInt den = 1;
  for (const auto& [num, d] : coords) {
    (void)num;
    if (d <= 0) throw PreconditionError("denominator must be positive");
    den = boost::multiprecision::lcm(den, BigInt(d));
  }
  std::vector<BigInt> nums;
  nums.reserve(coords.size());
  for (const auto& [n, d] : coords) nums.push_back(mod_positive(BigInt(n) * (den / d), den));
  return rational_big(nums, den);
}

TorusPoint TorusPoint::rational_big(const std::vector<BigInt>& nums, const BigInt& den) {
  if (den <= 0) throw PreconditionError("denominator must be positive");
  TorusPoint p;
  p.exact_ = true;
  p.den_ = den;
  p.num_.reserve(nums.size());
  for (const auto& n : nums) p.num_.push_back(mod_positive(n, den));
  return p;
}

TorusPoint TorusPoint::floating(const Eigen::VectorXd& x) {
  TorusPoint p;
  p.exact_ = false;
  p.x_ = x;
  for (int i = 0; i < p.x_.size(); ++i) p.x_[i] = frac01(p.x_[i]);
  return p;
}

TorusPoint TorusPoint::zero_exact(int dim) {
  return rational_big(std::vector<BigInt>(static_cast<std::size_t>(dim), 0), 1);
}

Eigen::VectorXd TorusPoint::to_double() const {
  if (!exact_) return x_;
  Eigen::VectorXd v(static_cast<int>(num_.size()));
  for (std::size_t i = 0; i < num_.size(); ++i)
    v[static_cast<int>(i)] = static_cast<double>(BigRat(num_[i], den_));
  return v;
}

std::vector<std::pair<BigInt, BigInt>> TorusPoint::reduced_coords() const {
  if (!exact_) throw PreconditionError("reduced_coords on a float point");
  std::vector<std::pair<BigInt, BigInt>> out;
  out.reserve(num_.size());
  for (const auto& n : num_) {
    const BigInt g = boost::multiprecision::gcd(n, den_);
    if (n == 0)
      out.emplace_back(0, 1);
    else
      out.emplace_back(n / g, den_ / g);
  }
  return out;
}

std::string TorusPoint::key() const {
  std::string s;
  for (const auto& [n, d] : reduced_coords()) {
    s += n.str();
    s += '/';
    s += d.str();
    s += ';';
  }
  return s;
}

bool TorusPoint::operator==(const TorusPoint& o) const {
  if (exact_ != o.exact_) return false;
  if (exact_) return key() == o.key();
  return x_ == o.x_;
}

TorusPoint apply_torus(const GroupElement& g, const TorusPoint& x) {
  const int d = x.dim();
  if (g.entries.dim() != d) throw PreconditionError("dimension mismatch in apply");
  if (x.exact()) {
    std::vector<BigInt> out(static_cast<std::size_t>(d), BigInt(0));
    for (int i = 0; i < d; ++i) {
      BigInt acc = 0;
      for (int j = 0; j < d; ++j) acc += g.entries.at(i, j) * x.numerators()[static_cast<std::size_t>(j)];
      out[static_cast<std::size_t>(i)] = acc;
    }
    return TorusPoint::rational_big(out, x.denominator());
  }
  Eigen::VectorXd y = g.entries.to_double() * x.float_coords();
  return TorusPoint::floating(y);
}

StateXT apply(const GroupElement& g, const StateXT& s) {
  return {apply_torus(g, s.x), s.t + g.chi};
}

double torus_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    double d = std::abs(a[i] - b[i]);
    d = std::min(d, 1.0 - d);
    s += d * d;
  }
  return std::sqrt(s);
}

double torus_distance(const TorusPoint& a, const TorusPoint& b) {
  return torus_distance(a.to_double(), b.to_double());
}

double torus_distance_to_zero(const Eigen::VectorXd& a) {
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    const double d = std::min(a[i], 1.0 - a[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

double state_distance(const StateXT& a, const StateXT& b) {
  const double dt = a.t - b.t;
  const double dx = torus_distance(a.x, b.x);
  return std::sqrt(dx * dx + dt * dt);
}

}  // namespace tdr
