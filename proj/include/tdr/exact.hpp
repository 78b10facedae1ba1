#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "tdr/errors.hpp"

namespace tdr {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// Square integer matrix with arbitrary-precision entries, stored row-major.
class IntMatrix {
 public:
  explicit IntMatrix(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim) {}

  static IntMatrix identity(int dim) {
    IntMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.at(i, i) = 1;
    return m;
  }

  static IntMatrix from_rows(const std::vector<std::vector<long long>>& rows) {
    const int d = static_cast<int>(rows.size());
    IntMatrix m(d);
    for (int i = 0; i < d; ++i) {
      if (static_cast<int>(rows[i].size()) != d)
        throw ConfigError("generator matrix is not square");
      for (int j = 0; j < d; ++j) m.at(i, j) = rows[i][j];
    }
    return m;
  }

  int dim() const { return dim_; }
  BigInt& at(int i, int j) { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
  const BigInt& at(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }

  bool operator==(const IntMatrix& o) const { return dim_ == o.dim_ && a_ == o.a_; }

  IntMatrix operator*(const IntMatrix& o) const {
    if (dim_ != o.dim_) throw PreconditionError("matrix dimension mismatch");
    IntMatrix r(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int k = 0; k < dim_; ++k) {
        const BigInt& aik = at(i, k);
        if (aik == 0) continue;
        for (int j = 0; j < dim_; ++j) r.at(i, j) += aik * o.at(k, j);
      }
    return r;
  }

  IntMatrix transpose() const {
    IntMatrix r(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) r.at(j, i) = at(i, j);
    return r;
  }

  BigInt det() const { return det_rec(*this); }

  // Inverse of a determinant-one matrix (adjugate).
  IntMatrix inverse_unimodular() const {
    if (det() != 1) throw PreconditionError("matrix determinant is not 1");
    IntMatrix adj(dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) {
        const BigInt c = det_rec(minor_matrix(j, i));
        adj.at(i, j) = ((i + j) % 2 == 0) ? c : -c;
      }
    return adj;
  }

  Eigen::MatrixXd to_double() const {
    Eigen::MatrixXd m(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) m(i, j) = static_cast<double>(at(i, j));
    return m;
  }

  std::string to_string() const {
    std::string s = "[";
    for (int i = 0; i < dim_; ++i) {
      s += i ? ";" : "";
      for (int j = 0; j < dim_; ++j) {
        s += j ? "," : "";
        s += at(i, j).str();
      }
    }
    return s + "]";
  }

 private:
  IntMatrix minor_matrix(int row, int col) const {
    IntMatrix m(dim_ - 1);
    int r = 0;
    for (int i = 0; i < dim_; ++i) {
      if (i == row) continue;
      int c = 0;
      for (int j = 0; j < dim_; ++j) {
        if (j == col) continue;
        m.at(r, c) = at(i, j);
        ++c;
      }
      ++r;
    }
    return m;
  }

  static BigInt det_rec(const IntMatrix& m) {
    const int d = m.dim();
    if (d == 1) return m.at(0, 0);
    if (d == 2) return m.at(0, 0) * m.at(1, 1) - m.at(0, 1) * m.at(1, 0);
    BigInt acc = 0;
    for (int j = 0; j < d; ++j) {
      if (m.at(0, j) == 0) continue;
      const BigInt c = det_rec(m.minor_matrix(0, j));
      acc += ((j % 2 == 0) ? m.at(0, j) : -m.at(0, j)) * c;
    }
    return acc;
  }

  int dim_;
  std::vector<BigInt> a_;
};

}  // namespace tdr
