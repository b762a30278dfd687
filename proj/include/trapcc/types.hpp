#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>

namespace trapcc {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat8 = Eigen::Matrix<double, 8, 8>;

// The six mutual distances of a four-body configuration in the fixed
// component order (r12, r13, r14, r23, r24, r34). Bodies are labeled
// sequentially around the quadrilateral, so r13 and r24 are the diagonals.
// Every matrix and gradient in the library uses this ordering.
class DistanceVector {
 public:
  DistanceVector(double r12, double r13, double r14, double r23, double r24,
                 double r34)
      : d_{r12, r13, r14, r23, r24, r34} {
    for (double v : d_) {
      if (!std::isfinite(v) || !(v > 0.0)) {
        throw std::invalid_argument(
            "DistanceVector: all entries must be positive and finite");
      }
    }
  }

  static DistanceVector from_vec(const Vec6& v) {
    return DistanceVector(v[0], v[1], v[2], v[3], v[4], v[5]);
  }

  double r12() const { return d_[0]; }
  double r13() const { return d_[1]; }
  double r14() const { return d_[2]; }
  double r23() const { return d_[3]; }
  double r24() const { return d_[4]; }
  double r34() const { return d_[5]; }

  double operator[](int k) const { return d_[static_cast<std::size_t>(k)]; }
  const std::array<double, 6>& data() const { return d_; }

  Vec6 vec() const {
    Vec6 v;
    for (int k = 0; k < 6; ++k) v[k] = d_[static_cast<std::size_t>(k)];
    return v;
  }

  double mean() const {
    return (d_[0] + d_[1] + d_[2] + d_[3] + d_[4] + d_[5]) / 6.0;
  }

 private:
  std::array<double, 6> d_;
};

// Four positive masses with the total cached at construction.
class MassVector {
 public:
  MassVector(double m1, double m2, double m3, double m4)
      : m_{m1, m2, m3, m4}, total_(m1 + m2 + m3 + m4) {
    for (double v : m_) {
      if (!std::isfinite(v) || !(v > 0.0)) {
        throw std::invalid_argument(
            "MassVector: all masses must be positive and finite");
      }
    }
  }

  double m1() const { return m_[0]; }
  double m2() const { return m_[1]; }
  double m3() const { return m_[2]; }
  double m4() const { return m_[3]; }
  double total() const { return total_; }

  double operator[](int i) const { return m_[static_cast<std::size_t>(i)]; }
  const std::array<double, 4>& data() const { return m_; }

 private:
  std::array<double, 4> m_;
  double total_;
};

// Lagrange multipliers of the constrained problem: lambda for the moment of
// inertia constraint, sigma for the trapezoid constraint F.
struct Multipliers {
  double lambda = 0.0;
  double sigma = 0.0;
};

}  // namespace trapcc
