#pragma once

#include <cmath>

#include "trapcc/geometry.hpp"
#include "trapcc/types.hpp"

namespace trapcc {

// U(r) = sum over pairs of m_i m_j / r_ij.
inline double newtonian_potential(const DistanceVector& r,
                                  const MassVector& m) {
  double u = 0.0;
  for (int i = 1; i <= 4; ++i) {
    for (int j = i + 1; j <= 4; ++j) {
      u += m[i - 1] * m[j - 1] / r[pair_index(i, j)];
    }
  }
  return u;
}

// I(r) = (1 / 2M) sum over pairs of m_i m_j r_ij^2.
inline double moment_of_inertia(const DistanceVector& r, const MassVector& m) {
  double s = 0.0;
  for (int i = 1; i <= 4; ++i) {
    for (int j = i + 1; j <= 4; ++j) {
      const double d = r[pair_index(i, j)];
      s += m[i - 1] * m[j - 1] * d * d;
    }
  }
  return s / (2.0 * m.total());
}

// dU/dr_ij = -m_i m_j / r_ij^2.
inline Vec6 grad_U(const DistanceVector& r, const MassVector& m) {
  Vec6 g;
  for (int i = 1; i <= 4; ++i) {
    for (int j = i + 1; j <= 4; ++j) {
      const int k = pair_index(i, j);
      g[k] = -m[i - 1] * m[j - 1] / (r[k] * r[k]);
    }
  }
  return g;
}

// dI/dr_ij = m_i m_j r_ij / M.
inline Vec6 grad_I(const DistanceVector& r, const MassVector& m) {
  Vec6 g;
  for (int i = 1; i <= 4; ++i) {
    for (int j = i + 1; j <= 4; ++j) {
      const int k = pair_index(i, j);
      g[k] = m[i - 1] * m[j - 1] * r[k] / m.total();
    }
  }
  return g;
}

// Radial projection r -> r / sqrt(I). I is homogeneous of degree 2 and F of
// degree 2, so the projection lands on {I = 1} and preserves {F = 0}.
inline DistanceVector normalize_inertia(const DistanceVector& r,
                                        const MassVector& m) {
  const double s = std::sqrt(moment_of_inertia(r, m));
  return DistanceVector::from_vec(r.vec() / s);
}

}  // namespace trapcc
