#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "trapcc/errors.hpp"
#include "trapcc/types.hpp"

namespace trapcc {

// Index of the pair (i, j), i < j, bodies labeled 1..4, in the fixed
// component order (r12, r13, r14, r23, r24, r34).
inline int pair_index(int i, int j) {
  static constexpr int idx[5][5] = {{-1, -1, -1, -1, -1},
                                    {-1, -1, 0, 1, 2},
                                    {-1, 0, -1, 3, 4},
                                    {-1, 1, 3, -1, 5},
                                    {-1, 2, 4, 5, -1}};
  return idx[i][j];
}

struct PlanarEmbedding {
  std::array<Eigen::Vector2d, 4> q;
};

// Signed areas of the four triangles; delta(i) omits body i. For a convex
// sequentially ordered quadrilateral the sign pattern is (+, -, +, -).
struct SignedAreas {
  double d1, d2, d3, d4;
};

struct RealizabilityCheck {
  bool realizable;
  std::string diagnostic;  // first violated condition; empty when realizable
  explicit operator bool() const { return realizable; }
};

// H is homogeneous of degree 6, so the planarity cutoff must scale like the
// sixth power of the configuration size.
inline double planarity_tolerance(const DistanceVector& r) {
  const double s = r.mean();
  return 1e-8 * s * s * s * s * s * s;
}

namespace detail {

inline Eigen::Matrix<double, 5, 5> cayley_menger_matrix(
    const DistanceVector& r) {
  Eigen::Matrix<double, 5, 5> b = Eigen::Matrix<double, 5, 5>::Zero();
  for (int k = 1; k <= 4; ++k) {
    b(0, k) = 1.0;
    b(k, 0) = 1.0;
  }
  for (int i = 1; i <= 4; ++i) {
    for (int j = i + 1; j <= 4; ++j) {
      const double d = r[pair_index(i, j)];
      b(i, j) = d * d;
      b(j, i) = d * d;
    }
  }
  return b;
}

inline double cofactor5(const Eigen::Matrix<double, 5, 5>& b, int p, int q) {
  Eigen::Matrix<double, 4, 4> minor;
  int row = 0;
  for (int i = 0; i < 5; ++i) {
    if (i == p) continue;
    int col = 0;
    for (int j = 0; j < 5; ++j) {
      if (j == q) continue;
      minor(row, col) = b(i, j);
      ++col;
    }
    ++row;
  }
  const double sign = ((p + q) % 2 == 0) ? 1.0 : -1.0;
  return sign * minor.determinant();
}

}  // namespace detail

// The 5x5 bordered determinant H(r) = 288 V^2, with V the volume of the
// tetrahedron on the four bodies; vanishes exactly on planar configurations.
inline double cayley_menger(const DistanceVector& r) {
  return detail::cayley_menger_matrix(r).determinant();
}

// F(r) = 2 r12 r34 - r13^2 - r24^2 + r23^2 + r14^2. Together with
// realizability, F = 0 characterizes trapezoids with sides 12 and 34 parallel.
inline double trapezoid_residual(const DistanceVector& r) {
  return 2.0 * r.r12() * r.r34() - r.r13() * r.r13() - r.r24() * r.r24() +
         r.r23() * r.r23() + r.r14() * r.r14();
}

inline double k_invariant(const DistanceVector& r) {
  const double s13 = r.r13() * r.r13();
  const double s14 = r.r14() * r.r14();
  const double s23 = r.r23() * r.r23();
  const double s24 = r.r24() * r.r24();
  return r.r12() * (s13 - s14 + s23 - s24) + r.r34() * (-s13 - s14 + s23 + s24);
}

inline double q_polynomial(const DistanceVector& r) {
  const double r12 = r.r12(), r34 = r.r34();
  const double s12 = r12 * r12;
  const double s13 = r.r13() * r.r13();
  const double s14 = r.r14() * r.r14();
  const double s23 = r.r23() * r.r23();
  const double s24 = r.r24() * r.r24();
  const double s34 = r34 * r34;
  return -(s12 * s13 - s12 * s14 - s12 * s23 + 4.0 * s14 * s23 + s12 * s24 -
           4.0 * s13 * s24 + 2.0 * s12 * r12 * r34 - 2.0 * r12 * s13 * r34 -
           2.0 * r12 * s14 * r34 - 2.0 * r12 * s23 * r34 -
           2.0 * r12 * s24 * r34 + s13 * s34 - s14 * s34 - s23 * s34 +
           s24 * s34 + 2.0 * r12 * r34 * s34);
}

// Defect of the identity 2H = F Q - K^2; identically zero up to rounding.
inline double fqk_defect(const DistanceVector& r) {
  return 2.0 * cayley_menger(r) -
         (trapezoid_residual(r) * q_polynomial(r) -
          k_invariant(r) * k_invariant(r));
}

// Membership in the set of geometrically realizable distance vectors:
// all twelve triangle inequalities hold strictly and H(r) >= -tolerance.
// The diagnostic names the first violated condition.
inline RealizabilityCheck is_realizable(const DistanceVector& r) {
  const double margin = 1e-12 * r.mean();
  static constexpr int triples[4][3] = {
      {1, 2, 3}, {1, 2, 4}, {1, 3, 4}, {2, 3, 4}};
  for (const auto& t : triples) {
    const double ab = r[pair_index(t[0], t[1])];
    const double ac = r[pair_index(t[0], t[2])];
    const double bc = r[pair_index(t[1], t[2])];
    if (!(ab + ac > bc + margin) || !(ab + bc > ac + margin) ||
        !(ac + bc > ab + margin)) {
      char buf[80];
      std::snprintf(buf, sizeof buf,
                    "triangle inequality violated for triple (%d,%d,%d)", t[0],
                    t[1], t[2]);
      return {false, buf};
    }
  }
  const double h = cayley_menger(r);
  if (h < -planarity_tolerance(r)) {
    char buf[96];
    std::snprintf(buf, sizeof buf,
                  "Cayley-Menger determinant negative (H = %.6g)", h);
    return {false, buf};
  }
  return {true, ""};
}

// Trilateration gauge: body 1 at the origin, body 2 on the positive x-axis,
// body 3 in the upper half-plane; body 4 from the two-circle intersection
// about bodies 1 and 2, sign resolved by the r34 consistency check.
inline PlanarEmbedding embed_planar(const DistanceVector& r) {
  const auto check = is_realizable(r);
  if (!check.realizable) {
    throw NotRealizable("embed_planar: " + check.diagnostic);
  }
  if (std::abs(cayley_menger(r)) > planarity_tolerance(r)) {
    throw NotRealizable("embed_planar: configuration is not planar (|H| = " +
                        std::to_string(std::abs(cayley_menger(r))) +
                        " above tolerance)");
  }

  const double r12 = r.r12(), r13 = r.r13(), r14 = r.r14();
  const double r23 = r.r23(), r24 = r.r24(), r34 = r.r34();
  const double scale = r.mean();
  const double clamp_tol = 1e-12 * scale * scale;

  PlanarEmbedding e;
  e.q[0] = {0.0, 0.0};
  e.q[1] = {r12, 0.0};

  const double x3 = (r12 * r12 + r13 * r13 - r23 * r23) / (2.0 * r12);
  double y3sq = r13 * r13 - x3 * x3;
  if (y3sq < 0.0 && y3sq > -clamp_tol) y3sq = 0.0;
  if (y3sq < 0.0) {
    throw NotRealizable("embed_planar: triangle (1,2,3) has no planar placement");
  }
  e.q[2] = {x3, std::sqrt(y3sq)};

  const double x4 = (r12 * r12 + r14 * r14 - r24 * r24) / (2.0 * r12);
  double y4sq = r14 * r14 - x4 * x4;
  if (y4sq < 0.0 && y4sq > -clamp_tol) y4sq = 0.0;
  if (y4sq < 0.0) {
    throw NotRealizable("embed_planar: triangle (1,2,4) has no planar placement");
  }
  const double y4 = std::sqrt(y4sq);

  const Eigen::Vector2d plus{x4, y4};
  const Eigen::Vector2d minus{x4, -y4};
  const double err_plus = std::abs((plus - e.q[2]).norm() - r34);
  const double err_minus = std::abs((minus - e.q[2]).norm() - r34);
  e.q[3] = (err_plus <= err_minus) ? plus : minus;
  if (std::min(err_plus, err_minus) > 1e-8 * scale) {
    throw AmbiguousEmbedding(
        "embed_planar: neither sign choice for body 4 reproduces the distance "
        "to body 3");
  }

  for (int i = 1; i <= 4; ++i) {
    for (int j = i + 1; j <= 4; ++j) {
      const double want = r[pair_index(i, j)];
      const double got = (e.q[j - 1] - e.q[i - 1]).norm();
      if (std::abs(got - want) > 1e-10 * want) {
        throw AmbiguousEmbedding(
            "embed_planar: reconstructed distances do not reproduce the input");
      }
    }
  }
  return e;
}

// Shoelace area of the triangle on the three bodies other than i, vertices in
// ascending label order, with overall sign (-1)^(i+1) so that a convex
// sequential quadrilateral gets the pattern (+, -, +, -).
inline SignedAreas signed_areas(const PlanarEmbedding& e) {
  auto tri = [&e](int a, int b, int c) {
    const Eigen::Vector2d& pa = e.q[a];
    const Eigen::Vector2d& pb = e.q[b];
    const Eigen::Vector2d& pc = e.q[c];
    return 0.5 * ((pb.x() - pa.x()) * (pc.y() - pa.y()) -
                  (pc.x() - pa.x()) * (pb.y() - pa.y()));
  };
  return {tri(1, 2, 3), -tri(0, 2, 3), tri(0, 1, 3), -tri(0, 1, 2)};
}

inline bool convex_sequential_pattern(const SignedAreas& a) {
  return a.d1 > 0.0 && a.d2 < 0.0 && a.d3 > 0.0 && a.d4 < 0.0;
}

// h = (1/4) sqrt(Q / (r12 r34)); the distance between the parallel sides of a
// trapezoid, valid even when the two bases have equal length.
inline double trapezoid_height(const DistanceVector& r) {
  const double q = q_polynomial(r);
  const double s = r.mean();
  if (q < -1e-9 * s * s * s * s) {
    throw NegativeRadicand("trapezoid_height: Q(r) = " + std::to_string(q) +
                           " is negative");
  }
  return 0.25 * std::sqrt(std::max(q, 0.0) / (r.r12() * r.r34()));
}

// Exact differentiation of the bordered determinant: the squared distance
// r_ij^2 sits at the symmetric slots (i, j) and (j, i), so
// dH/dr_ij = 4 r_ij C_ij with C_ij the cofactor at (i, j).
inline Vec6 grad_H(const DistanceVector& r) {
  const auto b = detail::cayley_menger_matrix(r);
  Vec6 g;
  for (int i = 1; i <= 4; ++i) {
    for (int j = i + 1; j <= 4; ++j) {
      const int k = pair_index(i, j);
      g[k] = 4.0 * r[k] * detail::cofactor5(b, i, j);
    }
  }
  return g;
}

inline Vec6 grad_F(const DistanceVector& r) {
  Vec6 g;
  g << 2.0 * r.r34(), -2.0 * r.r13(), 2.0 * r.r14(), 2.0 * r.r23(),
      -2.0 * r.r24(), 2.0 * r.r12();
  return g;
}

// Distances of the trapezoid with vertices (0,0), (a,0), (offset+b,h),
// (offset,h); sequential labeling, bases a = r12 and b = r34. Satisfies
// F = 0 identically. Convex for 0 <= offset and offset + b <= a.
inline DistanceVector trapezoid_distances(double a, double b, double h,
                                          double offset) {
  const Eigen::Vector2d q1{0.0, 0.0}, q2{a, 0.0}, q3{offset + b, h},
      q4{offset, h};
  return DistanceVector((q2 - q1).norm(), (q3 - q1).norm(), (q4 - q1).norm(),
                        (q3 - q2).norm(), (q4 - q2).norm(), (q4 - q3).norm());
}

}  // namespace trapcc
