#pragma once

#include <array>
#include <cmath>

#include "trapcc/types.hpp"

namespace trapcc {

// Second-order certificate at a critical point: the structured Lagrangian
// Hessian data, the A-terms, the leading principal minors, and the pass
// flags. a_terms_match_3mm checks the critical-point identities
// A1 = 3 m1 m3, A2 = 3 m1 m4, A3 = 3 m2 m3, A4 = 3 m2 m4.
struct CertificateReport {
  std::array<double, 6> f_diag{};
  std::array<double, 5> a_terms{};
  std::array<double, 6> minors{};
  bool lambda_positive = false;
  bool all_minors_positive = false;
  bool a_terms_match_3mm = false;

  bool passed() const {
    return lambda_positive && all_minors_positive && a_terms_match_3mm;
  }
};

inline double f_coefficient(double mi, double mj, double rij, double lambda) {
  return mi * mj * (2.0 / (rij * rij * rij) + lambda);
}

// f_ij = m_i m_j (2 r_ij^-3 + lambda) in the fixed component order.
inline std::array<double, 6> f_diagonal(const DistanceVector& r,
                                        const Multipliers& mult,
                                        const MassVector& m) {
  return {f_coefficient(m.m1(), m.m2(), r.r12(), mult.lambda),
          f_coefficient(m.m1(), m.m3(), r.r13(), mult.lambda),
          f_coefficient(m.m1(), m.m4(), r.r14(), mult.lambda),
          f_coefficient(m.m2(), m.m3(), r.r23(), mult.lambda),
          f_coefficient(m.m2(), m.m4(), r.r24(), mult.lambda),
          f_coefficient(m.m3(), m.m4(), r.r34(), mult.lambda)};
}

// D^2 L = diag(f12, f13 - 2s, f14 + 2s, f23 + 2s, f24 - 2s, f34)
//         + adiag(2s, 0, 0, 0, 0, 2s)
// in the variable order (r12, r13, r14, r23, r24, r34); the anti-diagonal
// couples the two parallel sides r12 and r34.
inline Mat6 hessian_lagrangian(const DistanceVector& r,
                               const Multipliers& mult, const MassVector& m) {
  const auto f = f_diagonal(r, mult, m);
  const double s2 = 2.0 * mult.sigma;
  Mat6 h = Mat6::Zero();
  h(0, 0) = f[0];
  h(1, 1) = f[1] - s2;
  h(2, 2) = f[2] + s2;
  h(3, 3) = f[3] + s2;
  h(4, 4) = f[4] - s2;
  h(5, 5) = f[5];
  h(0, 5) = s2;
  h(5, 0) = s2;
  return h;
}

// The five A-terms of the minor factorization:
//   A1 = lambda m1 m3 r13^3 - 2 r13^3 sigma + 2 m1 m3
//   A2 = lambda m1 m4 r14^3 + 2 r14^3 sigma + 2 m1 m4
//   A3 = lambda m2 m3 r23^3 + 2 r23^3 sigma + 2 m2 m3
//   A4 = lambda m2 m4 r24^3 - 2 r24^3 sigma + 2 m2 m4
//   A5 = m1 m2 m3 m4 (lambda^2 r12^3 r34^3 + 2 lambda r12^3 + 2 lambda r34^3
//        + 4) - 4 sigma^2 r12^3 r34^3
inline std::array<double, 5> a_terms(const DistanceVector& r,
                                     const Multipliers& mult,
                                     const MassVector& m) {
  const double l = mult.lambda, s = mult.sigma;
  auto cube = [](double x) { return x * x * x; };
  const double c13 = cube(r.r13()), c14 = cube(r.r14());
  const double c23 = cube(r.r23()), c24 = cube(r.r24());
  const double c12 = cube(r.r12()), c34 = cube(r.r34());
  const double mm = m.m1() * m.m2() * m.m3() * m.m4();
  return {l * m.m1() * m.m3() * c13 - 2.0 * c13 * s + 2.0 * m.m1() * m.m3(),
          l * m.m1() * m.m4() * c14 + 2.0 * c14 * s + 2.0 * m.m1() * m.m4(),
          l * m.m2() * m.m3() * c23 + 2.0 * c23 * s + 2.0 * m.m2() * m.m3(),
          l * m.m2() * m.m4() * c24 - 2.0 * c24 * s + 2.0 * m.m2() * m.m4(),
          mm * (l * l * c12 * c34 + 2.0 * l * c12 + 2.0 * l * c34 + 4.0) -
              4.0 * s * s * c12 * c34};
}

// Leading principal minors of orders 1..6 by direct block determinants.
inline std::array<double, 6> principal_minors(const Mat6& h) {
  std::array<double, 6> p{};
  for (int k = 1; k <= 6; ++k) {
    p[static_cast<std::size_t>(k - 1)] =
        Eigen::MatrixXd(h.topLeftCorner(k, k)).determinant();
  }
  return p;
}

// Closed forms valid at critical points:
//   P1 = (lambda r12^3 + 2) m1 m2 / r12^3,  P_{k+1} = P_k A_k / r^3 cumulatively,
//   P6 = A1 A2 A3 A4 A5 / (r12^3 r13^3 r14^3 r23^3 r24^3 r34^3).
inline std::array<double, 6> closed_form_minors(const DistanceVector& r,
                                                const Multipliers& mult,
                                                const MassVector& m) {
  const auto a = a_terms(r, mult, m);
  auto cube = [](double x) { return x * x * x; };
  const double c12 = cube(r.r12()), c13 = cube(r.r13()), c14 = cube(r.r14());
  const double c23 = cube(r.r23()), c24 = cube(r.r24()), c34 = cube(r.r34());
  std::array<double, 6> p{};
  p[0] = (mult.lambda * c12 + 2.0) * m.m1() * m.m2() / c12;
  p[1] = p[0] * a[0] / c13;
  p[2] = p[1] * a[1] / c14;
  p[3] = p[2] * a[2] / c23;
  p[4] = p[3] * a[3] / c24;
  p[5] = a[0] * a[1] * a[2] * a[3] * a[4] / (c12 * c13 * c14 * c23 * c24 * c34);
  return p;
}

// Evaluate the certificate at a point; the convergence gate lives in
// certify_minimum, which wraps this for Solution objects.
inline CertificateReport certify_point(const DistanceVector& r,
                                       const Multipliers& mult,
                                       const MassVector& m) {
  CertificateReport rep;
  rep.f_diag = f_diagonal(r, mult, m);
  rep.a_terms = a_terms(r, mult, m);
  rep.minors = principal_minors(hessian_lagrangian(r, mult, m));
  rep.lambda_positive = mult.lambda > 0.0;
  rep.all_minors_positive = true;
  for (double p : rep.minors) {
    if (!(p > 0.0)) rep.all_minors_positive = false;
  }
  const double expected[4] = {3.0 * m.m1() * m.m3(), 3.0 * m.m1() * m.m4(),
                              3.0 * m.m2() * m.m3(), 3.0 * m.m2() * m.m4()};
  rep.a_terms_match_3mm = true;
  for (int k = 0; k < 4; ++k) {
    if (std::abs(rep.a_terms[static_cast<std::size_t>(k)] - expected[k]) >
        1e-8 * std::abs(expected[k])) {
      rep.a_terms_match_3mm = false;
    }
  }
  return rep;
}

}  // namespace trapcc
