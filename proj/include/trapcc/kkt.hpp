#pragma once

#include <algorithm>
#include <cmath>

#include "trapcc/certify.hpp"
#include "trapcc/errors.hpp"
#include "trapcc/geometry.hpp"
#include "trapcc/potential.hpp"
#include "trapcc/types.hpp"

namespace trapcc {

enum class JacobianMode { Analytic, FiniteDifference };

struct SolverConfig {
  int max_iters = 100;
  double tol_residual = 1e-12;
  double tol_step = 1e-14;
  double backtrack_factor = 0.5;
  double min_step = 1e-12;
  JacobianMode jacobian_mode = JacobianMode::Analytic;
};

enum class SolveStatus {
  Converged,
  MaxItersExceeded,
  LeftPositiveOrthant,
  SingularJacobian
};

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxItersExceeded: return "max_iters_exceeded";
    case SolveStatus::LeftPositiveOrthant: return "left_positive_orthant";
    case SolveStatus::SingularJacobian: return "singular_jacobian";
  }
  return "unknown";
}

struct Solution {
  DistanceVector r;
  Multipliers mult;
  double residual_norm;
  int iterations;
  SolveStatus status;
  bool realizable;
  bool convex_sequential;
  double sigma_sq_spread;
  CertificateReport certificate;

  bool converged() const { return status == SolveStatus::Converged; }
};

// The eight stationarity and constraint equations, left minus right, in the
// fixed component order:
//   m1 m2 (r12^-3 - lambda) = 2 sigma r34 / r12
//   m3 m4 (r34^-3 - lambda) = 2 sigma r12 / r34
//   m1 m3 (r13^-3 - lambda) = -2 sigma
//   m2 m4 (r24^-3 - lambda) = -2 sigma
//   m1 m4 (r14^-3 - lambda) = 2 sigma
//   m2 m3 (r23^-3 - lambda) = 2 sigma
//   I(r) - 1 = 0
//   F(r) = 0
inline Vec8 kkt_residual(const DistanceVector& r, const Multipliers& mult,
                         const MassVector& m) {
  const double l = mult.lambda, s = mult.sigma;
  auto icube = [](double x) { return 1.0 / (x * x * x); };
  Vec8 out;
  out[0] = m.m1() * m.m2() * (icube(r.r12()) - l) - 2.0 * s * r.r34() / r.r12();
  out[1] = m.m3() * m.m4() * (icube(r.r34()) - l) - 2.0 * s * r.r12() / r.r34();
  out[2] = m.m1() * m.m3() * (icube(r.r13()) - l) + 2.0 * s;
  out[3] = m.m2() * m.m4() * (icube(r.r24()) - l) + 2.0 * s;
  out[4] = m.m1() * m.m4() * (icube(r.r14()) - l) - 2.0 * s;
  out[5] = m.m2() * m.m3() * (icube(r.r23()) - l) - 2.0 * s;
  out[6] = moment_of_inertia(r, m) - 1.0;
  out[7] = trapezoid_residual(r);
  return out;
}

// Jacobian of kkt_residual in the unknowns (r, lambda, sigma).
inline Mat8 kkt_jacobian(const DistanceVector& r, const Multipliers& mult,
                         const MassVector& m) {
  const double s = mult.sigma;
  auto iquart = [](double x) { return 1.0 / (x * x * x * x); };
  Mat8 j = Mat8::Zero();

  j(0, 0) = -3.0 * m.m1() * m.m2() * iquart(r.r12()) +
            2.0 * s * r.r34() / (r.r12() * r.r12());
  j(0, 5) = -2.0 * s / r.r12();
  j(0, 6) = -m.m1() * m.m2();
  j(0, 7) = -2.0 * r.r34() / r.r12();

  j(1, 5) = -3.0 * m.m3() * m.m4() * iquart(r.r34()) +
            2.0 * s * r.r12() / (r.r34() * r.r34());
  j(1, 0) = -2.0 * s / r.r34();
  j(1, 6) = -m.m3() * m.m4();
  j(1, 7) = -2.0 * r.r12() / r.r34();

  j(2, 1) = -3.0 * m.m1() * m.m3() * iquart(r.r13());
  j(2, 6) = -m.m1() * m.m3();
  j(2, 7) = 2.0;

  j(3, 4) = -3.0 * m.m2() * m.m4() * iquart(r.r24());
  j(3, 6) = -m.m2() * m.m4();
  j(3, 7) = 2.0;

  j(4, 2) = -3.0 * m.m1() * m.m4() * iquart(r.r14());
  j(4, 6) = -m.m1() * m.m4();
  j(4, 7) = -2.0;

  j(5, 3) = -3.0 * m.m2() * m.m3() * iquart(r.r23());
  j(5, 6) = -m.m2() * m.m3();
  j(5, 7) = -2.0;

  j.block<1, 6>(6, 0) = grad_I(r, m).transpose();
  j.block<1, 6>(7, 0) = grad_F(r).transpose();
  return j;
}

inline Mat8 kkt_jacobian_fd(const DistanceVector& r, const Multipliers& mult,
                            const MassVector& m, double step = 1e-6) {
  Vec8 x;
  x << r.vec(), mult.lambda, mult.sigma;
  auto eval = [&m](const Vec8& y) {
    return kkt_residual(DistanceVector(y[0], y[1], y[2], y[3], y[4], y[5]),
                        Multipliers{y[6], y[7]}, m);
  };
  Mat8 j;
  for (int k = 0; k < 8; ++k) {
    const double h = step * std::max(1.0, std::abs(x[k]));
    Vec8 xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    j.col(k) = (eval(xp) - eval(xm)) / (2.0 * h);
  }
  return j;
}

// The six stationarity equations are linear in (lambda, sigma) for fixed r;
// fit both multipliers by least squares over those six rows.
inline Multipliers initial_multipliers(const DistanceVector& r,
                                       const MassVector& m) {
  auto icube = [](double x) { return 1.0 / (x * x * x); };
  Eigen::Matrix<double, 6, 2> a;
  Eigen::Matrix<double, 6, 1> b;
  const double mm[6] = {m.m1() * m.m2(), m.m3() * m.m4(), m.m1() * m.m3(),
                        m.m2() * m.m4(), m.m1() * m.m4(), m.m2() * m.m3()};
  const double rr[6] = {r.r12(), r.r34(), r.r13(), r.r24(), r.r14(), r.r23()};
  const double cs[6] = {2.0 * r.r34() / r.r12(), 2.0 * r.r12() / r.r34(),
                        -2.0, -2.0, 2.0, 2.0};
  for (int k = 0; k < 6; ++k) {
    a(k, 0) = mm[k];
    a(k, 1) = cs[k];
    b[k] = mm[k] * icube(rr[k]);
  }
  Eigen::ColPivHouseholderQR<Eigen::Matrix<double, 6, 2>> qr(a);
  if (qr.rank() < 2) {
    throw SingularFit("initial_multipliers: rank-deficient design matrix");
  }
  const Eigen::Vector2d sol = qr.solve(b);
  return Multipliers{sol[0], sol[1]};
}

// The three eliminations of sigma^2 from opposite-pair products, in the order
// (12)(34), (14)(23), (13)(24). They agree at critical points.
inline std::array<double, 3> sigma_squared_triple(const DistanceVector& r,
                                                  double lambda,
                                                  const MassVector& m) {
  auto icube = [](double x) { return 1.0 / (x * x * x); };
  const double mm = m.m1() * m.m2() * m.m3() * m.m4();
  return {mm * (icube(r.r12()) - lambda) * (icube(r.r34()) - lambda) / 4.0,
          mm * (icube(r.r14()) - lambda) * (icube(r.r23()) - lambda) / 4.0,
          mm * (icube(r.r13()) - lambda) * (icube(r.r24()) - lambda) / 4.0};
}

inline double sigma_sq_spread(const DistanceVector& r, double lambda,
                              const MassVector& m) {
  const auto t = sigma_squared_triple(r, lambda, m);
  const double lo = std::min({t[0], t[1], t[2]});
  const double hi = std::max({t[0], t[1], t[2]});
  const double scale =
      std::max({std::abs(t[0]), std::abs(t[1]), std::abs(t[2]), 1e-300});
  return (hi - lo) / scale;
}

namespace detail {

// Largest fraction of the Newton step that keeps the six distances strictly
// positive, with a 0.9 safety factor; at most 1.
inline double positive_step_cap(const Vec8& x, const Vec8& d) {
  double cap = 1.0;
  for (int k = 0; k < 6; ++k) {
    if (d[k] < 0.0) {
      cap = std::min(cap, 0.9 * (-x[k] / d[k]));
    }
  }
  return cap;
}

inline DistanceVector distances_of(const Vec8& x) {
  return DistanceVector(x[0], x[1], x[2], x[3], x[4], x[5]);
}

}  // namespace detail

// Classification and certificate assembly; shared by newton_solve and tests
// that construct iterates directly.
inline Solution classify_solution(const Vec8& x, double residual_norm,
                                  int iterations, SolveStatus status,
                                  const MassVector& m) {
  const DistanceVector r = detail::distances_of(x);
  const Multipliers mult{x[6], x[7]};
  const bool realizable = static_cast<bool>(is_realizable(r));
  bool convex = false;
  if (realizable && std::abs(cayley_menger(r)) <= planarity_tolerance(r)) {
    try {
      convex = convex_sequential_pattern(signed_areas(embed_planar(r)));
    } catch (const std::exception&) {
      convex = false;
    }
  }
  Solution sol{r,
               mult,
               residual_norm,
               iterations,
               status,
               realizable,
               convex,
               sigma_sq_spread(r, mult.lambda, m),
               CertificateReport{}};
  if (status == SolveStatus::Converged) {
    sol.certificate = certify_point(r, mult, m);
  }
  return sol;
}

// Damped Newton iteration on the square system kkt_residual = 0 in the eight
// unknowns (r, lambda, sigma). The start is projected to {I = 1} and the
// multipliers are seeded by least squares. Steps are clamped to the positive
// orthant and backtracked until the residual 2-norm decreases.
inline Solution newton_solve(const DistanceVector& start, const MassVector& m,
                             const SolverConfig& cfg = SolverConfig{}) {
  const DistanceVector r0 = normalize_inertia(start, m);
  const Multipliers mu0 = initial_multipliers(r0, m);

  Vec8 x;
  x << r0.vec(), mu0.lambda, mu0.sigma;
  Vec8 res = kkt_residual(r0, mu0, m);
  double rnorm = res.norm();
  SolveStatus status = SolveStatus::MaxItersExceeded;
  int it = 0;

  while (true) {
    if (rnorm <= cfg.tol_residual) {
      status = SolveStatus::Converged;
      break;
    }
    if (it >= cfg.max_iters) {
      status = SolveStatus::MaxItersExceeded;
      break;
    }

    const DistanceVector rc = detail::distances_of(x);
    const Multipliers mc{x[6], x[7]};
    const Mat8 jac = (cfg.jacobian_mode == JacobianMode::Analytic)
                         ? kkt_jacobian(rc, mc, m)
                         : kkt_jacobian_fd(rc, mc, m);

    const Eigen::JacobiSVD<Mat8> svd(jac);
    const double smax = svd.singularValues()[0];
    const double smin = svd.singularValues()[7];
    if (!(smin > 0.0) || smax / smin > 1e14) {
      status = SolveStatus::SingularJacobian;
      break;
    }

    const Vec8 dir = jac.partialPivLu().solve(-res);
    const double cap = detail::positive_step_cap(x, dir);
    if (cap < cfg.min_step) {
      status = SolveStatus::LeftPositiveOrthant;
      break;
    }

    double t = std::min(1.0, cap);
    bool accepted = false;
    while (t >= cfg.min_step) {
      const Vec8 xt = x + t * dir;
      const Vec8 rest = kkt_residual(detail::distances_of(xt),
                                     Multipliers{xt[6], xt[7]}, m);
      const double rt = rest.norm();
      if (rt <= (1.0 - 1e-4 * t) * rnorm) {
        x = xt;
        res = rest;
        rnorm = rt;
        accepted = true;
        ++it;
        if ((t * dir).norm() <= cfg.tol_step) {
          status = (rnorm <= cfg.tol_residual) ? SolveStatus::Converged
                                               : SolveStatus::MaxItersExceeded;
        }
        break;
      }
      t *= cfg.backtrack_factor;
    }
    if (!accepted) {
      status = SolveStatus::MaxItersExceeded;
      break;
    }
    if ((t * dir).norm() <= cfg.tol_step) break;
  }

  if (rnorm <= cfg.tol_residual) status = SolveStatus::Converged;
  return classify_solution(x, rnorm, it, status, m);
}

// Re-certification entry point for stored or parsed solutions.
inline CertificateReport certify_minimum(const Solution& sol,
                                         const MassVector& m,
                                         double tol_residual = 1e-10) {
  if (!(sol.residual_norm <= tol_residual)) {
    throw NotConverged("certify_minimum: residual_norm " +
                       std::to_string(sol.residual_norm) +
                       " exceeds tolerance");
  }
  return certify_point(sol.r, sol.mult, m);
}

}  // namespace trapcc
