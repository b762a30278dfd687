#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "trapcc/certify.hpp"
#include "trapcc/geometry.hpp"
#include "trapcc/potential.hpp"

namespace trapcc {

// One property suite outcome: the worst relative defect seen over the sample
// set, the tolerance it was held against, and the witness point of the worst
// defect (meaningful mainly when pass is false).
struct IdentityCheck {
  std::string name;
  int samples = 0;
  double max_defect = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string witness;
};

namespace detail {

inline DistanceVector random_distances(std::mt19937_64& rng, double lo,
                                       double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return DistanceVector(u(rng), u(rng), u(rng), u(rng), u(rng), u(rng));
}

// Trapezoid with random bases, height and top-side offset; every tenth draw
// is an equal-base rectangle to cover the degenerate case of the height
// formula.
inline DistanceVector random_trapezoid(std::mt19937_64& rng, int index,
                                       double* height_out) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double a = 0.5 + 2.0 * u(rng);
  const bool rectangle = (index % 10 == 9);
  const double b = rectangle ? a : (0.1 + 0.9 * u(rng)) * a;
  const double h = 0.2 + 1.8 * u(rng);
  const double offset = rectangle ? 0.0 : (a - b) * u(rng);
  if (height_out) *height_out = h;
  return trapezoid_distances(a, b, h, offset);
}

inline std::string witness_string(const DistanceVector& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "r = (%.17g, %.17g, %.17g, %.17g, %.17g, %.17g)", r[0], r[1],
                r[2], r[3], r[4], r[5]);
  return buf;
}

template <typename F>
inline Vec6 central_diff6(const F& f, const Vec6& x, double step) {
  Vec6 g;
  for (int k = 0; k < 6; ++k) {
    const double h = step * std::max(1.0, std::abs(x[k]));
    Vec6 xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    g[k] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

template <typename F>
inline Mat6 central_diff_hessian6(const F& f, const Vec6& x, double step) {
  Mat6 h;
  for (int i = 0; i < 6; ++i) {
    const double hi = step * std::max(1.0, std::abs(x[i]));
    for (int j = 0; j < 6; ++j) {
      if (i == j) {
        Vec6 xp = x, xm = x;
        xp[i] += hi;
        xm[i] -= hi;
        h(i, i) = (f(xp) - 2.0 * f(x) + f(xm)) / (hi * hi);
      } else if (i < j) {
        const double hj = step * std::max(1.0, std::abs(x[j]));
        Vec6 xpp = x, xpm = x, xmp = x, xmm = x;
        xpp[i] += hi; xpp[j] += hj;
        xpm[i] += hi; xpm[j] -= hj;
        xmp[i] -= hi; xmp[j] += hj;
        xmm[i] -= hi; xmm[j] -= hj;
        h(i, j) = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * hi * hj);
        h(j, i) = h(i, j);
      }
    }
  }
  return h;
}

}  // namespace detail

// |2H - (FQ - K^2)| over random positive vectors, relative to the largest
// participating term. The inject flag flips the sign of the r34 group in K,
// which breaks the identity and must be caught (forced-failure test mode).
inline IdentityCheck check_fqk_identity(int n, std::uint64_t seed,
                                        bool inject_k_sign_error = false) {
  std::mt19937_64 rng(seed);
  IdentityCheck chk{"fqk_identity", n, 0.0, 1e-9, false, ""};
  for (int i = 0; i < n; ++i) {
    const DistanceVector r = detail::random_distances(rng, 0.2, 3.0);
    double k = k_invariant(r);
    if (inject_k_sign_error) {
      const double s13 = r.r13() * r.r13(), s14 = r.r14() * r.r14();
      const double s23 = r.r23() * r.r23(), s24 = r.r24() * r.r24();
      k = r.r12() * (s13 - s14 + s23 - s24) -
          r.r34() * (-s13 - s14 + s23 + s24);
    }
    const double two_h = 2.0 * cayley_menger(r);
    const double fq = trapezoid_residual(r) * q_polynomial(r);
    // All three terms are homogeneous of degree 6; the mean-distance monomial
    // keeps the gauge stable when a draw lands near the planar variety and
    // the terms themselves nearly cancel.
    const double s = r.mean();
    const double scale6 = s * s * s * s * s * s;
    const double scale = std::max(
        {std::abs(two_h), std::abs(fq), k * k, scale6});
    const double defect = std::abs(two_h - (fq - k * k)) / scale;
    if (defect > chk.max_defect) {
      chk.max_defect = defect;
      chk.witness = detail::witness_string(r);
    }
  }
  chk.pass = chk.max_defect <= chk.tolerance;
  return chk;
}

// || grad H - (Q/2) grad F || / || grad H || on coordinate-constructed
// trapezoids, where the two gradients must be parallel.
inline IdentityCheck check_gradient_parallelism(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  IdentityCheck chk{"gradient_parallelism", n, 0.0, 1e-8, false, ""};
  for (int i = 0; i < n; ++i) {
    const DistanceVector r = detail::random_trapezoid(rng, i, nullptr);
    const Vec6 gh = grad_H(r);
    const Vec6 diff = gh - 0.5 * q_polynomial(r) * grad_F(r);
    const double defect = diff.norm() / gh.norm();
    if (defect > chk.max_defect) {
      chk.max_defect = defect;
      chk.witness = detail::witness_string(r);
    }
  }
  chk.pass = chk.max_defect <= chk.tolerance;
  return chk;
}

// (1/4) sqrt(Q / (r12 r34)) against the construction height of the same
// trapezoids, equal-base rectangles included.
inline IdentityCheck check_height_formula(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  IdentityCheck chk{"height_formula", n, 0.0, 1e-9, false, ""};
  for (int i = 0; i < n; ++i) {
    double h = 0.0;
    const DistanceVector r = detail::random_trapezoid(rng, i, &h);
    const double defect = std::abs(trapezoid_height(r) - h) / h;
    if (defect > chk.max_defect) {
      chk.max_defect = defect;
      chk.witness = detail::witness_string(r);
    }
  }
  chk.pass = chk.max_defect <= chk.tolerance;
  return chk;
}

// grad_U, grad_I, grad_F and grad_H against central differences (step 1e-5).
inline IdentityCheck check_gradient_fd(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> um(0.5, 2.0);
  IdentityCheck chk{"gradient_fd", n, 0.0, 1e-6, false, ""};
  const double step = 1e-5;
  for (int i = 0; i < n; ++i) {
    const DistanceVector r = detail::random_distances(rng, 0.5, 2.0);
    const MassVector m(um(rng), um(rng), um(rng), um(rng));
    const Vec6 x = r.vec();
    auto dv = [](const Vec6& y) { return DistanceVector::from_vec(y); };

    struct Pair {
      Vec6 analytic;
      Vec6 fd;
    };
    const Pair pairs[4] = {
        {grad_U(r, m), detail::central_diff6(
                           [&](const Vec6& y) {
                             return newtonian_potential(dv(y), m);
                           },
                           x, step)},
        {grad_I(r, m), detail::central_diff6(
                           [&](const Vec6& y) {
                             return moment_of_inertia(dv(y), m);
                           },
                           x, step)},
        {grad_F(r), detail::central_diff6(
                        [&](const Vec6& y) {
                          return trapezoid_residual(dv(y));
                        },
                        x, step)},
        {grad_H(r), detail::central_diff6(
                        [&](const Vec6& y) { return cayley_menger(dv(y)); },
                        x, step)}};
    for (const Pair& p : pairs) {
      const double defect = (p.analytic - p.fd).norm() / p.analytic.norm();
      if (defect > chk.max_defect) {
        chk.max_defect = defect;
        chk.witness = detail::witness_string(r);
      }
    }
  }
  chk.pass = chk.max_defect <= chk.tolerance;
  return chk;
}

// hessian_lagrangian against central differences (step 1e-5) of the gradient
// of L(r) = U + lambda M (I - 1) + sigma F at fixed multipliers. Differencing
// the gradient once keeps the oracle well above the roundoff floor that a
// double difference of the scalar would hit at this step size; the gradient
// itself is held against scalar differences by check_gradient_fd.
inline IdentityCheck check_hessian_fd(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> um(0.5, 2.0);
  std::uniform_real_distribution<double> umu(-1.0, 1.5);
  IdentityCheck chk{"hessian_fd", n, 0.0, 1e-5, false, ""};
  const double step = 1e-5;
  for (int i = 0; i < n; ++i) {
    const DistanceVector r = detail::random_distances(rng, 0.5, 2.0);
    const MassVector m(um(rng), um(rng), um(rng), um(rng));
    const Multipliers mult{umu(rng), umu(rng)};
    auto grad_lagrangian = [&](const Vec6& y) -> Vec6 {
      const DistanceVector ry = DistanceVector::from_vec(y);
      return grad_U(ry, m) + mult.lambda * m.total() * grad_I(ry, m) +
             mult.sigma * grad_F(ry);
    };
    const Mat6 analytic = hessian_lagrangian(r, mult, m);
    Mat6 fd;
    const Vec6 x = r.vec();
    for (int k = 0; k < 6; ++k) {
      const double h = step * std::max(1.0, std::abs(x[k]));
      Vec6 xp = x, xm = x;
      xp[k] += h;
      xm[k] -= h;
      fd.col(k) = (grad_lagrangian(xp) - grad_lagrangian(xm)) / (2.0 * h);
    }
    const double defect = (analytic - fd).norm() / analytic.norm();
    if (defect > chk.max_defect) {
      chk.max_defect = defect;
      chk.witness = detail::witness_string(r);
    }
  }
  chk.pass = chk.max_defect <= chk.tolerance;
  return chk;
}

// The full battery at a common sample budget: the FQK identity at the full
// count, the trapezoid suites at a tenth, and the finite-difference
// cross-checks at up to 100 points.
inline std::vector<IdentityCheck> run_identity_checks(
    int samples, std::uint64_t seed, bool inject_k_sign_error = false) {
  const int traps = std::max(1, samples / 10);
  const int fd = std::min(100, samples);
  return {check_fqk_identity(samples, seed + 1, inject_k_sign_error),
          check_gradient_parallelism(traps, seed + 2),
          check_height_formula(traps, seed + 3),
          check_gradient_fd(fd, seed + 4),
          check_hessian_fd(fd, seed + 5)};
}

}  // namespace trapcc
