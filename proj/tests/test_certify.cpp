#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "trapcc/certify.hpp"
#include "trapcc/explore.hpp"
#include "trapcc/kkt.hpp"
#include "trapcc/potential.hpp"

using namespace trapcc;

namespace {

DistanceVector square() {
  const double d = std::sqrt(2.0);
  return DistanceVector(1.0, d, 1.0, 1.0, d, 1.0);
}

const MassVector kOnes{1, 1, 1, 1};

double square_lambda() { return 0.5 * (1.0 + std::pow(2.0, -1.5)); }
double square_sigma() { return 0.5 * (1.0 - square_lambda()); }

// Second differences of the scalar Lagrangian with 3- and 4-point stencils.
// Step 1e-4 balances truncation against cancellation for second derivatives.
template <typename F>
Mat6 fd_hessian(const F& f, const Vec6& x, double step) {
  Mat6 h;
  for (int i = 0; i < 6; ++i) {
    for (int j = i; j < 6; ++j) {
      if (i == j) {
        Vec6 xp = x, xm = x;
        xp[i] += step;
        xm[i] -= step;
        h(i, i) = (f(xp) - 2.0 * f(x) + f(xm)) / (step * step);
      } else {
        Vec6 xpp = x, xpm = x, xmp = x, xmm = x;
        xpp[i] += step; xpp[j] += step;
        xpm[i] += step; xpm[j] -= step;
        xmp[i] -= step; xmp[j] += step;
        xmm[i] -= step; xmm[j] -= step;
        h(i, j) = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * step * step);
        h(j, i) = h(i, j);
      }
    }
  }
  return h;
}

}  // namespace

TEST_CASE("hessian_lagrangian structure at the square", "[certify]") {
  const double l = square_lambda();
  const double s = square_sigma();
  const Mat6 h = hessian_lagrangian(square(), Multipliers{l, s}, kOnes);

  const double f12 = 2.0 + l;
  const double f13 = 2.0 / std::pow(std::sqrt(2.0), 3) + l;
  CHECK(h(0, 0) == Catch::Approx(f12).epsilon(1e-14));
  CHECK(h(1, 1) == Catch::Approx(f13 - 2.0 * s).epsilon(1e-14));
  CHECK(h(1, 1) == Catch::Approx(1.0606601717798214).epsilon(1e-12));
  CHECK(h(2, 2) == Catch::Approx(f12 + 2.0 * s).epsilon(1e-14));
  CHECK(h(3, 3) == Catch::Approx(f12 + 2.0 * s).epsilon(1e-14));
  CHECK(h(4, 4) == Catch::Approx(f13 - 2.0 * s).epsilon(1e-14));
  CHECK(h(5, 5) == Catch::Approx(f12).epsilon(1e-14));
  CHECK(h(0, 5) == Catch::Approx(2.0 * s).epsilon(1e-14));
  CHECK(h(5, 0) == Catch::Approx(2.0 * s).epsilon(1e-14));

  // Everything off the diagonal and the (r12, r34) corner is zero.
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      if (i == j || (i == 0 && j == 5) || (i == 5 && j == 0)) continue;
      CHECK(h(i, j) == 0.0);
    }
  }

  CHECK((h - h.transpose()).norm() == 0.0);
}

TEST_CASE("hessian_lagrangian is diagonal when sigma = 0", "[certify]") {
  const DistanceVector r(1.2, 0.9, 1.4, 1.1, 0.8, 1.3);
  const MassVector m(1, 2, 3, 4);
  const Mat6 h = hessian_lagrangian(r, Multipliers{0.7, 0.0}, m);
  const auto f = f_diagonal(r, Multipliers{0.7, 0.0}, m);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      if (i == j) {
        CHECK(h(i, i) == Catch::Approx(f[static_cast<std::size_t>(i)]));
      } else {
        CHECK(h(i, j) == 0.0);
      }
    }
  }
}

TEST_CASE("hessian_lagrangian matches scalar finite differences",
          "[certify]") {
  std::mt19937_64 rng(701);
  std::uniform_real_distribution<double> u(0.7, 1.6);
  std::uniform_real_distribution<double> umu(-1.0, 1.5);
  for (int i = 0; i < 30; ++i) {
    const DistanceVector r(u(rng), u(rng), u(rng), u(rng), u(rng), u(rng));
    const MassVector m(u(rng), u(rng), u(rng), u(rng));
    const Multipliers mult{umu(rng), umu(rng)};
    auto lagrangian = [&](const Vec6& y) {
      const DistanceVector ry = DistanceVector::from_vec(y);
      return newtonian_potential(ry, m) +
             mult.lambda * m.total() * (moment_of_inertia(ry, m) - 1.0) +
             mult.sigma * trapezoid_residual(ry);
    };
    const Mat6 analytic = hessian_lagrangian(r, mult, m);
    const Mat6 fd = fd_hessian(lagrangian, r.vec(), 1e-4);
    CHECK((analytic - fd).norm() <= 1e-5 * analytic.norm());
  }
}

TEST_CASE("a_terms at the square and in the decoupled limit", "[certify]") {
  const Multipliers mult{square_lambda(), square_sigma()};
  const auto a = a_terms(square(), mult, kOnes);
  CHECK(a[0] == Catch::Approx(3.0).epsilon(1e-12));
  CHECK(a[1] == Catch::Approx(3.0).epsilon(1e-12));
  CHECK(a[2] == Catch::Approx(3.0).epsilon(1e-12));
  CHECK(a[3] == Catch::Approx(3.0).epsilon(1e-12));
  CHECK(a[4] ==
        Catch::Approx(3.0 * (2.0 * square_lambda() + 1.0)).epsilon(1e-12));
  CHECK(a[4] == Catch::Approx(7.0606601717798201).epsilon(1e-12));

  const MassVector m(1, 2, 3, 4);
  const DistanceVector r(1.2, 0.9, 1.4, 1.1, 0.8, 1.3);
  const auto a0 = a_terms(r, Multipliers{0.0, 0.0}, m);
  CHECK(a0[0] == Catch::Approx(2.0 * 1 * 3));
  CHECK(a0[1] == Catch::Approx(2.0 * 1 * 4));
  CHECK(a0[2] == Catch::Approx(2.0 * 2 * 3));
  CHECK(a0[3] == Catch::Approx(2.0 * 2 * 4));
  CHECK(a0[4] == Catch::Approx(4.0 * 1 * 2 * 3 * 4));
}

TEST_CASE("a_terms match an independent re-evaluation", "[certify]") {
  std::mt19937_64 rng(809);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int i = 0; i < 30; ++i) {
    const DistanceVector r(u(rng), u(rng), u(rng), u(rng), u(rng), u(rng));
    const MassVector m(u(rng), u(rng), u(rng), u(rng));
    const Multipliers mult{u(rng) - 0.5, u(rng) - 1.0};
    const auto a = a_terms(r, mult, m);
    const double l = mult.lambda, s = mult.sigma;
    auto c = [](double x) { return x * x * x; };
    const double pairs[4][2] = {{m.m1() * m.m3(), c(r.r13())},
                                {m.m1() * m.m4(), c(r.r14())},
                                {m.m2() * m.m3(), c(r.r23())},
                                {m.m2() * m.m4(), c(r.r24())}};
    const double sign[4] = {-1.0, 1.0, 1.0, -1.0};
    for (int k = 0; k < 4; ++k) {
      const double expect =
          pairs[k][1] * (l * pairs[k][0] + sign[k] * 2.0 * s) +
          2.0 * pairs[k][0];
      CHECK(a[static_cast<std::size_t>(k)] ==
            Catch::Approx(expect).epsilon(1e-13));
    }
    const double mm = m.m1() * m.m2() * m.m3() * m.m4();
    const double p = c(r.r12()) * c(r.r34());
    const double a5 = mm * (l * l * p + 2.0 * l * (c(r.r12()) + c(r.r34())) +
                            4.0) -
                      4.0 * s * s * p;
    CHECK(a[4] == Catch::Approx(a5).epsilon(1e-13));
  }
}

TEST_CASE("principal_minors of the identity", "[certify]") {
  const auto p = principal_minors(Mat6::Identity());
  for (double v : p) {
    CHECK(v == Catch::Approx(1.0));
  }
}

TEST_CASE("numeric minors equal the closed forms at the square", "[certify]") {
  const Multipliers mult{square_lambda(), square_sigma()};
  const auto numeric =
      principal_minors(hessian_lagrangian(square(), mult, kOnes));
  const auto closed = closed_form_minors(square(), mult, kOnes);
  for (int k = 0; k < 6; ++k) {
    CHECK(numeric[static_cast<std::size_t>(k)] ==
          Catch::Approx(closed[static_cast<std::size_t>(k)]).epsilon(1e-10));
    CHECK(numeric[static_cast<std::size_t>(k)] > 0.0);
  }
  // P1 = lambda + 2 for unit masses and side 1; P6 = 3^4 A5 / 8 since the
  // product of the six cubed distances is 8 at the square.
  CHECK(numeric[0] == Catch::Approx(square_lambda() + 2.0).epsilon(1e-13));
  CHECK(numeric[5] ==
        Catch::Approx(81.0 * 3.0 * (2.0 * square_lambda() + 1.0) / 8.0)
            .epsilon(1e-11));
}

TEST_CASE("minor positivity is equivalent to positive definiteness",
          "[certify]") {
  const Multipliers mult{square_lambda(), square_sigma()};
  const Mat6 h = hessian_lagrangian(square(), mult, kOnes);
  const auto p = principal_minors(h);
  const bool minors_positive =
      std::all_of(p.begin(), p.end(), [](double v) { return v > 0.0; });
  Eigen::SelfAdjointEigenSolver<Mat6> eig(h);
  CHECK(minors_positive);
  CHECK(eig.eigenvalues()[0] > 1e-10);

  // Flipping lambda breaks both characterizations at once.
  const Mat6 bad = hessian_lagrangian(
      square(), Multipliers{-2.5, square_sigma()}, kOnes);
  const auto pb = principal_minors(bad);
  const bool bad_minors =
      std::all_of(pb.begin(), pb.end(), [](double v) { return v > 0.0; });
  Eigen::SelfAdjointEigenSolver<Mat6> eigb(bad);
  CHECK_FALSE(bad_minors);
  CHECK(eigb.eigenvalues()[0] < -1e-10);
}

TEST_CASE("certify_point passes at the square and fails on negated lambda",
          "[certify]") {
  const Multipliers mult{square_lambda(), square_sigma()};
  const CertificateReport rep = certify_point(square(), mult, kOnes);
  CHECK(rep.lambda_positive);
  CHECK(rep.all_minors_positive);
  CHECK(rep.a_terms_match_3mm);
  CHECK(rep.passed());
  CHECK(rep.f_diag[0] == Catch::Approx(2.0 + square_lambda()));

  const CertificateReport neg = certify_point(
      square(), Multipliers{-square_lambda(), square_sigma()}, kOnes);
  CHECK_FALSE(neg.lambda_positive);
  CHECK_FALSE(neg.passed());
}

TEST_CASE("certificate at a converged (1,2,3,4) critical point", "[certify]") {
  const MassVector m(1, 2, 3, 4);
  const auto starts = sample_mplus(77, 40, m);
  std::optional<Solution> found;
  for (const auto& s : starts) {
    const Solution sol = newton_solve(s, m);
    if (sol.converged()) {
      found = sol;
      break;
    }
  }
  REQUIRE(found.has_value());
  const auto& a = found->certificate.a_terms;
  CHECK(a[0] == Catch::Approx(9.0).epsilon(1e-8));
  CHECK(a[1] == Catch::Approx(12.0).epsilon(1e-8));
  CHECK(a[2] == Catch::Approx(18.0).epsilon(1e-8));
  CHECK(a[3] == Catch::Approx(24.0).epsilon(1e-8));
  auto cube = [](double x) { return x * x * x; };
  const double a5 = 3.0 *
                    (found->mult.lambda *
                         (cube(found->r.r12()) + cube(found->r.r34())) +
                     1.0) *
                    24.0;
  CHECK(a[4] == Catch::Approx(a5).epsilon(1e-8));

  const auto numeric =
      principal_minors(hessian_lagrangian(found->r, found->mult, m));
  const auto closed = closed_form_minors(found->r, found->mult, m);
  for (int k = 0; k < 6; ++k) {
    CHECK(numeric[static_cast<std::size_t>(k)] ==
          Catch::Approx(closed[static_cast<std::size_t>(k)]).epsilon(1e-10));
    CHECK(numeric[static_cast<std::size_t>(k)] > 0.0);
  }
  CHECK(found->certificate.passed());
}
