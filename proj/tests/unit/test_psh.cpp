#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "hullkit/error.hpp"
#include "hullkit/psh.hpp"
#include "support/generators.hpp"

using namespace hullkit;

namespace {

const Complex I{0.0, 1.0};

Polynomial poly3(std::initializer_list<std::pair<double, std::array<int, 3>>> terms) {
  Polynomial p(3);
  for (const auto& [c, pw] : terms) p.add_term(c, {pw[0], pw[1], pw[2], 0, 0, 0});
  return p;
}

// Σ w_k |z_k|² on C^3 = R^6.
Polynomial diag_c3(double w1, double w2, double w3) {
  Polynomial p(6);
  const double w[3] = {w1, w2, w3};
  for (int k = 0; k < 3; ++k) {
    Polynomial::Powers px{}, py{};
    px[static_cast<std::size_t>(2 * k)] = 2;
    py[static_cast<std::size_t>(2 * k + 1)] = 2;
    p.add_term(w[k], px);
    p.add_term(w[k], py);
  }
  return p;
}

ScalarFunction on_r3(Polynomial p, double half = 3.0) {
  return ScalarFunction::from_polynomial(std::move(p), Box::cube(3, half));
}
ScalarFunction on_c3(Polynomial p, double half = 3.0) {
  return ScalarFunction::from_polynomial(std::move(p), Box::cube(6, half));
}

// Wirtinger oracle for a real quadratic on R^6 with Hessian h:
// ∂²u/∂z_j∂z̄_k = 1/4 (h_xx + h_yy + i(h_xy - h_yx)).
double levi_oracle(const Eigen::MatrixXd& h, const Vec3C& t) {
  Complex acc = 0.0;
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      const Complex c = 0.25 * Complex(h(2 * j, 2 * k) + h(2 * j + 1, 2 * k + 1),
                                       h(2 * j, 2 * k + 1) - h(2 * j + 1, 2 * k));
      acc += c * t[j] * std::conj(t[k]);
    }
  }
  return acc.real();
}

const Vec3R kOrigin = Vec3R::Zero();

}  // namespace

TEST(Hessian, Examples) {
  const Eigen::VectorXd x = Eigen::Vector3d(0.3, -0.7, 1.1);
  const auto sq = on_r3(poly3({{1, {2, 0, 0}}, {1, {0, 2, 0}}, {1, {0, 0, 2}}}));
  EXPECT_TRUE(hessian(sq, x).isApprox(2.0 * Eigen::Matrix3d::Identity(), 1e-15));
  const auto x1x2 = on_r3(poly3({{1, {1, 1, 0}}}));
  Eigen::Matrix3d want = Eigen::Matrix3d::Zero();
  want(0, 1) = want(1, 0) = 1.0;
  EXPECT_TRUE((hessian(x1x2, x) - want).isZero(1e-15));
  const auto m = on_r3(poly3({{1, {0, 2, 0}}, {1, {0, 0, 2}}, {-1, {2, 0, 0}}, {1, {0, 0, 0}}}));
  EXPECT_TRUE((hessian(m, x) - Eigen::Vector3d(-2, 2, 2).asDiagonal().toDenseMatrix()).isZero(1e-15));
}

TEST(Hessian, FiniteDifferenceMatchesClosedForm) {
  // u = exp(x1) sin(x2) + x3^3, Hessian by hand.
  ScalarFunction u([](std::span<const double> x) { return std::exp(x[0]) * std::sin(x[1]) + x[2] * x[2] * x[2]; },
                   Box::cube(3, 2.0));
  const Eigen::Vector3d x(0.2, 0.4, -0.5);
  Eigen::Matrix3d want;
  want << std::exp(0.2) * std::sin(0.4), std::exp(0.2) * std::cos(0.4), 0, std::exp(0.2) * std::cos(0.4),
      -std::exp(0.2) * std::sin(0.4), 0, 0, 0, 6 * -0.5;
  EXPECT_LE((hessian(u, x) - want).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Hessian, DomainMargin) {
  const auto u = on_r3(poly3({{1, {2, 0, 0}}}), 1.0);
  EXPECT_THROW(hessian(u, Eigen::Vector3d(1.0, 0, 0)), DomainError);
  EXPECT_THROW(hessian(u, Eigen::Vector3d(5.0, 0, 0)), DomainError);
}

TEST(Hessian, AnalyticAgreesWithDifferences) {
  gen::Rng rng(8);
  const auto u = on_r3(rng.polynomial(3, 4, 8), 1.0);
  EXPECT_LE(hessian_mismatch(u, 20, 3), 1e-5);
}

TEST(Floor, ClampsAndOverrides) {
  ScalarFunction u([](std::span<const double>) { return -1e9; }, Box::cube(3, 1.0));
  EXPECT_EQ(u(Eigen::VectorXd(Eigen::Vector3d::Zero())), -1e6);
  ::setenv("HULLKIT_FLOOR", "-50", 1);
  ScalarFunction v([](std::span<const double>) { return -1e9; }, Box::cube(3, 1.0));
  EXPECT_EQ(v(Eigen::VectorXd(Eigen::Vector3d::Zero())), -50.0);
  ::setenv("HULLKIT_FLOOR", "abc", 1);
  EXPECT_THROW(floor_value(), ValidationError);
  ::unsetenv("HULLKIT_FLOOR");
  EXPECT_EQ(floor_value(), -1e6);
}

TEST(Levi, Examples) {
  const Vec3C z(0.1, I * 0.2, 0.3);
  const auto norm2 = on_c3(diag_c3(1, 1, 1));
  const Vec3C unit = Vec3C(1.0, I, 0.0) / std::sqrt(2.0);
  EXPECT_NEAR(levi_form(norm2, z, unit), 1.0, 1e-14);
  const auto u = on_c3(diag_c3(1, 1, -1));
  const double r = std::sqrt(2.0) / 2.0;
  EXPECT_NEAR(levi_form(u, z, Vec3C(I * r, I * r, 1.0)), 0.0, 1e-14);
  EXPECT_NEAR(levi_form(u, z, unit), 1.0, 1e-14);
}

TEST(Levi, NullPshVerdicts) {
  const auto dirs6 = sample_null_directions(6, 1);
  const auto u = on_c3(diag_c3(1, 1, -1));
  for (const Vec3C& z : {Vec3C(0, 0, 0), Vec3C(0.5, -I, 0.2 + 0.3 * I)}) {
    const NullPshVerdict v = is_null_psh_at(u, z, dirs6);
    EXPECT_NEAR(v.min_value, 0.0, 1e-14);
    const Vec3C& t = v.argmin;
    EXPECT_NEAR(std::norm(t[2]), std::norm(t[0]) + std::norm(t[1]), 1e-14);
    EXPECT_TRUE(v.passes(1e-12));
  }
  const auto neg = on_c3(diag_c3(-1, -1, -1));
  EXPECT_NEAR(is_null_psh_at(neg, Vec3C::Zero(), dirs6).min_value, -1.0, 1e-14);
  EXPECT_FALSE(is_null_psh_at(neg, Vec3C::Zero(), dirs6).passes(1e-10));

  // Re(z1²) = x1² - y1² is pluriharmonic; subtracting |z2|² breaks null psh.
  Polynomial re_z1sq(6);
  re_z1sq.add_term(1.0, {2, 0, 0, 0, 0, 0});
  re_z1sq.add_term(-1.0, {0, 2, 0, 0, 0, 0});
  const auto dirs = sample_null_directions(100, 7);
  EXPECT_NEAR(is_null_psh_at(on_c3(re_z1sq), Vec3C::Zero(), dirs).min_value, 0.0, 1e-14);
  const auto probe = on_c3(re_z1sq + diag_c3(0, -1, 0));
  EXPECT_LE(is_null_psh_at(probe, Vec3C::Zero(), dirs).min_value, -0.25);
}

TEST(Levi, CertifiedMinimum) {
  const auto u = on_c3(diag_c3(1, 1, -1));
  const auto c = certified_null_levi_min(levi_matrix(u, Vec3C::Zero()));
  ASSERT_TRUE(c.has_value());
  EXPECT_NEAR(*c, 0.0, 1e-14);
  const auto w = certified_null_levi_min(levi_matrix(on_c3(diag_c3(0, 0, -1)), Vec3C::Zero()));
  ASSERT_TRUE(w.has_value());
  EXPECT_NEAR(*w, -0.5, 1e-14);
  Polynomial off(6);
  off.add_term(1.0, {1, 0, 1, 0, 0, 0});
  EXPECT_FALSE(certified_null_levi_min(levi_matrix(on_c3(off), Vec3C::Zero())).has_value());
}

TEST(MinimalPsh, Defects) {
  const Vec3R x(0.4, 0.1, -0.3);
  EXPECT_NEAR(minimal_psh_defect(on_r3(poly3({{1, {2, 0, 0}}, {1, {0, 2, 0}}, {1, {0, 0, 2}}})), x), 4.0, 1e-13);
  EXPECT_NEAR(
      minimal_psh_defect(on_r3(poly3({{1, {0, 2, 0}}, {1, {0, 0, 2}}, {-1, {2, 0, 0}}, {1, {0, 0, 0}}})), x), 0.0,
      1e-13);
  EXPECT_NEAR(minimal_psh_defect(on_r3(poly3({{-1, {2, 0, 0}}, {-1, {0, 2, 0}}, {-1, {0, 0, 2}}})), x), -4.0,
              1e-13);
}

TEST(CircleAverage, Examples) {
  const auto sq = on_r3(poly3({{1, {2, 0, 0}}, {1, {0, 2, 0}}, {1, {0, 0, 2}}}));
  const ConformalFrame xy{Vec3R(1, 0, 0), Vec3R(0, 1, 0)};
  EXPECT_NEAR(circle_average(sq, kOrigin, xy, 1.0, 64), 1.0, 1e-15);
  const auto x1 = on_r3(poly3({{1, {1, 0, 0}}}));
  gen::Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    const Vec3R x = rng.in_ball(1.0);
    const ConformalFrame f = frame_from_normal(rng.unit3());
    EXPECT_NEAR(circle_average(x1, x, f, 0.5, 16), x[0], 1e-14);
  }
  const auto m = on_r3(poly3({{1, {0, 2, 0}}, {1, {0, 0, 2}}, {-1, {2, 0, 0}}}));
  const ConformalFrame e23{Vec3R(0, 1, 0), Vec3R(0, 0, 1)};
  EXPECT_NEAR(circle_average(m, kOrigin, e23, 1.0, 64), 1.0, 1e-15);
  EXPECT_THROW(circle_average(m, kOrigin, e23, 3.5, 64), DomainError);
}

// ---------------------------------------------------------------- properties

TEST(PshProperty, LeviMatchesWirtingerOracle) {
  gen::Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const Eigen::MatrixXd a = rng.symmetric(6);
    const auto u = on_c3(rng.quadratic(6, a));
    const Vec3C th = rng.vec3c();
    const Vec3C z = rng.vec3c(0.3);
    EXPECT_NEAR(levi_form(u, z, th), levi_oracle(2.0 * a, th), 1e-12 * (1.0 + a.norm() * th.squaredNorm()));
  }
}

TEST(PshProperty, LeviHomogeneousAndLinear) {
  gen::Rng rng(12);
  for (int t = 0; t < 200; ++t) {
    const Polynomial p = rng.quadratic(6, rng.symmetric(6));
    const Polynomial q = rng.quadratic(6, rng.symmetric(6));
    const Vec3C th = rng.vec3c();
    const Vec3C z = rng.vec3c(0.3);
    const Complex lam = rng.complex();
    const double base = levi_form(on_c3(p), z, th);
    const double tol = 1e-11 * (1.0 + std::abs(base)) * (1.0 + std::norm(lam));
    EXPECT_NEAR(levi_form(on_c3(p), z, lam * th), std::norm(lam) * base, tol);
    const double s = rng.normal();
    EXPECT_NEAR(levi_form(on_c3(p * s + q), z, th), s * base + levi_form(on_c3(q), z, th),
                1e-11 * (1.0 + std::abs(s)) * (1.0 + th.squaredNorm()) * 10.0);
  }
}

TEST(PshProperty, ConvexQuadraticsHaveNonnegativeDefect) {
  gen::Rng rng(13);
  for (int t = 0; t < 300; ++t) {
    const auto u = on_r3(rng.quadratic(3, rng.psd(3)));
    EXPECT_GE(minimal_psh_defect(u, rng.in_ball(1.0)), -1e-12);
  }
}

TEST(PshProperty, SubmeanForNonnegativeDefect) {
  gen::Rng rng(14);
  int checked = 0;
  while (checked < 200) {
    const Eigen::MatrixXd a = rng.symmetric(3);
    const auto u = on_r3(rng.quadratic(3, a), 4.0);
    if (minimal_psh_defect(u, kOrigin) < 0.0) continue;
    ++checked;
    const Vec3R x = rng.in_ball(1.0);
    const double r = rng.uniform(0.05, 1.5);
    const ConformalFrame f = frame_from_normal(rng.unit3());
    const double ux = u(Eigen::VectorXd(x));
    EXPECT_GE(circle_average(u, x, f, r, 8), ux - 1e-12 * (1.0 + std::abs(ux)));
  }
}

TEST(PshProperty, TubeVerdictsAgree) {
  // w(Re z) on C^3 is null psh exactly when w is minimal psh.
  gen::Rng rng(15);
  const auto dirs = sample_null_directions(400, 3);
  int checked = 0;
  while (checked < 60) {
    const Eigen::MatrixXd a = rng.symmetric(3);
    const auto w = on_r3(Polynomial::quadratic(a, Eigen::Vector3d::Zero(), 0.0));
    const double defect = minimal_psh_defect(w, kOrigin);
    if (std::abs(defect) < 0.3) continue;
    ++checked;
    Eigen::MatrixXd a6 = Eigen::MatrixXd::Zero(6, 6);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) a6(2 * i, 2 * j) = a(i, j);
    const auto u = on_c3(Polynomial::quadratic(a6, Eigen::VectorXd::Zero(6), 0.0));
    const Vec3C z(rng.complex(0.3), rng.complex(0.3), rng.complex(0.3));
    const bool levi_ok = is_null_psh_at(u, z, dirs).min_value >= 0.0;
    EXPECT_EQ(levi_ok, defect >= 0.0) << "defect " << defect;
  }
}
