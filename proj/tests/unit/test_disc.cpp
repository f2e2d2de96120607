#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hullkit/disc.hpp"
#include "hullkit/error.hpp"
#include "support/generators.hpp"

using namespace hullkit;

namespace {

const Complex I{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

BoundaryLoop scalar_loop(int n, std::initializer_list<std::pair<int, Complex>> coeffs) {
  BoundaryLoop g(1, n, true);
  for (const auto& [k, c] : coeffs) g.set_coeff(0, k, c);
  return g;
}

// cos(kt) has c_k = 1/2, sin(kt) has c_k = -i/2.
void expect_loop(const BoundaryLoop& g, std::initializer_list<std::pair<int, Complex>> want) {
  for (int k = -g.band_limit(); k <= g.band_limit(); ++k) {
    Complex w = 0.0;
    for (const auto& [kk, c] : want) {
      if (kk == k) w = c;
      if (kk == -k && k != 0) w = std::conj(c);
    }
    EXPECT_NEAR(std::abs(g.coeff(0, k) - w), 0.0, 1e-15) << "k = " << k;
  }
}

// Five-point Laplacian in ζ.
Eigen::VectorXd stencil_laplacian(const HarmonicDisc& f, Complex z, double h) {
  return (f(z + h) + f(z - h) + f(z + I * h) + f(z - I * h) - 4.0 * f(z)) / (h * h);
}

}  // namespace

TEST(Series, Calculus) {
  const Series a{1.0, 2.0, 3.0};  // 1 + 2z + 3z²
  EXPECT_NEAR(std::abs(eval_series(a, 2.0) - 17.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(eval_series_derivative(a, 2.0) - 14.0), 0.0, 1e-14);
  const Series d = series_derivative(a);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[1], Complex(6.0));
  const Series s = series_integral(a, 5.0);
  EXPECT_EQ(s[0], Complex(5.0));
  EXPECT_EQ(s[3], Complex(1.0));
  const Series p = series_product({1.0, 1.0}, {1.0, -1.0});
  EXPECT_EQ(p[0], Complex(1.0));
  EXPECT_EQ(p[1], Complex(0.0));
  EXPECT_EQ(p[2], Complex(-1.0));
  EXPECT_NEAR(std::abs(series_dilate(a, 0.5)[2] - 0.75), 0.0, 1e-15);
}

TEST(Loop, FromSamplesRecoversTrigPolynomial) {
  const int m = 64;
  std::vector<Eigen::VectorXd> s;
  for (int j = 0; j < m; ++j) {
    const double t = 2.0 * kPi * j / m;
    s.push_back(Eigen::Vector2d(1.0 + std::cos(t), std::sin(3.0 * t)));
  }
  const BoundaryLoop g = BoundaryLoop::from_samples(s, 8);
  EXPECT_NEAR(std::abs(g.coeff(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(g.coeff(0, 1) - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(g.coeff(1, 3) - Complex(0.0, -0.5)), 0.0, 1e-15);
  EXPECT_NEAR(g.eval_real(0.3)[1], std::sin(0.9), 1e-14);
  EXPECT_THROW(BoundaryLoop::from_samples(s, 32), ValidationError);
}

TEST(HarmonicExtension, Examples) {
  const BoundaryLoop c = scalar_loop(4, {{1, 0.5}});  // cos t
  const HarmonicExtension e = harmonic_extension(c);
  const Complex z(0.3, -0.4);
  EXPECT_NEAR(e(z)[0].real(), 0.3, 1e-15);
  EXPECT_NEAR(std::abs(e.center()[0]), 0.0, 1e-15);

  BoundaryLoop k(3, 4, true);
  for (int i = 0; i < 3; ++i) k.set_coeff(i, 0, 1.0 + i);
  const HarmonicExtension ek = harmonic_extension(k);
  for (const Complex w : {Complex(0, 0), Complex(0.5, 0.5), Complex(-1, 0)}) {
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(ek(w)[i].real(), 1.0 + i, 1e-15);
  }
}

TEST(HarmonicConjugate, Examples) {
  expect_loop(harmonic_conjugate(scalar_loop(4, {{1, 0.5}})), {{1, Complex(0, -0.5)}});  // cos -> sin
  expect_loop(harmonic_conjugate(scalar_loop(4, {{1, Complex(0, -0.5)}})), {{1, -0.5}});  // sin -> -cos
  expect_loop(harmonic_conjugate(scalar_loop(4, {{0, 3.0}, {2, 0.5}})), {{2, Complex(0, -0.5)}});
}

TEST(SpinorDisc, Examples) {
  const NullDisc line = spinor_disc({1.0}, {0.0}, Vec3C::Zero());
  const Complex z(0.2, 0.7);
  EXPECT_LE((line.f(z) - Eigen::Vector3cd(z, I * z, 0.0)).norm(), 1e-15);

  const NullDisc enn = spinor_disc({1.0}, {0.0, 1.0}, Vec3C::Zero());
  const Eigen::Vector3cd want(z - z * z * z / 3.0, I * (z + z * z * z / 3.0), z * z);
  EXPECT_LE((enn.f(z) - want).norm(), 1e-15);
  EXPECT_LE(nullity_residual(enn.f, 400), 1e-12);
  EXPECT_FALSE(enn.has_branch_point);

  const Vec3C p(1.0, -I, 2.0);
  const NullDisc aff = spinor_disc({1.0}, {1.0}, p);
  EXPECT_LE((aff.f(z) - (p + z * Vec3C(0.0, 2.0 * I, 2.0))).norm(), 1e-15);
}

TEST(SpinorDisc, BranchPointFlagged) {
  // a = b = ζ share a zero at the origin.
  const NullDisc d = spinor_disc({0.0, 1.0}, {0.0, 1.0}, Vec3C::Zero());
  EXPECT_TRUE(d.has_branch_point);
  EXPECT_THROW(require_immersion(d.f.real_part()), BranchPointError);
}

TEST(Nullity, Residuals) {
  EXPECT_NEAR(nullity_residual(HolomorphicDisc({{0.0, 1.0}, {0.0}, {0.0}}), 100), 1.0, 1e-15);
  gen::Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const NullDisc d = spinor_disc(rng.series(3), rng.series(3), rng.vec3c());
    EXPECT_LE(nullity_residual(d.f, 200), 1e-12);
  }
}

TEST(Conformality, Residuals) {
  EXPECT_LE(conformality_residual(catalog("flat").map(), 300), 1e-14);
  EXPECT_LE(conformality_residual(catalog("enneper").map(), 300), 1e-12);
  const HarmonicDisc stretched({{0.0, 1.0}, {0.0, -2.0 * I}, {0.0}});  // (Re ζ, 2 Im ζ, 0)
  EXPECT_NEAR(conformality_residual(stretched, 300), 0.75, 1e-14);
}

TEST(Catalog, Flat) {
  const ConformalMinimalDisc f = catalog("flat");
  EXPECT_LE(f.center().norm(), 1e-15);
  for (int j = 0; j < 16; ++j) {
    const double t = 2.0 * kPi * j / 16;
    EXPECT_LE((f.map().boundary(t) - Eigen::Vector3d(std::cos(t), std::sin(t), 0.0)).norm(), 1e-15);
  }
}

TEST(Catalog, EnneperHalfIsInjective) {
  CatalogParams p;
  p.rho = 0.5;
  const HarmonicDisc e = catalog("enneper", p).map();
  EXPECT_GT(min_separation_ratio(e, 300), 0.1);
  EXPECT_GT(immersion_ratio(e), 0.5);
  // A disc that folds over itself has zero separation.
  const HarmonicDisc folded({{0.0, 0.0, 1.0}, {0.0}, {0.0}});  // Re ζ²
  EXPECT_LT(min_separation_ratio(folded, 300), 1e-12);
}

TEST(Catalog, RandomSpinorResiduals) {
  CatalogParams p;
  p.degree = 3;
  p.seed = 11;
  const HarmonicDisc d = catalog("random-spinor", p).map();
  EXPECT_LE(conformality_residual(d, 400), 1e-10);
  EXPECT_GT(immersion_ratio(d), 1e-3);
}

TEST(Catalog, TransformAndErrors) {
  CatalogParams p;
  p.scale = 2.0;
  p.translation = Vec3R(0, 0, 1);
  const HarmonicDisc d = catalog("flat", p).map();
  EXPECT_LE((d.center() - Eigen::Vector3d(0, 0, 1)).norm(), 1e-15);
  EXPECT_NEAR(d.boundary(0.0)[0], 2.0, 1e-15);
  EXPECT_THROW(catalog("nope"), ValidationError);
  p.theta = Vec3C(1.0, 0.0, 0.0);
  EXPECT_THROW(catalog("affine-null", p), ValidationError);
}

TEST(BoundaryMeasure, Examples) {
  const WeightedPoints w = boundary_measure(catalog("flat").map(), 4);
  ASSERT_EQ(w.points.size(), 4u);
  const Eigen::Vector3d want[4] = {{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}};
  for (int j = 0; j < 4; ++j) {
    EXPECT_LE((w.points[static_cast<std::size_t>(j)] - want[j]).norm(), 1e-15);
    EXPECT_EQ(w.weights[static_cast<std::size_t>(j)], 0.25);
  }
  const HarmonicDisc c({{2.0}, {-1.0}, {0.5}});
  const WeightedPoints wc = boundary_measure(c, 7);
  double tot = 0.0;
  for (std::size_t j = 0; j < 7; ++j) {
    EXPECT_EQ(wc.points[j], Eigen::Vector3d(2.0, -1.0, 0.5));
    tot += wc.weights[j];
  }
  EXPECT_NEAR(tot, 1.0, 1e-15);
  EXPECT_THROW(boundary_measure(c, 0), ValidationError);

  CatalogParams p;
  p.rho = 0.5;
  const HarmonicDisc e = catalog("enneper", p).map();
  // On |ζ| = r, |f|² = r² + r⁶/9 - (2r⁴/3) cos 4t + r⁴ cos² 2t, largest at
  // cos 4t = -1: sup |f| = r + r³/3.
  const double sup = 0.5 + 0.125 / 3.0;
  const WeightedPoints we = boundary_measure(e, 256);
  tot = 0.0;
  for (std::size_t j = 0; j < 256; ++j) {
    tot += we.weights[j];
    EXPECT_LE(we.points[j].norm(), sup + 1e-12);
  }
  EXPECT_NEAR(tot, 1.0, 1e-13);
}

// ---------------------------------------------------------------- properties

TEST(DiscProperty, ExtensionCenterIsMean) {
  gen::Rng rng(31);
  for (int t = 0; t < 100; ++t) {
    const BoundaryLoop g = rng.real_loop(3, rng.integer(0, 12));
    const HarmonicExtension e = harmonic_extension(g);
    // quadrature mean over M > 2N points
    const int m = 2 * g.band_limit() + 3;
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (int j = 0; j < m; ++j) mean += g.eval_real(2.0 * kPi * j / m) / m;
    EXPECT_LE((e(0.0).real() - mean).norm(), 1e-13);
  }
}

TEST(DiscProperty, AnalyticCombinationHasNoNegativeFrequencies) {
  gen::Rng rng(32);
  for (int t = 0; t < 100; ++t) {
    const BoundaryLoop g = rng.real_loop(2, rng.integer(1, 16));
    const BoundaryLoop f = combine_analytic(g, harmonic_conjugate(g));
    EXPECT_LE(f.negative_frequency_energy(), 1e-10 * f.energy());
    // boundary real part of the holomorphic extension is g again
    const HolomorphicDisc hd = HolomorphicDisc::from_real_loop(g);
    const double s = rng.uniform(0.0, 2.0 * kPi);
    EXPECT_LE((hd(std::polar(1.0, s)).real() - g.eval_real(s)).norm(), 1e-12);
    EXPECT_LE((hd.center().real() - g.mean().real()).norm(), 1e-15);
  }
}

TEST(DiscProperty, SpinorDiscsNullAndConformal) {
  gen::Rng rng(33);
  int checked = 0;
  for (int t = 0; t < 60; ++t) {
    const NullDisc d = spinor_disc(rng.series(rng.integer(0, 4)), rng.series(rng.integer(0, 4)), rng.vec3c());
    EXPECT_LE(nullity_residual(d.f, 200), 1e-12);
    const HarmonicDisc m = d.f.real_part();
    if (d.has_branch_point || immersion_ratio(m) < 1e-3) continue;
    ++checked;
    EXPECT_LE(conformality_residual(m, 200), 1e-10);
  }
  EXPECT_GT(checked, 30);
}

TEST(DiscProperty, RealPartIsHarmonicAtSecondOrder) {
  CatalogParams p;
  p.degree = 3;
  for (std::uint64_t seed : {11ULL, 12ULL, 13ULL}) {
    p.seed = seed;
    const HarmonicDisc d = catalog("random-spinor", p).map();
    for (const Complex z : {Complex(0.1, 0.2), Complex(-0.3, 0.25), Complex(0.0, -0.5)}) {
      const double e1 = stencil_laplacian(d, z, 0.02).norm();
      const double e2 = stencil_laplacian(d, z, 0.01).norm();
      EXPECT_LT(e1, 1e-2);
      EXPECT_GT(e1 / e2, 3.0);
      EXPECT_LT(e1 / e2, 5.0);
    }
  }
}
