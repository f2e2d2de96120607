#pragma once

// Small seeded generators for property tests.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hullkit/disc.hpp"
#include "hullkit/geometry.hpp"
#include "hullkit/polynomial.hpp"

namespace gen {

using hullkit::Complex;
using hullkit::Vec3C;
using hullkit::Vec3R;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(eng_);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

  Complex complex(double scale = 1.0) { return {scale * normal(), scale * normal()}; }

  Vec3R vec3(double scale = 1.0) { return {scale * normal(), scale * normal(), scale * normal()}; }

  Vec3R unit3() {
    Vec3R v;
    do v = vec3(); while (v.norm() < 1e-6);
    return v.normalized();
  }

  Vec3R in_ball(double radius) { return radius * std::cbrt(uniform()) * unit3(); }

  Vec3C vec3c(double scale = 1.0) { return {complex(scale), complex(scale), complex(scale)}; }

  hullkit::SpinorPair spinor() { return {complex(), complex()}; }

  /// Nonzero spinor pair with a nonvanishing real part of its null vector.
  hullkit::SpinorPair regular_spinor() {
    for (;;) {
      const hullkit::SpinorPair s = spinor();
      const Vec3C t = hullkit::spinor_vector(s);
      if (t.norm() > 1e-3 && t.real().norm() > 1e-3 * t.norm()) return s;
    }
  }

  Eigen::MatrixXd symmetric(int n, double scale = 1.0) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = scale * normal();
    return 0.5 * (a + a.transpose());
  }

  Eigen::MatrixXd psd(int n) {
    Eigen::MatrixXd b(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) b(i, j) = normal();
    return b * b.transpose();
  }

  Eigen::Matrix3d rotation() {
    Eigen::Quaterniond q(normal(), normal(), normal(), normal());
    return q.normalized().toRotationMatrix();
  }

  /// x^T A x + b^T x + c in `dim` variables.
  hullkit::Polynomial quadratic(int dim, const Eigen::MatrixXd& a) {
    Eigen::VectorXd b(dim);
    for (int i = 0; i < dim; ++i) b[i] = normal();
    return hullkit::Polynomial::quadratic(a, b, normal());
  }

  /// Random polynomial with `terms` monomials of total degree <= deg.
  hullkit::Polynomial polynomial(int dim, int deg, int terms) {
    hullkit::Polynomial p(dim);
    for (int t = 0; t < terms; ++t) {
      hullkit::Polynomial::Powers pw{};
      int left = integer(0, deg);
      while (left > 0) {
        ++pw[static_cast<std::size_t>(integer(0, dim - 1))];
        --left;
      }
      p.add_term(normal(), pw);
    }
    return p;
  }

  hullkit::Series series(int degree, double decay = 0.5) {
    hullkit::Series s(static_cast<std::size_t>(degree) + 1);
    double w = 1.0;
    for (auto& c : s) {
      c = complex(w);
      w *= decay;
    }
    return s;
  }

  /// Real band-limited loop with decaying random coefficients.
  hullkit::BoundaryLoop real_loop(int components, int band_limit) {
    hullkit::BoundaryLoop g(components, band_limit, true);
    for (int c = 0; c < components; ++c) {
      g.set_coeff(c, 0, {normal(), 0.0});
      for (int k = 1; k <= band_limit; ++k) g.set_coeff(c, k, complex(1.0 / (k * k)));
    }
    return g;
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

/// Points on the unit circle in the xy-plane.
inline std::vector<Vec3R> circle(int n) {
  std::vector<Vec3R> pts;
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * i / n;
    pts.emplace_back(std::cos(t), std::sin(t), 0.0);
  }
  return pts;
}

}  // namespace gen
