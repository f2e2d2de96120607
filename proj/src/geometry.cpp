#include "hullkit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hullkit/error.hpp"

namespace hullkit {

namespace {
constexpr Complex kI{0.0, 1.0};
}

Vec6R to_real6(const Vec3C& z) {
  Vec6R x;
  for (int k = 0; k < 3; ++k) {
    x[2 * k] = z[k].real();
    x[2 * k + 1] = z[k].imag();
  }
  return x;
}

Vec3C from_real6(const Vec6R& x) {
  return Vec3C{Complex{x[0], x[1]}, Complex{x[2], x[3]}, Complex{x[4], x[5]}};
}

Vec6R complex_rotate(const Vec6R& xi) {
  Vec6R out;
  for (int k = 0; k < 3; ++k) {
    out[2 * k] = -xi[2 * k + 1];
    out[2 * k + 1] = xi[2 * k];
  }
  return out;
}

Vec3C spinor_vector(const SpinorPair& s) {
  const Complex a2 = s.a * s.a;
  const Complex b2 = s.b * s.b;
  return Vec3C{a2 - b2, kI * (a2 + b2), 2.0 * s.a * s.b};
}

double null_residual(const Vec3C& theta) {
  return std::abs(theta[0] * theta[0] + theta[1] * theta[1] +
                  theta[2] * theta[2]);
}

NullDirection::NullDirection(const Vec3C& theta) : theta_(theta) {
  const double n2 = theta.squaredNorm();
  if (!(n2 > 0.0) || !std::isfinite(n2)) {
    throw ValidationError("null direction must be nonzero and finite");
  }
  if (null_residual(theta) > 1e-12 * n2) {
    throw ValidationError("vector is not on the null quadric");
  }
}

NullDirection NullDirection::normalized() const {
  return NullDirection(theta_ / theta_.norm());
}

NullDirection spinor_to_null(const SpinorPair& s) {
  return NullDirection(spinor_vector(s));
}

double ConformalFrame::conformality_defect() const {
  const double n1 = v1.squaredNorm();
  return (std::abs(n1 - v2.squaredNorm()) + 2.0 * std::abs(v1.dot(v2))) / n1;
}

Vec3R ConformalFrame::unit_normal() const {
  return v1.cross(v2).normalized();
}

ConformalFrame ConformalFrame::orthonormalized() const {
  const Vec3R e1 = v1.normalized();
  Vec3R e2 = v2 - e1.dot(v2) * e1;
  return {e1, e2.normalized()};
}

ConformalFrame null_to_frame(const NullDirection& theta) {
  ConformalFrame f{theta.theta().real(), theta.theta().imag()};
  if (f.v1.squaredNorm() <= 1e-24 * theta.theta().squaredNorm()) {
    throw ValidationError("null direction has vanishing real part");
  }
  return f;
}

ConformalFrame frame_from_normal(const Vec3R& normal) {
  const Vec3R n = normal.normalized();
  // Pick the axis least aligned with n.
  Vec3R axis = Vec3R::UnitX();
  if (std::abs(n.y()) < std::abs(n[0]) && std::abs(n.y()) <= std::abs(n.z())) {
    axis = Vec3R::UnitY();
  } else if (std::abs(n.z()) < std::abs(n[0])) {
    axis = Vec3R::UnitZ();
  }
  const Vec3R e1 = n.cross(axis).normalized();
  return {e1, n.cross(e1)};
}

std::vector<NullDirection> sample_null_directions(int n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("need at least one null direction");
  std::vector<NullDirection> out;
  out.reserve(static_cast<std::size_t>(n));
  const double s = 1.0 / std::numbers::sqrt2;
  if (n >= 6) {
    for (int axis = 0; axis < 3; ++axis) {
      for (double sign : {1.0, -1.0}) {
        Vec3C t = Vec3C::Zero();
        t[axis] = s;
        t[(axis + 1) % 3] = sign * kI * s;
        out.emplace_back(t);
      }
    }
  }

  // Kronecker sequence in [0,1)^3 with the plastic-number-like constants for
  // d = 3, shifted by a seeded random offset, mapped uniformly onto S^3.
  constexpr double g = 1.2207440846057596;  // root of x^4 = x + 1
  const double alpha[3] = {1.0 / g, 1.0 / (g * g), 1.0 / (g * g * g)};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double shift[3] = {uni(rng), uni(rng), uni(rng)};

  for (long k = 1; static_cast<int>(out.size()) < n; ++k) {
    double u[3];
    for (int d = 0; d < 3; ++d) {
      u[d] = std::fmod(shift[d] + static_cast<double>(k) * alpha[d], 1.0);
    }
    const double ra = std::sqrt(u[0]);
    const double rb = std::sqrt(1.0 - u[0]);
    const SpinorPair sp{std::polar(ra, 2.0 * std::numbers::pi * u[1]),
                        std::polar(rb, 2.0 * std::numbers::pi * u[2])};
    Vec3C t = spinor_vector(sp);
    const double norm = t.norm();
    if (norm < 1e-6) continue;
    t /= norm;
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const auto& d) {
      return (d.theta() - t).norm() < 1e-9;
    });
    if (!duplicate) out.emplace_back(t);
  }
  return out;
}

std::vector<Vec3R> fibonacci_sphere(int n) {
  std::vector<Vec3R> dirs;
  dirs.reserve(static_cast<std::size_t>(n));
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    dirs.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return dirs;
}

ConvexSupport::ConvexSupport(std::span<const Vec3R> points, int n_directions)
    : ConvexSupport(points, [n_directions] {
        // Always include the coordinate axes so planar sets are sharp.
        auto d = fibonacci_sphere(n_directions);
        for (int k = 0; k < 3; ++k) {
          d.push_back(Vec3R::Unit(k));
          d.push_back(-Vec3R::Unit(k));
        }
        return d;
      }()) {}

ConvexSupport::ConvexSupport(std::span<const Vec3R> points,
                             std::vector<Vec3R> directions)
    : directions_(std::move(directions)) {
  if (points.empty()) throw ValidationError("empty point set");
  support_.reserve(directions_.size());
  for (const auto& d : directions_) {
    double h = -std::numeric_limits<double>::infinity();
    for (const auto& p : points) h = std::max(h, d.dot(p));
    support_.push_back(h);
  }
}

bool convex_membership(const ConvexSupport& cs, const Vec3R& x, double slack) {
  const auto& dirs = cs.directions();
  const auto& h = cs.support_values();
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (dirs[i].dot(x) > h[i] + slack) return false;
  }
  return true;
}

}  // namespace hullkit
