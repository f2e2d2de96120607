#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hullkit {

using Complex = std::complex<double>;
using Vec3R = Eigen::Vector3d;
using Vec3C = Eigen::Vector3cd;
using Vec6R = Eigen::Matrix<double, 6, 1>;

/// C^3 as R^6 with coordinate order (x1, y1, x2, y2, x3, y3), z_k = x_k + i y_k.
Vec6R to_real6(const Vec3C& z);
Vec3C from_real6(const Vec6R& x);

/// Multiplication by i on C^3, written in real coordinates.
Vec6R complex_rotate(const Vec6R& xi);

struct SpinorPair {
  Complex a;
  Complex b;
};

/// Weierstrass spinor map (a, b) -> (a^2 - b^2, i(a^2 + b^2), 2ab).
Vec3C spinor_vector(const SpinorPair& s);

/// |θ1^2 + θ2^2 + θ3^2|.
double null_residual(const Vec3C& theta);

/// A nonzero vector on the null quadric.
class NullDirection {
 public:
  /// Throws ValidationError when theta is zero or off the quadric
  /// (residual > 1e-12 |θ|^2).
  explicit NullDirection(const Vec3C& theta);

  const Vec3C& theta() const { return theta_; }
  NullDirection normalized() const;

 private:
  Vec3C theta_;
};

NullDirection spinor_to_null(const SpinorPair& s);

/// Orthogonal pair of equal-length vectors spanning an affine 2-plane direction.
struct ConformalFrame {
  Vec3R v1;
  Vec3R v2;

  /// Relative defect (| |v1|^2 - |v2|^2 | + 2|v1.v2|) / |v1|^2.
  double conformality_defect() const;
  Vec3R unit_normal() const;
  ConformalFrame orthonormalized() const;
};

/// Frame (Re θ, Im θ). Throws ValidationError if Re θ vanishes.
ConformalFrame null_to_frame(const NullDirection& theta);

/// Any orthonormal frame of the plane orthogonal to `normal`.
ConformalFrame frame_from_normal(const Vec3R& normal);

/// n distinct unit null directions, deterministic in seed. For n >= 6 the
/// six axis-aligned directions (1, ±i, 0)/√2 and their cyclic permutations
/// come first; the rest is a rotated Kronecker lattice on S^3 ⊂ C^2 pushed
/// through the spinor map.
std::vector<NullDirection> sample_null_directions(int n, std::uint64_t seed);

/// Spherical Fibonacci lattice of n unit vectors.
std::vector<Vec3R> fibonacci_sphere(int n);

/// Support-function outer approximation of the convex hull of a point set.
class ConvexSupport {
 public:
  static constexpr int kDefaultDirections = 256;

  ConvexSupport(std::span<const Vec3R> points,
                int n_directions = kDefaultDirections);
  ConvexSupport(std::span<const Vec3R> points, std::vector<Vec3R> directions);

  const std::vector<Vec3R>& directions() const { return directions_; }
  const std::vector<double>& support_values() const { return support_; }

 private:
  std::vector<Vec3R> directions_;
  std::vector<double> support_;
};

/// True iff <d, x> <= h(d) + slack for all stored directions d.
bool convex_membership(const ConvexSupport& cs, const Vec3R& x, double slack);

}  // namespace hullkit
