#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hullkit/geometry.hpp"
#include "hullkit/kdtree.hpp"

namespace hullkit {

/// Interpolant on scattered samples in C^3 ≅ R^6: a least-squares quadratic
/// is fitted around every sample from its k nearest neighbours, and a query
/// uses the fit of its nearest sample. Quadratic data is reproduced exactly.
class CloudInterpolant {
 public:
  static constexpr int kCoefficients = 28;  // 1 + 6 + 21

  CloudInterpolant(std::vector<Vec3C> points, std::vector<double> values, int neighbors = 40,
                   int workers = 1);

  std::size_t size() const { return points_.size(); }
  const std::vector<Vec3C>& points() const { return points_; }
  const std::vector<double>& values() const { return values_; }
  /// False where the local fit was rank deficient.
  bool fit_ok(std::size_t i) const { return ok_[i] != 0; }

  /// Value of the local fit of sample i at x.
  double eval_local(std::size_t i, const Vec6R& x) const;
  /// Value at x via the nearest sample; sets *ok to the fit status.
  double operator()(const Vec6R& x, bool* ok = nullptr) const;

 private:
  std::vector<Vec3C> points_;
  std::vector<double> values_;
  std::vector<Vec6R> real_;
  KdTree6 tree_;
  std::vector<Eigen::Matrix<double, kCoefficients, 1>> coef_;
  std::vector<double> scale_;
  std::vector<std::uint8_t> ok_;
};

struct NullStepResult {
  std::vector<double> values;
  std::vector<std::uint8_t> skipped;     // interpolation failed at the node
  std::vector<std::uint8_t> admissible;  // some (θ, r) circle fits in the ball
  std::size_t n_skipped = 0;
  std::size_t n_admissible = 0;
};

/// One sweep of  u(z) <- min(u(z), min_{θ, r} mean_t I(z + r e^{it} θ))  on a
/// point cloud inside the ball |z| <= ball_radius, I the cloud interpolant.
/// Circles leaving the ball are not used.
NullStepResult bs_step_null(const CloudInterpolant& field, std::span<const NullDirection> dirs,
                            std::span<const double> radii, int n_quad, double ball_radius,
                            int workers = 1);

/// n points uniform in the ball of the given radius in C^3, deterministic in seed.
std::vector<Vec3C> sample_ball_c3(std::size_t n, double radius, std::uint64_t seed);

}  // namespace hullkit
