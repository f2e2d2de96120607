#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hullkit/disc.hpp"
#include "hullkit/geometry.hpp"

namespace hullkit {

/// Nonnegative least squares  min |A c - b|, c >= 0  (Lawson-Hanson active set).
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iter = 0);

/// p = Σ c_j p_j with dwell/transit timing for the loop through the anchors.
struct LoopPlan {
  Vec3R p;
  std::vector<Vec3R> anchors;              // visiting order
  std::vector<double> weights;             // c_j > 0, Σ c_j = 1
  std::vector<std::vector<Vec3R>> transits;  // transits[j]: anchors[j] -> anchors[j+1 mod n]
  double transit_fraction = 0.02;          // share of the period spent moving
  double smoothing_width = 0.0;            // bound on how far dwell points drift
};

/// Picks at most four affinely independent anchors from the samples with
/// p = Σ c_j p_j exactly (to 1e-10): farthest-point candidates, NNLS with a
/// simplex row, then Carathéodory reduction. Transits follow shortest paths in
/// the k-nearest-neighbour graph of the samples. Throws ValidationError when
/// p lies outside the sampled hull.
LoopPlan plan_loop(const Vec3R& p, std::span<const Vec3R> omega_samples, int k_anchors = 64,
                   double transit_fraction = 0.02);

struct BuiltLoop {
  BoundaryLoop loop{3, 0, true};
  Vec3R shift = Vec3R::Zero();  // translation applied after projection
  double mean_error = 0.0;      // |c_0 - p| after translation
  double eps_loop = 0.0;        // excess over the support function of the samples' hull
  double dwell_deviation = 0.0; // max distance from the anchor during dwell
};

/// Smooth loop dwelling c_j(1 - τ) of the period at anchor j, with C^∞
/// smoothstep transits; sampled at 8N points, projected to |k| <= N and
/// translated so that its mean is p.
BuiltLoop build_loop(const LoopPlan& plan, int band_limit,
                     std::span<const Vec3R> hull_samples = {});

struct BochnerOptions {
  int band_limit = 1024;
  double transit_fraction = 0.05;
  int samples_per_point = 1;  // jittered copies of each K point in ω_j
  int k_anchors = 64;
  std::uint64_t seed = 17;
};

struct BochnerRow {
  int j = 0;
  double thickening = 0.0;        // 1/j
  int anchors = 0;
  double loop_mean_error = 0.0;
  double center_error = 0.0;      // |F(0) - p| in C^3
  double max_boundary_distance = 0.0;  // max_t dist(Re F(e^{it}), K)
  double containment_margin = 0.0;     // 1/j - max_boundary_distance
  double mass = 0.0;                   // 1/4 (mean |F|² - |F(0)|²)
  double max_residual = 0.0;           // dd^c identity over the test suite
  double eps_loop = 0.0;
};

struct BochnerReport {
  Vec3R p;
  BochnerOptions options;
  std::vector<BochnerRow> rows;
  double mass_ratio = 0.0;  // sup_j mass / mass at j = 1 (1 when that is zero)
};

/// For j = 1..j_max: ω_j = K plus seeded jitter within 0.5/j, a loop in ω_j
/// with mean p, its holomorphic extension F (Re F on T is the loop, F(0) = p),
/// the boundary-formula mass and dd^c residuals for linear and quadratic
/// polynomials on C^3 = R^6.
BochnerReport bochner_stage(const Vec3R& p, std::span<const Vec3R> k, int j_max,
                            const BochnerOptions& opts = {});

}  // namespace hullkit
