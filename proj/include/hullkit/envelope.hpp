#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hullkit/disc.hpp"
#include "hullkit/geometry.hpp"
#include "hullkit/psh.hpp"

namespace hullkit {

/// Bounded convex set in R^3: a ball or an axis-aligned box.
class ConvexDomain {
 public:
  enum class Kind { Ball, Box };

  static ConvexDomain ball(const Vec3R& center, double radius);
  static ConvexDomain box(const Vec3R& lo, const Vec3R& hi);

  Kind kind() const { return kind_; }
  const Vec3R& center() const { return center_; }
  double radius() const { return radius_; }
  Vec3R bbox_lo() const;
  Vec3R bbox_hi() const;

  bool contains(const Vec3R& x, double margin = 0.0) const;
  /// How far x lies outside the domain (0 inside).
  double excess(const Vec3R& x) const;
  /// Whether the closed 2-disc of radius r centred at x, orthogonal to the
  /// unit normal n, lies in the closed domain.
  bool contains_disc(const Vec3R& x, const Vec3R& n, double r) const;

 private:
  Kind kind_ = Kind::Ball;
  Vec3R center_ = Vec3R::Zero();
  double radius_ = 1.0;
  Vec3R lo_ = Vec3R::Zero();
  Vec3R hi_ = Vec3R::Zero();
};

/// Regular grid on a box with one value per node and a domain mask.
class Grid3 {
 public:
  Grid3() = default;
  Grid3(const Vec3R& lo, const Vec3R& hi, std::array<int, 3> n, double fill = 0.0);
  /// Bounding box of the domain, mask = nodes inside it.
  static Grid3 over(const ConvexDomain& omega, int resolution, double fill = 0.0);

  const Vec3R& lo() const { return lo_; }
  const Vec3R& hi() const { return hi_; }
  std::array<int, 3> shape() const { return n_; }
  Vec3R spacing() const { return h_; }
  /// Largest spacing.
  double h() const { return h_.maxCoeff(); }
  std::size_t size() const { return values_.size(); }

  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(n_[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(n_[1]) * static_cast<std::size_t>(k));
  }
  std::array<int, 3> coords(std::size_t idx) const;
  Vec3R node(std::size_t idx) const;
  Vec3R node(int i, int j, int k) const;
  std::size_t nearest_node(const Vec3R& x) const;

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  double& operator[](std::size_t idx) { return values_[idx]; }
  double operator[](std::size_t idx) const { return values_[idx]; }

  const std::vector<std::uint8_t>& mask() const { return mask_; }
  bool inside(std::size_t idx) const { return mask_[idx] != 0; }
  void set_mask(const ConvexDomain& omega);
  void set_mask(std::vector<std::uint8_t> mask);

  /// Trilinear interpolation, clamped to the box.
  double interpolate(const Vec3R& x) const;

 private:
  Vec3R lo_ = Vec3R::Zero();
  Vec3R hi_ = Vec3R::Zero();
  std::array<int, 3> n_{0, 0, 0};
  Vec3R h_ = Vec3R::Ones();
  std::vector<double> values_;
  std::vector<std::uint8_t> mask_;
};

struct EnvelopeConfig {
  int frames = 32;                 // distinct planes sampled from null directions
  std::uint64_t seed = 7;
  std::vector<double> radii;       // grid units; empty = geometric schedule
  int n_radii = 8;                 // length of the geometric schedule
  int n_quad = 64;                 // cap on circle nodes; small circles use fewer
  int max_sweeps = 200;
  double tolerance = 1e-4;         // sup-norm change per sweep
  int frames_per_sweep = 0;        // random subset per sweep; 0 = all frames
  int workers = 1;
  bool check_invariants = true;    // monotone and minorant on every sweep

  void validate() const;
};

/// Frames used by the engine: planes (Re θ, Im θ) of sampled null
/// directions, deduplicated by normal, orthonormalized.
std::vector<ConformalFrame> envelope_frames(int n, std::uint64_t seed);

/// Radii schedule in grid units.
std::vector<double> envelope_radii(const EnvelopeConfig& cfg, const ConvexDomain& omega,
                                   const Grid3& grid);

/// One averaging sweep: every masked node takes the minimum of its value and
/// all admissible circle averages. Nodes outside the mask are copied.
Grid3 bs_step_minimal(const Grid3& field, const ConvexDomain& omega, const EnvelopeConfig& cfg,
                      int sweep_index = 0);

struct IterateResult {
  Grid3 field;
  int sweeps = 0;
  double final_residual = 0.0;
  bool converged = false;
  std::vector<double> residual_history;
  bool monotone = true;   // held on every sweep
  bool minorant = true;   // field <= φ on every sweep
  double seconds = 0.0;
};

IterateResult bs_iterate(const Grid3& phi, const ConvexDomain& omega, const EnvelopeConfig& cfg);
IterateResult bs_iterate(const ScalarFunction& phi, const ConvexDomain& omega, int resolution,
                         const EnvelopeConfig& cfg);

struct HullResult {
  IterateResult run;
  double threshold = 0.0;
  double delta = 0.0;
  std::vector<std::size_t> members;
  std::vector<Vec3R> member_points;
  std::vector<std::size_t> k_nodes;
  bool k_nodes_are_members = false;
  std::size_t members_outside_hull = 0;  // vs Co(K) with slack 2h
  bool sandwich = false;
};

/// φ = -1 within delta of K, 0 elsewhere, iterated to its envelope;
/// members are nodes with value <= -1 + theta_thr.
HullResult extremal_hull_field(std::span<const Vec3R> k, const ConvexDomain& omega, double delta,
                               int resolution, const EnvelopeConfig& cfg,
                               double theta_thr = 0.1);

/// Symmetric Hausdorff distance between finite point sets.
double hausdorff(std::span<const Vec3R> a, std::span<const Vec3R> b);

/// max over discs of (u(f(0)) - boundary mean of u∘f)^+, u trilinear on the
/// grid. Discs whose sampled image leaves omega are skipped.
double disc_submean_residual(const Grid3& field, const ConvexDomain& omega,
                             std::span<const ConformalMinimalDisc> discs, int n_boundary = 256);

/// Deterministic family of catalog discs (flat, Enneper, random spinor) at
/// several positions, orientations and scales inside omega.
std::vector<ConformalMinimalDisc> compatibility_discs(const ConvexDomain& omega, int count,
                                                      std::uint64_t seed);

}  // namespace hullkit
