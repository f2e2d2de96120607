#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hullkit/disc.hpp"
#include "hullkit/envelope.hpp"
#include "hullkit/green.hpp"
#include "hullkit/kdtree.hpp"
#include "hullkit/psh.hpp"

namespace hullkit {

/// Point cloud K with a spatial index.
class PointCloud {
 public:
  explicit PointCloud(std::vector<Vec3R> points);
  const std::vector<Vec3R>& points() const { return points_; }
  double distance(const Vec3R& x) const { return tree_.distance(x); }
  /// Nearest stored point.
  const Vec3R& nearest(const Vec3R& x) const { return points_[tree_.nearest(x).index]; }
  double max_value(const std::function<double(const Vec3R&)>& u) const;

 private:
  std::vector<Vec3R> points_;
  KdTree3 tree_;
};

/// φ = -1 within delta of K, 0 elsewhere.
class Obstacle {
 public:
  Obstacle(const PointCloud& k, double delta);
  double operator()(const Vec3R& x) const { return k_->distance(x) <= delta_ ? -1.0 : 0.0; }
  double delta() const { return delta_; }
  const PointCloud& cloud() const { return *k_; }

 private:
  const PointCloud* k_;
  double delta_;
};

/// Trapezoidal boundary mean of φ∘f over n points.
double poisson_functional(const HarmonicDisc& d, const std::function<double(const Vec3R&)>& phi,
                          int n = 256);
double poisson_functional(const HarmonicDisc& d, const ScalarFunction& phi, int n = 256);

/// Fraction of n boundary nodes whose image lies within tol of K (strict).
double near_fraction(const HarmonicDisc& d, const PointCloud& k, double tol, int n = 256);

struct DiscEntry {
  ConformalMinimalDisc disc = ConformalMinimalDisc::unchecked(HarmonicDisc(std::vector<Series>(3)));
  Series a;                    // spinor data
  Series b;
  double poisson = 0.0;        // Poisson functional of the obstacle
  double near_fraction = 0.0;  // at `tolerance`
  double tolerance = 0.0;
  double sup_norm = 0.0;       // max |f| over sampled closed disc
  bool inside = false;         // sampled image inside omega
  double objective = 0.0;
  int restart = -1;
};

struct SearchOptions {
  int degree = 1;
  int restarts = 64;
  std::uint64_t seed = 2024;
  double delta = 0.05;       // obstacle thickening
  double tolerance = 0.05;   // near-fraction tolerance
  double lambda = 1.0;       // weight of 1 - near_fraction
  double shaping = 0.05;     // weight of the mean boundary distance to K
  double penalty = 10.0;     // weight of the excursion outside omega
  int max_rounds = 60;       // coordinate-descent rounds per restart
  int n_boundary = 128;      // boundary nodes while searching (256 for the report)
  int workers = 1;
};

/// Seeded coordinate descent over spinor coefficients of the given degree
/// with f(0) = p fixed. Objective: Poisson functional + λ(1 - near_fraction)
/// + shaping·mean dist(f(e^{it}), K) + penalty·excursion outside omega.
DiscEntry search_disc(const Vec3R& p, const PointCloud& k, const ConvexDomain& omega,
                      const SearchOptions& opts = {});

struct DiscSequenceCertificate {
  Vec3R p;
  std::vector<DiscEntry> entries;  // entry j-1 uses tolerance 1/j
  SearchOptions options;
};

/// Searches discs for tolerances 1/j, j = 1..j_max.
DiscSequenceCertificate disc_sequence(const Vec3R& p, const PointCloud& k,
                                      const ConvexDomain& omega, int j_max,
                                      SearchOptions opts = {});

/// Named test function on R^3 or C^3.
struct TestFunction {
  std::string name;
  ScalarFunction u;
  bool minimal_psh = false;  // in the cone where the certificates apply
};

/// Linear functions, |x|², x2²+x3²-x1²+1 and similar minimal-psh quadratics,
/// a convex quartic; all with analytic Hessians on the given box.
std::vector<TestFunction> minimal_psh_suite(const Box& domain);
/// Polynomials of degree <= 4 mixing psh and non-psh ones.
std::vector<TestFunction> polynomial_suite(const Box& domain);

struct JensenRow {
  std::string name;
  double value_at_p;
  double integral;   // ∫ u dν
  double max_on_k;
  bool holds;        // u(p) <= ∫u dν + eps and ∫u dν <= max_K u + eps
};

struct JensenCertificate {
  Vec3R p;
  std::vector<Vec3R> atoms;
  std::vector<double> weights;
  std::size_t dropped = 0;
  double delta = 0.0;
  double eps = 0.0;
  std::vector<JensenRow> rows;
  bool pass = false;
};

/// ν = boundary atoms of the discs (equal weight per disc) snapped to their
/// nearest K point; atoms farther than delta are dropped and the weights
/// renormalized. Throws ValidationError when a disc is not centred at p or
/// its near fraction is below 1 - delta, and when no atom survives.
JensenCertificate certify_jensen(const Vec3R& p, std::span<const HarmonicDisc> discs,
                                 const PointCloud& k, double delta,
                                 std::span<const TestFunction> suite, double eps = 1e-8,
                                 int n_atoms = 256);

struct HessianRow {
  std::string name;
  double functional;    // T(Hess u)
  double measure_side;  // ∫ u dμ - u(p)
  double residual;
  bool minimal_psh;
  bool positive;        // T(Hess u) >= -1e-10 (only meaningful for minimal psh u)
};

struct HessianFunctionalCertificate {
  Vec3R p;
  std::vector<Vec3R> atoms;
  std::vector<double> weights;
  double max_atom_distance_to_k = 0.0;
  std::vector<HessianRow> rows;
  double max_residual = 0.0;
  bool positivity = true;
};

HessianFunctionalCertificate hessian_certificate(const Vec3R& p, const HarmonicDisc& disc,
                                                 const PointCloud& k,
                                                 std::span<const TestFunction> suite,
                                                 const GreenQuadrature& q = GreenQuadrature(),
                                                 int n_atoms = 256);

/// Explicit exclusion proof: a quadratic v with λ1 + λ2 >= 0 (so minimal
/// psh), v <= -1 on the delta-thickening of K and v <= 0 on omega. Then
/// v <= φ, so the envelope at x is at least v(x). The two bounds are checked
/// on samples of every thickening ball and of omega.
struct SeparationCertificate {
  Polynomial v;
  Vec3R x;
  double value_at_x = 0.0;
  double defect = 0.0;             // λ1 + λ2 of the constant Hessian
  double max_on_thickening = 0.0;  // must be <= -1
  double max_on_omega = 0.0;       // must be <= 0
  bool valid = false;
};

SeparationCertificate separation_certificate(const Polynomial& v, const PointCloud& k, double delta,
                                             const ConvexDomain& omega, const Vec3R& x,
                                             int n_directions = 512);

/// v(x) = α(|y|² - 2y₁² + 1 - δ') - 1 with y = (x - c)/L, c the midpoint of
/// a and b, L = |b - a|/2, y₁ the component along b - a and
/// δ' = 2δ/L - (δ/L)², the smallest shift putting v <= -1 on both δ-balls.
Polynomial two_point_minorant(const Vec3R& a, const Vec3R& b, double delta, double alpha = 0.2);

}  // namespace hullkit
