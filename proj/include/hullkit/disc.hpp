#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hullkit/geometry.hpp"

namespace hullkit {

/// Taylor coefficients a_0..a_N of a complex polynomial.
using Series = std::vector<Complex>;

Complex eval_series(const Series& a, Complex z);
Complex eval_series_derivative(const Series& a, Complex z);
Series series_derivative(const Series& a);
/// Termwise antiderivative with constant term c0.
Series series_integral(const Series& a, Complex c0);
Series series_product(const Series& a, const Series& b);
/// a(ρζ).
Series series_dilate(const Series& a, double rho);

/// Band-limited loop T -> R^m or C^m stored as Fourier coefficients c_k,
/// k = -N..N, per component.
class BoundaryLoop {
 public:
  BoundaryLoop(int components, int band_limit, bool real_valued);

  /// Projection of equispaced samples g(2πj/M), j < M, onto |k| <= N
  /// (trapezoidal rule; requires M > 2N).
  static BoundaryLoop from_samples(const std::vector<Eigen::VectorXd>& samples,
                                   int band_limit);

  int components() const { return static_cast<int>(coeffs_.size()); }
  int band_limit() const { return band_limit_; }
  bool is_real() const { return real_; }

  Complex coeff(int component, int k) const;
  /// Sets c_k; for real loops c_{-k} is kept equal to conj(c_k).
  void set_coeff(int component, int k, Complex c);

  Eigen::VectorXcd eval(double t) const;
  Eigen::VectorXd eval_real(double t) const;
  Eigen::VectorXcd mean() const;
  double energy() const;
  double negative_frequency_energy() const;

 private:
  int band_limit_;
  bool real_;
  std::vector<std::vector<Complex>> coeffs_;  // index k + N
};

/// Poisson extension Σ c_k r^{|k|} e^{ikt} of a loop to the closed disc.
class HarmonicExtension {
 public:
  explicit HarmonicExtension(BoundaryLoop loop) : loop_(std::move(loop)) {}
  Eigen::VectorXcd operator()(Complex zeta) const;
  Eigen::VectorXcd center() const { return loop_.mean(); }
  const BoundaryLoop& loop() const { return loop_; }

 private:
  BoundaryLoop loop_;
};

HarmonicExtension harmonic_extension(const BoundaryLoop& loop);

/// Conjugate loop: c_k -> -i sign(k) c_k (zero mean). Needs a real loop.
BoundaryLoop harmonic_conjugate(const BoundaryLoop& loop);

/// g + i h for loops of equal shape (result is complex-valued).
BoundaryLoop combine_analytic(const BoundaryLoop& g, const BoundaryLoop& h);

class HarmonicDisc;

/// Holomorphic map of the closed disc into C^m, one Taylor series per component.
class HolomorphicDisc {
 public:
  HolomorphicDisc() = default;
  explicit HolomorphicDisc(std::vector<Series> components);

  /// The holomorphic disc with boundary real part g and F(0) = mean(g):
  /// Taylor coefficients a_0 = c_0, a_k = 2 c_k.
  static HolomorphicDisc from_real_loop(const BoundaryLoop& g);

  int dim() const { return static_cast<int>(comps_.size()); }
  int degree() const;
  const std::vector<Series>& components() const { return comps_; }

  Eigen::VectorXcd operator()(Complex zeta) const;
  Eigen::VectorXcd derivative(Complex zeta) const;
  Eigen::VectorXcd center() const;

  /// ζ -> Re F(ζ) in R^m.
  HarmonicDisc real_part() const;
  /// ζ -> F(ζ) viewed in R^{2m} with (Re F_1, Im F_1, ...).
  HarmonicDisc as_real() const;

 private:
  std::vector<Series> comps_;
};

/// Harmonic map D̄ -> R^m whose components are Re G_c for holomorphic
/// polynomials G_c. Conformal minimal discs (m = 3) and holomorphic discs
/// viewed in R^{2m} are both of this form.
class HarmonicDisc {
 public:
  HarmonicDisc() = default;
  explicit HarmonicDisc(std::vector<Series> generators);

  int dim() const { return static_cast<int>(gens_.size()); }
  int degree() const;
  const std::vector<Series>& generators() const { return gens_; }

  Eigen::VectorXd operator()(Complex zeta) const;
  /// ∂f/∂x and ∂f/∂y at ζ = x + iy.
  Eigen::VectorXd dx(Complex zeta) const;
  Eigen::VectorXd dy(Complex zeta) const;
  Eigen::VectorXd center() const;
  Eigen::VectorXd boundary(double t) const;

  /// x -> translation + scale * rotation * x (rotation must be m x m).
  HarmonicDisc transformed(const Eigen::MatrixXd& rotation, double scale,
                           const Eigen::VectorXd& translation) const;
  /// ζ -> f(ρζ).
  HarmonicDisc restricted(double rho) const;

 private:
  std::vector<Series> gens_;
};

struct NullDisc {
  Vec3C base;
  Series a;
  Series b;
  HolomorphicDisc f;
  /// a and b share a zero in the closed disc (f' vanishes there).
  bool has_branch_point = false;
};

/// f(ζ) = z0 + ∫_0^ζ (a²-b², i(a²+b²), 2ab) dξ, integrated termwise.
NullDisc spinor_disc(const Series& a, const Series& b, const Vec3C& z0);

/// Real part of a null holomorphic disc, or an unchecked harmonic map.
class ConformalMinimalDisc {
 public:
  static ConformalMinimalDisc from_null(const NullDisc& d, std::string label = {});
  /// Wraps any harmonic R^3 map; conformality is not enforced.
  static ConformalMinimalDisc unchecked(HarmonicDisc map, std::string label = {});

  const HarmonicDisc& map() const { return map_; }
  const std::string& label() const { return label_; }
  Vec3R center() const { return map_.center(); }
  Vec3R operator()(Complex zeta) const { return map_(zeta); }

 private:
  ConformalMinimalDisc(HarmonicDisc map, std::string label)
      : map_(std::move(map)), label_(std::move(label)) {}
  HarmonicDisc map_;
  std::string label_;
};

/// Deterministic polar sample grid on the closed disc (centre, interior
/// rings, boundary circle) with roughly n points.
std::vector<Complex> disc_samples(int n);

/// max |Σ F_k'(ζ)²| / max |F'|² over samples.
double nullity_residual(const HolomorphicDisc& f, int n_samples);

/// max ( | |f_x|²-|f_y|² | + 2|f_x·f_y| ) / max(|f_x|², |f_y|², ε) over samples.
double conformality_residual(const HarmonicDisc& f, int n_samples);

/// min |df| / max |df| over samples (0 at branch points).
double immersion_ratio(const HarmonicDisc& f, int n_samples = 400);

/// Throws BranchPointError when immersion_ratio < 1e-8.
void require_immersion(const HarmonicDisc& f);

/// Min over sampled pairs of |f(ζ)-f(η)| / |ζ-η|; positive for injective,
/// immersed discs.
double min_separation_ratio(const HarmonicDisc& f, int n_samples);

struct CatalogParams {
  double rho = 1.0;                          // domain dilation ζ -> ρζ
  double scale = 1.0;
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Vec3R translation = Vec3R::Zero();
  Vec3C theta{Complex{1, 0}, Complex{0, 1}, Complex{0, 0}};  // affine-null
  int degree = 3;                            // random-spinor
  std::uint64_t seed = 11;                   // random-spinor
};

/// Named discs: "flat", "enneper", "affine-null", "random-spinor".
ConformalMinimalDisc catalog(std::string_view name, const CatalogParams& params = {});

struct WeightedPoints {
  std::vector<Eigen::VectorXd> points;
  std::vector<double> weights;
};

/// Atoms f(e^{2πij/n}) with weights 1/n.
WeightedPoints boundary_measure(const HarmonicDisc& f, int n_atoms);

}  // namespace hullkit
