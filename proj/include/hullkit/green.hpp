#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hullkit/disc.hpp"
#include "hullkit/psh.hpp"

namespace hullkit {

/// Gauss-Legendre nodes and weights on [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

/// Polar rule for  -(1/2π) ∫_D log|ζ| g(ζ) dA. Radial Gauss-Legendre after
/// r = s^p (p = `exponent`), which turns -r log r dr into a smooth
/// integrand; trapezoidal in angle. Weights are rescaled to sum to exactly 1/4.
class GreenQuadrature {
 public:
  struct Node {
    Complex zeta;
    double weight;
  };

  explicit GreenQuadrature(int n_radial = 64, int n_angular = 256, int exponent = 3);

  int n_radial() const { return n_radial_; }
  int n_angular() const { return n_angular_; }
  int exponent() const { return exponent_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  double total_weight() const;

 private:
  int n_radial_;
  int n_angular_;
  int exponent_;
  std::vector<Node> nodes_;
};

double green_scalar(const std::function<double(Complex)>& g, const GreenQuadrature& q);

/// α = Σ_{i<j} a_ij dx_i ∧ dx_j, stored as the full antisymmetric matrix.
class TwoForm {
 public:
  using Fn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
  TwoForm(int dim, Fn coefficients);
  static TwoForm constant(const Eigen::MatrixXd& a);
  /// dx_i ∧ dx_j.
  static TwoForm basis(int dim, int i, int j);

  int dim() const { return dim_; }
  Eigen::MatrixXd operator()(const Eigen::VectorXd& x) const;

 private:
  int dim_;
  Fn fn_;
};

/// h = Σ h_ij(x) dx_i ⊗ dx_j with h symmetric.
class QuadForm {
 public:
  using Fn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
  QuadForm(int dim, Fn coefficients);
  static QuadForm constant(const Eigen::MatrixXd& h);
  static QuadForm hessian_of(const ScalarFunction& u);

  int dim() const { return dim_; }
  Eigen::MatrixXd operator()(const Eigen::VectorXd& x) const;

 private:
  int dim_;
  Fn fn_;
};

/// G(f^*α): pulls α back via f_x^T A(f) f_y.
double pushforward_on_twoform(const HarmonicDisc& d, const TwoForm& alpha,
                              const GreenQuadrature& q);

/// Polynomial in ζ and ζ̄, coefficient (m, n) of ζ^m ζ̄^n.
class BiPoly {
 public:
  explicit BiPoly(int max_degree = 0);
  static BiPoly from_real_part(const Series& g);  // (g + conj g)/2
  static BiPoly constant(Complex c);

  int max_degree() const { return static_cast<int>(c_.rows()) - 1; }
  Complex coeff(int m, int n) const;
  BiPoly operator+(const BiPoly& o) const;
  BiPoly operator*(const BiPoly& o) const;
  BiPoly operator*(Complex s) const;
  /// Δ = 4 ∂_ζ ∂_ζ̄.
  BiPoly laplacian() const;
  Complex operator()(Complex zeta) const;
  /// -(1/2π) ∫_D log|ζ| p dA, exactly.
  Complex green_integral() const;
  /// (1/2π) ∫ p(e^{it}) dt.
  Complex boundary_mean() const;

 private:
  Eigen::MatrixXcd c_;
};

/// u∘f as a BiPoly when u is polynomial.
BiPoly compose(const Polynomial& u, const HarmonicDisc& d);

/// G(Δ(u∘f)) from Taylor coefficients alone, for u of degree <= 2:
/// G(Δ(x_i x_j)) = 1/2 Re Σ_{k>=1} g_ik conj(g_jk).
double green_laplacian_quadratic(const Polynomial& u, const HarmonicDisc& d);

struct DdcCheck {
  double lhs = 0.0;                                   // spectral when available, else chain rule
  std::optional<double> lhs_spectral;                 // polynomial u only
  std::optional<double> lhs_chain_rule;               // Δ(u∘f) = Σ f_x^T H f_x + f_y^T H f_y
  std::optional<double> lhs_finite_difference;        // fourth-order differences in ζ
  double rhs = 0.0;                                   // boundary mean of u∘f minus u(f(0))
  double residual = 0.0;                              // |lhs - rhs|
};

/// Green's formula  G(Δ(u∘f)) = mean_T(u∘f) - u(f(0)). The quadrature routes
/// can be switched off for high-degree discs that the rule cannot resolve.
DdcCheck ddc_identity_check(const HarmonicDisc& d, const ScalarFunction& u,
                            const GreenQuadrature& q = GreenQuadrature(),
                            bool quadrature_routes = true);

struct MassValues {
  double interior;  // G(|f_x|²)
  double boundary;  // 1/4 (mean |f|² over T - |f(0)|²)
};

/// Both mass formulas. Requires an immersed disc.
MassValues mass(const HarmonicDisc& d, const GreenQuadrature& q = GreenQuadrature());

/// 1/4 (mean |f|² - |f(0)|²) by the exact trapezoidal rule; no immersion check.
double boundary_mass(const HarmonicDisc& d);

/// max over samples of |Δ(u∘f) - tr_T(Hess u)|f_x|²| / max |f_x|², with the
/// Laplacian from differences in ζ.
double ddcuf_pointwise_check(const HarmonicDisc& d, const ScalarFunction& u, int n_samples);

/// -(1/2π) ∫ log|ζ| tr_T(h∘f) |f_x|² dA. With literal = true the conformal
/// factor |f_x|² is dropped.
double hessian_functional(const HarmonicDisc& d, const QuadForm& h,
                          const GreenQuadrature& q = GreenQuadrature(), bool literal = false);

/// Trace of h over the plane spanned by v1, v2 (Gram-Schmidt).
double plane_trace(const Eigen::MatrixXd& h, const Eigen::VectorXd& v1,
                   const Eigen::VectorXd& v2);

/// Mean of u∘f over the boundary circle (trapezoidal, n points).
double boundary_average(const HarmonicDisc& d, const std::function<double(const Eigen::VectorXd&)>& u,
                        int n);

}  // namespace hullkit
