#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hullkit/geometry.hpp"
#include "hullkit/polynomial.hpp"

namespace hullkit {

/// Stand-in for -infinity: values below it are clamped. Defaults to -1e6,
/// overridable through the HULLKIT_FLOOR environment variable.
double floor_value();

/// Axis-aligned box domain in R^d.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  static Box cube(int dim, double half_width);
  int dim() const { return static_cast<int>(lo.size()); }
  double diameter() const { return (hi - lo).norm(); }
  bool contains(const Eigen::VectorXd& x, double margin = 0.0) const;
};

/// A real function on a box in R^3 or R^6 (C^3), with optional analytic
/// Hessian. Without one, Hessians use central differences with step h_fd
/// (default 1e-4 times the domain diameter).
class ScalarFunction {
 public:
  using Evaluator = std::function<double(std::span<const double>)>;
  using HessianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

  ScalarFunction(Evaluator f, Box domain, HessianFn hessian = nullptr,
                 std::optional<double> h_fd = std::nullopt);

  static ScalarFunction from_polynomial(Polynomial p, Box domain);

  int dim() const { return domain_.dim(); }
  const Box& domain() const { return domain_; }
  double h_fd() const { return h_fd_; }
  bool has_analytic_hessian() const { return static_cast<bool>(hessian_); }
  /// Set when the function was built from a polynomial.
  const Polynomial* polynomial() const { return poly_.get(); }

  double floor() const { return floor_; }

  /// Value, clamped below at the floor captured at construction.
  double operator()(std::span<const double> x) const;
  double operator()(const Eigen::VectorXd& x) const {
    return (*this)(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  }

  const HessianFn& analytic_hessian() const { return hessian_; }

 private:
  Evaluator f_;
  Box domain_;
  HessianFn hessian_;
  double h_fd_;
  double floor_;
  std::shared_ptr<const Polynomial> poly_;
};

/// Symmetric Hessian at x (analytic if available, else central differences).
/// Throws DomainError unless x lies in the domain with margin 2 h_fd.
Eigen::MatrixXd hessian(const ScalarFunction& u, const Eigen::VectorXd& x);

/// Central-difference Hessian regardless of an analytic one.
Eigen::MatrixXd fd_hessian(const ScalarFunction& u, const Eigen::VectorXd& x);

/// Largest relative mismatch between analytic and finite-difference Hessians
/// over random probes in the domain interior. Zero without an analytic Hessian.
double hessian_mismatch(const ScalarFunction& u, int n_probes, std::uint64_t seed);

/// Levi form  1/4 [H(ξ,ξ) + H(Jξ,Jξ)]  of a function on C^3 ≅ R^6.
double levi_form(const ScalarFunction& u, const Vec3C& z, const Vec3C& theta);

/// Complex Hessian (∂²u/∂z_j∂z̄_k); levi_form(θ) = θ^T A conj(θ).
Eigen::Matrix3cd levi_matrix(const ScalarFunction& u, const Vec3C& z);

/// Exact minimum of the Levi form over unit null directions when the complex
/// Hessian is diagonal (within tol): min over pairs (A_ii + A_jj)/2.
std::optional<double> certified_null_levi_min(const Eigen::Matrix3cd& a,
                                              double tol = 1e-12);

struct NullPshVerdict {
  double min_value;
  Vec3C argmin;
  std::size_t argmin_index;
  bool passes(double tolerance) const { return min_value >= -tolerance; }
};

/// Sampled Levi minimum over the given (unit) directions.
NullPshVerdict is_null_psh_at(const ScalarFunction& u, const Vec3C& z,
                              std::span<const NullDirection> dirs);

/// λ1 + λ2 of the 3x3 Hessian (two smallest eigenvalues).
double minimal_psh_defect(const ScalarFunction& u, const Vec3R& x);

/// Trapezoidal average of u over the circle of radius r centred at x in the
/// plane spanned by the (orthonormalized) frame. Throws DomainError when the
/// disc leaves the domain.
double circle_average(const ScalarFunction& u, const Vec3R& x,
                      const ConformalFrame& frame, double r, int n_quad);

}  // namespace hullkit
