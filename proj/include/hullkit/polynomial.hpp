#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace hullkit {

/// Real polynomial in up to six real variables (R^3, or C^3 as R^6).
class Polynomial {
 public:
  static constexpr int kMaxDim = 6;
  using Powers = std::array<int, kMaxDim>;

  struct Term {
    double coef;
    Powers powers;
  };

  explicit Polynomial(int dim = 3);

  /// x^T A x + b^T x + c with A symmetrized.
  static Polynomial quadratic(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                              double c);
  static Polynomial constant(int dim, double c);
  static Polynomial variable(int dim, int i);

  int dim() const { return dim_; }
  int degree() const;
  const std::vector<Term>& terms() const { return terms_; }

  /// Adds coef * prod x_i^{p_i}; merges equal monomials.
  void add_term(double coef, const Powers& powers);

  double operator()(std::span<const double> x) const;
  double operator()(const Eigen::VectorXd& x) const {
    return (*this)(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const;

 private:
  int dim_;
  std::vector<Term> terms_;
};

}  // namespace hullkit
