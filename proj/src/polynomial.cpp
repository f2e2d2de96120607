#include "hullkit/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include "hullkit/error.hpp"

namespace hullkit {

namespace {

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

double monomial(std::span<const double> x, const Polynomial::Powers& p, int dim) {
  double v = 1.0;
  for (int i = 0; i < dim; ++i) v *= ipow(x[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(i)]);
  return v;
}

}  // namespace

Polynomial::Polynomial(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw ValidationError("polynomial dimension out of range");
}

Polynomial Polynomial::quadratic(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                 double c) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n || b.size() != n) {
    throw ValidationError("quadratic form dimensions disagree");
  }
  Polynomial p(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double coef = (i == j) ? a(i, i) : a(i, j) + a(j, i);
      if (coef == 0.0) continue;
      Powers pw{};
      pw[static_cast<std::size_t>(i)] += 1;
      pw[static_cast<std::size_t>(j)] += 1;
      p.add_term(coef, pw);
    }
    if (b[i] != 0.0) {
      Powers pw{};
      pw[static_cast<std::size_t>(i)] = 1;
      p.add_term(b[i], pw);
    }
  }
  if (c != 0.0) p.add_term(c, Powers{});
  return p;
}

Polynomial Polynomial::constant(int dim, double c) {
  Polynomial p(dim);
  p.add_term(c, Powers{});
  return p;
}

Polynomial Polynomial::variable(int dim, int i) {
  Polynomial p(dim);
  Powers pw{};
  pw[static_cast<std::size_t>(i)] = 1;
  p.add_term(1.0, pw);
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& t : terms_) {
    int s = 0;
    for (int i = 0; i < dim_; ++i) s += t.powers[static_cast<std::size_t>(i)];
    d = std::max(d, s);
  }
  return d;
}

void Polynomial::add_term(double coef, const Powers& powers) {
  if (!std::isfinite(coef)) throw ValidationError("non-finite polynomial coefficient");
  for (int i = 0; i < kMaxDim; ++i) {
    const int p = powers[static_cast<std::size_t>(i)];
    if (p < 0 || (i >= dim_ && p != 0)) {
      throw ValidationError("invalid monomial exponent");
    }
  }
  for (auto& t : terms_) {
    if (t.powers == powers) {
      t.coef += coef;
      return;
    }
  }
  terms_.push_back(Term{coef, powers});
}

double Polynomial::operator()(std::span<const double> x) const {
  double v = 0.0;
  for (const auto& t : terms_) v += t.coef * monomial(x, t.powers, dim_);
  return v;
}

Eigen::VectorXd Polynomial::gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(dim_));
  for (const auto& t : terms_) {
    for (int i = 0; i < dim_; ++i) {
      const int p = t.powers[static_cast<std::size_t>(i)];
      if (p == 0) continue;
      Powers q = t.powers;
      q[static_cast<std::size_t>(i)] -= 1;
      g[i] += t.coef * p * monomial(xs, q, dim_);
    }
  }
  return g;
}

Eigen::MatrixXd Polynomial::hessian(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim_, dim_);
  const std::span<const double> xs(x.data(), static_cast<std::size_t>(dim_));
  for (const auto& t : terms_) {
    for (int i = 0; i < dim_; ++i) {
      const int pi = t.powers[static_cast<std::size_t>(i)];
      if (pi == 0) continue;
      for (int j = i; j < dim_; ++j) {
        Powers q = t.powers;
        double factor = t.coef * pi;
        q[static_cast<std::size_t>(i)] -= 1;
        const int pj = q[static_cast<std::size_t>(j)];
        if (pj == 0) continue;
        factor *= pj;
        q[static_cast<std::size_t>(j)] -= 1;
        const double v = factor * monomial(xs, q, dim_);
        h(i, j) += v;
        if (i != j) h(j, i) += v;
      }
    }
  }
  return h;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r(std::max(dim_, o.dim_));
  for (const auto& t : terms_) r.add_term(t.coef, t.powers);
  for (const auto& t : o.terms_) r.add_term(t.coef, t.powers);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial r(std::max(dim_, o.dim_));
  for (const auto& a : terms_) {
    for (const auto& b : o.terms_) {
      Powers p{};
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = a.powers[i] + b.powers[i];
      r.add_term(a.coef * b.coef, p);
    }
  }
  return r;
}

Polynomial Polynomial::operator*(double s) const {
  Polynomial r(dim_);
  for (const auto& t : terms_) r.add_term(t.coef * s, t.powers);
  return r;
}

}  // namespace hullkit
