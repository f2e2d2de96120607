#include "hullkit/psh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "hullkit/error.hpp"

namespace hullkit {

double floor_value() {
  if (const char* env = std::getenv("HULLKIT_FLOOR")) {
    try {
      const double v = std::stod(env);
      if (std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError("HULLKIT_FLOOR is not a finite number");
  }
  return -1e6;
}

Box Box::cube(int dim, double half_width) {
  return Box{Eigen::VectorXd::Constant(dim, -half_width),
             Eigen::VectorXd::Constant(dim, half_width)};
}

bool Box::contains(const Eigen::VectorXd& x, double margin) const {
  if (x.size() != lo.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lo[i] + margin && x[i] <= hi[i] - margin)) return false;
  }
  return true;
}

ScalarFunction::ScalarFunction(Evaluator f, Box domain, HessianFn hessian,
                               std::optional<double> h_fd)
    : f_(std::move(f)), domain_(std::move(domain)), hessian_(std::move(hessian)) {
  if (domain_.lo.size() != domain_.hi.size() ||
      (domain_.dim() != 3 && domain_.dim() != 6)) {
    throw ValidationError("scalar functions live on R^3 or C^3 = R^6");
  }
  h_fd_ = h_fd.value_or(1e-4 * domain_.diameter());
  floor_ = floor_value();
  if (!(h_fd_ > 0.0)) throw ValidationError("finite-difference step must be positive");
}

ScalarFunction ScalarFunction::from_polynomial(Polynomial p, Box domain) {
  if (p.dim() != domain.dim()) {
    throw ValidationError("polynomial and domain dimensions disagree");
  }
  auto poly = std::make_shared<const Polynomial>(std::move(p));
  ScalarFunction u(
      [poly](std::span<const double> x) { return (*poly)(x); }, std::move(domain),
      [poly](const Eigen::VectorXd& x) { return poly->hessian(x); });
  u.poly_ = std::move(poly);
  return u;
}

double ScalarFunction::operator()(std::span<const double> x) const {
  const double v = f_(x);
  return (std::isnan(v) || v < floor_) ? floor_ : v;
}

namespace {

void require_margin(const ScalarFunction& u, const Eigen::VectorXd& x) {
  if (!u.domain().contains(x, 2.0 * u.h_fd())) {
    throw DomainError("point violates the domain margin 2*h_fd");
  }
}

}  // namespace

Eigen::MatrixXd fd_hessian(const ScalarFunction& u, const Eigen::VectorXd& x) {
  require_margin(u, x);
  const int n = u.dim();
  const double h = u.h_fd();
  Eigen::MatrixXd hm(n, n);
  const double f0 = u(x);
  Eigen::VectorXd y = x;
  for (int i = 0; i < n; ++i) {
    y[i] = x[i] + h;
    const double fp = u(y);
    y[i] = x[i] - h;
    const double fm = u(y);
    y[i] = x[i];
    hm(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    for (int j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (int si : {1, -1}) {
        for (int sj : {1, -1}) {
          y[i] = x[i] + si * h;
          y[j] = x[j] + sj * h;
          acc += si * sj * u(y);
        }
      }
      y[i] = x[i];
      y[j] = x[j];
      hm(i, j) = hm(j, i) = acc / (4.0 * h * h);
    }
  }
  return hm;
}

Eigen::MatrixXd hessian(const ScalarFunction& u, const Eigen::VectorXd& x) {
  require_margin(u, x);
  if (u.has_analytic_hessian()) {
    Eigen::MatrixXd h = u.analytic_hessian()(x);
    return 0.5 * (h + h.transpose());
  }
  return fd_hessian(u, x);
}

double hessian_mismatch(const ScalarFunction& u, int n_probes, std::uint64_t seed) {
  if (!u.has_analytic_hessian()) return 0.0;
  std::mt19937_64 rng(seed);
  const Box& d = u.domain();
  const double margin = 2.0 * u.h_fd();
  double worst = 0.0;
  for (int p = 0; p < n_probes; ++p) {
    Eigen::VectorXd x(d.dim());
    for (int i = 0; i < d.dim(); ++i) {
      std::uniform_real_distribution<double> uni(d.lo[i] + 1.01 * margin,
                                                 d.hi[i] - 1.01 * margin);
      x[i] = uni(rng);
    }
    const Eigen::MatrixXd ha = hessian(u, x);
    const Eigen::MatrixXd hf = fd_hessian(u, x);
    const double scale = std::max(1.0, ha.cwiseAbs().maxCoeff());
    worst = std::max(worst, (ha - hf).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

double levi_form(const ScalarFunction& u, const Vec3C& z, const Vec3C& theta) {
  if (u.dim() != 6) throw ValidationError("Levi form needs a function on C^3");
  const Eigen::MatrixXd h = hessian(u, to_real6(z));
  const Vec6R xi = to_real6(theta);
  const Vec6R jxi = complex_rotate(xi);
  return 0.25 * (xi.dot(h * xi) + jxi.dot(h * jxi));
}

Eigen::Matrix3cd levi_matrix(const ScalarFunction& u, const Vec3C& z) {
  if (u.dim() != 6) throw ValidationError("Levi matrix needs a function on C^3");
  const Eigen::MatrixXd h = hessian(u, to_real6(z));
  Eigen::Matrix3cd a;
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      const double re = h(2 * j, 2 * k) + h(2 * j + 1, 2 * k + 1);
      const double im = h(2 * j, 2 * k + 1) - h(2 * j + 1, 2 * k);
      a(j, k) = 0.25 * Complex{re, im};
    }
  }
  return a;
}

std::optional<double> certified_null_levi_min(const Eigen::Matrix3cd& a, double tol) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (int j = 0; j < 3; ++j) {
    for (int k = 0; k < 3; ++k) {
      if (j != k && std::abs(a(j, k)) > tol * scale) return std::nullopt;
    }
  }
  // For unit null θ the vector (|θ1|²,|θ2|²,|θ3|²) ranges over the triangle
  // of the simplex cut out by |θ_k|² <= 1/2; a linear functional is
  // minimized at a vertex (1/2, 1/2, 0) up to permutation.
  const double d0 = a(0, 0).real(), d1 = a(1, 1).real(), d2 = a(2, 2).real();
  return 0.5 * std::min({d0 + d1, d1 + d2, d0 + d2});
}

NullPshVerdict is_null_psh_at(const ScalarFunction& u, const Vec3C& z,
                              std::span<const NullDirection> dirs) {
  if (dirs.empty()) throw ValidationError("direction set is empty");
  if (u.dim() != 6) throw ValidationError("null psh test needs a function on C^3");
  const Eigen::MatrixXd h = hessian(u, to_real6(z));
  NullPshVerdict best{std::numeric_limits<double>::infinity(), Vec3C::Zero(), 0};
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const Vec6R xi = to_real6(dirs[i].theta());
    const Vec6R jxi = complex_rotate(xi);
    const double v = 0.25 * (xi.dot(h * xi) + jxi.dot(h * jxi));
    if (v < best.min_value) best = NullPshVerdict{v, dirs[i].theta(), i};
  }
  return best;
}

double minimal_psh_defect(const ScalarFunction& u, const Vec3R& x) {
  if (u.dim() != 3) throw ValidationError("minimal psh defect needs a function on R^3");
  const Eigen::Matrix3d h = hessian(u, x);
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(h, Eigen::EigenvaluesOnly);
  const auto ev = es.eigenvalues();  // ascending
  return ev[0] + ev[1];
}

double circle_average(const ScalarFunction& u, const Vec3R& x,
                      const ConformalFrame& frame, double r, int n_quad) {
  if (u.dim() != 3) throw ValidationError("circle average needs a function on R^3");
  if (n_quad < 1 || !(r >= 0.0)) throw ValidationError("invalid circle parameters");
  const ConformalFrame e = frame.orthonormalized();
  // A disc lies in a box iff its boundary circle does; check the extreme
  // coordinates of the circle analytically.
  for (int i = 0; i < 3; ++i) {
    const double reach = r * std::hypot(e.v1[i], e.v2[i]);
    if (x[i] - reach < u.domain().lo[i] || x[i] + reach > u.domain().hi[i]) {
      throw DomainError("circle leaves the function domain");
    }
  }
  double acc = 0.0;
  Eigen::VectorXd p(3);
  for (int q = 0; q < n_quad; ++q) {
    const double t = 2.0 * std::numbers::pi * q / n_quad;
    p = x + r * (std::cos(t) * e.v1 + std::sin(t) * e.v2);
    acc += u(p);
  }
  return acc / n_quad;
}

}  // namespace hullkit
