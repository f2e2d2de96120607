#include "hullkit/green.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hullkit/error.hpp"

namespace hullkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// BiPolys above this degree are not formed; quadrature routes take over.
constexpr int kMaxSpectralDegree = 96;

}  // namespace

GaussRule gauss_legendre(int n) {
  if (n < 1) throw ValidationError("Gauss-Legendre needs at least one node");
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double w = 1.0 / ((1.0 - z * z) * dp * dp);  // on [0,1]: 2/(...) / 2
    const auto lo = static_cast<std::size_t>(i), hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = 0.5 * (1.0 - z);
    rule.nodes[hi] = 0.5 * (1.0 + z);
    rule.weights[lo] = rule.weights[hi] = w;
  }
  return rule;
}

GreenQuadrature::GreenQuadrature(int n_radial, int n_angular, int exponent)
    : n_radial_(n_radial), n_angular_(n_angular), exponent_(exponent) {
  if (n_radial < 1 || n_angular < 1) throw ValidationError("quadrature sizes must be positive");
  if (exponent < 1 || exponent > 8) throw ValidationError("radial exponent must lie in 1..8");
  const GaussRule gl = gauss_legendre(n_radial);
  const double p = exponent;
  std::vector<double> radial(static_cast<std::size_t>(n_radial));
  double total = 0.0;
  for (int i = 0; i < n_radial; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const double s = gl.nodes[ii];
    // -(1/2π) log r · r dr dt with r = s^p:  -p² s^{2p-1} log s ds dt / (2π).
    radial[ii] = -p * p * std::pow(s, 2.0 * p - 1.0) * std::log(s) * gl.weights[ii];
    total += radial[ii];
  }
  // Rescale so constants integrate exactly (the density has mass 1/4); for
  // the default rule the factor is 1 to machine precision.
  const double fix = 0.25 / total;
  nodes_.reserve(static_cast<std::size_t>(n_radial) * static_cast<std::size_t>(n_angular));
  for (int i = 0; i < n_radial; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const double r = std::pow(gl.nodes[ii], p);
    for (int j = 0; j < n_angular; ++j) {
      nodes_.push_back(Node{std::polar(r, kTwoPi * j / n_angular), fix * radial[ii] / n_angular});
    }
  }
}

double GreenQuadrature::total_weight() const {
  double s = 0.0;
  for (const auto& n : nodes_) s += n.weight;
  return s;
}

double green_scalar(const std::function<double(Complex)>& g, const GreenQuadrature& q) {
  double acc = 0.0;
  for (const auto& n : q.nodes()) acc += n.weight * g(n.zeta);
  return acc;
}

// ------------------------------------------------------------------ forms

TwoForm::TwoForm(int dim, Fn coefficients) : dim_(dim), fn_(std::move(coefficients)) {
  if (dim < 2) throw ValidationError("two-forms need dimension at least 2");
  if (!fn_) throw ValidationError("two-form has no coefficients");
}

TwoForm TwoForm::constant(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw ValidationError("two-form matrix must be square");
  return TwoForm(static_cast<int>(a.rows()), [a](const Eigen::VectorXd&) { return a; });
}

TwoForm TwoForm::basis(int dim, int i, int j) {
  if (i < 0 || j < 0 || i >= dim || j >= dim) throw ValidationError("two-form index out of range");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  a(i, j) += 1.0;
  a(j, i) -= 1.0;
  return constant(a);
}

Eigen::MatrixXd TwoForm::operator()(const Eigen::VectorXd& x) const {
  const Eigen::MatrixXd a = fn_(x);
  if (a.rows() != dim_ || a.cols() != dim_) throw ValidationError("two-form evaluator has wrong shape");
  return 0.5 * (a - a.transpose());
}

QuadForm::QuadForm(int dim, Fn coefficients) : dim_(dim), fn_(std::move(coefficients)) {
  if (dim < 1) throw ValidationError("quadratic forms need positive dimension");
  if (!fn_) throw ValidationError("quadratic form has no coefficients");
}

QuadForm QuadForm::constant(const Eigen::MatrixXd& h) {
  if (h.rows() != h.cols()) throw ValidationError("quadratic form matrix must be square");
  return QuadForm(static_cast<int>(h.rows()), [h](const Eigen::VectorXd&) { return h; });
}

QuadForm QuadForm::hessian_of(const ScalarFunction& u) {
  return QuadForm(u.dim(), [u](const Eigen::VectorXd& x) { return hessian(u, x); });
}

Eigen::MatrixXd QuadForm::operator()(const Eigen::VectorXd& x) const {
  const Eigen::MatrixXd h = fn_(x);
  if (h.rows() != dim_ || h.cols() != dim_) throw ValidationError("quadratic form evaluator has wrong shape");
  return 0.5 * (h + h.transpose());
}

double pushforward_on_twoform(const HarmonicDisc& d, const TwoForm& alpha,
                              const GreenQuadrature& q) {
  if (alpha.dim() != d.dim()) throw ValidationError("form and disc dimensions disagree");
  return green_scalar(
      [&](Complex z) {
        const Eigen::VectorXd fx = d.dx(z), fy = d.dy(z);
        return fx.dot(alpha(d(z)) * fy);
      },
      q);
}

// ------------------------------------------------------------------ BiPoly

BiPoly::BiPoly(int max_degree) {
  if (max_degree < 0) throw ValidationError("negative BiPoly degree");
  c_ = Eigen::MatrixXcd::Zero(max_degree + 1, max_degree + 1);
}

BiPoly BiPoly::from_real_part(const Series& g) {
  BiPoly p(std::max(0, static_cast<int>(g.size()) - 1));
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    p.c_(i, 0) += 0.5 * g[k];
    p.c_(0, i) += 0.5 * std::conj(g[k]);
  }
  return p;
}

BiPoly BiPoly::constant(Complex c) {
  BiPoly p(0);
  p.c_(0, 0) = c;
  return p;
}

Complex BiPoly::coeff(int m, int n) const {
  if (m < 0 || n < 0 || m > max_degree() || n > max_degree()) return Complex{};
  return c_(m, n);
}

BiPoly BiPoly::operator+(const BiPoly& o) const {
  BiPoly r(std::max(max_degree(), o.max_degree()));
  r.c_.topLeftCorner(c_.rows(), c_.cols()) += c_;
  r.c_.topLeftCorner(o.c_.rows(), o.c_.cols()) += o.c_;
  return r;
}

BiPoly BiPoly::operator*(const BiPoly& o) const {
  const int deg = max_degree() + o.max_degree();
  if (deg > kMaxSpectralDegree) throw ValidationError("BiPoly degree too large");
  BiPoly r(deg);
  for (int a = 0; a <= max_degree(); ++a) {
    for (int b = 0; b <= max_degree(); ++b) {
      const Complex x = c_(a, b);
      if (x == Complex{}) continue;
      for (int m = 0; m <= o.max_degree(); ++m) {
        for (int n = 0; n <= o.max_degree(); ++n) {
          const Complex y = o.c_(m, n);
          if (y != Complex{}) r.c_(a + m, b + n) += x * y;
        }
      }
    }
  }
  return r;
}

BiPoly BiPoly::operator*(Complex s) const {
  BiPoly r(*this);
  r.c_ *= s;
  return r;
}

BiPoly BiPoly::laplacian() const {
  BiPoly r(std::max(0, max_degree() - 1));
  for (int m = 1; m <= max_degree(); ++m) {
    for (int n = 1; n <= max_degree(); ++n) r.c_(m - 1, n - 1) = 4.0 * m * n * c_(m, n);
  }
  return r;
}

Complex BiPoly::operator()(Complex zeta) const {
  Complex v{};
  const Complex zb = std::conj(zeta);
  Complex zm{1.0, 0.0};
  for (int m = 0; m <= max_degree(); ++m) {
    Complex row{};
    for (int n = max_degree(); n >= 0; --n) row = row * zb + c_(m, n);
    v += zm * row;
    zm *= zeta;
  }
  return v;
}

Complex BiPoly::green_integral() const {
  // -(1/2π) ∫_D log|ζ| ζ^m ζ̄^n dA = δ_mn / (2m+2)².
  Complex v{};
  for (int m = 0; m <= max_degree(); ++m) {
    const double d = 2.0 * m + 2.0;
    v += c_(m, m) / (d * d);
  }
  return v;
}

Complex BiPoly::boundary_mean() const { return c_.diagonal().sum(); }

BiPoly compose(const Polynomial& u, const HarmonicDisc& d) {
  if (u.dim() != d.dim()) throw ValidationError("polynomial and disc dimensions disagree");
  std::vector<std::vector<BiPoly>> powers(static_cast<std::size_t>(d.dim()));
  for (int c = 0; c < d.dim(); ++c) {
    powers[static_cast<std::size_t>(c)].push_back(BiPoly::constant(1.0));
    powers[static_cast<std::size_t>(c)].push_back(
        BiPoly::from_real_part(d.generators()[static_cast<std::size_t>(c)]));
  }
  auto power = [&](int c, int p) -> const BiPoly& {
    auto& v = powers[static_cast<std::size_t>(c)];
    while (static_cast<int>(v.size()) <= p) v.push_back(v.back() * v[1]);
    return v[static_cast<std::size_t>(p)];
  };
  BiPoly acc(0);
  for (const auto& t : u.terms()) {
    BiPoly m = BiPoly::constant(t.coef);
    for (int c = 0; c < d.dim(); ++c) {
      const int p = t.powers[static_cast<std::size_t>(c)];
      if (p > 0) m = m * power(c, p);
    }
    acc = acc + m;
  }
  return acc;
}

// ----------------------------------------------------------- identities

double boundary_average(const HarmonicDisc& d,
                        const std::function<double(const Eigen::VectorXd&)>& u, int n) {
  if (n < 1) throw ValidationError("boundary average needs at least one point");
  double acc = 0.0;
  for (int j = 0; j < n; ++j) acc += u(d.boundary(kTwoPi * j / n));
  return acc / n;
}

namespace {

// Trapezoid on T is exact for trigonometric degree < n; u∘f of a polynomial
// u has degree deg(u)·deg(f).
int boundary_points(const HarmonicDisc& d, int at_least, int u_degree = 4) {
  return std::max(at_least, 2 * u_degree * std::max(1, d.degree()) + 2);
}

double laplacian_fd(const HarmonicDisc& d, const ScalarFunction& u, Complex z, double h) {
  auto g = [&](Complex w) { return u(d(w)); };
  const double c = g(z);
  double acc = 0.0;
  for (const Complex dir : {Complex{1, 0}, Complex{0, 1}}) {
    const double p1 = g(z + h * dir), m1 = g(z - h * dir);
    const double p2 = g(z + 2.0 * h * dir), m2 = g(z - 2.0 * h * dir);
    acc += (-p2 + 16.0 * p1 - 30.0 * c + 16.0 * m1 - m2) / (12.0 * h * h);
  }
  return acc;
}

double chain_rule_laplacian(const HarmonicDisc& d, const ScalarFunction& u, Complex z) {
  const Eigen::VectorXd fx = d.dx(z), fy = d.dy(z);
  const Eigen::MatrixXd h = hessian(u, d(z));
  return fx.dot(h * fx) + fy.dot(h * fy);  // Δf = 0
}

}  // namespace

double green_laplacian_quadratic(const Polynomial& u, const HarmonicDisc& d) {
  if (u.dim() != d.dim()) throw ValidationError("polynomial and disc dimensions disagree");
  if (u.degree() > 2) throw ValidationError("coefficient route needs degree <= 2");
  auto pair = [&](int i, int j) {
    const Series& a = d.generators()[static_cast<std::size_t>(i)];
    const Series& b = d.generators()[static_cast<std::size_t>(j)];
    Complex acc{};
    for (std::size_t k = 1; k < std::min(a.size(), b.size()); ++k) acc += a[k] * std::conj(b[k]);
    return 0.5 * acc.real();
  };
  double v = 0.0;
  for (const auto& t : u.terms()) {
    int idx[2] = {-1, -1}, n = 0;
    for (int c = 0; c < u.dim(); ++c) {
      for (int e = 0; e < t.powers[static_cast<std::size_t>(c)]; ++e) idx[n++] = c;
    }
    if (n == 2) v += t.coef * pair(idx[0], idx[1]);
  }
  return v;
}

DdcCheck ddc_identity_check(const HarmonicDisc& d, const ScalarFunction& u,
                            const GreenQuadrature& q, bool quadrature_routes) {
  if (u.dim() != d.dim()) throw ValidationError("function and disc dimensions disagree");
  DdcCheck out{};
  const int u_deg = u.polynomial() ? std::max(1, u.polynomial()->degree()) : 8;
  const int nb = boundary_points(d, q.n_angular(), u_deg);
  out.rhs = boundary_average(d, [&](const Eigen::VectorXd& x) { return u(x); }, nb) -
            u(d.center());

  if (const Polynomial* p = u.polynomial(); p != nullptr) {
    if (p->degree() <= 2) {
      out.lhs_spectral = green_laplacian_quadratic(*p, d);
    } else if (p->degree() * std::max(1, d.degree()) <= kMaxSpectralDegree) {
      out.lhs_spectral = compose(*p, d).laplacian().green_integral().real();
    }
  }
  if (quadrature_routes) {
    out.lhs_chain_rule =
        green_scalar([&](Complex z) { return chain_rule_laplacian(d, u, z); }, q);
    const double h = 2.5 / q.n_angular();
    out.lhs_finite_difference =
        green_scalar([&](Complex z) { return laplacian_fd(d, u, z, h); }, q);
  }
  if (out.lhs_spectral) {
    out.lhs = *out.lhs_spectral;
  } else if (out.lhs_chain_rule) {
    out.lhs = *out.lhs_chain_rule;
  } else {
    throw ValidationError("no route available for the left-hand side");
  }
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

double boundary_mass(const HarmonicDisc& d) {
  const int n = boundary_points(d, 64, 2);
  const double mean_sq = boundary_average(d, [](const Eigen::VectorXd& x) { return x.squaredNorm(); }, n);
  return 0.25 * (mean_sq - d.center().squaredNorm());
}

MassValues mass(const HarmonicDisc& d, const GreenQuadrature& q) {
  require_immersion(d);
  MassValues m{};
  m.interior = green_scalar([&](Complex z) { return d.dx(z).squaredNorm(); }, q);
  m.boundary = boundary_mass(d);
  return m;
}

double plane_trace(const Eigen::MatrixXd& h, const Eigen::VectorXd& v1,
                   const Eigen::VectorXd& v2) {
  const double n1 = v1.norm();
  if (n1 == 0.0) throw BranchPointError("degenerate tangent plane");
  const Eigen::VectorXd e1 = v1 / n1;
  Eigen::VectorXd e2 = v2 - e1.dot(v2) * e1;
  const double n2 = e2.norm();
  if (n2 <= 1e-14 * n1) throw BranchPointError("degenerate tangent plane");
  e2 /= n2;
  return e1.dot(h * e1) + e2.dot(h * e2);
}

double ddcuf_pointwise_check(const HarmonicDisc& d, const ScalarFunction& u, int n_samples) {
  if (u.dim() != d.dim()) throw ValidationError("function and disc dimensions disagree");
  require_immersion(d);
  const double h = 1e-3;
  double worst = 0.0, scale = 0.0;
  for (const Complex& z : disc_samples(n_samples)) {
    const Eigen::VectorXd fx = d.dx(z), fy = d.dy(z);
    const double lhs = laplacian_fd(d, u, z, h);
    const double rhs = plane_trace(hessian(u, d(z)), fx, fy) * fx.squaredNorm();
    worst = std::max(worst, std::abs(lhs - rhs));
    scale = std::max(scale, fx.squaredNorm());
  }
  return worst / scale;
}

double hessian_functional(const HarmonicDisc& d, const QuadForm& h, const GreenQuadrature& q,
                          bool literal) {
  if (h.dim() != d.dim()) throw ValidationError("form and disc dimensions disagree");
  require_immersion(d);
  return green_scalar(
      [&](Complex z) {
        const Eigen::VectorXd fx = d.dx(z), fy = d.dy(z);
        const double tr = plane_trace(h(d(z)), fx, fy);
        return literal ? tr : tr * fx.squaredNorm();
      },
      q);
}

}  // namespace hullkit
