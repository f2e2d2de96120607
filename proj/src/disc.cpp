#include "hullkit/disc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "hullkit/error.hpp"

namespace hullkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Series trimmed(Series a) {
  while (a.size() > 1 && a.back() == Complex{}) a.pop_back();
  if (a.empty()) a.push_back(Complex{});
  return a;
}

// Roots of a polynomial given by Taylor coefficients (companion matrix).
std::vector<Complex> series_roots(const Series& raw) {
  const Series a = trimmed(raw);
  const int n = static_cast<int>(a.size()) - 1;
  if (n < 1) return {};
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) c(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) c(i, n - 1) = -a[static_cast<std::size_t>(i)] / a.back();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(c, false);
  std::vector<Complex> roots(es.eigenvalues().data(), es.eigenvalues().data() + n);
  return roots;
}

double series_scale(const Series& a) {
  double s = 0.0;
  for (const auto& c : a) s += std::abs(c);
  return s;
}

}  // namespace

Complex eval_series(const Series& a, Complex z) {
  Complex v{};
  for (auto it = a.rbegin(); it != a.rend(); ++it) v = v * z + *it;
  return v;
}

Complex eval_series_derivative(const Series& a, Complex z) {
  Complex v{};
  for (std::size_t k = a.size(); k-- > 1;) v = v * z + static_cast<double>(k) * a[k];
  return v;
}

Series series_derivative(const Series& a) {
  if (a.size() <= 1) return Series{Complex{}};
  Series d(a.size() - 1);
  for (std::size_t k = 1; k < a.size(); ++k) d[k - 1] = static_cast<double>(k) * a[k];
  return d;
}

Series series_integral(const Series& a, Complex c0) {
  Series r(a.size() + 1);
  r[0] = c0;
  for (std::size_t k = 0; k < a.size(); ++k) r[k + 1] = a[k] / static_cast<double>(k + 1);
  return r;
}

Series series_product(const Series& a, const Series& b) {
  if (a.empty() || b.empty()) return Series{Complex{}};
  Series r(a.size() + b.size() - 1, Complex{});
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

Series series_dilate(const Series& a, double rho) {
  Series r(a);
  double p = 1.0;
  for (auto& c : r) {
    c *= p;
    p *= rho;
  }
  return r;
}

// ---------------------------------------------------------------- loops

BoundaryLoop::BoundaryLoop(int components, int band_limit, bool real_valued)
    : band_limit_(band_limit), real_(real_valued) {
  if (components < 1) throw ValidationError("loop needs at least one component");
  if (band_limit < 0) throw ValidationError("band limit must be non-negative");
  coeffs_.assign(static_cast<std::size_t>(components),
                 std::vector<Complex>(static_cast<std::size_t>(2 * band_limit + 1)));
}

BoundaryLoop BoundaryLoop::from_samples(const std::vector<Eigen::VectorXd>& samples,
                                        int band_limit) {
  const int m = static_cast<int>(samples.size());
  if (m == 0) throw ValidationError("no loop samples");
  if (m <= 2 * band_limit) throw ValidationError("too few samples for the band limit");
  const int comps = static_cast<int>(samples.front().size());
  BoundaryLoop loop(comps, band_limit, true);
  std::vector<Complex> roots(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) roots[static_cast<std::size_t>(j)] = std::polar(1.0, -kTwoPi * j / m);
  for (int k = 0; k <= band_limit; ++k) {
    for (int c = 0; c < comps; ++c) {
      Complex acc{};
      for (int j = 0; j < m; ++j) {
        const auto idx = static_cast<std::size_t>((static_cast<long long>(k) * j) % m);
        acc += samples[static_cast<std::size_t>(j)][c] * roots[idx];
      }
      loop.set_coeff(c, k, acc / static_cast<double>(m));
    }
  }
  // Real data: c_0 is real up to rounding.
  for (int c = 0; c < comps; ++c) loop.set_coeff(c, 0, loop.coeff(c, 0).real());
  return loop;
}

Complex BoundaryLoop::coeff(int component, int k) const {
  if (std::abs(k) > band_limit_) return Complex{};
  return coeffs_.at(static_cast<std::size_t>(component))[static_cast<std::size_t>(k + band_limit_)];
}

void BoundaryLoop::set_coeff(int component, int k, Complex c) {
  if (std::abs(k) > band_limit_) throw ValidationError("frequency beyond band limit");
  auto& row = coeffs_.at(static_cast<std::size_t>(component));
  if (real_) {
    if (k == 0) c = Complex{c.real(), 0.0};
    row[static_cast<std::size_t>(band_limit_ + k)] = c;
    row[static_cast<std::size_t>(band_limit_ - k)] = std::conj(c);
    if (k == 0) row[static_cast<std::size_t>(band_limit_)] = c;
  } else {
    row[static_cast<std::size_t>(band_limit_ + k)] = c;
  }
}

Eigen::VectorXcd BoundaryLoop::eval(double t) const {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(components());
  for (int k = -band_limit_; k <= band_limit_; ++k) {
    const Complex e = std::polar(1.0, k * t);
    for (int c = 0; c < components(); ++c) {
      v[c] += coeffs_[static_cast<std::size_t>(c)][static_cast<std::size_t>(k + band_limit_)] * e;
    }
  }
  return v;
}

Eigen::VectorXd BoundaryLoop::eval_real(double t) const { return eval(t).real(); }

Eigen::VectorXcd BoundaryLoop::mean() const {
  Eigen::VectorXcd v(components());
  for (int c = 0; c < components(); ++c) v[c] = coeff(c, 0);
  return v;
}

double BoundaryLoop::energy() const {
  double e = 0.0;
  for (const auto& row : coeffs_) {
    for (const auto& c : row) e += std::norm(c);
  }
  return e;
}

double BoundaryLoop::negative_frequency_energy() const {
  double e = 0.0;
  for (const auto& row : coeffs_) {
    for (int k = 0; k < band_limit_; ++k) e += std::norm(row[static_cast<std::size_t>(k)]);
  }
  return e;
}

Eigen::VectorXcd HarmonicExtension::operator()(Complex zeta) const {
  const double r = std::abs(zeta);
  if (r > 1.0 + 1e-12) throw DomainError("harmonic extension evaluated outside the disc");
  const double t = std::arg(zeta);
  const int n = loop_.band_limit();
  Eigen::VectorXcd v = loop_.mean();
  double rk = 1.0;
  for (int k = 1; k <= n; ++k) {
    rk *= r;
    const Complex ep = std::polar(rk, k * t);
    const Complex em = std::conj(ep);
    for (int c = 0; c < loop_.components(); ++c) {
      v[c] += loop_.coeff(c, k) * ep + loop_.coeff(c, -k) * em;
    }
  }
  return v;
}

HarmonicExtension harmonic_extension(const BoundaryLoop& loop) {
  return HarmonicExtension(loop);
}

BoundaryLoop harmonic_conjugate(const BoundaryLoop& loop) {
  if (!loop.is_real()) throw ValidationError("harmonic conjugate needs a real loop");
  BoundaryLoop h(loop.components(), loop.band_limit(), true);
  for (int c = 0; c < loop.components(); ++c) {
    for (int k = 1; k <= loop.band_limit(); ++k) {
      h.set_coeff(c, k, Complex{0, -1} * loop.coeff(c, k));
    }
  }
  return h;
}

BoundaryLoop combine_analytic(const BoundaryLoop& g, const BoundaryLoop& h) {
  if (g.components() != h.components()) throw ValidationError("loop shapes differ");
  const int n = std::max(g.band_limit(), h.band_limit());
  BoundaryLoop r(g.components(), n, false);
  for (int c = 0; c < g.components(); ++c) {
    for (int k = -n; k <= n; ++k) {
      r.set_coeff(c, k, g.coeff(c, k) + Complex{0, 1} * h.coeff(c, k));
    }
  }
  return r;
}

// ------------------------------------------------------ holomorphic discs

HolomorphicDisc::HolomorphicDisc(std::vector<Series> components)
    : comps_(std::move(components)) {
  if (comps_.empty()) throw ValidationError("disc needs at least one component");
  for (auto& s : comps_) {
    if (s.empty()) s.push_back(Complex{});
    for (const auto& c : s) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
        throw ValidationError("non-finite disc coefficient");
      }
    }
  }
}

HolomorphicDisc HolomorphicDisc::from_real_loop(const BoundaryLoop& g) {
  if (!g.is_real()) throw ValidationError("expected a real loop");
  std::vector<Series> comps(static_cast<std::size_t>(g.components()));
  for (int c = 0; c < g.components(); ++c) {
    Series s(static_cast<std::size_t>(g.band_limit() + 1));
    s[0] = g.coeff(c, 0);
    for (int k = 1; k <= g.band_limit(); ++k) s[static_cast<std::size_t>(k)] = 2.0 * g.coeff(c, k);
    comps[static_cast<std::size_t>(c)] = std::move(s);
  }
  return HolomorphicDisc(std::move(comps));
}

int HolomorphicDisc::degree() const {
  int d = 0;
  for (const auto& s : comps_) d = std::max(d, static_cast<int>(trimmed(s).size()) - 1);
  return d;
}

Eigen::VectorXcd HolomorphicDisc::operator()(Complex zeta) const {
  Eigen::VectorXcd v(dim());
  for (int c = 0; c < dim(); ++c) v[c] = eval_series(comps_[static_cast<std::size_t>(c)], zeta);
  return v;
}

Eigen::VectorXcd HolomorphicDisc::derivative(Complex zeta) const {
  Eigen::VectorXcd v(dim());
  for (int c = 0; c < dim(); ++c) {
    v[c] = eval_series_derivative(comps_[static_cast<std::size_t>(c)], zeta);
  }
  return v;
}

Eigen::VectorXcd HolomorphicDisc::center() const {
  Eigen::VectorXcd v(dim());
  for (int c = 0; c < dim(); ++c) v[c] = comps_[static_cast<std::size_t>(c)][0];
  return v;
}

HarmonicDisc HolomorphicDisc::real_part() const { return HarmonicDisc(comps_); }

HarmonicDisc HolomorphicDisc::as_real() const {
  std::vector<Series> g;
  g.reserve(comps_.size() * 2);
  for (const auto& s : comps_) {
    g.push_back(s);
    Series im(s);
    for (auto& c : im) c *= Complex{0, -1};  // Re(-iF) = Im F
    g.push_back(std::move(im));
  }
  return HarmonicDisc(std::move(g));
}

// --------------------------------------------------------- harmonic discs

HarmonicDisc::HarmonicDisc(std::vector<Series> generators) : gens_(std::move(generators)) {
  if (gens_.empty()) throw ValidationError("disc needs at least one component");
  for (auto& s : gens_) {
    if (s.empty()) s.push_back(Complex{});
  }
}

int HarmonicDisc::degree() const {
  int d = 0;
  for (const auto& s : gens_) d = std::max(d, static_cast<int>(trimmed(s).size()) - 1);
  return d;
}

Eigen::VectorXd HarmonicDisc::operator()(Complex zeta) const {
  Eigen::VectorXd v(dim());
  for (int c = 0; c < dim(); ++c) v[c] = eval_series(gens_[static_cast<std::size_t>(c)], zeta).real();
  return v;
}

Eigen::VectorXd HarmonicDisc::dx(Complex zeta) const {
  Eigen::VectorXd v(dim());
  for (int c = 0; c < dim(); ++c) {
    v[c] = eval_series_derivative(gens_[static_cast<std::size_t>(c)], zeta).real();
  }
  return v;
}

Eigen::VectorXd HarmonicDisc::dy(Complex zeta) const {
  Eigen::VectorXd v(dim());
  for (int c = 0; c < dim(); ++c) {
    v[c] = -eval_series_derivative(gens_[static_cast<std::size_t>(c)], zeta).imag();
  }
  return v;
}

Eigen::VectorXd HarmonicDisc::center() const {
  Eigen::VectorXd v(dim());
  for (int c = 0; c < dim(); ++c) v[c] = gens_[static_cast<std::size_t>(c)][0].real();
  return v;
}

Eigen::VectorXd HarmonicDisc::boundary(double t) const { return (*this)(std::polar(1.0, t)); }

HarmonicDisc HarmonicDisc::transformed(const Eigen::MatrixXd& rotation, double scale,
                                       const Eigen::VectorXd& translation) const {
  if (rotation.rows() != dim() || rotation.cols() != dim() || translation.size() != dim()) {
    throw ValidationError("transform dimensions disagree with the disc");
  }
  std::size_t len = 0;
  for (const auto& s : gens_) len = std::max(len, s.size());
  std::vector<Series> out(gens_.size(), Series(len, Complex{}));
  for (int i = 0; i < dim(); ++i) {
    for (int j = 0; j < dim(); ++j) {
      const double w = scale * rotation(i, j);
      if (w == 0.0) continue;
      const auto& src = gens_[static_cast<std::size_t>(j)];
      for (std::size_t k = 0; k < src.size(); ++k) out[static_cast<std::size_t>(i)][k] += w * src[k];
    }
    out[static_cast<std::size_t>(i)][0] += translation[i];
  }
  return HarmonicDisc(std::move(out));
}

HarmonicDisc HarmonicDisc::restricted(double rho) const {
  if (!(rho > 0.0 && rho <= 1.0)) throw ValidationError("restriction radius must lie in (0, 1]");
  std::vector<Series> out;
  out.reserve(gens_.size());
  for (const auto& s : gens_) out.push_back(series_dilate(s, rho));
  return HarmonicDisc(std::move(out));
}

// ------------------------------------------------------------ null discs

NullDisc spinor_disc(const Series& a, const Series& b, const Vec3C& z0) {
  const bool a_zero = series_scale(a) == 0.0;
  const bool b_zero = series_scale(b) == 0.0;
  if (a_zero && b_zero) throw ValidationError("spinor data a, b both vanish identically");
  const Series aa = series_product(a.empty() ? Series{Complex{}} : a, a.empty() ? Series{Complex{}} : a);
  const Series bb = series_product(b.empty() ? Series{Complex{}} : b, b.empty() ? Series{Complex{}} : b);
  const Series ab = series_product(a.empty() ? Series{Complex{}} : a, b.empty() ? Series{Complex{}} : b);
  const std::size_t len = std::max(aa.size(), bb.size());
  Series d1(len, Complex{}), d2(len, Complex{}), d3(ab.size(), Complex{});
  for (std::size_t k = 0; k < len; ++k) {
    const Complex ak = k < aa.size() ? aa[k] : Complex{};
    const Complex bk = k < bb.size() ? bb[k] : Complex{};
    d1[k] = ak - bk;
    d2[k] = Complex{0, 1} * (ak + bk);
  }
  for (std::size_t k = 0; k < ab.size(); ++k) d3[k] = 2.0 * ab[k];

  NullDisc out;
  out.base = z0;
  out.a = a;
  out.b = b;
  out.f = HolomorphicDisc({series_integral(d1, z0[0]), series_integral(d2, z0[1]),
                           series_integral(d3, z0[2])});

  // f' = 0 exactly at common zeros of a and b.
  const Series& probe = a_zero ? b : a;
  const Series& other = a_zero ? a : b;
  const double scale = std::max(series_scale(a), series_scale(b));
  for (const Complex& r : series_roots(probe)) {
    if (std::abs(r) <= 1.0 + 1e-9 && std::abs(eval_series(other, r)) <= 1e-8 * scale) {
      out.has_branch_point = true;
    }
  }
  return out;
}

ConformalMinimalDisc ConformalMinimalDisc::from_null(const NullDisc& d, std::string label) {
  return ConformalMinimalDisc(d.f.real_part(), std::move(label));
}

ConformalMinimalDisc ConformalMinimalDisc::unchecked(HarmonicDisc map, std::string label) {
  if (map.dim() != 3) throw ValidationError("conformal minimal discs live in R^3");
  return ConformalMinimalDisc(std::move(map), std::move(label));
}

// ------------------------------------------------------------- residuals

std::vector<Complex> disc_samples(int n) {
  n = std::max(n, 8);
  const int rings = std::max(2, static_cast<int>(std::sqrt(n / 4.0)));
  std::vector<Complex> pts{Complex{}};
  const int per_ring = std::max(8, (n - 1) / rings);
  for (int i = 1; i <= rings; ++i) {
    const double r = static_cast<double>(i) / rings;
    for (int j = 0; j < per_ring; ++j) {
      // Stagger rings so angles do not align.
      const double t = kTwoPi * (j + 0.5 * (i % 2)) / per_ring;
      pts.push_back(std::polar(r, t));
    }
  }
  return pts;
}

double nullity_residual(const HolomorphicDisc& f, int n_samples) {
  double worst = 0.0, scale = 0.0;
  for (const Complex& z : disc_samples(n_samples)) {
    const Eigen::VectorXcd d = f.derivative(z);
    worst = std::max(worst, std::abs((d.array() * d.array()).sum()));
    scale = std::max(scale, d.squaredNorm());
  }
  if (scale == 0.0) return 0.0;
  return worst / scale;
}

double conformality_residual(const HarmonicDisc& f, int n_samples) {
  constexpr double kEps = 1e-300;
  double worst = 0.0;
  for (const Complex& z : disc_samples(n_samples)) {
    const Eigen::VectorXd fx = f.dx(z), fy = f.dy(z);
    const double a = fx.squaredNorm(), b = fy.squaredNorm();
    const double num = std::abs(a - b) + 2.0 * std::abs(fx.dot(fy));
    worst = std::max(worst, num / std::max({a, b, kEps}));
  }
  return worst;
}

double immersion_ratio(const HarmonicDisc& f, int n_samples) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const Complex& z : disc_samples(n_samples)) {
    const double g = std::sqrt(f.dx(z).squaredNorm() + f.dy(z).squaredNorm());
    lo = std::min(lo, g);
    hi = std::max(hi, g);
  }
  if (hi == 0.0) return 0.0;
  return lo / hi;
}

void require_immersion(const HarmonicDisc& f) {
  if (immersion_ratio(f) < 1e-8) {
    throw BranchPointError("disc is not immersed: |f'| degenerates on the closed disc");
  }
}

double min_separation_ratio(const HarmonicDisc& f, int n_samples) {
  const std::vector<Complex> pts = disc_samples(n_samples);
  std::vector<Eigen::VectorXd> img;
  img.reserve(pts.size());
  for (const auto& z : pts) img.push_back(f(z));
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      worst = std::min(worst, (img[i] - img[j]).norm() / std::abs(pts[i] - pts[j]));
    }
  }
  return worst;
}

// --------------------------------------------------------------- catalog

ConformalMinimalDisc catalog(std::string_view name, const CatalogParams& p) {
  NullDisc nd;
  const Vec3C zero = Vec3C::Zero();
  if (name == "flat") {
    nd = spinor_disc({Complex{}}, {Complex{0, 1}}, zero);  // (ζ, -iζ, 0)
  } else if (name == "enneper") {
    nd = spinor_disc({Complex{1, 0}}, {Complex{}, Complex{1, 0}}, zero);
  } else if (name == "affine-null") {
    const NullDirection th(p.theta);  // validates nullity
    nd.base = zero;
    nd.f = HolomorphicDisc({{Complex{}, th.theta()[0]},
                            {Complex{}, th.theta()[1]},
                            {Complex{}, th.theta()[2]}});
  } else if (name == "random-spinor") {
    if (p.degree < 0) throw ValidationError("random-spinor degree must be non-negative");
    std::mt19937_64 rng(p.seed);
    std::normal_distribution<double> nrm;
    Series a(static_cast<std::size_t>(p.degree + 1)), b(static_cast<std::size_t>(p.degree + 1));
    // Decaying coefficients keep the disc immersed for typical seeds; the
    // constant spinor term dominates.
    for (int k = 0; k <= p.degree; ++k) {
      const double w = k == 0 ? 1.0 : 0.25 / k;
      a[static_cast<std::size_t>(k)] = w * Complex{nrm(rng), nrm(rng)};
      b[static_cast<std::size_t>(k)] = w * Complex{nrm(rng), nrm(rng)};
    }
    nd = spinor_disc(a, b, zero);
  } else {
    throw ValidationError("unknown catalog disc '" + std::string(name) + "'");
  }
  HarmonicDisc m = nd.f.real_part();
  if (p.rho != 1.0) m = m.restricted(p.rho);
  m = m.transformed(p.rotation, p.scale, p.translation);
  return ConformalMinimalDisc::unchecked(std::move(m), std::string(name));
}

WeightedPoints boundary_measure(const HarmonicDisc& f, int n_atoms) {
  if (n_atoms < 1) throw ValidationError("boundary measure needs at least one atom");
  WeightedPoints wp;
  wp.points.reserve(static_cast<std::size_t>(n_atoms));
  for (int j = 0; j < n_atoms; ++j) wp.points.push_back(f.boundary(kTwoPi * j / n_atoms));
  wp.weights.assign(static_cast<std::size_t>(n_atoms), 1.0 / n_atoms);
  return wp;
}

}  // namespace hullkit
