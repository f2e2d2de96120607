#include "hullkit/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <thread>

#include "hullkit/error.hpp"

namespace hullkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Vec3R boundary_point(const HarmonicDisc& d, int j, int n) {
  return d.boundary(kTwoPi * j / n);
}

}  // namespace

PointCloud::PointCloud(std::vector<Vec3R> points) : points_(std::move(points)) {
  if (points_.empty()) throw ValidationError("empty point cloud");
  for (const auto& p : points_) {
    if (!p.allFinite()) throw ValidationError("non-finite point in cloud");
  }
  tree_ = KdTree3(points_);
}

double PointCloud::max_value(const std::function<double(const Vec3R&)>& u) const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& p : points_) m = std::max(m, u(p));
  return m;
}

Obstacle::Obstacle(const PointCloud& k, double delta) : k_(&k), delta_(delta) {
  if (!(delta > 0.0)) throw ValidationError("obstacle thickening must be positive");
}

double poisson_functional(const HarmonicDisc& d, const std::function<double(const Vec3R&)>& phi,
                          int n) {
  if (d.dim() != 3) throw ValidationError("Poisson functional needs a disc in R^3");
  if (n < 1) throw ValidationError("need at least one boundary node");
  double acc = 0.0;
  for (int j = 0; j < n; ++j) acc += phi(boundary_point(d, j, n));
  return acc / n;
}

double poisson_functional(const HarmonicDisc& d, const ScalarFunction& phi, int n) {
  return poisson_functional(d, [&](const Vec3R& x) { return phi(Eigen::VectorXd(x)); }, n);
}

double near_fraction(const HarmonicDisc& d, const PointCloud& k, double tol, int n) {
  if (!(tol > 0.0)) throw ValidationError("near-fraction tolerance must be positive");
  if (d.dim() != 3) throw ValidationError("near fraction needs a disc in R^3");
  int hits = 0;
  for (int j = 0; j < n; ++j) hits += k.distance(boundary_point(d, j, n)) < tol ? 1 : 0;
  return static_cast<double>(hits) / n;
}

// ----------------------------------------------------------- disc search

namespace {

struct Candidate {
  std::vector<double> x;
  double objective = std::numeric_limits<double>::infinity();
};

void unpack(const std::vector<double>& x, int degree, Series& a, Series& b) {
  a.assign(static_cast<std::size_t>(degree + 1), Complex{});
  b.assign(static_cast<std::size_t>(degree + 1), Complex{});
  for (int k = 0; k <= degree; ++k) {
    const auto o = static_cast<std::size_t>(4 * k);
    a[static_cast<std::size_t>(k)] = Complex{x[o], x[o + 1]};
    b[static_cast<std::size_t>(k)] = Complex{x[o + 2], x[o + 3]};
  }
}

HarmonicDisc disc_from(const std::vector<double>& x, int degree, const Vec3R& p) {
  Series a, b;
  unpack(x, degree, a, b);
  if (std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; })) {
    // Constant disc at p: the spinor family degenerates.
    return HarmonicDisc({{Complex{p[0]}}, {Complex{p[1]}}, {Complex{p[2]}}});
  }
  return spinor_disc(a, b, Vec3C(p.cast<Complex>())).f.real_part();
}

double objective(const HarmonicDisc& d, const PointCloud& k, const ConvexDomain& omega,
                 const SearchOptions& o) {
  double phi = 0.0, dist_sum = 0.0, excess = 0.0;
  int near = 0;
  const int n = o.n_boundary;
  for (int j = 0; j < n; ++j) {
    const Vec3R x = boundary_point(d, j, n);
    const double dist = k.distance(x);
    phi += dist <= o.delta ? -1.0 : 0.0;
    near += dist < o.tolerance ? 1 : 0;
    dist_sum += dist;
    excess = std::max(excess, omega.excess(x));
  }
  return phi / n + o.lambda * (1.0 - static_cast<double>(near) / n) + o.shaping * dist_sum / n +
         o.penalty * excess;
}

Candidate descend(std::vector<double> x, const Vec3R& p, const PointCloud& k,
                  const ConvexDomain& omega, const SearchOptions& o) {
  auto eval = [&](const std::vector<double>& v) {
    return objective(disc_from(v, o.degree, p), k, omega, o);
  };
  double best = eval(x);
  double step = 0.25;
  for (int round = 0; round < o.max_rounds && step > 1e-5; ++round) {
    bool improved = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double keep = x[i];
      double best_v = keep;
      for (double s : {step, -step}) {
        x[i] = keep + s;
        const double f = eval(x);
        if (f < best) {
          best = f;
          best_v = x[i];
          improved = true;
        }
      }
      x[i] = best_v;
    }
    if (!improved) step *= 0.5;
  }
  return Candidate{std::move(x), best};
}

}  // namespace

DiscEntry search_disc(const Vec3R& p, const PointCloud& k, const ConvexDomain& omega,
                      const SearchOptions& opts) {
  if (!omega.contains(p)) throw ValidationError("search point lies outside the domain");
  if (opts.degree < 0 || opts.restarts < 1 || opts.n_boundary < 8 || opts.max_rounds < 1) {
    throw ValidationError("invalid search options");
  }
  const std::size_t dim = static_cast<std::size_t>(4 * (opts.degree + 1));
  // Starting points are drawn up front so results do not depend on workers.
  std::vector<std::vector<double>> starts;
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> nrm;
  for (int r = 0; r < opts.restarts; ++r) {
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < dim; ++i) x[i] = (i < 4 ? 0.5 : 0.2) * nrm(rng);
    starts.push_back(std::move(x));
  }
  std::vector<Candidate> found(starts.size());
  const int workers = std::max(1, std::min(opts.workers, opts.restarts));
  auto run = [&](int w) {
    for (std::size_t r = static_cast<std::size_t>(w); r < starts.size(); r += static_cast<std::size_t>(workers)) {
      found[r] = descend(starts[r], p, k, omega, opts);
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  std::size_t best = 0;
  for (std::size_t r = 1; r < found.size(); ++r) {
    if (found[r].objective < found[best].objective) best = r;
  }

  DiscEntry e;
  unpack(found[best].x, opts.degree, e.a, e.b);
  const HarmonicDisc d = disc_from(found[best].x, opts.degree, p);
  e.disc = ConformalMinimalDisc::unchecked(d, "spinor-search");
  const Obstacle phi(k, opts.delta);
  e.poisson = poisson_functional(d, [&](const Vec3R& x) { return phi(x); }, 256);
  e.tolerance = opts.tolerance;
  e.near_fraction = near_fraction(d, k, opts.tolerance, 256);
  e.inside = true;
  for (const Complex& z : disc_samples(400)) {
    const Vec3R x = d(z);
    e.sup_norm = std::max(e.sup_norm, x.norm());
    if (!omega.contains(x)) e.inside = false;
  }
  SearchOptions report = opts;
  report.n_boundary = 256;
  e.objective = objective(d, k, omega, report);
  e.restart = static_cast<int>(best);
  return e;
}

DiscSequenceCertificate disc_sequence(const Vec3R& p, const PointCloud& k,
                                      const ConvexDomain& omega, int j_max, SearchOptions opts) {
  if (j_max < 1) throw ValidationError("sequence length must be positive");
  DiscSequenceCertificate c;
  c.p = p;
  c.options = opts;
  for (int j = 1; j <= j_max; ++j) {
    opts.tolerance = 1.0 / j;
    opts.delta = 1.0 / j;
    opts.seed = c.options.seed + static_cast<std::uint64_t>(j);
    c.entries.push_back(search_disc(p, k, omega, opts));
  }
  return c;
}

// ------------------------------------------------------------ test suites

namespace {

Polynomial quad3(double a11, double a22, double a33, double c = 0.0) {
  Eigen::Matrix3d a = Eigen::Vector3d(a11, a22, a33).asDiagonal();
  return Polynomial::quadratic(a, Eigen::Vector3d::Zero(), c);
}

Polynomial linear3(double b1, double b2, double b3, double c) {
  return Polynomial::quadratic(Eigen::Matrix3d::Zero(), Eigen::Vector3d(b1, b2, b3), c);
}

Polynomial monomial3(double coef, int p1, int p2, int p3) {
  Polynomial p(3);
  p.add_term(coef, {p1, p2, p3, 0, 0, 0});
  return p;
}

TestFunction make(std::string name, Polynomial p, const Box& box, bool mpsh) {
  return TestFunction{std::move(name), ScalarFunction::from_polynomial(std::move(p), box), mpsh};
}

}  // namespace

std::vector<TestFunction> minimal_psh_suite(const Box& domain) {
  if (domain.dim() != 3) throw ValidationError("test suites live on R^3");
  const Polynomial r2 = quad3(1, 1, 1);
  std::vector<TestFunction> s;
  s.push_back(make("x1", linear3(1, 0, 0, 0), domain, true));
  s.push_back(make("x2", linear3(0, 1, 0, 0), domain, true));
  s.push_back(make("x3", linear3(0, 0, 1, 0), domain, true));
  s.push_back(make("-x1+2x2-x3+0.5", linear3(-1, 2, -1, 0.5), domain, true));
  s.push_back(make("|x|^2", r2, domain, true));
  s.push_back(make("x2^2+x3^2-x1^2+1", quad3(-1, 1, 1, 1), domain, true));
  s.push_back(make("x1^2+x3^2-x2^2", quad3(1, -1, 1), domain, true));
  s.push_back(make("x1^2+x2^2-x3^2", quad3(1, 1, -1), domain, true));
  s.push_back(make("|x|^4", r2 * r2, domain, true));
  return s;
}

std::vector<TestFunction> polynomial_suite(const Box& domain) {
  std::vector<TestFunction> s = minimal_psh_suite(domain);
  s.push_back(make("x1*x3", monomial3(1, 1, 0, 1), domain, false));
  s.push_back(make("-|x|^2", quad3(-1, -1, -1), domain, false));
  s.push_back(make("x1^2*x2-x3^3", monomial3(1, 2, 1, 0) + monomial3(-1, 0, 0, 3), domain, false));
  s.push_back(make("x1^4-x2^2*x3^2+x1*x2*x3", monomial3(1, 4, 0, 0) + monomial3(-1, 0, 2, 2) +
                                                 monomial3(1, 1, 1, 1),
                   domain, false));
  return s;
}

// ------------------------------------------------------------- Jensen

JensenCertificate certify_jensen(const Vec3R& p, std::span<const HarmonicDisc> discs,
                                 const PointCloud& k, double delta,
                                 std::span<const TestFunction> suite, double eps, int n_atoms) {
  if (discs.empty()) throw ValidationError("no discs given");
  if (!(delta > 0.0)) throw ValidationError("delta must be positive");
  JensenCertificate c;
  c.p = p;
  c.delta = delta;
  c.eps = eps;
  for (const auto& d : discs) {
    if (d.dim() != 3) throw ValidationError("Jensen certificates need discs in R^3");
    if ((d.center() - p).norm() > 1e-10 * std::max(1.0, p.norm())) {
      throw ValidationError("disc is not centred at p");
    }
    if (near_fraction(d, k, delta, n_atoms) < 1.0 - delta) {
      throw ValidationError("disc boundary is not concentrated near K");
    }
    const WeightedPoints wp = boundary_measure(d, n_atoms);
    for (std::size_t i = 0; i < wp.points.size(); ++i) {
      const Vec3R x = wp.points[i];
      if (k.distance(x) > delta) {
        ++c.dropped;
        continue;
      }
      c.atoms.push_back(k.nearest(x));
      c.weights.push_back(wp.weights[i] / static_cast<double>(discs.size()));
    }
  }
  if (c.atoms.empty()) throw ValidationError("no boundary atom lies within delta of K");
  double total = 0.0;
  for (double w : c.weights) total += w;
  for (double& w : c.weights) w /= total;

  c.pass = true;
  for (const auto& tf : suite) {
    if (tf.u.dim() != 3) throw ValidationError("Jensen test functions live on R^3");
    auto u = [&](const Vec3R& x) { return tf.u(Eigen::VectorXd(x)); };
    JensenRow row{tf.name, u(p), 0.0, k.max_value(u), false};
    for (std::size_t i = 0; i < c.atoms.size(); ++i) row.integral += c.weights[i] * u(c.atoms[i]);
    row.holds = row.value_at_p <= row.integral + eps && row.integral <= row.max_on_k + eps;
    if (tf.minimal_psh && !row.holds) c.pass = false;
    c.rows.push_back(std::move(row));
  }
  return c;
}

// ------------------------------------------------------------ Hessian

HessianFunctionalCertificate hessian_certificate(const Vec3R& p, const HarmonicDisc& disc,
                                                 const PointCloud& k,
                                                 std::span<const TestFunction> suite,
                                                 const GreenQuadrature& q, int n_atoms) {
  if (disc.dim() != 3) throw ValidationError("Hessian certificates need a disc in R^3");
  if ((disc.center() - p).norm() > 1e-10 * std::max(1.0, p.norm())) {
    throw ValidationError("disc is not centred at p");
  }
  require_immersion(disc);
  HessianFunctionalCertificate c;
  c.p = p;
  const WeightedPoints wp = boundary_measure(disc, n_atoms);
  for (std::size_t i = 0; i < wp.points.size(); ++i) {
    c.atoms.push_back(wp.points[i]);
    c.weights.push_back(wp.weights[i]);
    c.max_atom_distance_to_k = std::max(c.max_atom_distance_to_k, k.distance(wp.points[i]));
  }
  for (const auto& tf : suite) {
    HessianRow row{};
    row.name = tf.name;
    row.minimal_psh = tf.minimal_psh;
    row.functional = hessian_functional(disc, QuadForm::hessian_of(tf.u), q);
    const int deg = tf.u.polynomial() ? std::max(1, tf.u.polynomial()->degree()) : 8;
    const int nb = std::max(n_atoms, 2 * deg * std::max(1, disc.degree()) + 2);
    row.measure_side = boundary_average(disc, [&](const Eigen::VectorXd& x) { return tf.u(x); }, nb) -
                       tf.u(Eigen::VectorXd(p));
    row.residual = std::abs(row.functional - row.measure_side);
    row.positive = row.functional >= -1e-10;
    if (row.minimal_psh && !row.positive) c.positivity = false;
    c.max_residual = std::max(c.max_residual, row.residual);
    c.rows.push_back(std::move(row));
  }
  return c;
}

SeparationCertificate separation_certificate(const Polynomial& v, const PointCloud& k, double delta,
                                             const ConvexDomain& omega, const Vec3R& x,
                                             int n_directions) {
  if (v.dim() != 3 || v.degree() > 2) throw ValidationError("separation needs a quadratic on R^3");
  if (!(delta > 0.0)) throw ValidationError("delta must be positive");
  SeparationCertificate c{v, x};
  auto val = [&](const Vec3R& y) { return v(Eigen::VectorXd(y)); };
  c.value_at_x = val(x);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(v.hessian(Eigen::VectorXd(x)));
  c.defect = es.eigenvalues()(0) + es.eigenvalues()(1);

  const std::vector<Vec3R> dirs = fibonacci_sphere(n_directions);
  const int shells = 8;
  c.max_on_thickening = -std::numeric_limits<double>::infinity();
  for (const Vec3R& q : k.points()) {
    c.max_on_thickening = std::max(c.max_on_thickening, val(q));
    for (int s = 1; s <= shells; ++s) {
      const double r = delta * s / shells;
      for (const Vec3R& d : dirs) c.max_on_thickening = std::max(c.max_on_thickening, val(q + r * d));
    }
  }
  // Boundary of omega plus interior rays; a quadratic may peak inside.
  const Vec3R lo = omega.bbox_lo(), hi = omega.bbox_hi();
  const Vec3R mid = 0.5 * (lo + hi);
  c.max_on_omega = val(mid);
  for (const Vec3R& d : dirs) {
    double t_max = 0.5 * (hi - lo).norm();
    while (t_max > 0.0 && !omega.contains(mid + t_max * d)) t_max *= 0.999;
    for (int s = 1; s <= 4 * shells; ++s) {
      c.max_on_omega = std::max(c.max_on_omega, val(mid + t_max * s / (4.0 * shells) * d));
    }
  }
  const double tol = 1e-12;
  c.valid = c.defect >= -tol && c.max_on_thickening <= -1.0 + tol && c.max_on_omega <= tol;
  return c;
}

Polynomial two_point_minorant(const Vec3R& a, const Vec3R& b, double delta, double alpha) {
  const double len = 0.5 * (b - a).norm();
  if (!(len > 0.0)) throw ValidationError("two_point_minorant needs distinct points");
  const Vec3R e = (b - a) / (2.0 * len);
  const Vec3R mid = 0.5 * (a + b);
  const double t = delta / len;
  const double shift = 2.0 * t - t * t;
  // |y|² - 2 (y·e)² with y = (x - mid)/len, expanded as xᵀAx + bᵀx + c.
  const Eigen::Matrix3d m = (Eigen::Matrix3d::Identity() - 2.0 * e * e.transpose()) / (len * len);
  const Eigen::Vector3d lin = -2.0 * m * mid;
  const double c0 = mid.dot(m * mid);
  return Polynomial::quadratic(alpha * m, alpha * lin, alpha * (c0 + 1.0 - shift) - 1.0);
}

}  // namespace hullkit
