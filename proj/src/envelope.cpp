#include "hullkit/envelope.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <thread>

#include "hullkit/error.hpp"
#include "hullkit/kdtree.hpp"

namespace hullkit {

// ---------------------------------------------------------------- domain

ConvexDomain ConvexDomain::ball(const Vec3R& center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ValidationError("ball radius must be positive");
  ConvexDomain d;
  d.kind_ = Kind::Ball;
  d.center_ = center;
  d.radius_ = radius;
  return d;
}

ConvexDomain ConvexDomain::box(const Vec3R& lo, const Vec3R& hi) {
  if (!((hi - lo).minCoeff() > 0.0)) throw ValidationError("box must have positive extent");
  ConvexDomain d;
  d.kind_ = Kind::Box;
  d.lo_ = lo;
  d.hi_ = hi;
  d.center_ = 0.5 * (lo + hi);
  d.radius_ = 0.5 * (hi - lo).minCoeff();
  return d;
}

Vec3R ConvexDomain::bbox_lo() const {
  return kind_ == Kind::Ball ? Vec3R(center_.array() - radius_) : lo_;
}

Vec3R ConvexDomain::bbox_hi() const {
  return kind_ == Kind::Ball ? Vec3R(center_.array() + radius_) : hi_;
}

bool ConvexDomain::contains(const Vec3R& x, double margin) const {
  if (kind_ == Kind::Ball) return (x - center_).norm() <= radius_ - margin;
  return ((x - lo_).array() >= margin).all() && ((hi_ - x).array() >= margin).all();
}

double ConvexDomain::excess(const Vec3R& x) const {
  if (kind_ == Kind::Ball) return std::max(0.0, (x - center_).norm() - radius_);
  const Vec3R below = (lo_ - x).cwiseMax(0.0), above = (x - hi_).cwiseMax(0.0);
  return (below + above).norm();
}

bool ConvexDomain::contains_disc(const Vec3R& x, const Vec3R& n, double r) const {
  if (kind_ == Kind::Ball) {
    const Vec3R d = x - center_;
    const double xn = d.dot(n);
    const double par = std::sqrt(std::max(0.0, d.squaredNorm() - xn * xn));
    return xn * xn + (par + r) * (par + r) <= radius_ * radius_;
  }
  for (int a = 0; a < 3; ++a) {
    const double reach = r * std::sqrt(std::max(0.0, 1.0 - n[a] * n[a]));
    if (x[a] - reach < lo_[a] || x[a] + reach > hi_[a]) return false;
  }
  return true;
}

// ------------------------------------------------------------------ grid

Grid3::Grid3(const Vec3R& lo, const Vec3R& hi, std::array<int, 3> n, double fill)
    : lo_(lo), hi_(hi), n_(n) {
  for (int a = 0; a < 3; ++a) {
    if (n[static_cast<std::size_t>(a)] < 2) throw ValidationError("grid needs at least 2 nodes per axis");
    if (!(hi[a] > lo[a])) throw ValidationError("grid box must have positive extent");
    h_[a] = (hi[a] - lo[a]) / (n[static_cast<std::size_t>(a)] - 1);
  }
  const std::size_t total = static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]) *
                            static_cast<std::size_t>(n[2]);
  values_.assign(total, fill);
  mask_.assign(total, 1);
}

Grid3 Grid3::over(const ConvexDomain& omega, int resolution, double fill) {
  if (resolution < 4) throw ValidationError("resolution must be at least 4");
  Grid3 g(omega.bbox_lo(), omega.bbox_hi(), {resolution, resolution, resolution}, fill);
  g.set_mask(omega);
  return g;
}

std::array<int, 3> Grid3::coords(std::size_t idx) const {
  const auto n0 = static_cast<std::size_t>(n_[0]), n1 = static_cast<std::size_t>(n_[1]);
  return {static_cast<int>(idx % n0), static_cast<int>((idx / n0) % n1),
          static_cast<int>(idx / (n0 * n1))};
}

Vec3R Grid3::node(int i, int j, int k) const {
  return lo_ + Vec3R(i * h_[0], j * h_[1], k * h_[2]);
}

Vec3R Grid3::node(std::size_t idx) const {
  const auto c = coords(idx);
  return node(c[0], c[1], c[2]);
}

std::size_t Grid3::nearest_node(const Vec3R& x) const {
  std::array<int, 3> c{};
  for (int a = 0; a < 3; ++a) {
    const int v = static_cast<int>(std::lround((x[a] - lo_[a]) / h_[a]));
    c[static_cast<std::size_t>(a)] = std::clamp(v, 0, n_[static_cast<std::size_t>(a)] - 1);
  }
  return index(c[0], c[1], c[2]);
}

void Grid3::set_mask(const ConvexDomain& omega) {
  for (std::size_t i = 0; i < values_.size(); ++i) mask_[i] = omega.contains(node(i)) ? 1 : 0;
}

void Grid3::set_mask(std::vector<std::uint8_t> mask) {
  if (mask.size() != values_.size()) throw ValidationError("mask size mismatch");
  mask_ = std::move(mask);
}

double Grid3::interpolate(const Vec3R& x) const {
  std::array<int, 3> b{};
  std::array<double, 3> f{};
  for (int a = 0; a < 3; ++a) {
    const int na = n_[static_cast<std::size_t>(a)];
    const double g = std::clamp((x[a] - lo_[a]) / h_[a], 0.0, static_cast<double>(na - 1));
    int bi = static_cast<int>(std::floor(g));
    if (bi >= na - 1) bi = na - 2;
    b[static_cast<std::size_t>(a)] = bi;
    f[static_cast<std::size_t>(a)] = g - bi;
  }
  double v = 0.0;
  for (int c = 0; c < 8; ++c) {
    const int di = c & 1, dj = (c >> 1) & 1, dk = (c >> 2) & 1;
    const double w = (di ? f[0] : 1.0 - f[0]) * (dj ? f[1] : 1.0 - f[1]) * (dk ? f[2] : 1.0 - f[2]);
    if (w != 0.0) v += w * values_[index(b[0] + di, b[1] + dj, b[2] + dk)];
  }
  return v;
}

// ---------------------------------------------------------------- config

void EnvelopeConfig::validate() const {
  if (frames < 1) throw ValidationError("frame count must be positive");
  if (n_radii < 1 && radii.empty()) throw ValidationError("radius schedule is empty");
  for (double r : radii) {
    if (!(r > 0.0)) throw ValidationError("radii must be positive");
  }
  if (n_quad < 4) throw ValidationError("circle quadrature needs at least 4 nodes");
  if (max_sweeps < 1) throw ValidationError("max sweeps must be positive");
  if (!(tolerance > 0.0)) throw ValidationError("tolerance must be positive");
  if (frames_per_sweep < 0 || frames_per_sweep > frames) throw ValidationError("frames per sweep out of range");
  if (workers < 1) throw ValidationError("worker count must be positive");
}

std::vector<ConformalFrame> envelope_frames(int n, std::uint64_t seed) {
  std::vector<ConformalFrame> frames;
  std::vector<Vec3R> normals;
  for (int pool = 4 * n + 8;; pool *= 2) {
    frames.clear();
    normals.clear();
    for (const auto& d : sample_null_directions(pool, seed)) {
      const ConformalFrame f = null_to_frame(d).orthonormalized();
      const Vec3R nrm = f.unit_normal();
      const bool dup = std::any_of(normals.begin(), normals.end(), [&](const Vec3R& m) {
        return std::abs(std::abs(m.dot(nrm)) - 1.0) < 1e-9;
      });
      if (dup) continue;
      normals.push_back(nrm);
      frames.push_back(f);
      if (static_cast<int>(frames.size()) == n) return frames;
    }
    if (pool > 1 << 20) throw NumericalError("could not sample enough distinct frames");
  }
}

std::vector<double> envelope_radii(const EnvelopeConfig& cfg, const ConvexDomain& omega,
                                   const Grid3& grid) {
  if (!cfg.radii.empty()) return cfg.radii;
  const double rmax = omega.radius() / grid.h();
  const double rmin = std::min(2.0, rmax);
  std::vector<double> r;
  if (cfg.n_radii == 1 || rmax <= rmin) return {rmax};
  const double ratio = std::pow(rmax / rmin, 1.0 / (cfg.n_radii - 1));
  double v = rmin;
  for (int i = 0; i < cfg.n_radii; ++i, v *= ratio) r.push_back(i + 1 == cfg.n_radii ? rmax : v);
  return r;
}

// --------------------------------------------------------------- stepper

namespace {

// Circle average of a trilinear field around a lattice node, as a fixed
// linear combination of node values. Node spacing is uniform, so the same
// offsets and weights serve every node.
struct Stencil {
  std::vector<std::ptrdiff_t> offsets;
  std::vector<double> weights;
  std::array<int, 3> lo{0, 0, 0};
  std::array<int, 3> hi{0, 0, 0};
  Vec3R normal;
  double radius = 0.0;  // physical
  int frame = 0;
};

int circle_nodes(double r_grid, int cap) {
  // Spacing of about 1.5 cells along the circle, at least 12 nodes.
  const int n = static_cast<int>(std::ceil(2.0 * std::numbers::pi * r_grid / 1.5));
  return std::clamp(n, std::min(12, cap), cap);
}

Stencil make_stencil(const Grid3& g, const ConformalFrame& f, double r_grid, int cap) {
  const auto n = g.shape();
  const Vec3R h = g.spacing();
  const double r = r_grid * g.h();
  const int nq = circle_nodes(r_grid, cap);
  std::map<std::array<int, 3>, double> acc;
  for (int q = 0; q < nq; ++q) {
    const double t = 2.0 * std::numbers::pi * q / nq;
    const Vec3R off = r * (std::cos(t) * f.v1 + std::sin(t) * f.v2);
    std::array<int, 3> b{};
    std::array<double, 3> fr{};
    for (int a = 0; a < 3; ++a) {
      const double gu = off[a] / h[a];
      const double fl = std::floor(gu);
      b[static_cast<std::size_t>(a)] = static_cast<int>(fl);
      fr[static_cast<std::size_t>(a)] = gu - fl;
    }
    for (int c = 0; c < 8; ++c) {
      const int di = c & 1, dj = (c >> 1) & 1, dk = (c >> 2) & 1;
      const double w = (di ? fr[0] : 1.0 - fr[0]) * (dj ? fr[1] : 1.0 - fr[1]) *
                       (dk ? fr[2] : 1.0 - fr[2]);
      if (w == 0.0) continue;
      acc[{b[0] + di, b[1] + dj, b[2] + dk}] += w / nq;
    }
  }
  Stencil s;
  s.normal = f.unit_normal();
  s.radius = r;
  s.lo = {std::numeric_limits<int>::max(), std::numeric_limits<int>::max(), std::numeric_limits<int>::max()};
  s.hi = {std::numeric_limits<int>::min(), std::numeric_limits<int>::min(), std::numeric_limits<int>::min()};
  for (const auto& [o, w] : acc) {
    s.offsets.push_back(o[0] + static_cast<std::ptrdiff_t>(n[0]) *
                                   (o[1] + static_cast<std::ptrdiff_t>(n[1]) * o[2]));
    s.weights.push_back(w);
    for (std::size_t a = 0; a < 3; ++a) {
      s.lo[a] = std::min(s.lo[a], o[a]);
      s.hi[a] = std::max(s.hi[a], o[a]);
    }
  }
  return s;
}

class MinimalStepper {
 public:
  MinimalStepper(const Grid3& shape, const ConvexDomain& omega, const EnvelopeConfig& cfg)
      : omega_(omega), cfg_(cfg) {
    cfg.validate();
    const auto frames = envelope_frames(cfg.frames, cfg.seed);
    const auto radii = envelope_radii(cfg, omega, shape);
    for (int fi = 0; fi < static_cast<int>(frames.size()); ++fi) {
      for (double r : radii) {
        Stencil s = make_stencil(shape, frames[static_cast<std::size_t>(fi)], r, cfg.n_quad);
        s.frame = fi;
        stencils_.push_back(std::move(s));
      }
    }
    n_frames_ = static_cast<int>(frames.size());
  }

  Grid3 step(const Grid3& in, int sweep) const {
    Grid3 out = in;
    std::vector<std::uint8_t> use_frame(static_cast<std::size_t>(n_frames_), 1);
    if (cfg_.frames_per_sweep > 0 && cfg_.frames_per_sweep < n_frames_) {
      std::vector<int> order(static_cast<std::size_t>(n_frames_));
      for (int i = 0; i < n_frames_; ++i) order[static_cast<std::size_t>(i)] = i;
      std::mt19937_64 rng(cfg_.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(sweep + 1)));
      std::shuffle(order.begin(), order.end(), rng);
      std::fill(use_frame.begin(), use_frame.end(), 0);
      for (int i = 0; i < cfg_.frames_per_sweep; ++i) use_frame[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = 1;
    }
    const auto n = in.shape();
    const int rows = n[1] * n[2];
    const int workers = std::max(1, std::min(cfg_.workers, rows));
    auto run = [&](int r0, int r1) {
      std::vector<double> avg(static_cast<std::size_t>(n[0]));
      std::vector<std::uint8_t> ok(static_cast<std::size_t>(n[0]));
      for (int row = r0; row < r1; ++row) process_row(in, out, row % n[1], row / n[1], use_frame, avg, ok);
    };
    if (workers == 1) {
      run(0, rows);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back(run, rows * w / workers, rows * (w + 1) / workers);
      }
      for (auto& t : pool) t.join();
    }
    return out;
  }

 private:
  void process_row(const Grid3& in, Grid3& out, int j, int k, const std::vector<std::uint8_t>& use_frame,
                   std::vector<double>& avg, std::vector<std::uint8_t>& ok) const {
    const auto n = in.shape();
    int first = -1, last = -2;
    for (int i = 0; i < n[0]; ++i) {
      if (in.inside(in.index(i, j, k))) {
        if (first < 0) first = i;
        last = i;
      }
    }
    if (first < 0) return;
    const double* u = in.values().data();
    double* v = out.values().data();
    const std::size_t base = in.index(0, j, k);
    for (const Stencil& s : stencils_) {
      if (!use_frame[static_cast<std::size_t>(s.frame)]) continue;
      if (j + s.lo[1] < 0 || j + s.hi[1] > n[1] - 1 || k + s.lo[2] < 0 || k + s.hi[2] > n[2] - 1) continue;
      const int ilo = std::max(first, -s.lo[0]);
      const int ihi = std::min(last, n[0] - 1 - s.hi[0]);
      int a = -1, b = -2;
      for (int i = ilo; i <= ihi; ++i) {
        const bool adm = in.inside(base + static_cast<std::size_t>(i)) &&
                         omega_.contains_disc(in.node(i, j, k), s.normal, s.radius);
        ok[static_cast<std::size_t>(i)] = adm ? 1 : 0;
        if (adm) {
          if (a < 0) a = i;
          b = i;
        }
      }
      if (a < 0) continue;
      std::fill(avg.begin() + a, avg.begin() + b + 1, 0.0);
      for (std::size_t e = 0; e < s.offsets.size(); ++e) {
        const double w = s.weights[e];
        const double* src = u + static_cast<std::ptrdiff_t>(base) + s.offsets[e];
        for (int i = a; i <= b; ++i) avg[static_cast<std::size_t>(i)] += w * src[i];
      }
      for (int i = a; i <= b; ++i) {
        if (ok[static_cast<std::size_t>(i)]) {
          double& t = v[base + static_cast<std::size_t>(i)];
          t = std::min(t, avg[static_cast<std::size_t>(i)]);
        }
      }
    }
  }

  const ConvexDomain& omega_;
  const EnvelopeConfig& cfg_;
  std::vector<Stencil> stencils_;
  int n_frames_ = 0;
};

}  // namespace

Grid3 bs_step_minimal(const Grid3& field, const ConvexDomain& omega, const EnvelopeConfig& cfg,
                      int sweep_index) {
  return MinimalStepper(field, omega, cfg).step(field, sweep_index);
}

IterateResult bs_iterate(const Grid3& phi, const ConvexDomain& omega, const EnvelopeConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const MinimalStepper stepper(phi, omega, cfg);
  IterateResult res;
  res.field = phi;
  const double floor = floor_value();
  for (auto& x : res.field.values()) {
    if (std::isnan(x) || x < floor) x = floor;
  }
  for (int s = 0; s < cfg.max_sweeps; ++s) {
    Grid3 next = stepper.step(res.field, s);
    double change = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      const double d = res.field[i] - next[i];
      change = std::max(change, std::abs(d));
      if (cfg.check_invariants) {
        if (next[i] > res.field[i]) res.monotone = false;
        if (next[i] > phi[i] && next[i] > floor) res.minorant = false;
      }
    }
    res.field = std::move(next);
    res.residual_history.push_back(change);
    res.sweeps = s + 1;
    res.final_residual = change;
    if (cfg.check_invariants && !(res.monotone && res.minorant)) {
      throw NumericalError("envelope sweep broke monotonicity or the minorant property");
    }
    if (change < cfg.tolerance) {
      res.converged = true;
      break;
    }
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

IterateResult bs_iterate(const ScalarFunction& phi, const ConvexDomain& omega, int resolution,
                         const EnvelopeConfig& cfg) {
  if (phi.dim() != 3) throw ValidationError("the minimal envelope lives on R^3");
  Grid3 g = Grid3::over(omega, resolution);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3R x = g.node(i);
    g[i] = phi(Eigen::VectorXd(x));
  }
  return bs_iterate(g, omega, cfg);
}

// ------------------------------------------------------------------ hull

HullResult extremal_hull_field(std::span<const Vec3R> k, const ConvexDomain& omega, double delta,
                               int resolution, const EnvelopeConfig& cfg, double theta_thr) {
  if (k.empty()) throw ValidationError("empty compact set K");
  if (!(delta > 0.0)) throw ValidationError("thickening radius must be positive");
  for (const auto& p : k) {
    if (!omega.contains(p)) throw ValidationError("K is not contained in the domain");
  }
  Grid3 phi = Grid3::over(omega, resolution);
  const KdTree3 tree(std::vector<Vec3R>(k.begin(), k.end()));
  for (std::size_t i = 0; i < phi.size(); ++i) {
    phi[i] = tree.distance(phi.node(i)) <= delta ? -1.0 : 0.0;
  }
  HullResult hr;
  hr.delta = delta;
  hr.threshold = -1.0 + theta_thr;
  hr.run = bs_iterate(phi, omega, cfg);
  const Grid3& u = hr.run.field;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u.inside(i) && u[i] <= hr.threshold) {
      hr.members.push_back(i);
      hr.member_points.push_back(u.node(i));
    }
  }
  hr.k_nodes_are_members = true;
  for (const auto& p : k) {
    const std::size_t idx = u.nearest_node(p);
    hr.k_nodes.push_back(idx);
    if (!(u.inside(idx) && u[idx] <= hr.threshold)) hr.k_nodes_are_members = false;
  }
  std::sort(hr.k_nodes.begin(), hr.k_nodes.end());
  hr.k_nodes.erase(std::unique(hr.k_nodes.begin(), hr.k_nodes.end()), hr.k_nodes.end());
  const ConvexSupport co(k);
  const double slack = 2.0 * u.h();
  for (const auto& x : hr.member_points) {
    if (!convex_membership(co, x, slack)) ++hr.members_outside_hull;
  }
  hr.sandwich = hr.k_nodes_are_members && hr.members_outside_hull == 0;
  return hr;
}

double hausdorff(std::span<const Vec3R> a, std::span<const Vec3R> b) {
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  const KdTree3 ta(std::vector<Vec3R>(a.begin(), a.end()));
  const KdTree3 tb(std::vector<Vec3R>(b.begin(), b.end()));
  double d = 0.0;
  for (const auto& p : a) d = std::max(d, tb.distance(p));
  for (const auto& p : b) d = std::max(d, ta.distance(p));
  return d;
}

// ------------------------------------------------------- compatibility

double disc_submean_residual(const Grid3& field, const ConvexDomain& omega,
                             std::span<const ConformalMinimalDisc> discs, int n_boundary) {
  double worst = 0.0;
  for (const auto& d : discs) {
    bool inside = true;
    for (const Complex& z : disc_samples(400)) {
      if (!omega.contains(d(z))) {
        inside = false;
        break;
      }
    }
    if (!inside) continue;
    double mean = 0.0;
    for (int j = 0; j < n_boundary; ++j) {
      mean += field.interpolate(d(std::polar(1.0, 2.0 * std::numbers::pi * j / n_boundary)));
    }
    mean /= n_boundary;
    worst = std::max(worst, field.interpolate(d.center()) - mean);
  }
  return worst;
}

std::vector<ConformalMinimalDisc> compatibility_discs(const ConvexDomain& omega, int count,
                                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nrm;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const char* names[] = {"flat", "enneper", "random-spinor"};
  std::vector<ConformalMinimalDisc> out;
  for (int i = 0; i < count; ++i) {
    CatalogParams p;
    p.rho = (i % 3 == 1) ? 0.5 : 1.0;
    p.degree = 2;
    p.seed = seed + static_cast<std::uint64_t>(i);
    const ConformalMinimalDisc base = catalog(names[i % 3], p);
    double extent = 0.0;
    for (int j = 0; j < 256; ++j) {
      extent = std::max(extent, (base.map().boundary(2.0 * std::numbers::pi * j / 256) - base.center()).norm());
    }
    Eigen::Matrix3d g;
    for (int a = 0; a < 9; ++a) g(a / 3, a % 3) = nrm(rng);
    Eigen::Matrix3d q = Eigen::HouseholderQR<Eigen::Matrix3d>(g).householderQ();
    if (q.determinant() < 0) q.col(0) *= -1.0;
    // Log-uniform sizes between 0.05 R and 0.6 R so local structure near the
    // hull is probed as well as the large scale.
    const double size = omega.radius() * 0.05 * std::pow(12.0, uni(rng));
    Vec3R dir(nrm(rng), nrm(rng), nrm(rng));
    dir.normalize();
    const Vec3R t = omega.center() + dir * (0.85 * omega.radius() - size) * uni(rng);
    const double scale = size / extent;
    const Eigen::VectorXd shift = t - scale * q * base.center();
    out.push_back(ConformalMinimalDisc::unchecked(base.map().transformed(q, scale, shift),
                                                  base.label()));
  }
  return out;
}

}  // namespace hullkit
