#include "hullkit/loop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <queue>
#include <random>

#include "hullkit/error.hpp"
#include "hullkit/green.hpp"
#include "hullkit/kdtree.hpp"
#include "hullkit/psh.hpp"

namespace hullkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Simplex-augmented system [P; ρ 1^T] c = [p; ρ].
struct Augmented {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
};

Augmented augment(const Vec3R& p, std::span<const Vec3R> pts, double rho) {
  Augmented s;
  const auto n = static_cast<Eigen::Index>(pts.size());
  s.a.resize(4, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s.a.block<3, 1>(0, i) = pts[static_cast<std::size_t>(i)];
    s.a(3, i) = rho;
  }
  s.b.resize(4);
  s.b << p, rho;
  return s;
}

std::vector<std::size_t> farthest_points(const Vec3R& p, std::span<const Vec3R> pts, int k) {
  std::vector<std::size_t> chosen;
  std::vector<double> dist(pts.size(), std::numeric_limits<double>::infinity());
  std::size_t nearest = 0, far = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double d = (pts[i] - p).norm();
    if (d < (pts[nearest] - p).norm()) nearest = i;
    if (d > (pts[far] - p).norm()) far = i;
  }
  chosen.push_back(nearest);
  auto add = [&](std::size_t i) {
    chosen.push_back(i);
    for (std::size_t m = 0; m < pts.size(); ++m) dist[m] = std::min(dist[m], (pts[m] - pts[i]).norm());
  };
  for (std::size_t m = 0; m < pts.size(); ++m) dist[m] = (pts[m] - pts[nearest]).norm();
  if (far != nearest) add(far);
  while (static_cast<int>(chosen.size()) < k) {
    const auto it = std::max_element(dist.begin(), dist.end());
    if (*it <= 0.0) break;
    add(static_cast<std::size_t>(it - dist.begin()));
  }
  return chosen;
}

// Removes affine dependencies from the support while keeping Σ c_j [p_j; 1] fixed.
void caratheodory(std::vector<std::size_t>& idx, std::vector<double>& c,
                  std::span<const Vec3R> pts) {
  for (;;) {
    const auto m = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd a(4, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      a.block<3, 1>(0, i) = pts[idx[static_cast<std::size_t>(i)]];
      a(3, i) = 1.0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    svd.setThreshold(1e-10);
    if (svd.rank() >= m) return;
    Eigen::VectorXd v = svd.matrixV().col(m - 1);
    if (v.maxCoeff() <= 0.0) v = -v;
    double alpha = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (v[i] > 1e-14) alpha = std::min(alpha, c[static_cast<std::size_t>(i)] / v[i]);
    }
    std::vector<std::size_t> idx2;
    std::vector<double> c2;
    const double cut = 1e-13 * std::max(1.0, *std::max_element(c.begin(), c.end()));
    bool dropped = false;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double ci = c[static_cast<std::size_t>(i)] - alpha * v[i];
      if (ci > cut) {
        idx2.push_back(idx[static_cast<std::size_t>(i)]);
        c2.push_back(ci);
      } else {
        dropped = true;
      }
    }
    if (!dropped) return;  // numerically independent after all
    idx = std::move(idx2);
    c = std::move(c2);
  }
}

std::vector<Vec3R> dijkstra_path(std::span<const Vec3R> pts,
                                 const std::vector<std::vector<std::size_t>>& adj,
                                 std::size_t from, std::size_t to) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(pts.size(), inf);
  std::vector<std::size_t> prev(pts.size(), pts.size());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[from] = 0.0;
  heap.emplace(0.0, from);
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    if (u == to) break;
    for (std::size_t v : adj[u]) {
      const double nd = d + (pts[u] - pts[v]).norm();
      if (nd < dist[v]) {
        dist[v] = nd;
        prev[v] = u;
        heap.emplace(nd, v);
      }
    }
  }
  if (!(dist[to] < inf)) return {pts[from], pts[to]};
  std::vector<Vec3R> path;
  for (std::size_t v = to; v != pts.size(); v = prev[v]) path.push_back(pts[v]);
  std::reverse(path.begin(), path.end());
  if (path.size() == 1) path.push_back(path.front());
  return path;
}

// Corner cutting with fixed endpoints.
std::vector<Vec3R> chaikin(std::vector<Vec3R> path, int rounds) {
  for (int r = 0; r < rounds && path.size() > 2; ++r) {
    std::vector<Vec3R> out{path.front()};
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      const Vec3R& a = path[i];
      const Vec3R& b = path[i + 1];
      if (i > 0) out.push_back(0.75 * a + 0.25 * b);
      if (i + 2 < path.size()) out.push_back(0.25 * a + 0.75 * b);
    }
    out.push_back(path.back());
    path = std::move(out);
  }
  return path;
}

double smoothstep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u), b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

Vec3R along(const std::vector<Vec3R>& path, double s) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) total += (path[i + 1] - path[i]).norm();
  if (!(total > 0.0)) return path.front();
  double target = s * total;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double len = (path[i + 1] - path[i]).norm();
    if (target <= len || i + 2 == path.size()) {
      const double f = len > 0.0 ? std::clamp(target / len, 0.0, 1.0) : 0.0;
      return path[i] + f * (path[i + 1] - path[i]);
    }
    target -= len;
  }
  return path.back();
}

// Real loop at t = 2πi/m, i < m, using a table of roots of unity.
std::vector<Vec3R> trace_loop(const BoundaryLoop& loop, int m) {
  std::vector<Complex> roots(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) roots[static_cast<std::size_t>(i)] = std::polar(1.0, kTwoPi * i / m);
  std::vector<Vec3R> out(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    Vec3R x;
    for (int c = 0; c < 3; ++c) {
      Complex acc{};
      for (int k = 1; k <= loop.band_limit(); ++k) {
        acc += loop.coeff(c, k) * roots[static_cast<std::size_t>((static_cast<long long>(k) * i) % m)];
      }
      x[c] = loop.coeff(c, 0).real() + 2.0 * acc.real();
    }
    out[static_cast<std::size_t>(i)] = x;
  }
  return out;
}

}  // namespace

Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iter) {
  const Eigen::Index n = a.cols();
  if (a.rows() != b.size()) throw ValidationError("nnls: shape mismatch");
  if (max_iter <= 0) max_iter = static_cast<int>(3 * n + 10);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<char> passive(static_cast<std::size_t>(n), 0);
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() * a.norm() *
                     static_cast<double>(std::max(a.rows(), n));

  auto solve_passive = [&]() {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (passive[static_cast<std::size_t>(i)]) cols.push_back(i);
    }
    Eigen::MatrixXd ap(a.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) ap.col(static_cast<Eigen::Index>(c)) = a.col(cols[c]);
    const Eigen::VectorXd zp = ap.colPivHouseholderQr().solve(b);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    for (std::size_t c = 0; c < cols.size(); ++c) z[cols[c]] = zp[static_cast<Eigen::Index>(c)];
    return z;
  };

  for (int it = 0; it < max_iter; ++it) {
    const Eigen::VectorXd w = a.transpose() * (b - a * x);
    Eigen::Index t = -1;
    double best = tol;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!passive[static_cast<std::size_t>(i)] && w[i] > best) {
        best = w[i];
        t = i;
      }
    }
    if (t < 0) break;
    passive[static_cast<std::size_t>(t)] = 1;
    for (int inner = 0; inner < max_iter; ++inner) {
      const Eigen::VectorXd z = solve_passive();
      double alpha = 1.0;
      bool feasible = true;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (passive[static_cast<std::size_t>(i)] && z[i] <= 0.0) {
          feasible = false;
          const double denom = x[i] - z[i];
          if (denom > 0.0) alpha = std::min(alpha, x[i] / denom);
        }
      }
      if (feasible) {
        x = z;
        break;
      }
      x += alpha * (z - x);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (passive[static_cast<std::size_t>(i)] && x[i] <= tol) {
          passive[static_cast<std::size_t>(i)] = 0;
          x[i] = 0.0;
        }
      }
    }
  }
  return x;
}

LoopPlan plan_loop(const Vec3R& p, std::span<const Vec3R> omega_samples, int k_anchors,
                   double transit_fraction) {
  if (omega_samples.empty()) throw ValidationError("empty point set");
  if (k_anchors < 1) throw ValidationError("need at least one candidate anchor");
  if (!(transit_fraction > 0.0 && transit_fraction < 1.0)) {
    throw ValidationError("transit fraction must lie in (0, 1)");
  }
  if (!p.allFinite()) throw ValidationError("target point is not finite");
  double scale = p.norm();
  for (const auto& x : omega_samples) scale = std::max(scale, x.norm());
  const double rho = 1.0 + scale;

  std::vector<std::size_t> support;
  std::vector<double> c;
  auto attempt = [&](const std::vector<std::size_t>& cand) {
    std::vector<Vec3R> pts;
    for (std::size_t i : cand) pts.push_back(omega_samples[i]);
    const Augmented s = augment(p, pts, rho);
    const Eigen::VectorXd w = nnls(s.a, s.b);
    if ((s.a * w - s.b).norm() > 1e-7 * rho) return false;
    support.clear();
    c.clear();
    for (std::size_t i = 0; i < cand.size(); ++i) {
      if (w[static_cast<Eigen::Index>(i)] > 0.0) {
        support.push_back(cand[i]);
        c.push_back(w[static_cast<Eigen::Index>(i)]);
      }
    }
    return !support.empty();
  };

  bool ok = attempt(farthest_points(p, omega_samples, k_anchors));
  if (!ok && static_cast<std::size_t>(k_anchors) < omega_samples.size()) {
    std::vector<std::size_t> all(omega_samples.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    ok = attempt(all);
  }
  if (!ok) throw ValidationError("target point lies outside the sampled hull");

  caratheodory(support, c, omega_samples);

  // Exact weights on the affinely independent support.
  for (;;) {
    const auto m = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXd a(4, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      a.block<3, 1>(0, i) = omega_samples[support[static_cast<std::size_t>(i)]];
      a(3, i) = 1.0;
    }
    Eigen::Vector4d rhs;
    rhs << p, 1.0;
    const Eigen::VectorXd sol = a.colPivHouseholderQr().solve(rhs);
    if ((a * sol - rhs).norm() > 1e-10 * std::max(1.0, scale)) {
      throw ValidationError("target point lies outside the sampled hull");
    }
    if (sol.minCoeff() > 0.0) {
      c.assign(sol.data(), sol.data() + sol.size());
      break;
    }
    if (m == 1) throw ValidationError("target point lies outside the sampled hull");
    Eigen::Index worst;
    sol.minCoeff(&worst);
    if (sol[worst] < -1e-10) throw ValidationError("target point lies outside the sampled hull");
    support.erase(support.begin() + worst);
  }

  // Visiting order: greedy nearest neighbour from the heaviest anchor.
  std::vector<std::size_t> order;
  {
    std::vector<char> used(support.size(), 0);
    std::size_t cur = static_cast<std::size_t>(std::max_element(c.begin(), c.end()) - c.begin());
    for (std::size_t step = 0; step < support.size(); ++step) {
      order.push_back(cur);
      used[cur] = 1;
      double best = std::numeric_limits<double>::infinity();
      std::size_t next = cur;
      for (std::size_t i = 0; i < support.size(); ++i) {
        if (used[i]) continue;
        const double d = (omega_samples[support[i]] - omega_samples[support[cur]]).norm();
        if (d < best) {
          best = d;
          next = i;
        }
      }
      cur = next;
    }
  }

  LoopPlan plan;
  plan.p = p;
  plan.transit_fraction = transit_fraction;
  for (std::size_t i : order) {
    plan.anchors.push_back(omega_samples[support[i]]);
    plan.weights.push_back(c[i]);
  }
  const double sum = std::accumulate(plan.weights.begin(), plan.weights.end(), 0.0);
  for (double& w : plan.weights) w /= sum;

  if (plan.anchors.size() > 1) {
    std::vector<Vec3R> pts(omega_samples.begin(), omega_samples.end());
    const KdTree3 tree(pts);
    std::vector<std::vector<std::size_t>> adj(pts.size());
    const std::size_t kn = std::min<std::size_t>(9, pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (const auto& h : tree.knn(pts[i], kn)) {
        if (h.index == i) continue;
        adj[i].push_back(h.index);
        adj[h.index].push_back(i);
      }
    }
    for (std::size_t j = 0; j < order.size(); ++j) {
      const std::size_t from = support[order[j]], to = support[order[(j + 1) % order.size()]];
      plan.transits.push_back(chaikin(dijkstra_path(pts, adj, from, to), 3));
    }
  }
  double reach = 0.0;
  for (const auto& a : plan.anchors) reach = std::max(reach, (a - p).norm());
  for (const auto& path : plan.transits) {
    for (const auto& x : path) reach = std::max(reach, (x - p).norm());
  }
  plan.smoothing_width = plan.anchors.size() > 1 ? transit_fraction * reach : 0.0;
  return plan;
}

BuiltLoop build_loop(const LoopPlan& plan, int band_limit, std::span<const Vec3R> hull_samples) {
  const std::size_t n = plan.anchors.size();
  if (n == 0 || plan.weights.size() != n) throw ValidationError("loop plan has no anchors");
  if (band_limit < 0) throw ValidationError("negative band limit");
  if (n > 1 && plan.transits.size() != n) throw ValidationError("loop plan lacks transits");
  for (double w : plan.weights) {
    if (!(w > 0.0)) throw ValidationError("loop weights must be positive");
  }
  const double tau = n > 1 ? plan.transit_fraction : 0.0;

  // Period split into [dwell_0, transit_0, dwell_1, transit_1, ...].
  std::vector<double> edges{0.0};
  for (std::size_t j = 0; j < n; ++j) {
    edges.push_back(edges.back() + plan.weights[j] * (1.0 - tau));
    edges.push_back(edges.back() + tau / static_cast<double>(n));
  }
  const double total = edges.back();
  auto position = [&](double u, int* dwell) -> Vec3R {
    u *= total;
    std::size_t seg = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), u) -
                                               edges.begin());
    seg = std::clamp<std::size_t>(seg, 1, edges.size() - 1) - 1;
    const std::size_t j = seg / 2;
    if (seg % 2 == 0 || n == 1) {
      if (dwell != nullptr) *dwell = static_cast<int>(j);
      return plan.anchors[j];
    }
    if (dwell != nullptr) *dwell = -1;
    const double len = edges[seg + 1] - edges[seg];
    const double s = len > 0.0 ? smoothstep((u - edges[seg]) / len) : 1.0;
    return along(plan.transits[j], s);
  };

  const int m = std::max(8 * band_limit, 16);
  std::vector<Eigen::VectorXd> samples;
  std::vector<int> dwell(static_cast<std::size_t>(m));
  samples.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    samples.emplace_back(position(static_cast<double>(i) / m, &dwell[static_cast<std::size_t>(i)]));
  }

  BuiltLoop out;
  out.loop = BoundaryLoop::from_samples(samples, band_limit);
  for (int c = 0; c < 3; ++c) {
    out.shift[c] = plan.p[c] - out.loop.coeff(c, 0).real();
    out.loop.set_coeff(c, 0, plan.p[c]);
  }
  Vec3R mean;
  for (int c = 0; c < 3; ++c) mean[c] = out.loop.coeff(c, 0).real();
  out.mean_error = (mean - plan.p).norm();

  std::optional<ConvexSupport> hull;
  if (!hull_samples.empty()) hull.emplace(hull_samples);
  const std::vector<Vec3R> traced = trace_loop(out.loop, m);
  for (int i = 0; i < m; ++i) {
    const Vec3R& x = traced[static_cast<std::size_t>(i)];
    const int j = dwell[static_cast<std::size_t>(i)];
    if (j >= 0) {
      out.dwell_deviation =
          std::max(out.dwell_deviation, (x - plan.anchors[static_cast<std::size_t>(j)]).norm());
    }
    if (hull) {
      for (std::size_t d = 0; d < hull->directions().size(); ++d) {
        out.eps_loop = std::max(out.eps_loop, hull->directions()[d].dot(x) - hull->support_values()[d]);
      }
    }
  }
  return out;
}

BochnerReport bochner_stage(const Vec3R& p, std::span<const Vec3R> k, int j_max,
                            const BochnerOptions& opts) {
  if (k.empty()) throw ValidationError("empty point set");
  if (j_max < 1) throw ValidationError("j_max must be at least 1");
  if (opts.band_limit < 1) throw ValidationError("band limit must be positive");
  if (opts.samples_per_point < 0) throw ValidationError("negative jitter count");

  BochnerReport report;
  report.p = p;
  report.options = opts;
  const KdTree3 tree(std::vector<Vec3R>(k.begin(), k.end()));
  const GreenQuadrature q(1, 256);  // only sets the boundary node count here

  for (int j = 1; j <= j_max; ++j) {
    const double thick = 1.0 / j;
    std::mt19937_64 rng(opts.seed + static_cast<std::uint64_t>(j));
    std::normal_distribution<double> nrm;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<Vec3R> omega(k.begin(), k.end());
    for (const auto& x : k) {
      for (int s = 0; s < opts.samples_per_point; ++s) {
        Vec3R g(nrm(rng), nrm(rng), nrm(rng));
        g *= 0.5 * thick * std::cbrt(uni(rng)) / g.norm();
        omega.push_back(x + g);
      }
    }

    const LoopPlan plan = plan_loop(p, omega, opts.k_anchors, opts.transit_fraction);
    const BuiltLoop built = build_loop(plan, opts.band_limit, omega);
    const HolomorphicDisc f = HolomorphicDisc::from_real_loop(built.loop);
    const HarmonicDisc fr = f.as_real();

    BochnerRow row;
    row.j = j;
    row.thickening = thick;
    row.anchors = static_cast<int>(plan.anchors.size());
    row.loop_mean_error = built.mean_error;
    row.eps_loop = built.eps_loop;
    Eigen::VectorXcd target(3);
    for (int c = 0; c < 3; ++c) target[c] = p[c];
    row.center_error = (f.center() - target).norm();

    const int nb = 8 * opts.band_limit;
    double sup = 0.0;
    for (int i = 0; i < nb; ++i) {
      const Complex z = std::polar(1.0, kTwoPi * i / nb);
      const Eigen::VectorXcd v = f(z);
      sup = std::max(sup, v.norm());
      row.max_boundary_distance =
          std::max(row.max_boundary_distance, tree.distance(Vec3R(v[0].real(), v[1].real(), v[2].real())));
    }
    row.containment_margin = thick - row.max_boundary_distance;
    row.mass = boundary_mass(fr);

    const Box box = Box::cube(6, 2.0 * sup + 1.0);
    std::vector<Polynomial> suite;
    for (int v = 0; v < 6; ++v) suite.push_back(Polynomial::variable(6, v));
    const Eigen::VectorXd zero6 = Eigen::VectorXd::Zero(6);
    suite.push_back(Polynomial::quadratic(Eigen::MatrixXd::Identity(6, 6), zero6, 0.0));
    suite.push_back(Polynomial::quadratic(Eigen::VectorXd((Eigen::VectorXd(6) << 1, 1, 1, 1, -1, -1).finished()).asDiagonal().toDenseMatrix(), zero6, 0.0));
    {
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 6);
      a(0, 0) = 1.0;
      a(1, 1) = -1.0;  // Re z1²
      a(2, 5) = a(5, 2) = 0.5;  // x2 y3
      suite.push_back(Polynomial::quadratic(a, Eigen::VectorXd::LinSpaced(6, -1.0, 1.0), 0.5));
    }
    for (const auto& poly : suite) {
      const DdcCheck chk = ddc_identity_check(fr, ScalarFunction::from_polynomial(poly, box), q, false);
      row.max_residual = std::max(row.max_residual, chk.residual);
    }
    report.rows.push_back(row);
  }
  const double m1 = report.rows.front().mass;
  double sup_mass = 0.0;
  for (const auto& r : report.rows) sup_mass = std::max(sup_mass, r.mass);
  report.mass_ratio = m1 > 0.0 ? sup_mass / m1 : (sup_mass > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
  return report;
}

}  // namespace hullkit
