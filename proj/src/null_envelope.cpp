#include "hullkit/null_envelope.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "hullkit/error.hpp"

namespace hullkit {

namespace {

using Features = Eigen::Matrix<double, CloudInterpolant::kCoefficients, 1>;

Features features(const Vec6R& d) {
  Features f;
  f[0] = 1.0;
  int k = 1;
  for (int i = 0; i < 6; ++i) f[k++] = d[i];
  for (int i = 0; i < 6; ++i) {
    for (int j = i; j < 6; ++j) f[k++] = d[i] * d[j];
  }
  return f;
}

template <class Fn>
void parallel_for(std::size_t n, int workers, Fn fn) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back(fn, n * static_cast<std::size_t>(w) / static_cast<std::size_t>(workers),
                      n * static_cast<std::size_t>(w + 1) / static_cast<std::size_t>(workers));
  }
  for (auto& t : pool) t.join();
}

}  // namespace

CloudInterpolant::CloudInterpolant(std::vector<Vec3C> points, std::vector<double> values,
                                   int neighbors, int workers)
    : points_(std::move(points)), values_(std::move(values)) {
  if (points_.size() != values_.size()) throw ValidationError("points and values differ in length");
  if (points_.empty()) throw ValidationError("empty point cloud");
  if (neighbors < kCoefficients) throw ValidationError("need at least 28 neighbours for quadratic fits");
  real_.reserve(points_.size());
  for (const auto& z : points_) real_.push_back(to_real6(z));
  tree_ = KdTree6(real_);
  const std::size_t n = points_.size();
  coef_.assign(n, Features::Zero());
  scale_.assign(n, 1.0);
  ok_.assign(n, 0);
  parallel_for(n, workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const auto hits = tree_.knn(real_[i], static_cast<std::size_t>(neighbors));
      if (hits.size() < static_cast<std::size_t>(kCoefficients)) continue;
      const double s = std::sqrt(hits.back().dist2);
      if (!(s > 0.0)) continue;
      Eigen::MatrixXd a(static_cast<Eigen::Index>(hits.size()), kCoefficients);
      Eigen::VectorXd rhs(static_cast<Eigen::Index>(hits.size()));
      for (std::size_t r = 0; r < hits.size(); ++r) {
        const auto row = static_cast<Eigen::Index>(r);
        a.row(row) = features((real_[hits[r].index] - real_[i]) / s).transpose();
        rhs[row] = values_[hits[r].index];
      }
      const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
      if (qr.rank() < kCoefficients) continue;
      coef_[i] = qr.solve(rhs);
      scale_[i] = s;
      ok_[i] = 1;
    }
  });
}

double CloudInterpolant::eval_local(std::size_t i, const Vec6R& x) const {
  return coef_[i].dot(features((x - real_[i]) / scale_[i]));
}

double CloudInterpolant::operator()(const Vec6R& x, bool* ok) const {
  const auto hit = tree_.nearest(x);
  if (ok != nullptr) *ok = ok_[hit.index] != 0;
  return eval_local(hit.index, x);
}

NullStepResult bs_step_null(const CloudInterpolant& field, std::span<const NullDirection> dirs,
                            std::span<const double> radii, int n_quad, double ball_radius,
                            int workers) {
  if (dirs.empty() || radii.empty()) throw ValidationError("need directions and radii");
  if (n_quad < 3) throw ValidationError("circle quadrature needs at least 3 nodes");
  for (double r : radii) {
    if (!(r > 0.0)) throw ValidationError("radii must be positive");
  }
  const std::size_t n = field.size();
  NullStepResult out;
  out.values = field.values();
  out.skipped.assign(n, 0);
  out.admissible.assign(n, 0);
  std::vector<Vec3C> units;
  for (const auto& d : dirs) units.push_back(d.theta().normalized());
  const double r2 = ball_radius * ball_radius;

  parallel_for(n, workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Vec3C& z = field.points()[i];
      double best = out.values[i];
      for (const Vec3C& th : units) {
        const double proj = std::abs(th.dot(z));  // |<z, θ>|, dot conjugates th
        for (double r : radii) {
          // max_t |z + r e^{it} θ|² = |z|² + r² + 2r|<z,θ>| for unit θ.
          if (z.squaredNorm() + r * r + 2.0 * r * proj > r2) continue;
          out.admissible[i] = 1;
          double acc = 0.0;
          bool ok = true;
          for (int q = 0; q < n_quad && ok; ++q) {
            const Complex e = std::polar(1.0, 2.0 * std::numbers::pi * q / n_quad);
            acc += field(to_real6(z + r * e * th), &ok);
          }
          if (!ok) {
            out.skipped[i] = 1;
            continue;
          }
          best = std::min(best, acc / n_quad);
        }
      }
      out.values[i] = best;
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    out.n_skipped += out.skipped[i];
    out.n_admissible += out.admissible[i];
  }
  return out;
}

std::vector<Vec3C> sample_ball_c3(std::size_t n, double radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nrm;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<Vec3C> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vec6R g;
    for (int k = 0; k < 6; ++k) g[k] = nrm(rng);
    g *= radius * std::pow(uni(rng), 1.0 / 6.0) / g.norm();
    pts.push_back(from_real6(g));
  }
  return pts;
}

}  // namespace hullkit
