#include <gtest/gtest.h>

#include <cmath>

#include "hullkit/certificates.hpp"
#include "hullkit/envelope.hpp"
#include "hullkit/error.hpp"
#include "support/generators.hpp"

using namespace hullkit;

namespace {

const ConvexDomain kBall2 = ConvexDomain::ball(Vec3R::Zero(), 2.0);

EnvelopeConfig small_cfg() {
  EnvelopeConfig c;
  c.frames = 16;
  c.n_radii = 6;
  c.n_quad = 32;
  return c;
}

Grid3 sampled(const ConvexDomain& om, int res, const std::function<double(const Vec3R&)>& f) {
  Grid3 g = Grid3::over(om, res);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = f(g.node(i));
  return g;
}

// Largest (u(x) - circle average) over engine frames and radii, trilinear u.
double submean_violation(const Grid3& g, const ConvexDomain& om, const EnvelopeConfig& cfg, int probes) {
  ScalarFunction u([&](std::span<const double> x) { return g.interpolate(Vec3R(x[0], x[1], x[2])); },
                   Box{g.lo(), g.hi()});
  const auto frames = envelope_frames(cfg.frames, cfg.seed);
  const auto radii = envelope_radii(cfg, om, g);
  gen::Rng rng(9);
  double worst = 0.0;
  for (int t = 0; t < probes; ++t) {
    const auto i = static_cast<std::size_t>(rng.integer(0, static_cast<int>(g.size()) - 1));
    if (!g.inside(i)) continue;
    const ConformalFrame& f = frames[static_cast<std::size_t>(t) % frames.size()];
    const double r = radii[static_cast<std::size_t>(t) % radii.size()] * g.h();
    if (!om.contains_disc(g.node(i), f.unit_normal(), r)) continue;
    worst = std::max(worst, g[i] - circle_average(u, g.node(i), f, r, 64));
  }
  return worst;
}

}  // namespace

TEST(Domain, BallAndBox) {
  EXPECT_TRUE(kBall2.contains(Vec3R(1.9, 0, 0)));
  EXPECT_FALSE(kBall2.contains(Vec3R(1.9, 0, 0), 0.2));
  EXPECT_NEAR(kBall2.excess(Vec3R(3, 0, 0)), 1.0, 1e-15);
  EXPECT_TRUE(kBall2.contains_disc(Vec3R::Zero(), Vec3R(0, 0, 1), 2.0));
  EXPECT_FALSE(kBall2.contains_disc(Vec3R(0, 0, 1), Vec3R(0, 0, 1), 1.8));
  EXPECT_TRUE(kBall2.contains_disc(Vec3R(0, 0, 1), Vec3R(0, 0, 1), std::sqrt(3.0) - 1e-12));
  const ConvexDomain box = ConvexDomain::box(Vec3R(-1, -1, -1), Vec3R(1, 2, 1));
  EXPECT_TRUE(box.contains_disc(Vec3R(0, 0.5, 0), Vec3R(0, 0, 1), 1.0));
  EXPECT_FALSE(box.contains_disc(Vec3R(0, 0.5, 0), Vec3R(0, 0, 1), 1.01));
  EXPECT_NEAR(box.excess(Vec3R(2, 3, 0)), std::sqrt(2.0), 1e-15);
}

TEST(Grid, IndexingAndInterpolation) {
  const Grid3 g(Vec3R(-1, 0, 2), Vec3R(1, 3, 4), {5, 7, 3});
  EXPECT_NEAR(g.spacing()[0], 0.5, 1e-15);
  EXPECT_NEAR(g.spacing()[1], 0.5, 1e-15);
  EXPECT_NEAR(g.spacing()[2], 1.0, 1e-15);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto c = g.coords(i);
    EXPECT_EQ(g.index(c[0], c[1], c[2]), i);
    EXPECT_EQ(g.nearest_node(g.node(i) + Vec3R(0.1, -0.1, 0.2)), i);
  }
  // Trilinear data is reproduced exactly.
  Grid3 t = g;
  auto f = [](const Vec3R& x) { return 1.0 + 2.0 * x[0] - x[1] + 0.5 * x[0] * x[1] * x[2]; };
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = f(t.node(i));
  gen::Rng rng(1);
  for (int s = 0; s < 100; ++s) {
    const Vec3R x(rng.uniform(-1, 1), rng.uniform(0, 3), rng.uniform(2, 4));
    EXPECT_NEAR(t.interpolate(x), f(x), 1e-13);
  }
  EXPECT_THROW(Grid3(Vec3R::Zero(), Vec3R::Ones(), {1, 4, 4}), ValidationError);
  EXPECT_THROW(Grid3::over(kBall2, 3), ValidationError);
}

TEST(Config, Validation) {
  EnvelopeConfig c;
  EXPECT_NO_THROW(c.validate());
  c.frames = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = EnvelopeConfig{};
  c.radii = {1.0, -2.0};
  EXPECT_THROW(c.validate(), ValidationError);
  c = EnvelopeConfig{};
  c.n_quad = 2;
  EXPECT_THROW(c.validate(), ValidationError);
  c = EnvelopeConfig{};
  c.tolerance = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Frames, DistinctOrthonormal) {
  const auto f = envelope_frames(32, 7);
  ASSERT_EQ(f.size(), 32u);
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_NEAR(f[i].v1.norm(), 1.0, 1e-14);
    EXPECT_NEAR(f[i].v2.norm(), 1.0, 1e-14);
    EXPECT_NEAR(f[i].v1.dot(f[i].v2), 0.0, 1e-14);
    for (std::size_t j = 0; j < i; ++j) EXPECT_LT(std::abs(f[i].unit_normal().dot(f[j].unit_normal())), 1.0 - 1e-9);
  }
}

TEST(Radii, GeometricSchedule) {
  EnvelopeConfig c;
  const Grid3 g = Grid3::over(kBall2, 33);
  const auto r = envelope_radii(c, kBall2, g);
  ASSERT_EQ(r.size(), 8u);
  EXPECT_NEAR(r.front(), 2.0, 1e-15);
  EXPECT_NEAR(r.back(), 2.0 / g.h(), 1e-12);
  for (std::size_t i = 1; i + 1 < r.size(); ++i) EXPECT_NEAR(r[i] / r[i - 1], r[i + 1] / r[i], 1e-12);
  c.radii = {1.5, 3.0};
  EXPECT_EQ(envelope_radii(c, kBall2, g), c.radii);
}

TEST(Step, ConstantUnchanged) {
  const Grid3 g = sampled(kBall2, 16, [](const Vec3R&) { return -0.7; });
  const Grid3 s = bs_step_minimal(g, kBall2, small_cfg());
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(s[i], -0.7, 1e-15);
}

TEST(Step, Monotone) {
  // max(-1, |x| - 2) is convex, so a sweep only removes interpolation bumps;
  // the concave max(-1, 1 - |x|) has to drop.
  const ConvexDomain om = ConvexDomain::ball(Vec3R::Zero(), 3.0);
  for (int which = 0; which < 2; ++which) {
    const Grid3 g = sampled(om, 20, [which](const Vec3R& x) {
      return which == 0 ? std::max(-1.0, x.norm() - 2.0) : std::max(-1.0, 1.0 - x.norm());
    });
    const Grid3 s = bs_step_minimal(g, om, small_cfg());
    double drop = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_LE(s[i], g[i]);
      if (!g.inside(i)) EXPECT_EQ(s[i], g[i]);
      drop = std::max(drop, g[i] - s[i]);
    }
    EXPECT_LE(s[s.nearest_node(Vec3R::Zero())], which == 0 ? -1.0 : 0.9);
    if (which == 0) EXPECT_LE(drop, 0.05);
    if (which == 1) EXPECT_GT(drop, 0.1);
  }
}

TEST(Iterate, MinimalPshObstacleIsFixed) {
  const Grid3 phi = sampled(kBall2, 16, [](const Vec3R& x) { return x.squaredNorm(); });
  const IterateResult r = bs_iterate(phi, kBall2, small_cfg());
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.sweeps, 2);
  for (std::size_t i = 0; i < phi.size(); ++i) EXPECT_NEAR(r.field[i], phi[i], 1e-4);
}

TEST(Iterate, ZeroStaysZero) {
  const IterateResult r =
      bs_iterate(ScalarFunction([](std::span<const double>) { return 0.0; }, Box::cube(3, 2.0)), kBall2, 12,
                 small_cfg());
  EXPECT_TRUE(r.converged);
  for (double v : r.field.values()) EXPECT_EQ(v, 0.0);
}

TEST(Iterate, NonConvergenceIsFlagged) {
  EnvelopeConfig c = small_cfg();
  c.max_sweeps = 1;
  const Grid3 phi = sampled(kBall2, 16, [](const Vec3R& x) { return std::abs(x[0]) < 0.3 ? -1.0 : 0.0; });
  const IterateResult r = bs_iterate(phi, kBall2, c);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.sweeps, 1);
  EXPECT_TRUE(r.monotone);
  EXPECT_TRUE(r.minorant);
}

TEST(Hull, SinglePoint) {
  const std::vector<Vec3R> k{Vec3R(0.3, -0.2, 0.1)};
  const double delta = 0.3;
  const HullResult hr = extremal_hull_field(k, kBall2, delta, 24, small_cfg());
  ASSERT_FALSE(hr.members.empty());
  const double h = hr.run.field.h();
  for (const auto& x : hr.member_points) EXPECT_LE((x - k[0]).norm(), delta + 2.0 * h);
  // every node of the δ-ball is a member
  const Grid3& g = hr.run.field;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if ((g.node(i) - k[0]).norm() <= delta) EXPECT_LE(g[i], -0.9);
  }
  EXPECT_TRUE(hr.k_nodes_are_members);
}

TEST(Hull, TwoPointsSeparated) {
  const std::vector<Vec3R> k{Vec3R(1, 0, 0), Vec3R(-1, 0, 0)};
  const double delta = 0.15;  // at least one node per ball on this grid
  const HullResult hr = extremal_hull_field(k, kBall2, delta, 32, small_cfg());
  const Grid3& g = hr.run.field;
  EXPECT_GT(g[g.nearest_node(Vec3R::Zero())], -0.9);
  for (const auto& x : hr.member_points) {
    EXPECT_LE(std::min((x - k[0]).norm(), (x - k[1]).norm()), delta + 2.0 * g.h());
  }
  EXPECT_TRUE(hr.k_nodes_are_members);
  EXPECT_TRUE(hr.sandwich);

  // The explicit minorant bounds the envelope from below at every node.
  const PointCloud cloud(k);
  const SeparationCertificate sc =
      separation_certificate(two_point_minorant(k[0], k[1], delta), cloud, delta, kBall2, Vec3R::Zero());
  ASSERT_TRUE(sc.valid);
  EXPECT_NEAR(sc.value_at_x, 0.2 * (1.0 - (2.0 * delta - delta * delta)) - 1.0, 1e-15);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.inside(i)) EXPECT_GE(g[i], sc.v(Eigen::VectorXd(g.node(i))) - 1e-12);
  }
}

TEST(Hull, ErrorsAndDistance) {
  const std::vector<Vec3R> none;
  EXPECT_THROW(extremal_hull_field(none, kBall2, 0.1, 8, small_cfg()), ValidationError);
  const std::vector<Vec3R> far{Vec3R(5, 0, 0)};
  EXPECT_THROW(extremal_hull_field(far, kBall2, 0.1, 8, small_cfg()), ValidationError);
  const std::vector<Vec3R> a{Vec3R(0, 0, 0), Vec3R(1, 0, 0)};
  const std::vector<Vec3R> b{Vec3R(0, 0, 0.5)};
  EXPECT_NEAR(hausdorff(a, b), std::sqrt(1.25), 1e-15);
  EXPECT_TRUE(std::isinf(hausdorff(a, none)));
}

TEST(Compatibility, DiscsInsideDomain) {
  const auto discs = compatibility_discs(kBall2, 40, 3);
  ASSERT_EQ(discs.size(), 40u);
  for (const auto& d : discs) {
    for (int j = 0; j < 64; ++j) EXPECT_TRUE(kBall2.contains(d.map().boundary(2.0 * std::numbers::pi * j / 64)));
  }
  // A minimal-psh quadratic has small residual (interpolation only).
  const Grid3 g = sampled(kBall2, 32, [](const Vec3R& x) { return x[1] * x[1] + x[2] * x[2] - x[0] * x[0]; });
  EXPECT_LE(disc_submean_residual(g, kBall2, discs), 2.0 * g.h() * g.h());
}

// ---------------------------------------------------------------- properties

TEST(EnvelopeProperty, InvariantsOnRandomObstacles) {
  gen::Rng rng(17);
  for (int t = 0; t < 4; ++t) {
    std::vector<Vec3R> centres;
    for (int c = 0; c < 3; ++c) centres.push_back(rng.in_ball(1.2));
    const Grid3 phi = sampled(kBall2, 14, [&](const Vec3R& x) {
      double v = 0.0;
      for (const auto& c : centres) v = std::min(v, (x - c).norm() < 0.4 ? -1.0 : 0.0);
      return v + 0.1 * x[2];
    });
    EnvelopeConfig c = small_cfg();
    c.seed = static_cast<std::uint64_t>(t);
    const IterateResult r = bs_iterate(phi, kBall2, c);
    EXPECT_TRUE(r.monotone);
    EXPECT_TRUE(r.minorant);
    for (std::size_t i = 0; i < phi.size(); ++i) EXPECT_LE(r.field[i], phi[i]);
    for (std::size_t s = 1; s < r.residual_history.size(); ++s) EXPECT_GE(r.residual_history[s], 0.0);
  }
}

TEST(EnvelopeProperty, SubmeanAtConvergenceShrinksWithGrid) {
  const auto k = gen::circle(256);
  double prev = 0.0, prev_h = 0.0;
  for (int res : {16, 32}) {
    EnvelopeConfig c;
    const double h = Grid3::over(kBall2, res).h();
    const HullResult hr = extremal_hull_field(k, kBall2, 2.0 * h, res, c);
    ASSERT_TRUE(hr.run.converged);
    const double v = submean_violation(hr.run.field, kBall2, c, 8000);
    EXPECT_LE(v, 0.02 * h) << "resolution " << res;
    if (prev_h > 0.0) EXPECT_LT(v, prev);
    prev = v;
    prev_h = h;
  }
}
