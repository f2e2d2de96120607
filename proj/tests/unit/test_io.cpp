#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "hullkit/commands.hpp"
#include "hullkit/error.hpp"
#include "hullkit/io.hpp"
#include "support/generators.hpp"

using namespace hullkit;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = HULLKIT_FIXTURES;

bool same_bits(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

bool same_series(const Series& a, const Series& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_bits(a[i].real(), b[i].real()) || !same_bits(a[i].imag(), b[i].imag())) return false;
  return true;
}

template <class T>
T through_text(const json& j, T (*reader)(const json&)) {
  return reader(json::parse(j.dump(2)));
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("hullkit_io_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(PointClouds, Fixtures) {
  const PointCloudFile c = point_cloud_from_json(read_json(kFixtures / "circle.json"));
  EXPECT_EQ(c.space, "R3");
  EXPECT_EQ(c.real.size(), 256u);
  for (const auto& p : c.real) EXPECT_NEAR(p.norm(), 1.0, 1e-15);
  const PointCloudFile t = point_cloud_from_json(read_json(kFixtures / "two_points.json"));
  EXPECT_EQ(t.real.size(), 2u);
  try {
    point_cloud_from_json(read_json(kFixtures / "empty.json"));
    FAIL() << "empty cloud accepted";
  } catch (const ValidationError& e) {
    EXPECT_EQ(std::string(e.what()), "empty point set");
  }
}

TEST(PointClouds, Validation) {
  EXPECT_THROW(point_cloud_from_json(json::parse(R"({"space":"R3","points":[[1,2]]})")), ValidationError);
  EXPECT_THROW(point_cloud_from_json(json::parse(R"({"space":"R4","points":[[1,2,3]]})")), ValidationError);
  EXPECT_THROW(point_cloud_from_json(json::parse(R"({"space":"R3","points":[[1,2,"inf"]]})")), ValidationError);
  EXPECT_THROW(point_cloud_from_json(json::parse(R"({"space":"R3","points":[[1,2,3]],"extra":1})")),
               ValidationError);
  EXPECT_THROW(point_cloud_from_json(json::parse(R"({"version":2,"space":"R3","points":[[1,2,3]]})")),
               ValidationError);
  const PointCloudFile c = point_cloud_from_json(json::parse(R"({"space":"C3","points":[[[1,2],[0,1],[3,-1]]]})"));
  ASSERT_EQ(c.complex.size(), 1u);
  EXPECT_EQ(c.complex[0][2], Complex(3, -1));
}

TEST(Files, Errors) {
  EXPECT_THROW(read_json(kFixtures / "does_not_exist.json"), IoError);
  const fs::path d = scratch("files");
  std::ofstream(d / "bad.json") << "{ not json";
  EXPECT_THROW(read_json(d / "bad.json"), ValidationError);
  write_json(d / "sub" / "x.json", json{{"b", 1}, {"a", 2}});
  const std::string s = slurp(d / "sub" / "x.json");
  EXPECT_LT(s.find("\"a\""), s.find("\"b\""));
  EXPECT_EQ(s.back(), '\n');
}

TEST(RoundTrip, Polynomial) {
  gen::Rng rng(1);
  for (int dim : {3, 6}) {
    const Polynomial p = rng.polynomial(dim, 4, 12);
    const Polynomial q = through_text(to_json(p), polynomial_from_json);
    ASSERT_EQ(p.terms().size(), q.terms().size());
    for (std::size_t i = 0; i < p.terms().size(); ++i) {
      EXPECT_TRUE(same_bits(p.terms()[i].coef, q.terms()[i].coef));
      EXPECT_EQ(p.terms()[i].powers, q.terms()[i].powers);
    }
  }
  const Polynomial f = polynomial_from_json(read_json(kFixtures / "null_psh_example.json"));
  EXPECT_EQ(f.dim(), 6);
  EXPECT_EQ(f(Eigen::VectorXd(to_real6(Vec3C(1.0, 0.0, Complex(0, 1))))), 0.0);
  EXPECT_THROW(polynomial_from_json(json::parse(R"({"space":"R3","terms":[{"coef":1,"powers":[1,0,0,0,0,0]}]})")),
               ValidationError);
}

TEST(RoundTrip, GridWithNonFiniteValues) {
  gen::Rng rng(2);
  Grid3 g(Vec3R(-1, -2, -3), Vec3R(1.5, 2, 3), {4, 5, 6});
  std::vector<std::uint8_t> mask(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = rng.normal() * 1e3;
    mask[i] = static_cast<std::uint8_t>(i % 3 != 0);
  }
  g[0] = std::numeric_limits<double>::infinity();
  g[1] = -std::numeric_limits<double>::infinity();
  g[2] = std::numeric_limits<double>::quiet_NaN();
  g[3] = 5e-324;
  g.set_mask(mask);
  const Grid3 h = through_text(to_json(g), grid_from_json);
  EXPECT_EQ(h.shape(), g.shape());
  for (int a = 0; a < 3; ++a) {
    EXPECT_TRUE(same_bits(h.lo()[a], g.lo()[a]));
    EXPECT_TRUE(same_bits(h.hi()[a], g.hi()[a]));
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_TRUE(same_bits(h[i], g[i])) << i;
    EXPECT_EQ(h.inside(i), g.inside(i));
  }
}

TEST(RoundTrip, Discs) {
  gen::Rng rng(3);
  const HarmonicDisc d({rng.series(5), rng.series(2), rng.series(7)});
  const HarmonicDisc e = through_text(to_json(d), harmonic_disc_from_json);
  ASSERT_EQ(e.dim(), 3);
  for (int c = 0; c < 3; ++c) EXPECT_TRUE(same_series(d.generators()[static_cast<std::size_t>(c)],
                                                      e.generators()[static_cast<std::size_t>(c)]));
  const HolomorphicDisc f({rng.series(3), rng.series(3), rng.series(0)});
  const HolomorphicDisc g = through_text(to_json(f), holomorphic_disc_from_json);
  for (int c = 0; c < 3; ++c) EXPECT_TRUE(same_series(f.components()[static_cast<std::size_t>(c)],
                                                      g.components()[static_cast<std::size_t>(c)]));
  const BoundaryLoop l = rng.real_loop(3, 9);
  const BoundaryLoop m = through_text(to_json(l), boundary_loop_from_json);
  EXPECT_EQ(m.band_limit(), 9);
  EXPECT_TRUE(m.is_real());
  for (int c = 0; c < 3; ++c)
    for (int k = -9; k <= 9; ++k) {
      EXPECT_TRUE(same_bits(l.coeff(c, k).real(), m.coeff(c, k).real()));
      EXPECT_TRUE(same_bits(l.coeff(c, k).imag(), m.coeff(c, k).imag()));
    }
  // a holomorphic disc document is not a harmonic one
  EXPECT_THROW(harmonic_disc_from_json(to_json(f)), ValidationError);
}

TEST(RoundTrip, Certificates) {
  const PointCloud k(gen::circle(64));
  const ConvexDomain om = ConvexDomain::ball(Vec3R::Zero(), 2.0);
  SearchOptions o;
  o.restarts = 2;
  o.max_rounds = 5;
  const DiscSequenceCertificate s = disc_sequence(Vec3R(0.1, 0, 0), k, om, 2, o);
  const DiscSequenceCertificate s2 = through_text(to_json(s), disc_sequence_from_json);
  EXPECT_EQ(to_json(s2).dump(), to_json(s).dump());
  ASSERT_EQ(s2.entries.size(), 2u);
  EXPECT_TRUE(same_bits(s2.entries[1].objective, s.entries[1].objective));
  EXPECT_TRUE(same_series(s2.entries[0].a, s.entries[0].a));

  const auto suite = minimal_psh_suite(Box::cube(3, 3.0));
  const std::vector<HarmonicDisc> discs{catalog("flat").map()};
  const JensenCertificate j = certify_jensen(Vec3R::Zero(), discs, k, 0.05, suite);
  const JensenCertificate j2 = through_text(to_json(j), jensen_from_json);
  EXPECT_EQ(to_json(j2).dump(), to_json(j).dump());
  EXPECT_EQ(j2.pass, j.pass);
  for (std::size_t i = 0; i < j.weights.size(); ++i) EXPECT_TRUE(same_bits(j.weights[i], j2.weights[i]));

  const HessianFunctionalCertificate h = hessian_certificate(Vec3R::Zero(), discs[0], k, suite);
  const HessianFunctionalCertificate h2 = through_text(to_json(h), hessian_certificate_from_json);
  EXPECT_EQ(to_json(h2).dump(), to_json(h).dump());
  EXPECT_TRUE(same_bits(h2.max_residual, h.max_residual));
}

TEST(RunConfig, DefaultsAndRoundTrip) {
  const RunConfig c = run_config_from_json(json{{"command", "green"}});
  EXPECT_EQ(c.resolution, 64);
  EXPECT_EQ(c.quadrature[0], 64);
  EXPECT_EQ(c.quadrature[1], 256);
  const RunConfig d = run_config_from_json(to_json(c));
  EXPECT_EQ(to_json(d).dump(), to_json(c).dump());
}

TEST(RunConfig, Rejections) {
  auto bad = [](const json& j) { EXPECT_THROW(run_config_from_json(j), ValidationError) << j.dump(); };
  bad(json{{"command", "green"}, {"unknown", 1}});
  bad(json{{"command", "nope"}});
  bad(json{{"command", "disc"}, {"mode", "other"}});
  bad(json{{"command", "certify"}});
  bad(json{{"command", "green"}, {"resolution", 2}});
  bad(json{{"command", "green"}, {"resolution", "64"}});
  bad(json{{"command", "green"}, {"tol", -1}});
  bad(json{{"command", "green"}, {"omega", {{"kind", "cone"}}}});
  bad(json{{"command", "green"}, {"omega", {{"kind", "ball"}, {"radius", 0}}}});
  bad(json{{"command", "green"}, {"quadrature", {64}}});
  bad(json{{"command", "green"}, {"point", {0, 0}}});
  bad(json{{"command", "green"}, {"rho", 1.5}});
  bad(json{{"command", "green"}, {"version", 7}});
}

TEST(Csv, SliceAndTable) {
  Grid3 g(Vec3R(0, 0, 0), Vec3R(1, 1, 1), {2, 2, 2});
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = static_cast<double>(i);
  const std::string s = csv_slice(g, 2, 1);
  std::istringstream in(s);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,y,value,inside");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4);
  EXPECT_NE(s.find(",7,"), std::string::npos);
  const std::string t = csv_table({"x", "y"}, {{0.1, 2.0}});
  EXPECT_EQ(t, "x,y\n0.10000000000000001,2\n");
  EXPECT_THROW(csv_slice(g, 3, 0), ValidationError);
}

TEST(Commands, DeterministicReports) {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  for (const fs::path& d : {a, b}) {
    json j{{"command", "certify"}, {"mode", "discs"}, {"input", (kFixtures / "circle.json").string()},
           {"out_dir", d.string()}, {"budget", 4}, {"j_max", 2}};
    run_command(run_config_from_json(j));
  }
  // out_dir differs, so compare with it removed
  auto load = [](const fs::path& d) {
    json r = read_json(d / "certify.json");
    r["config"].erase("out_dir");
    return r.dump();
  };
  EXPECT_EQ(load(a), load(b));
  EXPECT_EQ(slurp(a / "discs.csv"), slurp(b / "discs.csv"));
  const json meta = read_json(a / "certify.meta.json");
  EXPECT_TRUE(meta.contains("started_utc"));
  EXPECT_FALSE(read_json(a / "certify.json").contains("started_utc"));
}

TEST(Commands, ExitCodes) {
  EXPECT_EQ(exit_code_for(ValidationError("x")), 2);
  EXPECT_EQ(exit_code_for(DomainError("x")), 2);
  EXPECT_EQ(exit_code_for(NumericalError("x")), 3);
  EXPECT_EQ(exit_code_for(IoError("x")), 4);
  EXPECT_EQ(exit_code_for(std::runtime_error("x")), 1);
  try {
    [[maybe_unused]] const json j = json::parse("{");
  } catch (const json::exception& e) {
    EXPECT_EQ(exit_code_for(e), 2);
  }
}
