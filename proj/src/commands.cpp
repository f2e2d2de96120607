#include "hullkit/commands.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "hullkit/certificates.hpp"
#include "hullkit/error.hpp"
#include "hullkit/null_envelope.hpp"
#include "hullkit/psh.hpp"

namespace hullkit {

namespace {

json vec3(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json cvec3(const Vec3C& z) {
  json a = json::array();
  for (int i = 0; i < 3; ++i) a.push_back(json::array({z[i].real(), z[i].imag()}));
  return a;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

PointCloudFile load_cloud(const RunConfig& cfg, const char* space) {
  if (cfg.input.empty()) throw ValidationError("--input is required");
  PointCloudFile pc = point_cloud_from_json(read_json(cfg.input));
  if (pc.space != space) throw ValidationError(std::string("expected a point cloud in ") + space);
  return pc;
}

void require_inside(std::span<const Vec3R> k, const ConvexDomain& omega) {
  for (const auto& x : k) {
    if (!omega.contains(x)) throw ValidationError("K is not contained in omega");
  }
}

Box box_around(double half_width) { return Box::cube(3, half_width); }

// Box for polynomial test functions covering the omega bounding box.
Box suite_box(const ConvexDomain& omega) {
  const double w = std::max(omega.bbox_hi().cwiseAbs().maxCoeff(), omega.bbox_lo().cwiseAbs().maxCoeff());
  return box_around(w + 1.0);
}

SearchOptions search_options(const RunConfig& cfg) {
  SearchOptions o;
  o.degree = cfg.degree;
  o.restarts = cfg.budget;
  o.seed = cfg.seed;
  o.workers = cfg.workers;
  if (cfg.delta) o.delta = o.tolerance = *cfg.delta;
  return o;
}

// ------------------------------------------------------------------ commands

CommandOutput hull_minimal(const RunConfig& cfg) {
  const PointCloudFile pc = load_cloud(cfg, "R3");
  const ConvexDomain omega = cfg.omega.domain();
  require_inside(pc.real, omega);
  EnvelopeConfig ec;
  ec.frames = cfg.frames;
  ec.seed = cfg.seed;
  ec.max_sweeps = cfg.sweeps;
  ec.tolerance = cfg.tol;
  ec.workers = cfg.workers;
  const double h = Grid3::over(omega, cfg.resolution).h();
  const double delta = cfg.delta.value_or(2.0 * h);
  const HullResult hr = extremal_hull_field(pc.real, omega, delta, cfg.resolution, ec, cfg.threshold);

  // Reference set: nodes inside Co(K) (slack half a cell diagonal).
  const ConvexSupport cs(pc.real);
  std::vector<Vec3R> hull_nodes;
  const Grid3& g = hr.run.field;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.inside(i) && convex_membership(cs, g.node(i), 0.5 * std::sqrt(3.0) * h)) hull_nodes.push_back(g.node(i));
  }

  CommandOutput out;
  out.flagged = !hr.run.converged;
  json members = json::array();
  for (const auto& x : hr.member_points) members.push_back(vec3(x));
  const std::size_t center = g.nearest_node(omega.center());
  out.report = {{"run", to_json(hr.run)},
                {"delta", hr.delta},
                {"threshold", hr.threshold},
                {"grid_spacing", h},
                {"member_count", hr.members.size()},
                {"members", members},
                {"k_node_count", hr.k_nodes.size()},
                {"k_nodes_are_members", hr.k_nodes_are_members},
                {"members_outside_hull", hr.members_outside_hull},
                {"sandwich", hr.sandwich},
                {"value_at_center_node", g[center]},
                {"hausdorff_to_convex_hull_nodes",
                 hull_nodes.empty() || hr.member_points.empty() ? json(nullptr)
                                                                : json(hausdorff(hr.member_points, hull_nodes))}};
  if (pc.real.size() == 2) {
    // Midpoint exclusion through an explicit minimal-psh minorant.
    const Vec3R mid = 0.5 * (pc.real[0] + pc.real[1]);
    const SeparationCertificate sc = separation_certificate(
        two_point_minorant(pc.real[0], pc.real[1], delta), PointCloud(pc.real), delta, omega, mid);
    out.report["separation"] = to_json(sc);
    out.report["separation"]["envelope_at_midpoint_node"] = g[g.nearest_node(mid)];
    out.report["separation"]["excludes_midpoint"] = sc.valid && sc.value_at_x > -1.0 + hr.threshold;
  }
  const auto n = g.shape();
  const auto dir = cfg.out_dir;
  write_json(dir / "field.json", to_json(g));
  write_text(dir / "slice_xy.csv", csv_slice(g, 2, n[2] / 2));
  write_text(dir / "slice_xz.csv", csv_slice(g, 1, n[1] / 2));
  std::vector<std::vector<double>> rows;
  for (const auto& x : hr.member_points) rows.push_back({x[0], x[1], x[2]});
  write_text(dir / "members.csv", csv_table({"x", "y", "z"}, rows));
  out.files = {dir / "field.json", dir / "slice_xy.csv", dir / "slice_xz.csv", dir / "members.csv"};
  out.summary = "members " + std::to_string(hr.members.size()) + ", sweeps " + std::to_string(hr.run.sweeps) +
                (hr.run.converged ? ", converged" : ", NOT converged") + ", sandwich " +
                (hr.sandwich ? "ok" : "violated");
  out.metadata["envelope_seconds"] = hr.run.seconds;
  return out;
}

CommandOutput check_psh(const RunConfig& cfg) {
  if (cfg.input.empty()) throw ValidationError("--input is required");
  const Polynomial p = polynomial_from_json(read_json(cfg.input));
  CommandOutput out;
  constexpr double kTol = 1e-10;
  if (p.dim() == 3) {
    const ConvexDomain omega = cfg.omega.domain();
    const Box box(Box{omega.bbox_lo(), omega.bbox_hi()});
    const ScalarFunction u = ScalarFunction::from_polynomial(p, box);
    const int m = std::min(cfg.resolution, 16);
    double worst = std::numeric_limits<double>::infinity();
    Vec3R arg = Vec3R::Zero();
    std::size_t count = 0;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        for (int k = 0; k < m; ++k) {
          const Vec3R t((i + 0.5) / m, (j + 0.5) / m, (k + 0.5) / m);
          const Vec3R x = omega.bbox_lo() + t.cwiseProduct(omega.bbox_hi() - omega.bbox_lo());
          if (!omega.contains(x)) continue;
          ++count;
          const double d = minimal_psh_defect(u, x);
          if (d < worst) {
            worst = d;
            arg = x;
          }
        }
      }
    }
    const bool pass = worst >= -kTol;
    out.report = {{"space", "R3"},
                  {"samples", count},
                  {"min_defect", worst},
                  {"argmin", vec3(arg)},
                  {"tolerance", kTol},
                  {"verdict", pass ? "PASS" : "FAIL"}};
    out.summary = std::string(pass ? "PASS" : "FAIL") + ", min defect " + fmt(worst);
  } else {
    const double r = cfg.ball_radius;
    const Box box = Box::cube(6, r + 1.0);
    const ScalarFunction u = ScalarFunction::from_polynomial(p, box);
    const auto dirs = sample_null_directions(1024, cfg.seed);
    std::vector<NullDirection> unit;
    for (const auto& d : dirs) unit.push_back(d.normalized());
    const auto pts = sample_ball_c3(64, r, cfg.seed);
    double worst = std::numeric_limits<double>::infinity();
    Vec3C wz = Vec3C::Zero(), wt = Vec3C::Zero();
    std::optional<double> certified;
    for (const auto& z : pts) {
      const NullPshVerdict v = is_null_psh_at(u, z, unit);
      if (v.min_value < worst) {
        worst = v.min_value;
        wz = z;
        wt = v.argmin;
      }
      if (const auto c = certified_null_levi_min(levi_matrix(u, z))) {
        certified = certified ? std::min(*certified, *c) : *c;
      }
    }
    const bool pass = worst >= -kTol && (!certified || *certified >= -kTol);
    out.report = {{"space", "C3"},
                  {"points", pts.size()},
                  {"directions", unit.size()},
                  {"min_levi", worst},
                  {"witness_point", cvec3(wz)},
                  {"witness_direction", cvec3(wt)},
                  {"certified_min_levi", certified ? json(*certified) : json(nullptr)},
                  {"tolerance", kTol},
                  {"verdict", pass ? "PASS" : "FAIL"}};
    out.summary = std::string(pass ? "PASS" : "FAIL") + ", min Levi " + fmt(worst);
  }
  return out;
}

json disc_diagnostics(const HarmonicDisc& d) {
  json j{{"dim", d.dim()}, {"degree", d.degree()}, {"center", vec3(d.center())}};
  j["immersion_ratio"] = immersion_ratio(d);
  if (d.dim() == 3) {
    j["conformality_residual"] = conformality_residual(d, 400);
    j["min_separation_ratio"] = min_separation_ratio(d, 200);
  }
  return j;
}

CommandOutput disc_command(const RunConfig& cfg) {
  CommandOutput out;
  if (cfg.mode == "generate") {
    CatalogParams cp;
    cp.rho = cfg.rho;
    cp.seed = cfg.seed;
    cp.degree = cfg.degree;
    const ConformalMinimalDisc d = catalog(cfg.disc, cp);
    json doc = to_json(d.map());
    doc["label"] = d.label();
    write_json(cfg.out_dir / "disc_out.json", doc);
    out.files.push_back(cfg.out_dir / "disc_out.json");
    out.report = {{"mode", "generate"}, {"label", d.label()}, {"diagnostics", disc_diagnostics(d.map())}};
    out.summary = "generated " + d.label();
  } else {
    if (cfg.input.empty()) throw ValidationError("--input is required");
    const json doc = read_json(cfg.input);
    const std::string kind = doc.is_object() && doc.contains("kind") && doc["kind"].is_string()
                                 ? doc["kind"].get<std::string>()
                                 : "";
    json diag;
    if (kind == "holomorphic") {
      const HolomorphicDisc f = holomorphic_disc_from_json(doc);
      diag = disc_diagnostics(f.as_real());
      diag["nullity_residual"] = nullity_residual(f, 400);
    } else if (kind == "harmonic") {
      diag = disc_diagnostics(harmonic_disc_from_json(doc));
    } else {
      throw ValidationError("kind must be \"harmonic\" or \"holomorphic\"");
    }
    out.report = {{"mode", "validate"}, {"diagnostics", diag}};
    out.summary = "immersion ratio " + fmt(diag["immersion_ratio"].get<double>());
  }
  return out;
}

HarmonicDisc disc_from_config(const RunConfig& cfg, std::string& label) {
  if (!cfg.input.empty()) {
    const json doc = read_json(cfg.input);
    label = doc.contains("label") && doc["label"].is_string() ? doc["label"].get<std::string>() : "input";
    if (doc.contains("kind") && doc["kind"] == "holomorphic") return holomorphic_disc_from_json(doc).as_real();
    return harmonic_disc_from_json(doc);
  }
  CatalogParams cp;
  cp.rho = cfg.rho;
  cp.seed = cfg.seed;
  cp.degree = std::max(cfg.degree, 1);
  const ConformalMinimalDisc d = catalog(cfg.disc, cp);
  label = d.label();
  return d.map();
}

CommandOutput green_command(const RunConfig& cfg) {
  std::string label;
  const HarmonicDisc d = disc_from_config(cfg, label);
  const GreenQuadrature q(cfg.quadrature[0], cfg.quadrature[1]);
  CommandOutput out;
  const MassValues m = mass(d, q);
  double sup = 0.0;
  for (int i = 0; i < 512; ++i) sup = std::max(sup, d.boundary(2.0 * std::numbers::pi * i / 512).norm());
  json checks = json::array();
  std::vector<std::vector<double>> rows;
  double worst = 0.0;
  if (d.dim() == 3) {
    const auto suite = polynomial_suite(box_around(2.0 * sup + 1.0));
    int idx = 0;
    for (const auto& t : suite) {
      const DdcCheck c = ddc_identity_check(d, t.u, q);
      json row = to_json(c);
      row["name"] = t.name;
      checks.push_back(row);
      rows.push_back({static_cast<double>(idx++), c.lhs, c.rhs, c.residual});
      worst = std::max(worst, c.residual);
    }
  }
  out.report = {{"disc", label},
                {"quadrature", {q.n_radial(), q.n_angular()}},
                {"green_of_one", green_scalar([](Complex) { return 1.0; }, q)},
                {"mass_interior", m.interior},
                {"mass_boundary", m.boundary},
                {"ddc", checks},
                {"max_ddc_residual", worst}};
  write_text(cfg.out_dir / "ddc.csv", csv_table({"index", "lhs", "rhs", "residual"}, rows));
  out.files.push_back(cfg.out_dir / "ddc.csv");
  out.summary = "mass " + fmt(m.interior) + " / " + fmt(m.boundary) + ", max dd^c residual " + fmt(worst);
  return out;
}

CommandOutput certify_command(const RunConfig& cfg) {
  const PointCloudFile pc = load_cloud(cfg, "R3");
  const ConvexDomain omega = cfg.omega.domain();
  require_inside(pc.real, omega);
  if (!omega.contains(cfg.point)) throw ValidationError("p is not in omega");
  const PointCloud k(pc.real);
  const SearchOptions opts = search_options(cfg);
  CommandOutput out;
  if (cfg.mode == "discs") {
    const DiscSequenceCertificate c = disc_sequence(cfg.point, k, omega, cfg.j_max, opts);
    out.report = to_json(c);
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0; j < c.entries.size(); ++j) {
      const auto& e = c.entries[j];
      rows.push_back({static_cast<double>(j + 1), e.tolerance, e.poisson, e.near_fraction, e.sup_norm});
    }
    write_text(cfg.out_dir / "discs.csv",
               csv_table({"j", "tolerance", "poisson", "near_fraction", "sup_norm"}, rows));
    out.files.push_back(cfg.out_dir / "discs.csv");
    out.summary = "best Poisson value at j=" + std::to_string(c.entries.size()) + ": " +
                  fmt(c.entries.back().poisson);
    return out;
  }
  const DiscEntry best = search_disc(cfg.point, k, omega, opts);
  json disc_doc = {{"poisson", best.poisson}, {"near_fraction", best.near_fraction},
                   {"tolerance", best.tolerance}, {"disc", to_json(best.disc.map())}};
  if (cfg.mode == "jensen") {
    const auto suite = minimal_psh_suite(suite_box(omega));
    try {
      const std::vector<HarmonicDisc> discs{best.disc.map()};
      const JensenCertificate c = certify_jensen(cfg.point, discs, k, opts.delta, suite);
      out.report = {{"status", c.pass ? "certified" : "inequality violated"},
                    {"certificate", to_json(c)},
                    {"search", disc_doc}};
      out.summary = std::string("Jensen ") + (c.pass ? "PASS" : "FAIL");
    } catch (const ValidationError& e) {
      // Absence of a good disc is not an exclusion proof.
      out.report = {{"status", "no certificate found within budget"},
                    {"reason", e.what()},
                    {"search", disc_doc}};
      out.summary = "no certificate found within budget";
    }
    return out;
  }
  const auto suite = polynomial_suite(suite_box(omega));
  const GreenQuadrature q(cfg.quadrature[0], cfg.quadrature[1]);
  const HessianFunctionalCertificate c = hessian_certificate(cfg.point, best.disc.map(), k, suite, q);
  out.report = {{"certificate", to_json(c)}, {"search", disc_doc}};
  out.summary = "max residual " + fmt(c.max_residual) + ", positivity " + (c.positivity ? "ok" : "violated");
  return out;
}

CommandOutput bochner_command(const RunConfig& cfg) {
  const PointCloudFile pc = load_cloud(cfg, "R3");
  BochnerOptions o;
  o.band_limit = cfg.band_limit;
  o.seed = cfg.seed;
  const BochnerReport r = bochner_stage(cfg.point, pc.real, cfg.j_max, o);
  CommandOutput out;
  out.report = to_json(r);
  std::vector<std::vector<double>> rows;
  for (const auto& w : r.rows) {
    rows.push_back({static_cast<double>(w.j), w.mass, w.max_residual, w.containment_margin, w.loop_mean_error,
                    w.center_error});
  }
  write_text(cfg.out_dir / "bochner.csv",
             csv_table({"j", "mass", "max_residual", "containment_margin", "loop_mean_error", "center_error"},
                       rows));
  out.files.push_back(cfg.out_dir / "bochner.csv");
  out.summary = "mass ratio sup/j=1 " + fmt(r.mass_ratio);
  return out;
}

CommandOutput envelope_null_command(const RunConfig& cfg) {
  if (cfg.input.empty()) throw ValidationError("--input is required");
  const Polynomial p = polynomial_from_json(read_json(cfg.input));
  if (p.dim() != 6) throw ValidationError("envelope-null needs a C3 polynomial");
  const ScalarFunction u = ScalarFunction::from_polynomial(p, Box::cube(6, cfg.ball_radius + 1.0));
  const auto pts = sample_ball_c3(static_cast<std::size_t>(cfg.samples), cfg.ball_radius, cfg.seed);
  std::vector<double> vals;
  vals.reserve(pts.size());
  for (const auto& z : pts) vals.push_back(u(to_real6(z)));
  const CloudInterpolant field(pts, vals, 40, cfg.workers);
  const auto dirs = sample_null_directions(cfg.directions, cfg.seed);
  const std::vector<double> radii{cfg.radius};
  const NullStepResult step = bs_step_null(field, dirs, radii, 8, cfg.ball_radius, cfg.workers);
  double max_change = 0.0;
  std::size_t decreased = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!step.admissible[i]) continue;
    const double d = vals[i] - step.values[i];
    max_change = std::max(max_change, std::abs(d));
    if (d > 0.0) ++decreased;
  }
  const double frac = step.n_admissible ? static_cast<double>(decreased) / step.n_admissible : 0.0;
  CommandOutput out;
  out.report = {{"samples", pts.size()},
                {"directions", dirs.size()},
                {"radius", cfg.radius},
                {"admissible", step.n_admissible},
                {"skipped", step.n_skipped},
                {"max_change", max_change},
                {"decreased", decreased},
                {"decreased_fraction", frac}};
  out.summary = "max change " + fmt(max_change) + ", decreased at " + fmt(100.0 * frac) + "% of admissible samples";
  return out;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

CommandOutput run_command(const RunConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  CommandOutput out;
  if (cfg.command == "hull-minimal") {
    out = hull_minimal(cfg);
  } else if (cfg.command == "check-psh") {
    out = check_psh(cfg);
  } else if (cfg.command == "disc") {
    out = disc_command(cfg);
  } else if (cfg.command == "green") {
    out = green_command(cfg);
  } else if (cfg.command == "certify") {
    out = certify_command(cfg);
  } else if (cfg.command == "bochner") {
    out = bochner_command(cfg);
  } else {
    out = envelope_null_command(cfg);
  }
  out.report["version"] = kFormatVersion;
  out.report["command"] = cfg.command;
  out.report["config"] = to_json(cfg);
  out.report["flagged"] = out.flagged;

  out.metadata["started_utc"] = started;
  out.metadata["elapsed_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.metadata["floor"] = floor_value();
  const auto report_path = cfg.out_dir / (cfg.command + ".json");
  const auto meta_path = cfg.out_dir / (cfg.command + ".meta.json");
  write_json(report_path, out.report);
  write_json(meta_path, out.metadata);
  out.files.insert(out.files.begin(), {report_path, meta_path});
  return out;
}

int exit_code_for(const std::exception& e) {
  if (const auto* he = dynamic_cast<const Error*>(&e)) return he->exit_code();
  if (dynamic_cast<const nlohmann::json::exception*>(&e)) return 2;
  if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return 4;
  return 1;
}

}  // namespace hullkit
