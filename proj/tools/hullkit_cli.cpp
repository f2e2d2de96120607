// hullkit command-line front end. Flags are merged over an optional --config
// JSON file, then the whole config is validated before anything runs.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hullkit/commands.hpp"
#include "hullkit/error.hpp"

namespace {

std::vector<double> parse_list(const std::string& s, std::size_t n, const char* what) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw hullkit::ValidationError(std::string(what) + ": not a number: " + item);
    }
  }
  if (v.size() != n) {
    throw hullkit::ValidationError(std::string(what) + ": expected " + std::to_string(n) + " comma-separated values");
  }
  return v;
}

struct Flags {
  std::string config, input, out_dir, quadrature, point, omega_box, disc, mode;
  int resolution = 0, sweeps = 0, budget = 0, workers = 0, j_max = 0, degree = 0, frames = 0, samples = 0,
      directions = 0, band_limit = 0;
  double tol = 0, delta = 0, threshold = 0, radius = 0, ball_radius = 0, omega_radius = 0, rho = 0;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "JSON run config; flags override its keys");
  app->add_option("--input", f.input, "input file (point cloud, polynomial or disc JSON)");
  app->add_option("--out-dir", f.out_dir, "output directory");
  app->add_option("--resolution", f.resolution, "grid nodes per axis");
  app->add_option("--sweeps", f.sweeps, "maximum sweeps");
  app->add_option("--tol", f.tol, "sweep convergence tolerance");
  app->add_option("--seed", f.seed, "random seed");
  app->add_option("--budget", f.budget, "disc-search restarts");
  app->add_option("--workers", f.workers, "worker threads");
  app->add_option("--quadrature", f.quadrature, "radial,angular Green quadrature sizes");
  app->add_option("--point", f.point, "x,y,z of p");
  app->add_option("--delta", f.delta, "obstacle thickening / near tolerance");
  app->add_option("--threshold", f.threshold, "membership threshold above -1");
  app->add_option("--omega-radius", f.omega_radius, "omega = ball of this radius about the origin");
  app->add_option("--omega-box", f.omega_box, "omega = box x0,y0,z0,x1,y1,z1");
  app->add_option("--j-max", f.j_max, "largest j");
  app->add_option("--degree", f.degree, "spinor degree");
  app->add_option("--frames", f.frames, "envelope frames");
  app->add_option("--samples", f.samples, "C^3 sample count");
  app->add_option("--directions", f.directions, "null directions");
  app->add_option("--radius", f.radius, "C^3 circle radius");
  app->add_option("--ball-radius", f.ball_radius, "C^3 sample ball radius");
  app->add_option("--disc", f.disc, "catalog disc name");
  app->add_option("--rho", f.rho, "catalog dilation");
  app->add_option("--band-limit", f.band_limit, "loop band limit");
}

hullkit::json to_config(const std::string& command, CLI::App* app, const Flags& f) {
  using hullkit::json;
  json j = f.config.empty() ? json::object() : hullkit::read_json(f.config);
  if (!j.is_object()) throw hullkit::ValidationError("config must be a JSON object");
  j["command"] = command;
  auto given = [&](const char* name) { return app->count(name) > 0; };
  if (!f.mode.empty()) j["mode"] = f.mode;
  if (given("--input")) j["input"] = f.input;
  if (given("--out-dir")) j["out_dir"] = f.out_dir;
  if (given("--resolution")) j["resolution"] = f.resolution;
  if (given("--sweeps")) j["sweeps"] = f.sweeps;
  if (given("--tol")) j["tol"] = f.tol;
  if (given("--seed")) j["seed"] = f.seed;
  if (given("--budget")) j["budget"] = f.budget;
  if (given("--workers")) j["workers"] = f.workers;
  if (given("--quadrature")) {
    const auto q = parse_list(f.quadrature, 2, "--quadrature");
    j["quadrature"] = {static_cast<int>(q[0]), static_cast<int>(q[1])};
  }
  if (given("--point")) j["point"] = parse_list(f.point, 3, "--point");
  if (given("--delta")) j["delta"] = f.delta;
  if (given("--threshold")) j["threshold"] = f.threshold;
  if (given("--omega-radius")) j["omega"] = {{"kind", "ball"}, {"center", {0, 0, 0}}, {"radius", f.omega_radius}};
  if (given("--omega-box")) {
    const auto b = parse_list(f.omega_box, 6, "--omega-box");
    j["omega"] = {{"kind", "box"}, {"lo", {b[0], b[1], b[2]}}, {"hi", {b[3], b[4], b[5]}}};
  }
  if (given("--j-max")) j["j_max"] = f.j_max;
  if (given("--degree")) j["degree"] = f.degree;
  if (given("--frames")) j["frames"] = f.frames;
  if (given("--samples")) j["samples"] = f.samples;
  if (given("--directions")) j["directions"] = f.directions;
  if (given("--radius")) j["radius"] = f.radius;
  if (given("--ball-radius")) j["ball_radius"] = f.ball_radius;
  if (given("--disc")) j["disc"] = f.disc;
  if (given("--rho")) j["rho"] = f.rho;
  if (given("--band-limit")) j["band_limit"] = f.band_limit;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hullkit: minimal hulls, null envelopes, discs and certificates"};
  app.require_subcommand(1);
  Flags f;
  const std::vector<std::string> names{"hull-minimal", "check-psh", "disc",         "green",
                                       "certify",      "bochner",   "envelope-null"};
  std::vector<CLI::App*> subs;
  for (const auto& n : names) {
    CLI::App* s = app.add_subcommand(n);
    add_common(s, f);
    if (n == "disc") s->add_option("mode", f.mode, "generate | validate")->required();
    if (n == "certify") s->add_option("mode", f.mode, "discs | jensen | hessian")->required();
    subs.push_back(s);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      const hullkit::RunConfig cfg = hullkit::run_config_from_json(to_config(names[i], subs[i], f));
      const hullkit::CommandOutput out = hullkit::run_command(cfg);
      std::cout << names[i] << ": " << out.summary << "\n";
      for (const auto& p : out.files) std::cout << "  wrote " << p.string() << "\n";
      return out.flagged ? 3 : 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hullkit::exit_code_for(e);
  }
  return 1;
}
