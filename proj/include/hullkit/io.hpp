#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hullkit/certificates.hpp"
#include "hullkit/disc.hpp"
#include "hullkit/envelope.hpp"
#include "hullkit/geometry.hpp"
#include "hullkit/green.hpp"
#include "hullkit/loop.hpp"
#include "hullkit/polynomial.hpp"

namespace hullkit {

using json = nlohmann::json;

/// Version tag written into every document and required when reading.
inline constexpr int kFormatVersion = 1;

json read_json(const std::filesystem::path& path);
/// Pretty-printed, keys sorted, trailing newline.
void write_json(const std::filesystem::path& path, const json& doc);
void write_text(const std::filesystem::path& path, const std::string& text);

// ------------------------------------------------------------ point clouds

/// {"space": "R3"|"C3", "points": [...], "name"?}. Complex coordinates are
/// [re, im] pairs.
struct PointCloudFile {
  std::string space = "R3";
  std::string name;
  std::vector<Vec3R> real;     // space R3
  std::vector<Vec3C> complex;  // space C3
};

PointCloudFile point_cloud_from_json(const json& j);
json to_json(const PointCloudFile& pc);

// ------------------------------------------------------------ polynomials

/// {"space": "R3"|"C3", "terms": [{"coef": c, "powers": [...]}]}; C3
/// powers refer to (x1, y1, x2, y2, x3, y3).
Polynomial polynomial_from_json(const json& j);
json to_json(const Polynomial& p);

// ------------------------------------------------------------ fields and discs

json to_json(const Grid3& g);
Grid3 grid_from_json(const json& j);

json to_json(const HarmonicDisc& d);
HarmonicDisc harmonic_disc_from_json(const json& j);
json to_json(const HolomorphicDisc& d);
HolomorphicDisc holomorphic_disc_from_json(const json& j);

json to_json(const BoundaryLoop& loop);
BoundaryLoop boundary_loop_from_json(const json& j);

// ------------------------------------------------------------ certificates

json to_json(const DiscSequenceCertificate& c);
DiscSequenceCertificate disc_sequence_from_json(const json& j);
json to_json(const JensenCertificate& c);
JensenCertificate jensen_from_json(const json& j);
json to_json(const HessianFunctionalCertificate& c);
HessianFunctionalCertificate hessian_certificate_from_json(const json& j);
json to_json(const BochnerReport& r);
json to_json(const SeparationCertificate& c);
json to_json(const DdcCheck& c);
json to_json(const IterateResult& r, bool include_field = false);

// ------------------------------------------------------------ CSV

/// Plane slice of a grid; axis 0..2 is held at `index`, columns are the two
/// remaining coordinates, value and inside.
std::string csv_slice(const Grid3& g, int axis, int index);

/// Header line plus rows, numbers with 17 significant digits.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

// ------------------------------------------------------------ run config

struct OmegaSpec {
  std::string kind = "ball";  // "ball" | "box"
  Vec3R center = Vec3R::Zero();
  double radius = 2.0;
  Vec3R lo = Vec3R::Constant(-2.0);
  Vec3R hi = Vec3R::Constant(2.0);

  ConvexDomain domain() const;
};

/// One command invocation. Every key is optional except "command"; unknown
/// keys are rejected.
struct RunConfig {
  std::string command;
  std::string mode;                 // disc: generate|validate; certify: discs|jensen|hessian
  std::filesystem::path input;
  std::filesystem::path out_dir = ".";
  int resolution = 64;
  int sweeps = 200;
  double tol = 1e-4;
  std::uint64_t seed = 7;
  int budget = 64;                  // search restarts
  int workers = 1;
  std::array<int, 2> quadrature{64, 256};
  OmegaSpec omega;
  std::optional<double> delta;      // obstacle thickening; default 2h or 0.05
  double threshold = 0.1;           // membership: value <= -1 + threshold
  Vec3R point = Vec3R::Zero();      // p
  int j_max = 8;
  int degree = 1;
  int frames = 32;
  int samples = 100000;
  int directions = 16;
  double radius = 0.1;              // envelope-null circle radius
  double ball_radius = 1.0;         // envelope-null sample ball in C^3
  std::string disc = "flat";        // catalog name
  double rho = 1.0;
  int band_limit = 1024;

  void validate() const;
};

RunConfig run_config_from_json(const json& j);
json to_json(const RunConfig& cfg);

}  // namespace hullkit
