#include "hullkit/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include "hullkit/error.hpp"

namespace hullkit {

namespace {

// Non-finite doubles are written as strings so they survive a round trip.
json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double get_num(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ValidationError(what + ": expected a number");
}

double get_finite(const json& j, const std::string& what) {
  const double v = get_num(j, what);
  if (!std::isfinite(v)) throw ValidationError(what + ": expected a finite number");
  return v;
}

long long get_int(const json& j, const std::string& what) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) {
    throw ValidationError(what + ": expected an integer");
  }
  return j.get<long long>();
}

std::string get_string(const json& j, const std::string& what) {
  if (!j.is_string()) throw ValidationError(what + ": expected a string");
  return j.get<std::string>();
}

bool get_bool(const json& j, const std::string& what) {
  if (!j.is_boolean()) throw ValidationError(what + ": expected true or false");
  return j.get<bool>();
}

const json& field(const json& j, const std::string& key) {
  if (!j.is_object()) throw ValidationError("expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw ValidationError("missing key \"" + key + "\"");
  return *it;
}

void only_keys(const json& j, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ValidationError("expected a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) throw ValidationError("unknown key \"" + k + "\"");
  }
}

void check_version(const json& j) {
  if (j.contains("version") && get_int(j["version"], "version") != kFormatVersion) {
    throw ValidationError("unsupported format version");
  }
}

json vec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v[i]));
  return a;
}

Eigen::VectorXd get_vec(const json& j, int n, const std::string& what) {
  if (!j.is_array() || (n >= 0 && static_cast<int>(j.size()) != n)) {
    throw ValidationError(what + ": expected an array of " + std::to_string(n) + " numbers");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = get_finite(j[i], what);
  return v;
}

Vec3R get_vec3(const json& j, const std::string& what) { return get_vec(j, 3, what); }

json cplx(Complex z) { return json::array({num(z.real()), num(z.imag())}); }

Complex get_cplx(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) throw ValidationError(what + ": complex values are [re, im]");
  return {get_finite(j[0], what), get_finite(j[1], what)};
}

json series(const Series& s) {
  json a = json::array();
  for (const Complex& z : s) a.push_back(cplx(z));
  return a;
}

Series get_series(const json& j, const std::string& what) {
  if (!j.is_array()) throw ValidationError(what + ": expected an array of coefficients");
  Series s;
  for (const auto& z : j) s.push_back(get_cplx(z, what));
  return s;
}

json points3(const std::vector<Vec3R>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back(vec(p));
  return a;
}

std::vector<Vec3R> get_points3(const json& j, const std::string& what) {
  if (!j.is_array()) throw ValidationError(what + ": expected an array of points");
  std::vector<Vec3R> pts;
  for (const auto& p : j) pts.push_back(get_vec3(p, what));
  return pts;
}

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::vector<double> get_numbers(const json& j, const std::string& what) {
  if (!j.is_array()) throw ValidationError(what + ": expected an array of numbers");
  std::vector<double> v;
  for (const auto& x : j) v.push_back(get_num(x, what));
  return v;
}

json search_options(const SearchOptions& o) {
  return {{"degree", o.degree},     {"restarts", o.restarts},     {"seed", o.seed},
          {"delta", num(o.delta)},  {"tolerance", num(o.tolerance)}, {"lambda", num(o.lambda)},
          {"shaping", num(o.shaping)}, {"penalty", num(o.penalty)}, {"max_rounds", o.max_rounds},
          {"n_boundary", o.n_boundary}, {"workers", o.workers}};
}

SearchOptions get_search_options(const json& j) {
  SearchOptions o;
  o.degree = static_cast<int>(get_int(field(j, "degree"), "degree"));
  o.restarts = static_cast<int>(get_int(field(j, "restarts"), "restarts"));
  o.seed = field(j, "seed").get<std::uint64_t>();
  o.delta = get_num(field(j, "delta"), "delta");
  o.tolerance = get_num(field(j, "tolerance"), "tolerance");
  o.lambda = get_num(field(j, "lambda"), "lambda");
  o.shaping = get_num(field(j, "shaping"), "shaping");
  o.penalty = get_num(field(j, "penalty"), "penalty");
  o.max_rounds = static_cast<int>(get_int(field(j, "max_rounds"), "max_rounds"));
  o.n_boundary = static_cast<int>(get_int(field(j, "n_boundary"), "n_boundary"));
  o.workers = static_cast<int>(get_int(field(j, "workers"), "workers"));
  return o;
}

}  // namespace

// ------------------------------------------------------------ files

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

void write_json(const std::filesystem::path& path, const json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

// ------------------------------------------------------------ point clouds

PointCloudFile point_cloud_from_json(const json& j) {
  only_keys(j, {"version", "space", "points", "name"});
  check_version(j);
  PointCloudFile pc;
  pc.space = get_string(field(j, "space"), "space");
  if (j.contains("name")) pc.name = get_string(j["name"], "name");
  const json& pts = field(j, "points");
  if (!pts.is_array()) throw ValidationError("points: expected an array");
  if (pts.empty()) throw ValidationError("empty point set");
  if (pc.space == "R3") {
    pc.real = get_points3(pts, "points");
  } else if (pc.space == "C3") {
    for (const auto& p : pts) {
      if (!p.is_array() || p.size() != 3) throw ValidationError("points: C3 points have 3 coordinates");
      pc.complex.emplace_back(get_cplx(p[0], "points"), get_cplx(p[1], "points"), get_cplx(p[2], "points"));
    }
  } else {
    throw ValidationError("space must be \"R3\" or \"C3\"");
  }
  return pc;
}

json to_json(const PointCloudFile& pc) {
  json j{{"version", kFormatVersion}, {"space", pc.space}};
  if (!pc.name.empty()) j["name"] = pc.name;
  if (pc.space == "C3") {
    json a = json::array();
    for (const auto& z : pc.complex) a.push_back(json::array({cplx(z[0]), cplx(z[1]), cplx(z[2])}));
    j["points"] = a;
  } else {
    j["points"] = points3(pc.real);
  }
  return j;
}

// ------------------------------------------------------------ polynomials

Polynomial polynomial_from_json(const json& j) {
  only_keys(j, {"version", "space", "terms", "name"});
  check_version(j);
  const std::string space = j.contains("space") ? get_string(j["space"], "space") : "R3";
  int dim;
  if (space == "R3") {
    dim = 3;
  } else if (space == "C3") {
    dim = 6;
  } else {
    throw ValidationError("space must be \"R3\" or \"C3\"");
  }
  const json& terms = field(j, "terms");
  if (!terms.is_array()) throw ValidationError("terms: expected an array");
  Polynomial p(dim);
  for (const auto& t : terms) {
    only_keys(t, {"coef", "powers"});
    const double c = get_finite(field(t, "coef"), "coef");
    const json& pw = field(t, "powers");
    if (!pw.is_array() || static_cast<int>(pw.size()) != dim) {
      throw ValidationError("powers: expected " + std::to_string(dim) + " exponents");
    }
    Polynomial::Powers powers{};
    for (int i = 0; i < dim; ++i) {
      const long long e = get_int(pw[static_cast<std::size_t>(i)], "powers");
      if (e < 0 || e > 16) throw ValidationError("powers: exponents must lie in 0..16");
      powers[static_cast<std::size_t>(i)] = static_cast<int>(e);
    }
    p.add_term(c, powers);
  }
  return p;
}

json to_json(const Polynomial& p) {
  json terms = json::array();
  for (const auto& t : p.terms()) {
    json pw = json::array();
    for (int i = 0; i < p.dim(); ++i) pw.push_back(t.powers[static_cast<std::size_t>(i)]);
    terms.push_back({{"coef", num(t.coef)}, {"powers", pw}});
  }
  return {{"version", kFormatVersion}, {"space", p.dim() == 6 ? "C3" : "R3"}, {"terms", terms}};
}

// ------------------------------------------------------------ fields and discs

json to_json(const Grid3& g) {
  json mask = json::array();
  for (auto m : g.mask()) mask.push_back(static_cast<int>(m));
  const auto n = g.shape();
  return {{"version", kFormatVersion},
          {"lo", vec(g.lo())},
          {"hi", vec(g.hi())},
          {"shape", {n[0], n[1], n[2]}},
          {"values", numbers(g.values())},
          {"mask", mask}};
}

Grid3 grid_from_json(const json& j) {
  only_keys(j, {"version", "lo", "hi", "shape", "values", "mask"});
  check_version(j);
  const json& sh = field(j, "shape");
  if (!sh.is_array() || sh.size() != 3) throw ValidationError("shape: expected 3 integers");
  std::array<int, 3> n{};
  for (int i = 0; i < 3; ++i) {
    n[static_cast<std::size_t>(i)] = static_cast<int>(get_int(sh[static_cast<std::size_t>(i)], "shape"));
  }
  Grid3 g(get_vec3(field(j, "lo"), "lo"), get_vec3(field(j, "hi"), "hi"), n);
  const auto values = get_numbers(field(j, "values"), "values");
  if (values.size() != g.size()) throw ValidationError("values: length does not match shape");
  g.values() = values;
  const json& m = field(j, "mask");
  if (!m.is_array() || m.size() != g.size()) throw ValidationError("mask: length does not match shape");
  std::vector<std::uint8_t> mask;
  for (const auto& x : m) mask.push_back(get_int(x, "mask") != 0 ? 1 : 0);
  g.set_mask(std::move(mask));
  return g;
}

json to_json(const HarmonicDisc& d) {
  json gens = json::array();
  for (const auto& s : d.generators()) gens.push_back(series(s));
  return {{"version", kFormatVersion}, {"kind", "harmonic"}, {"generators", gens}};
}

HarmonicDisc harmonic_disc_from_json(const json& j) {
  only_keys(j, {"version", "kind", "generators", "label"});
  check_version(j);
  if (get_string(field(j, "kind"), "kind") != "harmonic") throw ValidationError("kind: expected \"harmonic\"");
  const json& g = field(j, "generators");
  if (!g.is_array() || g.empty()) throw ValidationError("generators: expected a non-empty array");
  std::vector<Series> gens;
  for (const auto& s : g) gens.push_back(get_series(s, "generators"));
  return HarmonicDisc(std::move(gens));
}

json to_json(const HolomorphicDisc& d) {
  json comps = json::array();
  for (const auto& s : d.components()) comps.push_back(series(s));
  return {{"version", kFormatVersion}, {"kind", "holomorphic"}, {"components", comps}};
}

HolomorphicDisc holomorphic_disc_from_json(const json& j) {
  only_keys(j, {"version", "kind", "components", "label"});
  check_version(j);
  if (get_string(field(j, "kind"), "kind") != "holomorphic") {
    throw ValidationError("kind: expected \"holomorphic\"");
  }
  const json& c = field(j, "components");
  if (!c.is_array() || c.empty()) throw ValidationError("components: expected a non-empty array");
  std::vector<Series> comps;
  for (const auto& s : c) comps.push_back(get_series(s, "components"));
  return HolomorphicDisc(std::move(comps));
}

json to_json(const BoundaryLoop& loop) {
  json comps = json::array();
  for (int c = 0; c < loop.components(); ++c) {
    json row = json::array();
    for (int k = -loop.band_limit(); k <= loop.band_limit(); ++k) row.push_back(cplx(loop.coeff(c, k)));
    comps.push_back(row);
  }
  return {{"version", kFormatVersion},
          {"kind", "loop"},
          {"band_limit", loop.band_limit()},
          {"real", loop.is_real()},
          {"coefficients", comps}};
}

BoundaryLoop boundary_loop_from_json(const json& j) {
  only_keys(j, {"version", "kind", "band_limit", "real", "coefficients"});
  check_version(j);
  if (get_string(field(j, "kind"), "kind") != "loop") throw ValidationError("kind: expected \"loop\"");
  const int n = static_cast<int>(get_int(field(j, "band_limit"), "band_limit"));
  const bool real = get_bool(field(j, "real"), "real");
  const json& cs = field(j, "coefficients");
  if (!cs.is_array() || cs.empty()) throw ValidationError("coefficients: expected a non-empty array");
  BoundaryLoop loop(static_cast<int>(cs.size()), n, real);
  for (std::size_t c = 0; c < cs.size(); ++c) {
    const Series s = get_series(cs[c], "coefficients");
    if (static_cast<int>(s.size()) != 2 * n + 1) throw ValidationError("coefficients: expected 2N+1 values");
    // Real loops mirror negative frequencies; set k >= 0 only.
    for (int k = real ? 0 : -n; k <= n; ++k) {
      loop.set_coeff(static_cast<int>(c), k, s[static_cast<std::size_t>(k + n)]);
    }
  }
  return loop;
}

// ------------------------------------------------------------ certificates

json to_json(const DiscSequenceCertificate& c) {
  json entries = json::array();
  for (const auto& e : c.entries) {
    json disc = to_json(e.disc.map());
    entries.push_back({{"disc", disc},
                       {"label", e.disc.label()},
                       {"a", series(e.a)},
                       {"b", series(e.b)},
                       {"poisson", num(e.poisson)},
                       {"near_fraction", num(e.near_fraction)},
                       {"tolerance", num(e.tolerance)},
                       {"sup_norm", num(e.sup_norm)},
                       {"inside", e.inside},
                       {"objective", num(e.objective)},
                       {"restart", e.restart}});
  }
  return {{"version", kFormatVersion},
          {"kind", "disc-sequence"},
          {"p", vec(c.p)},
          {"options", search_options(c.options)},
          {"entries", entries}};
}

DiscSequenceCertificate disc_sequence_from_json(const json& j) {
  only_keys(j, {"version", "kind", "p", "options", "entries"});
  check_version(j);
  DiscSequenceCertificate c;
  c.p = get_vec3(field(j, "p"), "p");
  c.options = get_search_options(field(j, "options"));
  for (const auto& e : field(j, "entries")) {
    DiscEntry d;
    d.disc = ConformalMinimalDisc::unchecked(harmonic_disc_from_json(field(e, "disc")),
                                             get_string(field(e, "label"), "label"));
    d.a = get_series(field(e, "a"), "a");
    d.b = get_series(field(e, "b"), "b");
    d.poisson = get_num(field(e, "poisson"), "poisson");
    d.near_fraction = get_num(field(e, "near_fraction"), "near_fraction");
    d.tolerance = get_num(field(e, "tolerance"), "tolerance");
    d.sup_norm = get_num(field(e, "sup_norm"), "sup_norm");
    d.inside = get_bool(field(e, "inside"), "inside");
    d.objective = get_num(field(e, "objective"), "objective");
    d.restart = static_cast<int>(get_int(field(e, "restart"), "restart"));
    c.entries.push_back(std::move(d));
  }
  return c;
}

json to_json(const JensenCertificate& c) {
  json rows = json::array();
  for (const auto& r : c.rows) {
    rows.push_back({{"name", r.name},
                    {"value_at_p", num(r.value_at_p)},
                    {"integral", num(r.integral)},
                    {"max_on_k", num(r.max_on_k)},
                    {"holds", r.holds}});
  }
  return {{"version", kFormatVersion}, {"kind", "jensen"},  {"p", vec(c.p)},
          {"atoms", points3(c.atoms)},  {"weights", numbers(c.weights)},
          {"dropped", c.dropped},       {"delta", num(c.delta)}, {"eps", num(c.eps)},
          {"rows", rows},               {"pass", c.pass}};
}

JensenCertificate jensen_from_json(const json& j) {
  only_keys(j, {"version", "kind", "p", "atoms", "weights", "dropped", "delta", "eps", "rows", "pass"});
  check_version(j);
  JensenCertificate c;
  c.p = get_vec3(field(j, "p"), "p");
  c.atoms = get_points3(field(j, "atoms"), "atoms");
  c.weights = get_numbers(field(j, "weights"), "weights");
  c.dropped = static_cast<std::size_t>(get_int(field(j, "dropped"), "dropped"));
  c.delta = get_num(field(j, "delta"), "delta");
  c.eps = get_num(field(j, "eps"), "eps");
  for (const auto& r : field(j, "rows")) {
    c.rows.push_back(JensenRow{get_string(field(r, "name"), "name"),
                               get_num(field(r, "value_at_p"), "value_at_p"),
                               get_num(field(r, "integral"), "integral"),
                               get_num(field(r, "max_on_k"), "max_on_k"),
                               get_bool(field(r, "holds"), "holds")});
  }
  c.pass = get_bool(field(j, "pass"), "pass");
  return c;
}

json to_json(const HessianFunctionalCertificate& c) {
  json rows = json::array();
  for (const auto& r : c.rows) {
    rows.push_back({{"name", r.name},
                    {"functional", num(r.functional)},
                    {"measure_side", num(r.measure_side)},
                    {"residual", num(r.residual)},
                    {"minimal_psh", r.minimal_psh},
                    {"positive", r.positive}});
  }
  return {{"version", kFormatVersion},
          {"kind", "hessian-functional"},
          {"p", vec(c.p)},
          {"atoms", points3(c.atoms)},
          {"weights", numbers(c.weights)},
          {"max_atom_distance_to_k", num(c.max_atom_distance_to_k)},
          {"rows", rows},
          {"max_residual", num(c.max_residual)},
          {"positivity", c.positivity}};
}

HessianFunctionalCertificate hessian_certificate_from_json(const json& j) {
  only_keys(j, {"version", "kind", "p", "atoms", "weights", "max_atom_distance_to_k", "rows",
                "max_residual", "positivity"});
  check_version(j);
  HessianFunctionalCertificate c;
  c.p = get_vec3(field(j, "p"), "p");
  c.atoms = get_points3(field(j, "atoms"), "atoms");
  c.weights = get_numbers(field(j, "weights"), "weights");
  c.max_atom_distance_to_k = get_num(field(j, "max_atom_distance_to_k"), "max_atom_distance_to_k");
  for (const auto& r : field(j, "rows")) {
    c.rows.push_back(HessianRow{get_string(field(r, "name"), "name"),
                                get_num(field(r, "functional"), "functional"),
                                get_num(field(r, "measure_side"), "measure_side"),
                                get_num(field(r, "residual"), "residual"),
                                get_bool(field(r, "minimal_psh"), "minimal_psh"),
                                get_bool(field(r, "positive"), "positive")});
  }
  c.max_residual = get_num(field(j, "max_residual"), "max_residual");
  c.positivity = get_bool(field(j, "positivity"), "positivity");
  return c;
}

json to_json(const BochnerReport& r) {
  json rows = json::array();
  for (const auto& w : r.rows) {
    rows.push_back({{"j", w.j},
                    {"thickening", num(w.thickening)},
                    {"anchors", w.anchors},
                    {"loop_mean_error", num(w.loop_mean_error)},
                    {"center_error", num(w.center_error)},
                    {"max_boundary_distance", num(w.max_boundary_distance)},
                    {"containment_margin", num(w.containment_margin)},
                    {"mass", num(w.mass)},
                    {"max_residual", num(w.max_residual)},
                    {"eps_loop", num(w.eps_loop)}});
  }
  return {{"version", kFormatVersion},
          {"kind", "bochner"},
          {"p", vec(r.p)},
          {"options",
           {{"band_limit", r.options.band_limit},
            {"transit_fraction", num(r.options.transit_fraction)},
            {"samples_per_point", r.options.samples_per_point},
            {"k_anchors", r.options.k_anchors},
            {"seed", r.options.seed}}},
          {"rows", rows},
          {"mass_ratio", num(r.mass_ratio)}};
}

json to_json(const SeparationCertificate& c) {
  return {{"version", kFormatVersion},
          {"kind", "separation"},
          {"v", to_json(c.v)},
          {"x", vec(c.x)},
          {"value_at_x", num(c.value_at_x)},
          {"defect", num(c.defect)},
          {"max_on_thickening", num(c.max_on_thickening)},
          {"max_on_omega", num(c.max_on_omega)},
          {"valid", c.valid}};
}

json to_json(const DdcCheck& c) {
  auto opt = [](const std::optional<double>& v) { return v ? num(*v) : json(nullptr); };
  return {{"lhs", num(c.lhs)},
          {"lhs_spectral", opt(c.lhs_spectral)},
          {"lhs_chain_rule", opt(c.lhs_chain_rule)},
          {"lhs_finite_difference", opt(c.lhs_finite_difference)},
          {"rhs", num(c.rhs)},
          {"residual", num(c.residual)}};
}

json to_json(const IterateResult& r, bool include_field) {
  json j{{"sweeps", r.sweeps},
         {"final_residual", num(r.final_residual)},
         {"converged", r.converged},
         {"residual_history", numbers(r.residual_history)},
         {"monotone", r.monotone},
         {"minorant", r.minorant}};
  if (include_field) j["field"] = to_json(r.field);
  return j;
}

// ------------------------------------------------------------ CSV

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw ValidationError("CSV row length differs from header");
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << "\n";
  }
  return out.str();
}

std::string csv_slice(const Grid3& g, int axis, int index) {
  const auto n = g.shape();
  if (axis < 0 || axis > 2) throw ValidationError("slice axis must be 0, 1 or 2");
  if (index < 0 || index >= n[static_cast<std::size_t>(axis)]) throw ValidationError("slice index out of range");
  const int a = (axis + 1) % 3, b = (axis + 2) % 3;
  const char* names = "xyz";
  std::vector<std::vector<double>> rows;
  for (int jb = 0; jb < n[static_cast<std::size_t>(b)]; ++jb) {
    for (int ja = 0; ja < n[static_cast<std::size_t>(a)]; ++ja) {
      std::array<int, 3> ijk{};
      ijk[static_cast<std::size_t>(axis)] = index;
      ijk[static_cast<std::size_t>(a)] = ja;
      ijk[static_cast<std::size_t>(b)] = jb;
      const std::size_t idx = g.index(ijk[0], ijk[1], ijk[2]);
      const Vec3R x = g.node(idx);
      rows.push_back({x[a], x[b], g[idx], static_cast<double>(g.inside(idx))});
    }
  }
  return csv_table({std::string(1, names[a]), std::string(1, names[b]), "value", "inside"}, rows);
}

// ------------------------------------------------------------ run config

ConvexDomain OmegaSpec::domain() const {
  if (kind == "ball") return ConvexDomain::ball(center, radius);
  if (kind == "box") return ConvexDomain::box(lo, hi);
  throw ValidationError("omega kind must be \"ball\" or \"box\"");
}

void RunConfig::validate() const {
  static const std::set<std::string> commands{"hull-minimal", "check-psh", "disc",   "green",
                                              "certify",      "bochner",   "envelope-null"};
  if (!commands.count(command)) throw ValidationError("unknown command \"" + command + "\"");
  if (command == "disc" && mode != "generate" && mode != "validate") {
    throw ValidationError("disc mode must be generate or validate");
  }
  if (command == "certify" && mode != "discs" && mode != "jensen" && mode != "hessian") {
    throw ValidationError("certify mode must be discs, jensen or hessian");
  }
  if (resolution < 4 || resolution > 512) throw ValidationError("resolution must lie in 4..512");
  if (sweeps < 1) throw ValidationError("sweeps must be positive");
  if (!(tol > 0.0) || !std::isfinite(tol)) throw ValidationError("tol must be positive");
  if (budget < 1) throw ValidationError("budget must be positive");
  if (workers < 1) throw ValidationError("workers must be positive");
  if (quadrature[0] < 1 || quadrature[1] < 1) throw ValidationError("quadrature sizes must be positive");
  if (delta && !(*delta > 0.0)) throw ValidationError("delta must be positive");
  if (!(threshold > 0.0 && threshold < 1.0)) throw ValidationError("threshold must lie in (0, 1)");
  if (!point.allFinite()) throw ValidationError("point must be finite");
  if (j_max < 1) throw ValidationError("j_max must be positive");
  if (degree < 1 || degree > 8) throw ValidationError("degree must lie in 1..8");
  if (frames < 1) throw ValidationError("frames must be positive");
  if (samples < 100) throw ValidationError("samples must be at least 100");
  if (directions < 1) throw ValidationError("directions must be positive");
  if (!(radius > 0.0)) throw ValidationError("radius must be positive");
  if (!(ball_radius > 0.0)) throw ValidationError("ball_radius must be positive");
  if (!(rho > 0.0 && rho <= 1.0)) throw ValidationError("rho must lie in (0, 1]");
  if (band_limit < 1) throw ValidationError("band_limit must be positive");
  if (omega.kind == "ball") {
    if (!(omega.radius > 0.0)) throw ValidationError("omega radius must be positive");
  } else if (omega.kind == "box") {
    if (!((omega.hi - omega.lo).minCoeff() > 0.0)) throw ValidationError("omega box is empty");
  } else {
    throw ValidationError("omega kind must be \"ball\" or \"box\"");
  }
}

RunConfig run_config_from_json(const json& j) {
  only_keys(j, {"version", "command", "mode", "input", "out_dir", "resolution", "sweeps", "tol",
                "seed", "budget", "workers", "quadrature", "omega", "delta", "threshold", "point",
                "j_max", "degree", "frames", "samples", "directions", "radius", "ball_radius", "disc", "rho",
                "band_limit"});
  check_version(j);
  RunConfig c;
  c.command = get_string(field(j, "command"), "command");
  auto geti = [&](const char* k, int& dst) {
    if (j.contains(k)) dst = static_cast<int>(get_int(j[k], k));
  };
  auto getd = [&](const char* k, double& dst) {
    if (j.contains(k)) dst = get_finite(j[k], k);
  };
  if (j.contains("mode")) c.mode = get_string(j["mode"], "mode");
  if (j.contains("input")) c.input = get_string(j["input"], "input");
  if (j.contains("out_dir")) c.out_dir = get_string(j["out_dir"], "out_dir");
  geti("resolution", c.resolution);
  geti("sweeps", c.sweeps);
  getd("tol", c.tol);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0)) {
      throw ValidationError("seed: expected a nonnegative integer");
    }
    c.seed = j["seed"].get<std::uint64_t>();
  }
  geti("budget", c.budget);
  geti("workers", c.workers);
  if (j.contains("quadrature")) {
    const json& q = j["quadrature"];
    if (!q.is_array() || q.size() != 2) throw ValidationError("quadrature: expected [radial, angular]");
    c.quadrature = {static_cast<int>(get_int(q[0], "quadrature")), static_cast<int>(get_int(q[1], "quadrature"))};
  }
  if (j.contains("omega")) {
    const json& o = j["omega"];
    only_keys(o, {"kind", "center", "radius", "lo", "hi"});
    c.omega.kind = get_string(field(o, "kind"), "omega.kind");
    if (o.contains("center")) c.omega.center = get_vec3(o["center"], "omega.center");
    if (o.contains("radius")) c.omega.radius = get_finite(o["radius"], "omega.radius");
    if (o.contains("lo")) c.omega.lo = get_vec3(o["lo"], "omega.lo");
    if (o.contains("hi")) c.omega.hi = get_vec3(o["hi"], "omega.hi");
  }
  if (j.contains("delta")) c.delta = get_finite(j["delta"], "delta");
  getd("threshold", c.threshold);
  if (j.contains("point")) c.point = get_vec3(j["point"], "point");
  geti("j_max", c.j_max);
  geti("degree", c.degree);
  geti("frames", c.frames);
  geti("samples", c.samples);
  geti("directions", c.directions);
  getd("radius", c.radius);
  getd("ball_radius", c.ball_radius);
  if (j.contains("disc")) c.disc = get_string(j["disc"], "disc");
  getd("rho", c.rho);
  geti("band_limit", c.band_limit);
  c.validate();
  return c;
}

json to_json(const RunConfig& c) {
  json omega{{"kind", c.omega.kind}};
  if (c.omega.kind == "ball") {
    omega["center"] = vec(c.omega.center);
    omega["radius"] = num(c.omega.radius);
  } else {
    omega["lo"] = vec(c.omega.lo);
    omega["hi"] = vec(c.omega.hi);
  }
  json j{{"version", kFormatVersion},
         {"command", c.command},
         {"input", c.input.string()},
         {"out_dir", c.out_dir.string()},
         {"resolution", c.resolution},
         {"sweeps", c.sweeps},
         {"tol", num(c.tol)},
         {"seed", c.seed},
         {"budget", c.budget},
         {"workers", c.workers},
         {"quadrature", {c.quadrature[0], c.quadrature[1]}},
         {"omega", omega},
         {"threshold", num(c.threshold)},
         {"point", vec(c.point)},
         {"j_max", c.j_max},
         {"degree", c.degree},
         {"frames", c.frames},
         {"samples", c.samples},
         {"directions", c.directions},
         {"radius", num(c.radius)},
         {"ball_radius", num(c.ball_radius)},
         {"disc", c.disc},
         {"rho", num(c.rho)},
         {"band_limit", c.band_limit}};
  if (!c.mode.empty()) j["mode"] = c.mode;
  if (c.delta) j["delta"] = num(*c.delta);
  return j;
}

}  // namespace hullkit
