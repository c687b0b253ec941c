// SPDX-License-Identifier: Apache-2.0
//
#include "platewave/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numbers>
#include <set>
#include <sstream>

#include <unistd.h>

namespace platewave {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------- json

void require_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed,
                  std::initializer_list<const char*> required = {}) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items())
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  for (const char* key : required)
    if (!j.contains(key)) throw ConfigError("missing key '" + std::string(key) + "' in " + where);
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + where + ": " + e.what());
  }
}

template <class T>
void get_opt(const json& j, const char* key, const std::string& where, T& out) {
  if (j.contains(key)) out = get<T>(j, key, where);
}

template <class T>
void get_opt(const json& j, const char* key, const std::string& where, std::optional<T>& out) {
  if (j.contains(key)) out = get<T>(j, key, where);
}

json vec_json(Vec2 v) { return json::array({v.x, v.y}); }

Vec2 vec_from(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError(where + " must be a pair of numbers");
  return {j[0].get<double>(), j[1].get<double>()};
}

// ------------------------------------------------------------ output

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw HarnessError("io", "cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw HarnessError("io", "cannot write " + p.string());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// A run directory is built under a temporary name and renamed into place
// once complete, so a finished directory is never modified afterwards.
class RunDirectory {
 public:
  RunDirectory(const fs::path& out, const ExperimentConfig& config)
      : hash_(config_hash(config)), final_(out / (config.name + "-" + hash_)) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw HarnessError("io", "cannot create " + out.string() + ": " + ec.message());
    if (fs::exists(final_ / "manifest.json")) {
      reused_ = true;
      return;
    }
    if (fs::exists(final_)) fs::remove_all(final_);  // leftover of an interrupted run
    temp_ = out / (".partial-" + config.name + "-" + hash_ + "-" + std::to_string(::getpid()));
    fs::remove_all(temp_);
    fs::create_directories(temp_, ec);
    if (ec) throw HarnessError("io", "cannot create " + temp_.string() + ": " + ec.message());
  }

  ~RunDirectory() {
    std::error_code ec;
    if (!temp_.empty()) fs::remove_all(temp_, ec);
  }

  bool reused() const { return reused_; }
  const fs::path& path() const { return final_; }
  const std::string& hash() const { return hash_; }

  void add(const std::string& name, const std::string& bytes) {
    write_file(temp_ / name, bytes);
    inventory_.push_back({{"file", name}, {"bytes", bytes.size()}, {"fnv1a64", fnv1a_hex(bytes)}});
  }
  void add(const std::string& name, const std::vector<unsigned char>& bytes) {
    add(name, std::string(bytes.begin(), bytes.end()));
  }

  void commit(const ExperimentConfig& config, const json& metrics,
              const std::map<std::string, double>& timings) {
    json manifest = {{"config_hash", hash_},
                     {"toolkit_version", toolkit_version},
                     {"config", to_json(config)},
                     {"metrics", metrics},
                     {"files", inventory_}};
    write_file(temp_ / "timings.json", dump(json(timings)));
    write_file(temp_ / "manifest.json", dump(manifest));
    std::error_code ec;
    fs::rename(temp_, final_, ec);
    if (ec) throw HarnessError("io", "cannot move run into " + final_.string() + ": " + ec.message());
    temp_.clear();
  }

 private:
  std::string hash_;
  fs::path final_;
  fs::path temp_;
  bool reused_ = false;
  json inventory_ = json::array();
};

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::string alpha_tag(double alpha) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "lsm_a%g", alpha);
  return buf;
}

json metrics_json(const LocalizationMetrics& m, double parameter) {
  json peaks = json::array();
  for (Vec2 p : m.peaks) peaks.push_back(vec_json(p));
  return {{"parameter", parameter},
          {"degenerate", m.degenerate},
          {"containment", m.containment},
          {"top_count", m.top_count},
          {"centroid", vec_json(m.centroid)},
          {"true_centroid", vec_json(m.true_centroid)},
          {"centroid_error", m.centroid_error},
          {"peak_count", m.peak_count},
          {"obstacles_detected", m.obstacles_detected},
          {"obstacle_count", m.obstacle_count},
          {"peaks", peaks}};
}

PlateParams plate(const ExperimentConfig& c) { return PlateParams(c.k, c.nu); }

AssemblyOptions assembly(const ExperimentConfig& c) {
  AssemblyOptions o;
  o.quadrature_order = c.quadrature_order;
  return o;
}

// Rethrows numerical failures as harness errors with a stable code.
template <class F>
auto guarded(const char* stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const HarnessError&) {
    throw;
  } catch (const SingularMatrixError& e) {
    throw HarnessError("solver", std::string(stage) + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw HarnessError("config", std::string(stage) + ": " + e.what());
  } catch (const std::exception& e) {
    throw HarnessError("solver", std::string(stage) + ": " + e.what());
  }
}

FarFieldMatrix synthesize_clean(const ExperimentConfig& c) {
  return guarded("synthesis", [&] {
    const auto meshes = c.domain.meshes();
    return synthesize(meshes, plate(c), DirectionSet(c.incident_count),
                      DirectionSet(c.receiver_count), SynthesisOptions{assembly(c)});
  });
}

json provenance_json(const Provenance& p) {
  if (!p.noisy) return {{"kind", "none"}};
  return {{"kind", to_string(p.kind)}, {"level", p.level}, {"seed", p.seed}};
}

// Indicator files and localization metrics for every configured method.
json reconstruct_into(RunDirectory& dir, const ExperimentConfig& c, const FarFieldMatrix& f,
                      std::map<std::string, double>& timings) {
  const auto truth = c.domain.curves();
  const double merge = two_pi / c.k;
  json methods = json::object();
  Stopwatch clock;
  auto emit = [&](const std::string& tag, const IndicatorField& field) {
    dir.add(tag + ".csv", indicator_csv(field));
    dir.add(tag + ".pgm", indicator_pgm(field));
    methods[tag] = metrics_json(localization_metrics(field, truth, merge), field.parameter);
  };
  guarded("reconstruction", [&] {
    if (!c.methods.lsm_alphas.empty()) {
      const TikhonovSolver solver(f);
      for (double alpha : c.methods.lsm_alphas)
        emit(alpha_tag(alpha), lsm_indicator(c.grid, f, solver, alpha));
      timings["lsm"] = clock.lap();
    }
    if (c.methods.dsm1_rho || c.methods.dsm2_rho) {
      const DsmFields d = dsm_indicators(c.grid, f, c.methods.dsm1_rho.value_or(2.0),
                                         c.methods.dsm2_rho.value_or(1.0));
      if (c.methods.dsm1_rho) emit("dsm1", d.dsm1);
      if (c.methods.dsm2_rho) emit("dsm2", d.dsm2);
      timings["dsm"] = clock.lap();
    }
    return 0;
  });
  return methods;
}

std::vector<GateResult> evaluate_gates(const GateSpec& g, const json& metrics) {
  std::vector<GateResult> out;
  auto at_most = [&](const std::string& name, double v, double t) {
    out.push_back({name, v, t, v <= t});
  };
  auto at_least = [&](const std::string& name, double v, double t) {
    out.push_back({name, v, t, v >= t});
  };
  if (g.max_forward_error && metrics.contains("forward"))
    at_most("forward_error", metrics["forward"]["relative_error"].get<double>(), *g.max_forward_error);
  if (g.max_reciprocity && metrics.contains("synthesis") &&
      metrics["synthesis"].contains("reciprocity_residual"))
    at_most("reciprocity", metrics["synthesis"]["reciprocity_residual"].get<double>(),
            *g.max_reciprocity);
  if (!metrics.contains("methods")) return out;
  for (const auto& [tag, m] : metrics["methods"].items()) {
    const bool lsm = tag.rfind("lsm", 0) == 0;
    const double cont = m["containment"].get<double>();
    if (lsm && g.min_containment_lsm) at_least(tag + ".containment", cont, *g.min_containment_lsm);
    if (!lsm && g.min_containment_dsm) at_least(tag + ".containment", cont, *g.min_containment_dsm);
    if (g.max_centroid_error)
      at_most(tag + ".centroid_error", m["centroid_error"].get<double>(), *g.max_centroid_error);
    if (!lsm && g.peak_count) {
      const double want = static_cast<double>(*g.peak_count);
      const auto peaks = static_cast<double>(m["peak_count"].get<std::size_t>());
      out.push_back({tag + ".peak_count", peaks, want, peaks == want});
      at_least(tag + ".obstacles_detected",
               static_cast<double>(m["obstacles_detected"].get<std::size_t>()),
               static_cast<double>(m["obstacle_count"].get<std::size_t>()));
    }
  }
  return out;
}

RunResult finish(RunDirectory& dir, const ExperimentConfig& c, json metrics,
                 std::map<std::string, double> timings) {
  dir.commit(c, metrics, timings);
  RunResult r{dir.path(), false, std::move(metrics), {}, std::move(timings)};
  r.gates = evaluate_gates(c.gates, r.metrics);
  return r;
}

RunResult reuse(const RunDirectory& dir, const ExperimentConfig& c) {
  const json manifest = json::parse(read_file(dir.path() / "manifest.json"));
  RunResult r{dir.path(), true, manifest.at("metrics"), {}, {}};
  r.gates = evaluate_gates(c.gates, r.metrics);
  return r;
}

ExperimentConfig base(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.k = two_pi;
  c.nu = 0.3;
  return c;
}

DomainSpec five_arms(std::size_t nodes = 288, std::vector<Vec2> centers = {{0.0, 0.0}}) {
  DomainSpec d;
  d.nodes = nodes;
  d.centers = std::move(centers);
  return d;
}

const std::vector<Vec2> three_centers = {{2.0, 2.5}, {2.0, -2.5}, {-2.0, 0.0}};

}  // namespace

// -------------------------------------------------------------- domain

std::vector<SmoothClosedCurve> DomainSpec::curves() const {
  std::vector<SmoothClosedCurve> out;
  for (Vec2 c : centers) {
    switch (kind) {
      case CurveKind::star: out.push_back(SmoothClosedCurve::star(amplitude, arms, scale, c)); break;
      case CurveKind::circle: out.push_back(SmoothClosedCurve::circle(scale, c)); break;
      case CurveKind::cavity: out.push_back(SmoothClosedCurve::cavity(scale, c)); break;
    }
  }
  return out;
}

std::vector<BoundaryMesh> DomainSpec::meshes() const {
  std::vector<BoundaryMesh> out;
  for (const auto& c : curves()) out.push_back(discretize(c, nodes));
  return out;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (name.empty() || name.find_first_of("/\\ ") != std::string::npos || name[0] == '.')
    fail("name must be non-empty without '/', '\\\\', spaces or a leading '.'");
  if (!(k > 0.0) || !std::isfinite(k)) fail("k must be > 0");
  if (!(nu > -1.0 && nu <= 0.5)) fail("nu must lie in (-1, 0.5]");
  if (domain.centers.empty()) fail("domain needs at least one center");
  for (Vec2 c : domain.centers)
    if (!std::isfinite(c.x) || !std::isfinite(c.y)) fail("domain centers must be finite");
  if (!(domain.scale > 0.0) || !std::isfinite(domain.scale)) fail("domain scale must be > 0");
  if (domain.kind == CurveKind::star && !(std::abs(domain.amplitude) < 1.0))
    fail("star amplitude must satisfy |a| < 1");
  if (domain.arms < 0) fail("star arms must be >= 0");
  if (quadrature_order < 4 || quadrature_order > 16 || quadrature_order % 2)
    fail("quadrature_order must be even in [4, 16]");
  const std::size_t min_nodes = std::max<std::size_t>(16, 2 * (quadrature_order - 1) + 2);
  if (domain.nodes < min_nodes || domain.nodes % 2 || domain.nodes > 16384)
    fail("nodes must be even in [" + std::to_string(min_nodes) + ", 16384]");
  if (incident_count < 1 || incident_count > 4096 || receiver_count < 1 || receiver_count > 4096)
    fail("direction counts must lie in [1, 4096]");
  try {
    grid.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (grid.size() > 25'000'000) fail("grid has more than 25e6 points");
  if (!(noise.level >= 0.0) || !std::isfinite(noise.level)) fail("noise level must be >= 0");
  for (double a : methods.lsm_alphas)
    if (!(a > 0.0) || !std::isfinite(a)) fail("lsm alphas must be > 0");
  for (const auto& rho : {methods.dsm1_rho, methods.dsm2_rho})
    if (rho && (!(*rho > 0.0) || !std::isfinite(*rho))) fail("dsm rho must be > 0");
  // Obstacles must be disjoint.
  const auto cs = domain.curves();
  for (std::size_t i = 0; i < cs.size(); ++i)
    for (std::size_t j = 0; j < cs.size(); ++j) {
      if (i == j) continue;
      const SmoothClosedCurve one[1] = {cs[j]};
      const RegionTester other(one, 512);
      for (int s = 0; s < 256; ++s)
        if (other.inside(cs[i].position(two_pi * s / 256.0)))
          fail("obstacles " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
    }
}

// ---------------------------------------------------------- serialization

json to_json(const ExperimentConfig& c) {
  json centers = json::array();
  for (Vec2 v : c.domain.centers) centers.push_back(vec_json(v));
  json methods = json::object();
  if (!c.methods.lsm_alphas.empty()) methods["lsm"] = {{"alphas", c.methods.lsm_alphas}};
  if (c.methods.dsm1_rho) methods["dsm1"] = {{"rho", *c.methods.dsm1_rho}};
  if (c.methods.dsm2_rho) methods["dsm2"] = {{"rho", *c.methods.dsm2_rho}};
  json gates = json::object();
  const auto& g = c.gates;
  if (g.max_forward_error) gates["max_forward_error"] = *g.max_forward_error;
  if (g.max_reciprocity) gates["max_reciprocity"] = *g.max_reciprocity;
  if (g.min_containment_lsm) gates["min_containment_lsm"] = *g.min_containment_lsm;
  if (g.min_containment_dsm) gates["min_containment_dsm"] = *g.min_containment_dsm;
  if (g.max_centroid_error) gates["max_centroid_error"] = *g.max_centroid_error;
  if (g.peak_count) gates["peak_count"] = *g.peak_count;
  return {
      {"name", c.name},
      {"domain",
       {{"kind", to_string(c.domain.kind)},
        {"amplitude", c.domain.amplitude},
        {"arms", c.domain.arms},
        {"scale", c.domain.scale},
        {"centers", centers},
        {"nodes", c.domain.nodes}}},
      {"k", c.k},
      {"nu", c.nu},
      {"directions", {{"incident", c.incident_count}, {"receivers", c.receiver_count}}},
      {"grid",
       {{"x", {c.grid.x0, c.grid.x1}},
        {"y", {c.grid.y0, c.grid.y1}},
        {"resolution", {c.grid.nx, c.grid.ny}}}},
      {"noise",
       {{"kind", c.noise.enabled ? to_string(c.noise.kind) : "none"},
        {"level", c.noise.level},
        {"seed", c.noise.seed}}},
      {"methods", methods},
      {"gates", gates},
      {"quadrature_order", c.quadrature_order},
  };
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  require_keys(j, "config",
               {"name", "domain", "k", "nu", "directions", "grid", "noise", "methods", "gates",
                "quadrature_order"},
               {"name", "domain", "k"});
  c.name = get<std::string>(j, "name", "config");
  c.k = get<double>(j, "k", "config");
  get_opt(j, "nu", "config", c.nu);
  get_opt(j, "quadrature_order", "config", c.quadrature_order);

  const json& d = j.at("domain");
  require_keys(d, "domain", {"kind", "amplitude", "arms", "scale", "centers", "nodes"}, {"kind"});
  try {
    c.domain.kind = curve_kind_from_string(get<std::string>(d, "kind", "domain"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  get_opt(d, "amplitude", "domain", c.domain.amplitude);
  get_opt(d, "arms", "domain", c.domain.arms);
  get_opt(d, "scale", "domain", c.domain.scale);
  get_opt(d, "nodes", "domain", c.domain.nodes);
  if (d.contains("centers")) {
    if (!d["centers"].is_array()) throw ConfigError("domain.centers must be an array");
    c.domain.centers.clear();
    for (const auto& v : d["centers"]) c.domain.centers.push_back(vec_from(v, "domain.centers"));
  }

  if (j.contains("directions")) {
    const json& n = j["directions"];
    require_keys(n, "directions", {"incident", "receivers"});
    get_opt(n, "incident", "directions", c.incident_count);
    get_opt(n, "receivers", "directions", c.receiver_count);
  }
  if (j.contains("grid")) {
    const json& g = j["grid"];
    require_keys(g, "grid", {"x", "y", "resolution"});
    if (g.contains("x")) {
      const Vec2 x = vec_from(g["x"], "grid.x");
      c.grid.x0 = x.x;
      c.grid.x1 = x.y;
    }
    if (g.contains("y")) {
      const Vec2 y = vec_from(g["y"], "grid.y");
      c.grid.y0 = y.x;
      c.grid.y1 = y.y;
    }
    if (g.contains("resolution")) {
      const auto r = get<std::vector<std::size_t>>(g, "resolution", "grid");
      if (r.size() != 2) throw ConfigError("grid.resolution must have two entries");
      c.grid.nx = r[0];
      c.grid.ny = r[1];
    }
  }
  if (j.contains("noise")) {
    const json& n = j["noise"];
    require_keys(n, "noise", {"kind", "level", "seed"});
    const std::string kind = n.contains("kind") ? get<std::string>(n, "kind", "noise") : "none";
    c.noise.enabled = kind != "none";
    if (c.noise.enabled) {
      try {
        c.noise.kind = noise_kind_from_string(kind);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
    get_opt(n, "level", "noise", c.noise.level);
    get_opt(n, "seed", "noise", c.noise.seed);
  }
  if (j.contains("methods")) {
    const json& m = j["methods"];
    require_keys(m, "methods", {"lsm", "dsm1", "dsm2"});
    if (m.contains("lsm")) {
      require_keys(m["lsm"], "methods.lsm", {"alphas"}, {"alphas"});
      c.methods.lsm_alphas = get<std::vector<double>>(m["lsm"], "alphas", "methods.lsm");
      if (c.methods.lsm_alphas.empty()) throw ConfigError("methods.lsm.alphas is empty");
    }
    for (const char* key : {"dsm1", "dsm2"}) {
      if (!m.contains(key)) continue;
      const std::string where = std::string("methods.") + key;
      require_keys(m[key], where, {"rho"});
      double rho = key[3] == '1' ? 2.0 : 1.0;
      get_opt(m[key], "rho", where, rho);
      (key[3] == '1' ? c.methods.dsm1_rho : c.methods.dsm2_rho) = rho;
    }
  }
  if (j.contains("gates")) {
    const json& g = j["gates"];
    require_keys(g, "gates",
                 {"max_forward_error", "max_reciprocity", "min_containment_lsm",
                  "min_containment_dsm", "max_centroid_error", "peak_count"});
    get_opt(g, "max_forward_error", "gates", c.gates.max_forward_error);
    get_opt(g, "max_reciprocity", "gates", c.gates.max_reciprocity);
    get_opt(g, "min_containment_lsm", "gates", c.gates.min_containment_lsm);
    get_opt(g, "min_containment_dsm", "gates", c.gates.min_containment_dsm);
    get_opt(g, "max_centroid_error", "gates", c.gates.max_centroid_error);
    get_opt(g, "peak_count", "gates", c.gates.peak_count);
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const ExperimentConfig& config) {
  return fnv1a_hex(to_json(config).dump() + "\n" + toolkit_version);
}

// ---------------------------------------------------------------- presets

std::vector<std::string> preset_names() {
  return {"accuracy", "accuracy-circle", "example1", "example2", "example3", "example4", "example5"};
}

std::vector<ExperimentConfig> preset(const std::string& name) {
  std::vector<ExperimentConfig> runs;
  if (name == "accuracy") {
    ExperimentConfig c = base("accuracy");
    c.domain = five_arms(288);
    c.gates.max_forward_error = 1e-6;
    runs.push_back(c);
  } else if (name == "accuracy-circle") {
    ExperimentConfig c = base("accuracy-circle");
    c.domain.kind = CurveKind::circle;
    c.domain.nodes = 128;
    c.gates.max_forward_error = 1e-8;
    runs.push_back(c);
  } else if (name == "example1") {
    for (const auto kind : {CurveKind::star, CurveKind::cavity}) {
      ExperimentConfig c = base("example1-" + to_string(kind));
      c.domain = five_arms(288);
      if (kind == CurveKind::cavity) {
        c.domain.kind = CurveKind::cavity;
        c.domain.scale = 3.0;
      }
      c.methods = {{1e-4}, 2.0, 1.0};
      c.gates.max_reciprocity = 1e-6;
      if (kind == CurveKind::star) {
        c.gates.min_containment_lsm = 0.9;
        c.gates.min_containment_dsm = 0.9;
        c.gates.max_centroid_error = 0.2;
      }
      runs.push_back(c);
    }
  } else if (name == "example2") {
    for (const auto kind : {NoiseKind::additive, NoiseKind::multiplicative})
      for (const double level : {0.05, 0.5, 1.0}) {
        char tag[64];
        std::snprintf(tag, sizeof tag, "example2-%s-%g", to_string(kind).c_str(), level);
        ExperimentConfig c = base(tag);
        c.domain = five_arms(288);
        c.noise = {true, kind, level, 2024};
        c.methods = {{1e-1}, 2.0, 1.0};
        c.gates.max_reciprocity = 1e-6;
        if (level == 0.5) {
          c.gates.min_containment_dsm = 0.8;
          c.gates.min_containment_lsm = 0.5;
        }
        runs.push_back(c);
      }
  } else if (name == "example3") {
    for (const double nu : {-0.5, 0.0, 0.3, 0.5}) {
      char tag[64];
      std::snprintf(tag, sizeof tag, "example3-nu%g", nu);
      ExperimentConfig c = base(tag);
      c.nu = nu;
      c.domain = five_arms(288);
      c.noise = {true, NoiseKind::additive, 0.05, 2024};
      c.methods = {{1e-1}, 2.0, 1.0};
      c.gates.max_reciprocity = 1e-6;
      c.gates.min_containment_dsm = 0.8;
      runs.push_back(c);
    }
  } else if (name == "example4" || name == "example5") {
    const bool high = name == "example5";
    ExperimentConfig c = base(name);
    c.k = high ? 5.0 * two_pi : two_pi;
    c.domain = five_arms(high ? 768 : 288, three_centers);
    c.grid = {-10.0, 10.0, -10.0, 10.0, 500, 500};
    c.noise = {true, NoiseKind::additive, 0.05, 2024};
    c.methods = {{1e-1}, 2.0, 1.0};
    c.gates.max_reciprocity = 1e-6;
    if (!high) c.gates.peak_count = 3;
    runs.push_back(c);
  } else {
    throw HarnessError("usage", "unknown experiment '" + name + "'");
  }
  return runs;
}

// ------------------------------------------------------------------- runs

bool RunResult::gates_pass() const {
  return std::all_of(gates.begin(), gates.end(), [](const GateResult& g) { return g.pass; });
}

RunResult run_forward_test(const ExperimentConfig& c, const fs::path& out) {
  c.validate();
  RunDirectory dir(out, c);
  if (dir.reused()) return reuse(dir, c);
  const auto rep = guarded("forward test", [&] {
    const auto meshes = c.domain.meshes();
    AnalyticTestOptions o;
    o.assembly = assembly(c);
    return analytic_point_source_test(meshes, plate(c), o);
  });
  json pts = json::array(), srcs = json::array();
  for (Vec2 p : rep.points) pts.push_back(vec_json(p));
  for (Vec2 s : rep.sources) srcs.push_back(vec_json(s));
  json metrics = {{"forward",
                   {{"nodes", rep.nodes},
                    {"relative_error", rep.relative_error},
                    {"max_abs_error", rep.max_abs_error},
                    {"density_l1", rep.density_l1},
                    {"solve_residual", rep.solve_residual},
                    {"rcond", rep.rcond},
                    {"sources", srcs},
                    {"points", pts}}}};
  dir.add("forward_test.json", dump(metrics));
  return finish(dir, c, metrics, {{"forward_test", rep.seconds}});
}

RunResult run_synthesis(const ExperimentConfig& c, const fs::path& out) {
  c.validate();
  RunDirectory dir(out, c);
  if (dir.reused()) return reuse(dir, c);
  Stopwatch clock;
  std::map<std::string, double> timings;
  FarFieldMatrix f = synthesize_clean(c);
  timings["synthesis"] = clock.lap();
  json syn = {{"incident", c.incident_count}, {"receivers", c.receiver_count}};
  if (c.incident_count == c.receiver_count && c.incident_count % 2 == 0)
    syn["reciprocity_residual"] = reciprocity_residual(f);
  if (c.noise.enabled) {
    f = add_noise(f, c.noise.kind, c.noise.level, c.noise.seed);
    timings["noise"] = clock.lap();
  }
  syn["provenance"] = provenance_json(f.provenance());
  const auto bytes = encode_bhff(f);
  dir.add("farfield.bhff", std::string(bytes.begin(), bytes.end()));
  dir.add("farfield.csv", farfield_csv(f));
  return finish(dir, c, {{"synthesis", syn}}, timings);
}

RunResult run_reconstruction(const ExperimentConfig& c, const fs::path& matrix_file,
                             const fs::path& out) {
  c.validate();
  FarFieldMatrix f = [&] {
    try {
      return read_bhff(matrix_file);
    } catch (const std::exception& e) {
      throw HarnessError("io", e.what());
    }
  }();
  if (f.k() != c.k || f.nu() != c.nu)
    throw HarnessError("config", "matrix (k, nu) does not match the config");
  if (f.incident_count() != c.incident_count || f.receiver_count() != c.receiver_count)
    throw HarnessError("config", "matrix direction counts do not match the config");
  // The matrix content is part of the run identity.
  ExperimentConfig keyed = c;
  keyed.name = c.name + "-" + fnv1a_hex(read_file(matrix_file)).substr(0, 8);
  RunDirectory dir(out, keyed);
  if (dir.reused()) return reuse(dir, c);
  std::map<std::string, double> timings;
  json syn = {{"provenance", provenance_json(f.provenance())}};
  if (f.incident() == f.receivers() && f.incident().negation_closed())
    syn["reciprocity_residual_input"] = reciprocity_residual(f);
  json metrics = {{"synthesis", syn}, {"methods", reconstruct_into(dir, c, f, timings)}};
  return finish(dir, keyed, metrics, timings);
}

RunResult run_experiment(const ExperimentConfig& c, const fs::path& out) {
  c.validate();
  RunDirectory dir(out, c);
  if (dir.reused()) return reuse(dir, c);
  Stopwatch clock;
  std::map<std::string, double> timings;
  FarFieldMatrix f = synthesize_clean(c);
  timings["synthesis"] = clock.lap();
  json syn = {{"incident", c.incident_count}, {"receivers", c.receiver_count}};
  if (c.incident_count == c.receiver_count && c.incident_count % 2 == 0)
    syn["reciprocity_residual"] = reciprocity_residual(f);
  if (c.noise.enabled) f = add_noise(f, c.noise.kind, c.noise.level, c.noise.seed);
  syn["provenance"] = provenance_json(f.provenance());
  const auto bytes = encode_bhff(f);
  dir.add("farfield.bhff", std::string(bytes.begin(), bytes.end()));
  json metrics = {{"synthesis", syn}, {"methods", reconstruct_into(dir, c, f, timings)}};
  return finish(dir, c, metrics, timings);
}

}  // namespace platewave
