// SPDX-License-Identifier: Apache-2.0
//
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "platewave/experiment.hpp"
#include "platewave/parallel.hpp"

using namespace platewave;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.name = "unit-small";
  c.domain.nodes = 128;
  c.incident_count = 16;
  c.receiver_count = 16;
  c.grid = {-2.0, 2.0, -2.0, 2.0, 21, 21};
  c.noise = {true, NoiseKind::additive, 0.05, 3};
  c.methods = {{1e-2}, 2.0, 1.0};
  c.gates.max_reciprocity = 1e-3;
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("platewave_unit_" + name);
  fs::remove_all(p);
  return p;
}

std::map<std::string, std::string> files_of(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    out[e.path().filename().string()] = s.str();
  }
  return out;
}

std::string config_error(nlohmann::json j) {
  try {
    config_from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("presets validate and survive a JSON round trip") {
    for (const auto& name : preset_names()) {
      for (const auto& c : preset(name)) {
        INFO(c.name);
        CHECK_NOTHROW(c.validate());
        const auto back = config_from_json(to_json(c));
        CHECK(to_json(back) == to_json(c));
        CHECK(config_hash(back) == config_hash(c));
      }
    }
    CHECK(preset("example2").size() == 6);
    CHECK(preset("example3").size() == 4);
    CHECK(preset("example4")[0].domain.centers.size() == 3);
    CHECK_THROWS_AS(preset("nope"), HarnessError);
  }

  TEST_CASE("configuration errors are reported") {
    const auto base = to_json(small_config());
    auto with = [&](const std::string& key, nlohmann::json v) {
      auto j = base;
      j[key] = v;
      return j;
    };
    CHECK(config_error(with("nu", -1.0)) == "nu must lie in (-1, 0.5]");
    CHECK(config_error(with("k", 0.0)) == "k must be > 0");
    CHECK(config_error(with("name", "a/b")).find("name must be") == 0);
    CHECK(config_error(with("quadrature_order", 7)).find("quadrature_order") == 0);
    CHECK(config_error(with("extra", 1)) == "unknown key 'extra' in config");
    auto j = base;
    j["domain"]["nodes"] = 17;
    CHECK(config_error(j).find("nodes must be even") == 0);
    j = base;
    j["domain"]["centers"] = {{0.0, 0.0}, {0.5, 0.0}};
    CHECK(config_error(j).find("overlap") != std::string::npos);
    j = base;
    j["noise"]["kind"] = "pink";
    CHECK(config_error(j).find("unknown noise kind") == 0);
    j = base;
    j["methods"]["lsm"]["alphas"] = {-1.0};
    CHECK(config_error(j) == "lsm alphas must be > 0");
    j = base;
    j.erase("k");
    CHECK(config_error(j) == "missing key 'k' in config");
    CHECK(config_error(with("directions", {{"incident", 0}})).find("direction counts") == 0);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), HarnessError);
  }

  TEST_CASE("config hash depends on every numeric input") {
    const auto c = small_config();
    auto d = c;
    d.noise.seed = 4;
    CHECK(config_hash(c) != config_hash(d));
    d = c;
    d.nu = 0.25;
    CHECK(config_hash(c) != config_hash(d));
    CHECK(config_hash(c) == config_hash(small_config()));
    CHECK(config_hash(c).size() == 16);
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  }

  TEST_CASE("runs are byte identical across worker counts and are not rewritten") {
    const auto c = small_config();
    const fs::path a = scratch("w1"), b = scratch("w3");
    set_worker_count(1);
    const RunResult ra = run_experiment(c, a);
    set_worker_count(3);
    const RunResult rb = run_experiment(c, b);
    set_worker_count(1);
    CHECK_FALSE(ra.reused);
    CHECK(ra.directory.filename() == "unit-small-" + config_hash(c));
    auto fa = files_of(ra.directory), fb = files_of(rb.directory);
    CHECK(fa.count("timings.json") == 1);
    fa.erase("timings.json");
    fb.erase("timings.json");
    CHECK(fa.size() == 8);  // manifest, matrix, csv and pgm for three indicators
    for (const auto& [name, bytes] : fa) {
      INFO(name);
      CHECK(fb.count(name) == 1);
      CHECK(bytes == fb[name]);
    }
    for (const auto& g : ra.gates) {
      INFO(g.name << " = " << g.value);
      CHECK(g.pass);
    }
    CHECK(ra.metrics["synthesis"]["provenance"]["seed"] == 3);

    // A second run with the same config reuses the directory untouched.
    const auto before = fs::last_write_time(ra.directory / "manifest.json");
    const RunResult again = run_experiment(c, a);
    CHECK(again.reused);
    CHECK(fs::last_write_time(ra.directory / "manifest.json") == before);
    CHECK(again.metrics == ra.metrics);

    // Reconstruction from the stored matrix reproduces the indicators.
    const RunResult rec = run_reconstruction(c, ra.directory / "farfield.bhff", scratch("rec"));
    CHECK(rec.metrics["methods"] == ra.metrics["methods"]);
    const auto fr = files_of(rec.directory);
    CHECK(fr.at("dsm1.pgm") == fa.at("dsm1.pgm"));

    auto wrong = c;
    wrong.k = 5.0;
    CHECK_THROWS_AS(run_reconstruction(wrong, ra.directory / "farfield.bhff", scratch("rec2")),
                    HarnessError);
    wrong = c;
    wrong.incident_count = 12;
    CHECK_THROWS_AS(run_reconstruction(wrong, ra.directory / "farfield.bhff", scratch("rec3")),
                    HarnessError);
    CHECK_THROWS_AS(run_reconstruction(c, "/nonexistent.bhff", scratch("rec4")), HarnessError);
    for (const char* n : {"w1", "w3", "rec", "rec2", "rec3", "rec4"}) fs::remove_all(scratch(n));
  }

  TEST_CASE("forward test run records its metrics and gate") {
    auto c = small_config();
    c.name = "unit-forward";
    c.domain.kind = CurveKind::circle;
    c.domain.nodes = 64;
    c.gates = {};
    c.gates.max_forward_error = 1e-10;
    const RunResult r = run_forward_test(c, scratch("fwd"));
    CHECK(r.metrics["forward"]["relative_error"].get<double>() < 1e-10);
    REQUIRE(r.gates.size() == 1);
    CHECK(r.gates[0].pass);
    CHECK(fs::exists(r.directory / "forward_test.json"));
    fs::remove_all(scratch("fwd"));
  }
}
