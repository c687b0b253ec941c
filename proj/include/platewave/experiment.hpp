// SPDX-License-Identifier: Apache-2.0
//
// Configuration-driven experiment harness: presets for the accuracy table
// and the five reconstruction examples, content-addressed output
// directories and run manifests.
//
// Every numeric output depends only on the configuration (including the
// noise seed) and the toolkit version, never on the worker count. Wall-clock
// timings are the one exception and live in their own timings.json.

#pragma once

#include <json.hpp>  // nlohmann/json, vendored

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "platewave/forward.hpp"
#include "platewave/inverse.hpp"
#include "platewave/operator.hpp"

namespace platewave {

inline constexpr const char* toolkit_version = "1.0.0";

/// One curve shape, copied to every listed center.
struct DomainSpec {
  CurveKind kind = CurveKind::star;
  double amplitude = 0.3;  // star only
  int arms = 5;            // star only
  double scale = 1.0;      // radius (star, circle) or diameter (cavity)
  std::vector<Vec2> centers{{0.0, 0.0}};
  std::size_t nodes = 288;  // per curve

  std::vector<SmoothClosedCurve> curves() const;
  std::vector<BoundaryMesh> meshes() const;
};

struct NoiseSpec {
  bool enabled = false;
  NoiseKind kind = NoiseKind::additive;
  double level = 0.0;
  std::uint64_t seed = 1;
};

struct MethodSpec {
  std::vector<double> lsm_alphas;
  std::optional<double> dsm1_rho;
  std::optional<double> dsm2_rho;
};

/// Acceptance gates checked with --gate; unset gates are not checked.
struct GateSpec {
  std::optional<double> max_forward_error;
  std::optional<double> max_reciprocity;
  std::optional<double> min_containment_lsm;
  std::optional<double> min_containment_dsm;
  std::optional<double> max_centroid_error;
  std::optional<std::size_t> peak_count;
};

struct ExperimentConfig {
  std::string name = "run";
  DomainSpec domain;
  double k = 6.283185307179586;
  double nu = 0.3;
  std::size_t incident_count = 128;
  std::size_t receiver_count = 128;
  SamplingGrid grid{-3.0, 3.0, -3.0, 3.0, 300, 300};
  NoiseSpec noise;
  MethodSpec methods;
  GateSpec gates;
  int quadrature_order = 10;

  /// Throws ConfigError on any violated precondition.
  void validate() const;
};

/// Failure classes of the command line; the code is the first token of the
/// one-line error message.
class HarnessError : public std::runtime_error {
 public:
  HarnessError(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

struct ConfigError : HarnessError {
  explicit ConfigError(const std::string& what) : HarnessError("config", what) {}
};

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// FNV-1a 64 over the canonical JSON of the config and the toolkit version,
/// as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);
std::string fnv1a_hex(const std::string& bytes);

/// Named presets: accuracy, accuracy-circle, example1 ... example5.
std::vector<std::string> preset_names();
/// Runs of a preset. Throws HarnessError("usage", ...) for unknown names.
std::vector<ExperimentConfig> preset(const std::string& name);

/// Single gate evaluation: name, measured value, threshold, pass.
struct GateResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct RunResult {
  std::filesystem::path directory;
  bool reused = false;  // directory already existed and was left untouched
  nlohmann::json metrics;
  std::vector<GateResult> gates;
  std::map<std::string, double> timings;

  bool gates_pass() const;
};

/// Point-source accuracy test; writes forward_test.json.
RunResult run_forward_test(const ExperimentConfig& config, const std::filesystem::path& out);
/// Synthesis (+ optional noise); writes farfield.bhff and farfield.csv.
RunResult run_synthesis(const ExperimentConfig& config, const std::filesystem::path& out);
/// Reconstruction from an existing matrix file; k, nu and direction counts
/// must match the config.
RunResult run_reconstruction(const ExperimentConfig& config,
                             const std::filesystem::path& matrix_file,
                             const std::filesystem::path& out);
/// Synthesis and reconstruction in one run directory.
RunResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out);

}  // namespace platewave
