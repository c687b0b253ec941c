// SPDX-License-Identifier: Apache-2.0
//
// platewave: forward accuracy tests, far-field synthesis and qualitative
// reconstruction from the command line.
//
//   platewave forward-test  --preset accuracy --gate
//   platewave synthesize    --config run.json --out results
//   platewave reconstruct   --config run.json --matrix results/.../farfield.bhff
//   platewave experiment    example1 --seed 7 --workers 4
//   platewave print-config  example2
//
// Failures print one line "error: <code>: <message>" to stderr and exit
// nonzero: 1 gate, 2 usage or config, 3 io, 4 solver.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "platewave/experiment.hpp"
#include "platewave/parallel.hpp"

namespace {

using namespace platewave;

int exit_code(const std::string& code) {
  if (code == "gate") return 1;
  if (code == "usage" || code == "config") return 2;
  if (code == "io") return 3;
  return 4;
}

struct Common {
  std::string config;
  std::string preset_name;
  std::optional<std::uint64_t> seed;
  std::string out = "platewave-out";
  bool gate = false;
};

std::vector<ExperimentConfig> load_runs(const Common& o) {
  if (o.config.empty() == o.preset_name.empty())
    throw HarnessError("usage", "pass exactly one of --config or --preset");
  std::vector<ExperimentConfig> runs;
  if (!o.preset_name.empty()) {
    runs = preset(o.preset_name);
  } else {
    std::ifstream in(o.config);
    if (!in) throw HarnessError("io", "cannot read " + o.config);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(o.config + ": " + e.what());
    }
    if (j.is_array())
      for (const auto& item : j) runs.push_back(config_from_json(item));
    else
      runs.push_back(config_from_json(j));
  }
  if (o.seed)
    for (auto& r : runs) r.noise.seed = *o.seed;
  for (const auto& r : runs) r.validate();
  return runs;
}

void report(const RunResult& r) {
  std::printf("run %s%s\n", r.directory.string().c_str(), r.reused ? " (existing, not rewritten)" : "");
  for (const auto& [stage, s] : r.timings) std::printf("  time %-12s %.2f s\n", stage.c_str(), s);
  for (const auto& g : r.gates)
    std::printf("  gate %-28s %.6g (threshold %.6g) %s\n", g.name.c_str(), g.value, g.threshold,
                g.pass ? "PASS" : "FAIL");
}

int finish(const std::vector<RunResult>& results, bool gate) {
  std::size_t failed = 0;
  for (const auto& r : results)
    for (const auto& g : r.gates) failed += g.pass ? 0 : 1;
  if (gate && failed)
    throw HarnessError("gate", std::to_string(failed) + " acceptance gate(s) failed");
  return 0;
}

void add_common(CLI::App* cmd, Common& o, bool config_source) {
  if (config_source) {
    cmd->add_option("--config", o.config, "Experiment config (JSON object or array of objects)");
    cmd->add_option("--preset", o.preset_name, "Named preset instead of --config");
  }
  cmd->add_option("--seed", o.seed, "Override the noise seed of every run");
  cmd->add_option("--out", o.out, "Output root; runs go to <out>/<name>-<hash>");
  cmd->add_flag("--gate", o.gate, "Exit nonzero when an acceptance gate fails");
}

int run(int argc, char** argv) {
  CLI::App app{"Flexural-wave scattering and qualitative inverse scattering toolkit"};
  app.require_subcommand(1);
  int workers = 0;
  app.add_option("--workers", workers, "Worker threads (default: PLATEWAVE_WORKERS or 1)")
      ->check(CLI::PositiveNumber);
  app.set_version_flag("--version", toolkit_version);

  Common fwd, syn, rec, exp;
  std::string matrix, experiment_name, print_name;
  auto* c_fwd = app.add_subcommand("forward-test", "Point-source accuracy test");
  add_common(c_fwd, fwd, true);
  auto* c_syn = app.add_subcommand("synthesize", "Far-field matrix synthesis");
  add_common(c_syn, syn, true);
  auto* c_rec = app.add_subcommand("reconstruct", "LSM and DSM indicators from a matrix file");
  add_common(c_rec, rec, true);
  c_rec->add_option("--matrix", matrix, "Far-field matrix file (BHFF)")->required();
  auto* c_exp = app.add_subcommand("experiment", "Run a named example end to end");
  add_common(c_exp, exp, false);
  c_exp->add_option("name", experiment_name, "example1 ... example5, accuracy, accuracy-circle")
      ->required();
  auto* c_print = app.add_subcommand("print-config", "Print the runs of a preset as JSON");
  c_print->add_option("name", print_name, "Preset name")->required();
  app.add_subcommand("list-presets", "List preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    throw HarnessError("usage", e.what());
  }

  if (workers == 0)
    if (const char* env = std::getenv("PLATEWAVE_WORKERS")) {
      try {
        workers = std::stoi(env);
      } catch (const std::exception&) {
        throw HarnessError("usage", "PLATEWAVE_WORKERS must be an integer");
      }
      if (workers < 1) throw HarnessError("usage", "PLATEWAVE_WORKERS must be >= 1");
    }
  set_worker_count(workers > 0 ? workers : 1);

  std::vector<RunResult> results;
  if (app.got_subcommand("list-presets")) {
    for (const auto& n : preset_names()) std::printf("%s\n", n.c_str());
    return 0;
  }
  if (*c_print) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : preset(print_name)) j.push_back(to_json(r));
    std::printf("%s\n", j.dump(2).c_str());
    return 0;
  }
  if (*c_fwd) {
    for (const auto& r : load_runs(fwd)) {
      results.push_back(run_forward_test(r, fwd.out));
      const auto& m = results.back().metrics["forward"];
      std::printf("%-24s N = %-6zu relative error = %.3e\n", r.name.c_str(),
                  m["nodes"].get<std::size_t>(), m["relative_error"].get<double>());
      report(results.back());
    }
    return finish(results, fwd.gate);
  }
  if (*c_syn) {
    for (const auto& r : load_runs(syn)) {
      results.push_back(run_synthesis(r, syn.out));
      report(results.back());
    }
    return finish(results, syn.gate);
  }
  if (*c_rec) {
    for (const auto& r : load_runs(rec)) {
      results.push_back(run_reconstruction(r, matrix, rec.out));
      report(results.back());
    }
    return finish(results, rec.gate);
  }
  exp.preset_name = experiment_name;
  for (const auto& r : load_runs(exp)) {
    const bool forward_only =
        r.methods.lsm_alphas.empty() && !r.methods.dsm1_rho && !r.methods.dsm2_rho;
    results.push_back(forward_only ? run_forward_test(r, exp.out) : run_experiment(r, exp.out));
    report(results.back());
  }
  return finish(results, exp.gate);
}

// Messages from parsers may span lines; the error line must not.
std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const platewave::HarnessError& e) {
    std::fflush(stdout);
    std::fprintf(stderr, "error: %s: %s\n", e.code().c_str(), one_line(e.what()).c_str());
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::fflush(stdout);
    std::fprintf(stderr, "error: internal: %s\n", one_line(e.what()).c_str());
    return 4;
  }
}
