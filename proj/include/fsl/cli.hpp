#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fsl/analysis.hpp"
#include "fsl/evolve.hpp"
#include "fsl/front.hpp"
#include "fsl/model.hpp"
#include "fsl/weight.hpp"

namespace fsl {

// Recipe for the initial perturbation of a simulation run.  Amplitudes of
// zero switch the corresponding part off.
struct InitialSpec {
  double v_amp = 0.0;   // Gaussian bump riding on the profile
  int v_component = 0;  // component index carrying the bump
  double v_center = 0.0;
  double v_width = 2.0;
  double q_amp = 0.02;             // interface displacement amplitude
  std::string q_shape = "dipole";  // "dipole" (zero mean) or "bump"
  double q_width_fraction = 0.12;  // transverse width over box length
};

// Everything one run needs.  Parsing is strict: unknown keys are rejected so
// a typo cannot silently fall back to a default.
struct RunConfig {
  RunConfig() { sim.ygrid = TransverseGrid{1, {64, 1}, {40.0, 1.0}}; }

  std::string model = "bistable";  // "bistable" or "combustion"
  BistableParams bistable;
  CombustionParams combustion;
  bool combustion_theory = true;  // pin the marginal rest state exactly

  AutoSolveSpec front;  // front.L = 0 picks the width from the tail rates

  double nu_target = 0.0;    // decay margin; 0 = c^2 / 10 once c is known
  bool search_weight = true; // false takes `alpha` below as given
  WeightSpec alpha;

  // sim.alpha is filled from the weight stage artifact; the default grid is a
  // small but valid transverse box
  SimConfig sim;
  InitialSpec init;
  AnalysisConfig analysis;

  std::filesystem::path output_dir = "out";
  unsigned long long seed = 1;

  void validate() const;  // throws ConfigError on inconsistent settings
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);

// Normal form with every key spelled out; parsing it again reproduces the
// config, and equal configs serialize to identical bytes.
std::string serialize_run_config(const RunConfig& cfg);

enum class Stage { Front, Spectrum, Weight, Simulate, Verify, All };
Stage parse_stage(const std::string& name);

// One verified statement: an id, the quoted phrase pinning down which
// statement is meant, its status, and the numbers behind the verdict.
struct Claim {
  std::string id;
  std::string anchor;
  std::string status;  // "pass", "fail", or "skipped"
  std::map<std::string, double> fitted;
  double tolerance = 0.0;
  std::string detail;
};

struct PipelineResult {
  int exit_code = 0;  // 0 pass, 1 failed checks, 2 config/usage, 3 numerics
  std::vector<Claim> claims;
  std::vector<std::string> failed_ids;
  std::vector<std::filesystem::path> artifacts;
};

// Executes the requested stage (or the whole chain) against cfg.output_dir.
// Later stages load the artifacts earlier ones wrote and refuse to run with
// an error naming the missing prerequisite stage.  Numerical failures
// (solver, spectrum, decomposition, blow-up) propagate as exceptions; the
// binary maps them to exit code 3.
PipelineResult run_pipeline(const RunConfig& cfg, Stage stage);

// Writes claims.json (sorted keys), claims.csv, and summary.txt under dir,
// returning the paths.  Output is deterministic: claims are ordered by id
// and numbers are printed in shortest round-trip form.
std::vector<std::filesystem::path> write_report(const std::vector<Claim>& claims,
                                                const std::filesystem::path& dir);

}  // namespace fsl
