// front-stability-lab: traveling-front computation, weighted spectra and
// decay verification for planar reaction-diffusion fronts, driven by a JSON
// config.  Exit codes: 0 all checks pass, 1 a check failed, 2 bad config or
// missing artifact, 3 a numerical stage broke down.

#include <CLI11.hpp>
#include <Eigen/Core>
#include <cstdlib>
#include <iostream>

#include "fsl/cli.hpp"
#include "fsl/errors.hpp"

int main(int argc, char** argv) {
  // all kernels are written single-threaded; honour an explicit request only
  if (const char* th = std::getenv("FSL_THREADS")) {
    const int n = std::atoi(th);
    if (n >= 1) Eigen::setNbThreads(n);
  } else {
    Eigen::setNbThreads(1);
  }

  CLI::App app{"numerical laboratory for planar traveling-front stability"};
  app.require_subcommand(1);

  std::string config_path, stage_name = "all", out_override, seed_override;
  CLI::App* run = app.add_subcommand("run", "execute pipeline stages from a config");
  run->add_option("--config", config_path, "JSON run configuration")->required();
  run->add_option("--stage", stage_name, "front|spectrum|weight|simulate|verify|all");
  run->add_option("--out", out_override, "override the output directory");
  run->add_option("--seed", seed_override, "override the sampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    fsl::RunConfig cfg = fsl::load_run_config(config_path);
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (!seed_override.empty()) cfg.seed = std::stoull(seed_override);
    const fsl::Stage stage = fsl::parse_stage(stage_name);

    const fsl::PipelineResult res = fsl::run_pipeline(cfg, stage);
    for (const auto& p : res.artifacts) std::cout << "wrote " << p.string() << "\n";
    for (const auto& c : res.claims)
      std::cout << c.status << "  " << c.id << "\n";
    if (!res.failed_ids.empty()) {
      std::cout << "failed:";
      for (const auto& id : res.failed_ids) std::cout << ' ' << id;
      std::cout << "\n";
    }
    return res.exit_code;
  } catch (const fsl::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fsl::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fsl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
