#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "fsl/cli.hpp"
#include "fsl/errors.hpp"
#include "fsl/front.hpp"

using namespace fsl;
namespace fs = std::filesystem;

namespace {

// small end-to-end setup: short front, coarse transverse box, two time units
RunConfig tiny_config(const fs::path& out) {
  RunConfig cfg;
  cfg.model = "bistable";
  cfg.front.L = 15.0;
  cfg.front.h = 0.1;
  cfg.sim.d = 2;
  cfg.sim.ygrid.dim = 1;
  cfg.sim.ygrid.n = {16, 1};
  cfg.sim.ygrid.box = {8.0, 1.0};
  cfg.sim.t_end = 2.0;
  cfg.sim.output_stride = 4;
  cfg.sim.k = 2;
  cfg.init.v_amp = 0.005;
  cfg.init.q_amp = 0.01;
  cfg.analysis.fit_window = {0.5, 2.0};
  cfg.analysis.bound_slack = 3.0;
  cfg.output_dir = out;
  return cfg;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("fsl_cli_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("run configs survive a serialize and parse round trip") {
  RunConfig cfg = tiny_config("out/x");
  cfg.seed = 42;
  cfg.init.q_shape = "bump";
  cfg.nu_target = 0.02;
  const std::string once = serialize_run_config(cfg);
  const RunConfig back = parse_run_config(once);
  CHECK(serialize_run_config(back) == once);
  CHECK(back.seed == 42);
  CHECK(back.init.q_shape == "bump");
  CHECK(back.nu_target == doctest::Approx(0.02));
  CHECK(back.sim.ygrid.n[0] == 16);

  RunConfig comb;
  comb.model = "combustion";
  comb.combustion.epsilon = 0.0;
  const std::string ctext = serialize_run_config(comb);
  CHECK(serialize_run_config(parse_run_config(ctext)) == ctext);
}

TEST_CASE("unknown or malformed keys are rejected with their path") {
  CHECK_THROWS_AS(parse_run_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[1,2]"), ConfigError);

  CHECK_THROWS_WITH_AS(parse_run_config(R"({"bogus": 1})"),
                       doctest::Contains("bogus"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config(R"({"sim": {"zzz": 1}})"),
                       doctest::Contains("sim.zzz"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_run_config(R"({"model": {"name": "bistable", "kappa": 1}})"),
                       doctest::Contains("model.kappa"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"model": {"name": "fisher"}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"front": {"L": "ten"}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"sim": {"d": 2, "ny": [8, 8]}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"sim": {"d": 4}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"analysis": {"fit_window": [1.0]}})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"seed": -3})"), ConfigError);
  CHECK_THROWS_AS(parse_run_config(R"({"init": {"q_shape": "plume"}})"), ConfigError);
  CHECK_THROWS_AS(load_run_config("/nonexistent/cfg.json"), IoError);
}

TEST_CASE("stage names resolve and unknown ones throw") {
  CHECK(parse_stage("front") == Stage::Front);
  CHECK(parse_stage("spectrum") == Stage::Spectrum);
  CHECK(parse_stage("weight") == Stage::Weight);
  CHECK(parse_stage("simulate") == Stage::Simulate);
  CHECK(parse_stage("verify") == Stage::Verify);
  CHECK(parse_stage("all") == Stage::All);
  CHECK_THROWS_AS(parse_stage("everything"), ConfigError);
}

TEST_CASE("front stage writes a loadable profile with the example speed") {
  const fs::path dir = fresh_dir("front");
  RunConfig cfg = tiny_config(dir);
  const PipelineResult res = run_pipeline(cfg, Stage::Front);
  CHECK(res.exit_code == 0);
  REQUIRE(fs::exists(dir / "front.json"));
  const FrontProfile f = load_front(dir / "front.json");
  CHECK(f.c == doctest::Approx(0.28284271247461906).epsilon(1e-5));
  CHECK(f.nc == 1);
  fs::remove_all(dir);
}

TEST_CASE("stages demand their upstream artifacts by name") {
  const fs::path dir = fresh_dir("missing");
  RunConfig cfg = tiny_config(dir);
  CHECK_THROWS_WITH_AS(run_pipeline(cfg, Stage::Spectrum),
                       doctest::Contains("front stage first"), IoError);
  CHECK_THROWS_WITH_AS(run_pipeline(cfg, Stage::Verify),
                       doctest::Contains("front stage first"), IoError);
  run_pipeline(cfg, Stage::Front);
  CHECK_THROWS_WITH_AS(run_pipeline(cfg, Stage::Simulate),
                       doctest::Contains("weight stage first"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("an empty claim set writes a valid report skeleton") {
  const fs::path dir = fresh_dir("empty_report");
  const auto paths = write_report({}, dir);
  REQUIRE(paths.size() == 3);
  const auto j = nlohmann::json::parse(slurp(dir / "claims.json"));
  CHECK(j.at("claims").is_array());
  CHECK(j.at("claims").empty());
  CHECK(j.at("summary").at("pass").get<int>() == 0);
  CHECK(j.at("summary").at("fail").get<int>() == 0);
  const std::string csv = slurp(dir / "claims.csv");
  CHECK(csv.rfind("claim_id,status,", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("identical seeds reproduce the report and series byte for byte") {
  const fs::path da = fresh_dir("det_a");
  const fs::path db = fresh_dir("det_b");
  RunConfig ca = tiny_config(da);
  RunConfig cb = tiny_config(db);
  const PipelineResult ra = run_pipeline(ca, Stage::All);
  const PipelineResult rb = run_pipeline(cb, Stage::All);
  CHECK(ra.exit_code == rb.exit_code);
  CHECK(slurp(da / "claims.json") == slurp(db / "claims.json"));
  CHECK(slurp(da / "series.csv") == slurp(db / "series.csv"));

  // the run leaves a complete artifact trail
  for (const char* name : {"front.json", "spectrum.json", "weight.json", "series.csv",
                           "simulate.json", "claims.json", "claims.csv", "summary.txt"})
    CHECK(fs::exists(da / name));

  // and the claims carry the anchor lines the report format pins down
  const auto j = nlohmann::json::parse(slurp(da / "claims.json"));
  bool saw_item3 = false, saw_weight = false, saw_integral = false;
  for (const auto& c : j.at("claims")) {
    const std::string id = c.at("claim_id").get<std::string>();
    const std::string anchor = c.at("anchor").get<std::string>();
    if (id == "theorem_main_item3") {
      saw_item3 = true;
      CHECK(anchor == "Then for all $t> 0$");
    }
    if (id == "admissible_weight") {
      saw_weight = true;
      CHECK(anchor == "bounded away from the imaginary axis");
      CHECK(c.at("status").get<std::string>() == "pass");
    }
    if (id == "integral_inequalities") {
      saw_integral = true;
      CHECK(anchor == "Suppose $a,b,c>0$, then");
      CHECK(c.at("status").get<std::string>() == "pass");
    }
  }
  CHECK(saw_item3);
  CHECK(saw_weight);
  CHECK(saw_integral);
  fs::remove_all(da);
  fs::remove_all(db);
}
