#include "fsl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "fsl/errors.hpp"
#include "fsl/fft.hpp"
#include "fsl/norms.hpp"
#include "fsl/projection.hpp"
#include "fsl/spectrum.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace fsl {

namespace {

// ---------------------------------------------------------------- parsing

void expect_keys(const json& j, const std::string& path,
                 std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError("config: '" + path + "' must be an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known) throw ConfigError("config: unknown key '" + path + item.key() + "'");
  }
}

double jnum(const json& j, const char* key, double dflt, const std::string& path) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number()) throw ConfigError("config: '" + path + key + "' must be a number");
  return j[key].get<double>();
}

int jint(const json& j, const char* key, int dflt, const std::string& path) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number_integer())
    throw ConfigError("config: '" + path + key + "' must be an integer");
  return j[key].get<int>();
}

bool jbool(const json& j, const char* key, bool dflt, const std::string& path) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_boolean()) throw ConfigError("config: '" + path + key + "' must be a boolean");
  return j[key].get<bool>();
}

std::string jstr(const json& j, const char* key, const std::string& dflt,
                 const std::string& path) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_string()) throw ConfigError("config: '" + path + key + "' must be a string");
  return j[key].get<std::string>();
}

std::vector<double> jnum_array(const json& j, const char* key, std::vector<double> dflt,
                               const std::string& path) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_array()) throw ConfigError("config: '" + path + key + "' must be an array");
  std::vector<double> out;
  for (const auto& e : j[key]) {
    if (!e.is_number()) throw ConfigError("config: '" + path + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

// ------------------------------------------------------------- artifacts

json read_json_file(const fs::path& p, const std::string& what) {
  std::ifstream in(p);
  if (!in) throw IoError(what + ": cannot read " + p.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError(what + ": " + p.string() + " is not valid JSON (" + e.what() + ")");
  }
}

void write_json_file(const json& j, const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw IoError("cannot write " + p.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + p.string());
}

void require_artifact(const fs::path& p, const std::string& stage, const std::string& producer) {
  if (!fs::exists(p))
    throw IoError(stage + " stage needs " + p.string() + "; run the " + producer +
                  " stage first");
}

ReactionSystem make_system(const RunConfig& cfg) {
  if (cfg.model == "bistable") return make_bistable(cfg.bistable);
  return make_combustion(cfg.combustion, cfg.combustion_theory);
}

Eigen::VectorXd to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

int sobolev_order(const SimConfig& sim) {
  return sim.k != 0 ? sim.k : (sim.d + 2) / 2;
}

// --------------------------------------------------- initial perturbation

YField initial_q(const TransverseGrid& yg, const InitialSpec& spec) {
  YField q(yg.total());
  const double w0 = spec.q_width_fraction * yg.box[0];
  const double c0 = 0.5 * yg.box[0];
  const int n1 = yg.dim == 2 ? yg.n[1] : 1;
  for (int i0 = 0; i0 < yg.n[0]; ++i0)
    for (int i1 = 0; i1 < n1; ++i1) {
      const double y0 = yg.y(0, i0) - c0;
      double g = std::exp(-0.5 * y0 * y0 / (w0 * w0));
      if (yg.dim == 2) {
        const double w1 = spec.q_width_fraction * yg.box[1];
        const double y1 = yg.y(1, i1) - 0.5 * yg.box[1];
        g *= std::exp(-0.5 * y1 * y1 / (w1 * w1));
      }
      if (spec.q_shape == "dipole") g *= -y0 / w0;
      q.a[yg.index(i0, i1)] = spec.q_amp * g;
    }
  if (spec.q_shape == "dipole") {
    // the periodic wrap leaves a tiny residue of the odd symmetry; remove it
    // exactly so the mass-free mode analysis applies
    double mean = 0.0;
    for (double v : q.a) mean += v;
    mean /= q.a.size();
    for (double& v : q.a) v -= mean;
  }
  return q;
}

Field initial_v(const FrontProfile& f, const TransverseGrid& yg, const InitialSpec& spec) {
  Field v(f.nc, f.grid.n, yg.total());
  if (spec.v_amp == 0.0) return v;
  const int comp = spec.v_component;
  if (comp < 0 || comp >= f.nc)
    throw ConfigError("init: v_component out of range for this model");
  const int n1 = yg.dim == 2 ? yg.n[1] : 1;
  for (int iz = 0; iz < f.grid.n; ++iz) {
    const double z = f.grid.z(iz);
    const double env =
        spec.v_amp * std::exp(-0.5 * (z - spec.v_center) * (z - spec.v_center) /
                              (spec.v_width * spec.v_width));
    for (int i0 = 0; i0 < yg.n[0]; ++i0)
      for (int i1 = 0; i1 < n1; ++i1) {
        const double y0 = yg.y(0, i0) / yg.box[0];
        v.at(comp, iz, yg.index(i0, i1)) = env * (1.0 + 0.2 * std::cos(2.0 * M_PI * y0));
      }
  }
  return v;
}

PerturbationState initial_state(const FrontProfile& f, const AdjointNullvector& e,
                                const TransverseGrid& yg, const InitialSpec& spec) {
  PerturbationState st;
  st.v = initial_v(f, yg, spec);
  if (spec.v_amp != 0.0) {
    // remove the front-displacement content of the bump; on a periodic box a
    // uniform shift is conserved, so any pairing residue would never decay
    const YField s = pi_alpha(st.v, e);
    const double den = pi_alpha_profile(f.dzfield(), e);
    for (int c = 0; c < f.nc; ++c)
      for (int iz = 0; iz < f.grid.n; ++iz) {
        const double dphi = f.dvalue(c, iz);
        for (int iy = 0; iy < yg.total(); ++iy)
          st.v.at(c, iz, iy) -= (s.a[iy] / den) * dphi;
      }
  }
  st.q = initial_q(yg, spec);
  TransverseFft fft(yg);
  st.w = spectral_gradient(st.q, fft);
  return st;
}

// ------------------------------------------------------------ claim glue

Claim make_claim(std::string id, std::string anchor, bool pass,
                 std::map<std::string, double> fitted, double tol, std::string detail) {
  Claim c;
  c.id = std::move(id);
  c.anchor = std::move(anchor);
  c.status = pass ? "pass" : "fail";
  c.fitted = std::move(fitted);
  c.tolerance = tol;
  c.detail = std::move(detail);
  return c;
}

Claim skipped_claim(std::string id, std::string anchor, std::string why) {
  Claim c;
  c.id = std::move(id);
  c.anchor = std::move(anchor);
  c.status = "skipped";
  c.detail = std::move(why);
  return c;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Random perturbations inside the smallness ball, deterministic in the seed.
std::vector<PerturbationState> sample_states(const FrontProfile& f, const TransverseGrid& yg,
                                             unsigned long long seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  TransverseFft fft(yg);
  const int ny = yg.total();
  std::vector<PerturbationState> out;
  out.reserve(count);
  for (int s = 0; s < count; ++s) {
    PerturbationState st;
    st.v = Field(f.nc, f.grid.n, ny);
    const double center = 4.0 * (uni(rng) - 0.5);
    const double width = 1.0 + 2.0 * uni(rng);
    const double phase = 2.0 * M_PI * uni(rng);
    for (int c = 0; c < f.nc; ++c) {
      // small enough that the cubic remainder stays below the quarter band of
      // the quadratic-scaling check even where the second derivative of the
      // reaction term changes sign along the profile
      const double amp = 0.002 + 0.004 * uni(rng);
      for (int iz = 0; iz < f.grid.n; ++iz) {
        const double z = f.grid.z(iz);
        const double env = amp * std::exp(-0.5 * (z - center) * (z - center) / (width * width));
        for (int iy = 0; iy < ny; ++iy)
          st.v.at(c, iz, iy) = env * (1.0 + 0.4 * std::cos(2.0 * M_PI * iy / ny + phase));
      }
    }
    st.q = YField(ny);
    const double qa1 = 0.0015 + 0.003 * uni(rng), qa2 = 0.001 + 0.0015 * uni(rng);
    const double p1 = 2.0 * M_PI * uni(rng), p2 = 2.0 * M_PI * uni(rng);
    for (int iy = 0; iy < ny; ++iy) {
      const double u = static_cast<double>(iy) / ny;
      st.q.a[iy] = qa1 * std::sin(2.0 * M_PI * u + p1) + qa2 * std::cos(4.0 * M_PI * u + p2);
    }
    st.w = spectral_gradient(st.q, fft);
    out.push_back(std::move(st));
  }
  return out;
}

struct StageContext {
  const RunConfig& cfg;
  fs::path out;
  std::vector<Claim> claims;
  std::vector<fs::path> artifacts;
};

void run_front_stage(StageContext& ctx) {
  ReactionSystem sys = make_system(ctx.cfg);
  FrontProfile f = solve_front_auto(sys, ctx.cfg.front);
  const fs::path p = ctx.out / "front.json";
  save_front(f, p);
  ctx.artifacts.push_back(p);
}

void run_spectrum_stage(StageContext& ctx) {
  require_artifact(ctx.out / "front.json", "spectrum", "front");
  ReactionSystem sys = make_system(ctx.cfg);
  FrontProfile f = load_front(ctx.out / "front.json");

  const std::vector<double> grid = default_theta_grid(f.c);
  const Eigen::MatrixXd a_minus = eval_jacobian(sys, to_vec(f.phi_minus));
  const Eigen::MatrixXd a_plus = eval_jacobian(sys, to_vec(f.phi_plus));

  DispersionCurve minus = dispersion_curves(a_minus, f.c, 0.0, grid, -1);
  DispersionCurve plus = dispersion_curves(a_plus, f.c, 0.0, grid, +1);
  write_dispersion_csv(minus, ctx.out / "dispersion_minus.csv");
  write_dispersion_csv(plus, ctx.out / "dispersion_plus.csv");

  const double closed = essential_abscissa(f, sys, WeightSpec{0.0, 0.0, 1.0});
  const double sampled = std::max(essential_abscissa_sampled(a_minus, f.c, 0.0, grid),
                                  essential_abscissa_sampled(a_plus, f.c, 0.0, grid));

  json j;
  j["c"] = f.c;
  j["alpha"] = 0.0;
  j["essential_abscissa"] = closed;
  j["essential_abscissa_sampled"] = sampled;
  j["closed_sampled_gap"] = std::abs(closed - sampled);
  j["curves"] = {"dispersion_minus.csv", "dispersion_plus.csv"};
  write_json_file(j, ctx.out / "spectrum.json");
  ctx.artifacts.push_back(ctx.out / "dispersion_minus.csv");
  ctx.artifacts.push_back(ctx.out / "dispersion_plus.csv");
  ctx.artifacts.push_back(ctx.out / "spectrum.json");
}

double resolved_nu(const RunConfig& cfg, double c) {
  return cfg.nu_target > 0.0 ? cfg.nu_target : 0.1 * c * c;
}

Claim weight_claim(const json& w) {
  const bool found = w.at("found").get<bool>();
  return make_claim("admissible_weight", "bounded away from the imaginary axis", found,
                    {{"alpha_minus", w.at("alpha_minus").get<double>()},
                     {"alpha_plus", w.at("alpha_plus").get<double>()},
                     {"abscissa", w.at("abscissa").get<double>()},
                     {"nu", w.at("nu").get<double>()}},
                    0.0,
                    found ? "weighted essential spectrum clears the margin"
                          : "no admissible weight rectangle candidate passed");
}

void run_weight_stage(StageContext& ctx) {
  require_artifact(ctx.out / "front.json", "weight", "front");
  ReactionSystem sys = make_system(ctx.cfg);
  FrontProfile f = load_front(ctx.out / "front.json");
  const double nu = resolved_nu(ctx.cfg, f.c);

  WeightSpec spec = ctx.cfg.alpha;
  AdmissibilityReport rep;
  bool found = false;
  if (ctx.cfg.search_weight) {
    WeightSearchResult r = find_weight(f, sys, nu);
    found = r.found;
    if (r.found) spec = r.spec;
    rep = r.report;
  } else {
    rep = weight_admissibility(f, sys, spec, nu);
    found = rep.admissible();
  }

  json j;
  j["found"] = found;
  j["alpha_minus"] = spec.alpha_minus;
  j["alpha_plus"] = spec.alpha_plus;
  j["bridge"] = spec.bridge_halfwidth;
  j["nu"] = nu;
  j["abscissa"] = rep.abscissa;
  j["translational_re"] = rep.translational.real();
  j["translational_im"] = rep.translational.imag();
  j["n_right"] = rep.n_right;
  j["rate_minus_ok"] = rep.rate_minus_ok;
  j["rate_plus_ok"] = rep.rate_plus_ok;
  j["abscissa_ok"] = rep.abscissa_ok;
  j["eigenvalue_ok"] = rep.eigenvalue_ok;
  write_json_file(j, ctx.out / "weight.json");
  ctx.artifacts.push_back(ctx.out / "weight.json");
  ctx.claims.push_back(weight_claim(j));
}

void run_simulate_stage(StageContext& ctx) {
  require_artifact(ctx.out / "front.json", "simulate", "front");
  require_artifact(ctx.out / "weight.json", "simulate", "weight");
  ReactionSystem sys = make_system(ctx.cfg);
  FrontProfile f = load_front(ctx.out / "front.json");
  const json w = read_json_file(ctx.out / "weight.json", "simulate");

  SimConfig sc = ctx.cfg.sim;
  sc.alpha = WeightSpec{w.at("alpha_minus").get<double>(), w.at("alpha_plus").get<double>(),
                        w.at("bridge").get<double>()};

  const AdjointNullvector e = compute_adjoint(f, sys, sc.alpha);
  PerturbationState init = initial_state(f, e, sc.ygrid, ctx.cfg.init);
  SimResult res = simulate_perturbed_front(sys, f, init, sc);

  write_norm_series_csv(res.series, ctx.out / "series.csv");
  ctx.artifacts.push_back(ctx.out / "series.csv");

  json j;
  j["dt_used"] = res.dt_used;
  j["steps"] = res.steps;
  j["k"] = sobolev_order(sc);
  j["d"] = sc.d;
  j["E_k"] = res.series.E_k;
  j["seam_warning"] = res.seam_warning;
  j["seam_level"] = res.seam_level;
  if (res.series.T_exit)
    j["T_exit"] = *res.series.T_exit;
  else
    j["T_exit"] = nullptr;
  if (res.series.breakdown_time)
    j["breakdown_time"] = *res.series.breakdown_time;
  else
    j["breakdown_time"] = nullptr;
  write_json_file(j, ctx.out / "simulate.json");
  ctx.artifacts.push_back(ctx.out / "simulate.json");

  if (!res.snapshots.empty()) {
    save_snapshot(res.snapshots.front(), ctx.out / "snapshot_initial");
    save_snapshot(res.snapshots.back(), ctx.out / "snapshot_final");
    ctx.artifacts.push_back(ctx.out / "snapshot_initial.json");
    ctx.artifacts.push_back(ctx.out / "snapshot_final.json");
  }
}

// Two short runs from neighbouring initial data; the gap between the final
// states must stay proportional to the gap between the initial ones.
Claim continuity_claim(const RunConfig& cfg, const ReactionSystem& sys, const FrontProfile& f,
                       const WeightSpec& ws) {
  const char* kAnchor = "is continuous with respect to the initial data";
  if (cfg.init.q_amp == 0.0 && cfg.init.v_amp == 0.0)
    return skipped_claim("initial_data_continuity", kAnchor,
                         "no initial perturbation to vary");

  SimConfig sc = cfg.sim;
  sc.alpha = ws;
  sc.t_end = std::min(1.0, cfg.sim.t_end);
  sc.snapshot_stride = 0;
  sc.delta = 0.0;

  InitialSpec bumped = cfg.init;
  bumped.q_amp *= 1.001;
  bumped.v_amp *= 1.001;

  const AdjointNullvector e = compute_adjoint(f, sys, ws);
  SimResult a = simulate_perturbed_front(sys, f, initial_state(f, e, sc.ygrid, cfg.init), sc);
  SimResult b = simulate_perturbed_front(sys, f, initial_state(f, e, sc.ygrid, bumped), sc);

  const int k = sobolev_order(sc);
  TransverseFft fft(sc.ygrid);
  const auto gap = [&](const Snapshot& sa, const Snapshot& sb) {
    Field d = sa.u;
    for (size_t i = 0; i < d.a.size(); ++i) d.a[i] -= sb.u.a[i];
    return sobolev_norm(d, f.grid, fft, k);
  };
  const double gap0 = gap(a.snapshots.front(), b.snapshots.front());
  const double gapT = gap(a.snapshots.back(), b.snapshots.back());
  if (gap0 <= 0.0)
    return skipped_claim("initial_data_continuity", kAnchor,
                         "initial states coincide on this grid");
  const double ratio = gapT / gap0;
  return make_claim("initial_data_continuity", kAnchor, ratio <= 10.0,
                    {{"initial_gap", gap0}, {"final_gap", gapT}, {"amplification", ratio}}, 10.0,
                    "final-state gap over initial-state gap at t = " + fmt(sc.t_end));
}

void run_verify_stage(StageContext& ctx) {
  require_artifact(ctx.out / "front.json", "verify", "front");
  require_artifact(ctx.out / "weight.json", "verify", "weight");
  require_artifact(ctx.out / "series.csv", "verify", "simulate");
  require_artifact(ctx.out / "simulate.json", "verify", "simulate");

  const RunConfig& cfg = ctx.cfg;
  ReactionSystem sys = make_system(cfg);
  FrontProfile f = load_front(ctx.out / "front.json");
  const json w = read_json_file(ctx.out / "weight.json", "verify");
  const json siminfo = read_json_file(ctx.out / "simulate.json", "verify");
  NormSeries series = read_norm_series_csv(ctx.out / "series.csv");
  series.E_k = siminfo.at("E_k").get<double>();
  const WeightSpec ws{w.at("alpha_minus").get<double>(), w.at("alpha_plus").get<double>(),
                      w.at("bridge").get<double>()};
  const double nu = w.at("nu").get<double>();
  const int d = cfg.sim.d;

  std::vector<Claim> claims;
  claims.push_back(weight_claim(w));

  // dispersion surfaces: closed form against the sampled grid, at both the
  // plain and the weighted exponent
  {
    const std::vector<double> grid = default_theta_grid(f.c);
    const Eigen::MatrixXd a_minus = eval_jacobian(sys, to_vec(f.phi_minus));
    const Eigen::MatrixXd a_plus = eval_jacobian(sys, to_vec(f.phi_plus));
    double gap = 0.0;
    for (double alpha : {0.0, ws.alpha_minus}) {
      const double closed =
          essential_abscissa(f, sys, WeightSpec{alpha, alpha, ws.bridge_halfwidth});
      const double sampled =
          std::max(essential_abscissa_sampled(a_minus, f.c, alpha, grid),
                   essential_abscissa_sampled(a_plus, f.c, alpha, grid));
      gap = std::max(gap, std::abs(closed - sampled));
    }
    claims.push_back(make_claim("dispersion_closed_form_agreement",
                                "bounded away from the imaginary axis", gap <= 1e-12,
                                {{"max_gap", gap}}, 1e-12,
                                "rightmost dispersion value, formula vs sampled curves"));
  }

  const double ess_weighted = essential_abscissa(f, sys, ws);
  claims.push_back(make_claim(
      "weighted_essential_margin", "bounded away from the imaginary axis", ess_weighted <= -nu,
      {{"abscissa", ess_weighted}, {"nu", nu}}, 0.0,
      "weighted essential abscissa " + fmt(ess_weighted) + " against -nu = " + fmt(-nu)));

  {
    const double mag = std::hypot(w.at("translational_re").get<double>(),
                                  w.at("translational_im").get<double>());
    const bool simple = w.at("eigenvalue_ok").get<bool>();
    claims.push_back(make_claim("translational_eigenvalue_simple", "is a simple eigenvalue",
                                simple && mag < 1e-5,
                                {{"magnitude", mag}, {"n_right", double(w.at("n_right").get<int>())}},
                                1e-5, "lone eigenvalue near zero in the right half-strip"));
  }

  // linear machinery: weighted operator decay, constant-coefficient blocks,
  // heat rates
  {
    SemigroupReport rep = verify_semigroup_bounds(f, sys, ws, cfg.analysis, d);
    claims.push_back(make_claim(
        "weighted_semigroup_decay", "If $\\nu>0$ is such that", rep.abscissa_ok,
        {{"q_abscissa", rep.q_abscissa}, {"nu", rep.nu_used}}, cfg.analysis.tol_abscissa,
        "spectral abscissa off the translational mode vs the decay margin"));
    claims.push_back(make_claim("reaction_block_one_bounded",
                                "The analytic semigroup generated by", rep.block1_bounded,
                                {{"sup", rep.block1_sup}}, 0.0,
                                "first reaction block stays uniformly bounded"));
    claims.push_back(make_claim("reaction_block_two_decays", "located strictly to the left",
                                rep.block2_decays,
                                {{"rho", rep.rho_fitted}, {"sup", rep.block2_sup}}, 0.0,
                                "second reaction block decays at a positive rate"));
    claims.push_back(make_claim(
        "coupled_block_bounded", "generates a bounded semigroup on",
        rep.minus_bounded && rep.triangular_defect == 0.0,
        {{"sup", rep.minus_sup}, {"triangular_defect", rep.triangular_defect}}, 0.0,
        "lower-triangular rest-state block is semigroup bounded"));
    claims.push_back(make_claim(
        "heat_decay_rates", "satisfies the following decay estimates", rep.heat_ok,
        {{"exponent_l1", rep.heat_exponent_l1},
         {"exponent_grad", rep.heat_exponent_grad},
         {"constant", rep.heat_constant}},
        cfg.analysis.tol_exponent, "mass-normalized heat propagation exponents"));
  }

  {
    const auto reports = verify_integral_inequalities(default_integral_cases());
    bool all_ok = true;
    double worst = 0.0;
    for (const auto& r : reports) {
      all_ok = all_ok && r.conditions_met && r.bounded;
      worst = std::max(worst, r.growth);
    }
    const auto control = verify_integral_inequalities({{1, 1.5, 1.0, 2.0}});
    const bool control_fires = !control[0].bounded;
    claims.push_back(make_claim("integral_inequalities", "Suppose $a,b,c>0$, then",
                                all_ok && control_fires,
                                {{"cases", double(reports.size())},
                                 {"worst_tail_slope", worst},
                                 {"control_tail_slope", control[0].growth}},
                                0.1, "bounded convolution ratios plus a diverging control"));
  }

  // nonlinear estimates on seeded random perturbations
  {
    AdjointNullvector e = compute_adjoint(f, sys, ws);
    const int k = sobolev_order(cfg.sim);
    const auto samples = sample_states(f, cfg.sim.ygrid, cfg.seed, 12);
    NonlinearBoundReport rep =
        verify_nonlinear_bounds(samples, f, sys, e, cfg.sim.ygrid, k, cfg.analysis);
    claims.push_back(make_claim("nonlinear_quadratic_bounds", "define locally Lipschitz mappings",
                                rep.quadratic_ok && rep.homogeneity_ok,
                                {{"quad_scaling_worst", rep.quad_scaling_worst},
                                 {"f2_degree", rep.f2_homogeneity},
                                 {"g_degree", rep.g_homogeneity}},
                                0.25, "quadratic scaling of the composite nonlinearities"));
    const double glue_max = std::max(
        {rep.glue_linear.max_ratio, rep.glue_shift.max_ratio, rep.glue_quadratic.max_ratio});
    claims.push_back(make_claim("glue_estimates", "there is a constant $C_K$", glue_max < 1e3,
                                {{"linear", rep.glue_linear.max_ratio},
                                 {"shift", rep.glue_shift.max_ratio},
                                 {"quadratic", rep.glue_quadratic.max_ratio}},
                                1e3, "sampled constants of the pointwise product estimates"));
    claims.push_back(make_claim("modulation_identity", "a relation between",
                                rep.max_identity_residual < 1e-8,
                                {{"max_residual", rep.max_identity_residual}}, 1e-8,
                                "projection of the assembled forcing vanishes"));
  }

  // measured decay against the claimed rates; the checks are one sided, so
  // faster decay than the rate also passes
  {
    const double t_lo = cfg.analysis.fit_window[0];
    const double slack = cfg.analysis.bound_slack;
    const double rv = 0.5 * (d + 1), rq = 0.25 * (d - 1), rw = 0.25 * (d + 1);
    struct Item {
      const char* id;
      const char* column;
      double rate;
    };
    const Item items[] = {{"theorem_main_item3", "v_hka", rv},
                          {"theorem_main_item4", "q_hk", rq},
                          {"theorem_main_item5", "w_hk", rw},
                          {"theorem_main_item7", "v2_hk", rv}};
    for (const Item& it : items) {
      try {
        const auto& col = norm_series_column(series, it.column);
        const double peak = col.empty() ? 0.0 : *std::max_element(col.begin(), col.end());
        if (peak < 1e-12) {
          claims.push_back(skipped_claim(it.id, "Then for all $t> 0$",
                                         std::string(it.column) +
                                             " never rises above round-off"));
          continue;
        }
        DecayBoundCheck chk = check_decay_bound(series, it.column, it.rate, t_lo, slack);
        std::map<std::string, double> fitted{{"rate", it.rate},
                                             {"max_excess", chk.max_excess},
                                             {"C_over_Ek", chk.C_over_Ek}};
        try {
          ExponentFit fit = fit_decay_exponent(series, it.column, t_lo, series.t.back());
          fitted["fitted_exponent"] = fit.exponent;
        } catch (const ConfigError&) {
          // a column that decays to exact zero has no log-log fit; the bound
          // check above already passed and carries the verdict
        }
        claims.push_back(make_claim(it.id, "Then for all $t> 0$", chk.pass, fitted, slack,
                                    std::string(it.column) + " <= C (1+t)^{-" + fmt(it.rate) +
                                        "} E_k, C set at t = " + fmt(chk.calibrated_at)));
      } catch (const ConfigError& e) {
        claims.push_back(skipped_claim(it.id, "Then for all $t> 0$", e.what()));
      }
    }

    // the unweighted first block does not decay, it only has to stay bounded
    double m_early = 0.0, m_all = 0.0;
    for (size_t i = 0; i < series.t.size(); ++i) {
      m_all = std::max(m_all, series.v1_hk[i]);
      if (series.t[i] <= t_lo) m_early = std::max(m_early, series.v1_hk[i]);
    }
    const bool v1_ok = m_early > 0.0 ? m_all <= 2.0 * m_early : m_all <= 1e-12;
    claims.push_back(make_claim("theorem_main_item6", "Then for all $t> 0$", v1_ok,
                                {{"max_early", m_early}, {"max_all", m_all}}, 2.0,
                                "v1 stays within twice its early maximum"));

    BootstrapSuprema boot = bootstrap_suprema(series, d);
    const bool finite = std::isfinite(boot.M_v.back()) && std::isfinite(boot.M_q.back()) &&
                        std::isfinite(boot.M_w.back());
    claims.push_back(make_claim("bootstrap_suprema_finite", "satisfies the estimates", finite,
                                {{"M_v", boot.M_v.back()},
                                 {"M_q", boot.M_q.back()},
                                 {"M_w", boot.M_w.back()}},
                                0.0, "running weighted suprema stay finite"));
  }

  // convective signature: the weighted norm must decay visibly faster than
  // the plain norm when the plain essential spectrum touches the axis
  {
    const char* kAnchor = "decay of the perturbations";
    const double ess_plain = essential_abscissa(f, sys, WeightSpec{0.0, 0.0, 1.0});
    if (ess_plain < -1e-8) {
      claims.push_back(skipped_claim("stability_weight_contrast", kAnchor,
                                     "plain essential spectrum is already stable"));
    } else {
      const double t_lo = cfg.analysis.fit_window[0];
      const double t_hi = series.t.empty() ? t_lo : series.t.back();
      try {
        ExponentFit plain = fit_decay_exponent(series, "v_hk", t_lo, t_hi);
        ExponentFit weighted = fit_decay_exponent(series, "v_hka", t_lo, t_hi);
        claims.push_back(make_claim(
            "stability_weight_contrast", kAnchor, weighted.exponent <= plain.exponent - 0.5,
            {{"plain_exponent", plain.exponent}, {"weighted_exponent", weighted.exponent}}, 0.5,
            "weighted decay exponent clears the plain one by half a power"));
      } catch (const ConfigError& e) {
        claims.push_back(skipped_claim("stability_weight_contrast", kAnchor, e.what()));
      }
    }
  }

  claims.push_back(continuity_claim(cfg, sys, f, ws));

  ctx.claims = std::move(claims);
  const auto paths = write_report(ctx.claims, ctx.out);
  ctx.artifacts.insert(ctx.artifacts.end(), paths.begin(), paths.end());
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (model != "bistable" && model != "combustion")
    throw ConfigError("config: model must be 'bistable' or 'combustion'");
  if (front.h <= 0.0) throw ConfigError("config: front.h must be positive");
  if (front.L < 0.0) throw ConfigError("config: front.L must be nonnegative");
  if (nu_target < 0.0) throw ConfigError("config: weight.nu must be nonnegative");
  if (sim.d != 2 && sim.d != 3) throw ConfigError("config: sim.d must be 2 or 3");
  if (sim.ygrid.dim != sim.d - 1)
    throw ConfigError("config: sim.ny/ybox must supply d - 1 axes");
  sim.ygrid.validate();
  if (sim.dt < 0.0) throw ConfigError("config: sim.dt must be nonnegative");
  if (sim.t_end <= 0.0) throw ConfigError("config: sim.t_end must be positive");
  if (sim.output_stride < 1) throw ConfigError("config: sim.output_stride must be at least 1");
  if (sim.snapshot_stride < 0)
    throw ConfigError("config: sim.snapshot_stride must be nonnegative");
  if (sim.k < 0) throw ConfigError("config: sim.k must be nonnegative");
  if (sim.delta < 0.0) throw ConfigError("config: sim.delta must be nonnegative");
  if (init.q_shape != "dipole" && init.q_shape != "bump")
    throw ConfigError("config: init.q_shape must be 'dipole' or 'bump'");
  if (init.q_width_fraction <= 0.0 || init.q_width_fraction > 0.5)
    throw ConfigError("config: init.q_width_fraction must lie in (0, 0.5]");
  if (init.q_amp < 0.0 || init.v_amp < 0.0 || init.v_width <= 0.0)
    throw ConfigError("config: init amplitudes must be nonnegative and widths positive");
  analysis.validate();
}

RunConfig parse_run_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON (") + e.what() + ")");
  }
  expect_keys(root, "",
              {"model", "front", "weight", "sim", "init", "analysis", "output_dir", "seed"});

  RunConfig cfg;
  if (root.contains("model")) {
    const json& m = root["model"];
    cfg.model = jstr(m, "name", cfg.model, "model.");
    if (cfg.model == "bistable") {
      expect_keys(m, "model.", {"name", "a"});
      cfg.bistable.a = jnum(m, "a", cfg.bistable.a, "model.");
    } else if (cfg.model == "combustion") {
      expect_keys(m, "model.", {"name", "epsilon", "kappa", "g_clamp", "theory_mode"});
      cfg.combustion.epsilon = jnum(m, "epsilon", cfg.combustion.epsilon, "model.");
      cfg.combustion.kappa = jnum(m, "kappa", cfg.combustion.kappa, "model.");
      cfg.combustion.g_clamp = jnum(m, "g_clamp", cfg.combustion.g_clamp, "model.");
      cfg.combustion_theory = jbool(m, "theory_mode", cfg.combustion_theory, "model.");
    } else {
      throw ConfigError("config: model must be 'bistable' or 'combustion'");
    }
  }

  if (root.contains("front")) {
    const json& fr = root["front"];
    expect_keys(fr, "front.", {"L", "h", "tol", "max_iter"});
    cfg.front.L = jnum(fr, "L", cfg.front.L, "front.");
    cfg.front.h = jnum(fr, "h", cfg.front.h, "front.");
    cfg.front.newton.tol = jnum(fr, "tol", cfg.front.newton.tol, "front.");
    cfg.front.newton.max_iter = jint(fr, "max_iter", cfg.front.newton.max_iter, "front.");
  }

  if (root.contains("weight")) {
    const json& wt = root["weight"];
    expect_keys(wt, "weight.", {"nu", "search", "alpha_minus", "alpha_plus", "bridge"});
    cfg.nu_target = jnum(wt, "nu", cfg.nu_target, "weight.");
    cfg.search_weight = jbool(wt, "search", cfg.search_weight, "weight.");
    cfg.alpha.alpha_minus = jnum(wt, "alpha_minus", cfg.alpha.alpha_minus, "weight.");
    cfg.alpha.alpha_plus = jnum(wt, "alpha_plus", cfg.alpha.alpha_plus, "weight.");
    cfg.alpha.bridge_halfwidth = jnum(wt, "bridge", cfg.alpha.bridge_halfwidth, "weight.");
  }

  if (root.contains("sim")) {
    const json& sm = root["sim"];
    expect_keys(sm, "sim.",
                {"d", "ny", "ybox", "dt", "t_end", "output_stride", "snapshot_stride", "k",
                 "delta", "seam_tol"});
    cfg.sim.d = jint(sm, "d", cfg.sim.d, "sim.");
    cfg.sim.ygrid.dim = cfg.sim.d - 1;
    std::vector<double> ny = jnum_array(sm, "ny", {double(cfg.sim.ygrid.n[0])}, "sim.");
    std::vector<double> ybox = jnum_array(sm, "ybox", {cfg.sim.ygrid.box[0]}, "sim.");
    if (int(ny.size()) != cfg.sim.ygrid.dim || int(ybox.size()) != cfg.sim.ygrid.dim)
      throw ConfigError("config: sim.ny and sim.ybox must supply d - 1 entries");
    for (int a = 0; a < cfg.sim.ygrid.dim; ++a) {
      if (ny[a] != std::floor(ny[a]) || ny[a] < 1.0)
        throw ConfigError("config: sim.ny entries must be positive integers");
      cfg.sim.ygrid.n[a] = int(ny[a]);
      cfg.sim.ygrid.box[a] = ybox[a];
    }
    cfg.sim.dt = jnum(sm, "dt", cfg.sim.dt, "sim.");
    cfg.sim.t_end = jnum(sm, "t_end", cfg.sim.t_end, "sim.");
    cfg.sim.output_stride = jint(sm, "output_stride", cfg.sim.output_stride, "sim.");
    cfg.sim.snapshot_stride = jint(sm, "snapshot_stride", cfg.sim.snapshot_stride, "sim.");
    cfg.sim.k = jint(sm, "k", cfg.sim.k, "sim.");
    cfg.sim.delta = jnum(sm, "delta", cfg.sim.delta, "sim.");
    cfg.sim.seam_tol = jnum(sm, "seam_tol", cfg.sim.seam_tol, "sim.");
  }

  if (root.contains("init")) {
    const json& in = root["init"];
    expect_keys(in, "init.",
                {"v_amp", "v_component", "v_center", "v_width", "q_amp", "q_shape",
                 "q_width_fraction"});
    cfg.init.v_amp = jnum(in, "v_amp", cfg.init.v_amp, "init.");
    cfg.init.v_component = jint(in, "v_component", cfg.init.v_component, "init.");
    cfg.init.v_center = jnum(in, "v_center", cfg.init.v_center, "init.");
    cfg.init.v_width = jnum(in, "v_width", cfg.init.v_width, "init.");
    cfg.init.q_amp = jnum(in, "q_amp", cfg.init.q_amp, "init.");
    cfg.init.q_shape = jstr(in, "q_shape", cfg.init.q_shape, "init.");
    cfg.init.q_width_fraction =
        jnum(in, "q_width_fraction", cfg.init.q_width_fraction, "init.");
  }

  if (root.contains("analysis")) {
    const json& an = root["analysis"];
    expect_keys(an, "analysis.",
                {"nu", "rho", "beta", "delta", "gamma", "delta0", "fit_window", "tol_abscissa",
                 "tol_exponent", "tol_exponent_grad", "bound_slack", "pairing_floor"});
    cfg.analysis.nu = jnum(an, "nu", cfg.analysis.nu, "analysis.");
    cfg.analysis.rho = jnum(an, "rho", cfg.analysis.rho, "analysis.");
    cfg.analysis.beta = jnum(an, "beta", cfg.analysis.beta, "analysis.");
    cfg.analysis.delta = jnum(an, "delta", cfg.analysis.delta, "analysis.");
    cfg.analysis.gamma = jnum(an, "gamma", cfg.analysis.gamma, "analysis.");
    cfg.analysis.delta0 = jnum(an, "delta0", cfg.analysis.delta0, "analysis.");
    std::vector<double> fw = jnum_array(
        an, "fit_window", {cfg.analysis.fit_window[0], cfg.analysis.fit_window[1]}, "analysis.");
    if (fw.size() != 2) throw ConfigError("config: analysis.fit_window must hold two numbers");
    cfg.analysis.fit_window = {fw[0], fw[1]};
    cfg.analysis.tol_abscissa = jnum(an, "tol_abscissa", cfg.analysis.tol_abscissa, "analysis.");
    cfg.analysis.tol_exponent = jnum(an, "tol_exponent", cfg.analysis.tol_exponent, "analysis.");
    cfg.analysis.tol_exponent_grad =
        jnum(an, "tol_exponent_grad", cfg.analysis.tol_exponent_grad, "analysis.");
    cfg.analysis.bound_slack = jnum(an, "bound_slack", cfg.analysis.bound_slack, "analysis.");
    cfg.analysis.pairing_floor =
        jnum(an, "pairing_floor", cfg.analysis.pairing_floor, "analysis.");
  }

  if (root.contains("output_dir")) {
    if (!root["output_dir"].is_string())
      throw ConfigError("config: 'output_dir' must be a string");
    cfg.output_dir = root["output_dir"].get<std::string>();
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned())
      throw ConfigError("config: 'seed' must be a nonnegative integer");
    cfg.seed = root["seed"].get<unsigned long long>();
  }

  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string serialize_run_config(const RunConfig& cfg) {
  json root;
  json m;
  m["name"] = cfg.model;
  if (cfg.model == "bistable") {
    m["a"] = cfg.bistable.a;
  } else {
    m["epsilon"] = cfg.combustion.epsilon;
    m["kappa"] = cfg.combustion.kappa;
    m["g_clamp"] = cfg.combustion.g_clamp;
    m["theory_mode"] = cfg.combustion_theory;
  }
  root["model"] = m;
  root["front"] = {{"L", cfg.front.L},
                   {"h", cfg.front.h},
                   {"tol", cfg.front.newton.tol},
                   {"max_iter", cfg.front.newton.max_iter}};
  root["weight"] = {{"nu", cfg.nu_target},
                    {"search", cfg.search_weight},
                    {"alpha_minus", cfg.alpha.alpha_minus},
                    {"alpha_plus", cfg.alpha.alpha_plus},
                    {"bridge", cfg.alpha.bridge_halfwidth}};
  json ny = json::array(), ybox = json::array();
  for (int a = 0; a < cfg.sim.ygrid.dim; ++a) {
    ny.push_back(cfg.sim.ygrid.n[a]);
    ybox.push_back(cfg.sim.ygrid.box[a]);
  }
  root["sim"] = {{"d", cfg.sim.d},
                 {"ny", ny},
                 {"ybox", ybox},
                 {"dt", cfg.sim.dt},
                 {"t_end", cfg.sim.t_end},
                 {"output_stride", cfg.sim.output_stride},
                 {"snapshot_stride", cfg.sim.snapshot_stride},
                 {"k", cfg.sim.k},
                 {"delta", cfg.sim.delta},
                 {"seam_tol", cfg.sim.seam_tol}};
  root["init"] = {{"v_amp", cfg.init.v_amp},
                  {"v_component", cfg.init.v_component},
                  {"v_center", cfg.init.v_center},
                  {"v_width", cfg.init.v_width},
                  {"q_amp", cfg.init.q_amp},
                  {"q_shape", cfg.init.q_shape},
                  {"q_width_fraction", cfg.init.q_width_fraction}};
  root["analysis"] = {{"nu", cfg.analysis.nu},
                      {"rho", cfg.analysis.rho},
                      {"beta", cfg.analysis.beta},
                      {"delta", cfg.analysis.delta},
                      {"gamma", cfg.analysis.gamma},
                      {"delta0", cfg.analysis.delta0},
                      {"fit_window", {cfg.analysis.fit_window[0], cfg.analysis.fit_window[1]}},
                      {"tol_abscissa", cfg.analysis.tol_abscissa},
                      {"tol_exponent", cfg.analysis.tol_exponent},
                      {"tol_exponent_grad", cfg.analysis.tol_exponent_grad},
                      {"bound_slack", cfg.analysis.bound_slack},
                      {"pairing_floor", cfg.analysis.pairing_floor}};
  root["output_dir"] = cfg.output_dir.string();
  root["seed"] = cfg.seed;
  return root.dump(2) + "\n";
}

Stage parse_stage(const std::string& name) {
  if (name == "front") return Stage::Front;
  if (name == "spectrum") return Stage::Spectrum;
  if (name == "weight") return Stage::Weight;
  if (name == "simulate") return Stage::Simulate;
  if (name == "verify") return Stage::Verify;
  if (name == "all") return Stage::All;
  throw ConfigError("stage must be one of front, spectrum, weight, simulate, verify, all");
}

PipelineResult run_pipeline(const RunConfig& cfg, Stage stage) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.output_dir.string());

  StageContext ctx{cfg, cfg.output_dir, {}, {}};
  const bool all = stage == Stage::All;
  if (all || stage == Stage::Front) run_front_stage(ctx);
  if (all || stage == Stage::Spectrum) run_spectrum_stage(ctx);
  if (all || stage == Stage::Weight) run_weight_stage(ctx);
  if (all || stage == Stage::Simulate) run_simulate_stage(ctx);
  if (all || stage == Stage::Verify) run_verify_stage(ctx);

  PipelineResult res;
  res.claims = std::move(ctx.claims);
  res.artifacts = std::move(ctx.artifacts);
  for (const Claim& c : res.claims)
    if (c.status == "fail") res.failed_ids.push_back(c.id);
  res.exit_code = res.failed_ids.empty() ? 0 : 1;
  return res;
}

std::vector<fs::path> write_report(const std::vector<Claim>& claims, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create report directory " + dir.string());

  std::vector<Claim> ordered = claims;
  std::sort(ordered.begin(), ordered.end(),
            [](const Claim& a, const Claim& b) { return a.id < b.id; });

  int n_pass = 0, n_fail = 0, n_skip = 0;
  json arr = json::array();
  for (const Claim& c : ordered) {
    json jc;
    jc["claim_id"] = c.id;
    jc["anchor"] = c.anchor;
    jc["status"] = c.status;
    jc["tolerance"] = c.tolerance;
    jc["detail"] = c.detail;
    json fv;
    for (const auto& [k, v] : c.fitted) fv[k] = v;
    jc["fitted_values"] = std::move(fv);
    arr.push_back(std::move(jc));
    if (c.status == "pass") ++n_pass;
    else if (c.status == "fail") ++n_fail;
    else ++n_skip;
  }
  json report;
  report["claims"] = std::move(arr);
  report["summary"] = {{"pass", n_pass}, {"fail", n_fail}, {"skipped", n_skip}};
  write_json_file(report, dir / "claims.json");

  {
    std::ofstream csv(dir / "claims.csv");
    if (!csv) throw IoError("cannot write " + (dir / "claims.csv").string());
    csv << "claim_id,status,tolerance,anchor,fitted,detail\n";
    for (const Claim& c : ordered) {
      std::string fitted;
      char buf[64];
      for (const auto& [k, v] : c.fitted) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        if (!fitted.empty()) fitted += ';';
        fitted += k + "=" + buf;
      }
      std::snprintf(buf, sizeof(buf), "%.17g", c.tolerance);
      csv << c.id << ',' << c.status << ',' << buf << ',' << csv_quote(c.anchor) << ','
          << csv_quote(fitted) << ',' << csv_quote(c.detail) << '\n';
    }
  }

  {
    std::ofstream txt(dir / "summary.txt");
    if (!txt) throw IoError("cannot write " + (dir / "summary.txt").string());
    for (const Claim& c : ordered) {
      char line[160];
      std::snprintf(line, sizeof(line), "%-7s %-34s %s\n", c.status.c_str(), c.id.c_str(),
                    c.anchor.c_str());
      txt << line;
    }
    txt << "pass " << n_pass << ", fail " << n_fail << ", skipped " << n_skip << "\n";
  }

  return {dir / "claims.json", dir / "claims.csv", dir / "summary.txt"};
}

}  // namespace fsl
