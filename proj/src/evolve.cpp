#include "fsl/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "fsl/errors.hpp"
#include "fsl/operators.hpp"

namespace fsl {

namespace {

constexpr int kMaxComponents = 8;

// Field holding the front profile extended constantly in y is never formed;
// these helpers add / subtract it row by row instead.
void subtract_profile(const Field& u, const FrontProfile& front, Field& out) {
  out = u;
  for (int c = 0; c < u.nc; ++c)
    for (int iz = 0; iz < u.nz; ++iz) {
      double* row = out.row(c, iz);
      const double phi = front.value(c, iz);
      for (int iy = 0; iy < u.ny; ++iy) row[iy] -= phi;
    }
}

void add_profile(Field& u, const FrontProfile& front) {
  for (int c = 0; c < u.nc; ++c)
    for (int iz = 0; iz < u.nz; ++iz) {
      double* row = u.row(c, iz);
      const double phi = front.value(c, iz);
      for (int iy = 0; iy < u.ny; ++iy) row[iy] += phi;
    }
}

}  // namespace

double dt_max_bound(const ReactionSystem& sys, const FrontProfile& front) {
  if (sys.n != front.nc) throw ConfigError("dt_max_bound: system/front component mismatch");
  Eigen::MatrixXd J(sys.n, sys.n);
  Eigen::VectorXd u(sys.n);
  double lip = 0.0;
  for (int i = 0; i < front.grid.n; ++i) {
    for (int c = 0; c < sys.n; ++c) u[c] = front.value(c, i);
    sys.df(u.data(), J);
    lip = std::max(lip, J.cwiseAbs().rowwise().sum().maxCoeff());
  }
  const double adv = front.grid.h() / std::max(std::abs(front.c), 1e-8);
  const double rea = 2.0 / std::max(lip, 1e-8);
  return std::min(adv, rea);
}

ImexStepper::ImexStepper(const ReactionSystem& sys, const FrontProfile& front,
                         const TransverseGrid& ygrid, double dt)
    : sys_(sys), zg_(front.grid), nc_(front.nc), nint_(front.grid.n - 2), dt_(dt),
      fft_(ygrid) {
  zg_.validate();
  if (sys.n != front.nc) throw ConfigError("ImexStepper: system/front component mismatch");
  if (nc_ > kMaxComponents) throw ConfigError("ImexStepper: too many components");
  if (!(dt > 0.0)) throw ConfigError("ImexStepper: dt must be positive");
  const double bound = dt_max_bound(sys, front);
  if (dt > bound * (1.0 + 1e-9))
    throw ConfigError("ImexStepper: dt exceeds the stability bound " + std::to_string(bound));

  ZOperator op;
  op.nc = nc_;
  op.diffusion = sys.diffusion;
  const Eigen::VectorXd cvec = Eigen::VectorXd::Constant(nc_, front.c);
  op.advection = [cvec](double) { return cvec; };

  const Eigen::SparseMatrix<double> m = assemble_z_operator(op, zg_, BoundaryKind::dirichlet);
  Eigen::SparseMatrix<double> eye(m.rows(), m.cols());
  eye.setIdentity();
  a_plus_ = eye + (0.5 * dt) * m;
  Eigen::SparseMatrix<double> a_minus = eye - (0.5 * dt) * m;
  a_minus.makeCompressed();
  a_minus_lu_.compute(a_minus);
  if (a_minus_lu_.info() != Eigen::Success)
    throw SolverError("ImexStepper: Crank-Nicolson factorization failed");

  Eigen::VectorXd left(nc_), right(nc_);
  for (int c = 0; c < nc_; ++c) {
    left[c] = front.value(c, 0);
    right[c] = front.value(c, zg_.n - 1);
  }
  b_dt_ = dt * dirichlet_boundary_contribution(op, zg_, left, right);

  ymult_.resize(fft_.n_modes());
  const std::vector<double>& xi2 = fft_.xi_sq();
  for (int m2 = 0; m2 < fft_.n_modes(); ++m2) ymult_[m2] = std::exp(-xi2[m2] * 0.5 * dt);

  work_.resize(static_cast<Eigen::Index>(nc_) * nint_, fft_.n_real());
}

void ImexStepper::reaction_half(Field& u) const {
  const double tau = 0.5 * dt_;
  double uu[kMaxComponents], k1[kMaxComponents], mid[kMaxComponents];
  const int ny = u.ny;
  // Boundary rows stay at the Dirichlet data; f vanishes there anyway up to
  // the front solver's residual.
  for (int iz = 1; iz < u.nz - 1; ++iz) {
    for (int iy = 0; iy < ny; ++iy) {
      for (int c = 0; c < nc_; ++c) uu[c] = u.at(c, iz, iy);
      sys_.f(uu, k1);
      for (int c = 0; c < nc_; ++c) mid[c] = uu[c] + 0.5 * tau * k1[c];
      sys_.f(mid, k1);
      for (int c = 0; c < nc_; ++c) u.at(c, iz, iy) = uu[c] + tau * k1[c];
    }
  }
}

void ImexStepper::z_full(Field& u) {
  const int ny = u.ny;
  for (int c = 0; c < nc_; ++c)
    for (int izi = 0; izi < nint_; ++izi) {
      const double* row = u.row(c, izi + 1);
      for (int iy = 0; iy < ny; ++iy) work_(static_cast<Eigen::Index>(c) * nint_ + izi, iy) = row[iy];
    }
  Eigen::MatrixXd rhs = a_plus_ * work_;
  rhs.colwise() += b_dt_;
  work_ = a_minus_lu_.solve(rhs);
  for (int c = 0; c < nc_; ++c)
    for (int izi = 0; izi < nint_; ++izi) {
      double* row = u.row(c, izi + 1);
      for (int iy = 0; iy < ny; ++iy) row[iy] = work_(static_cast<Eigen::Index>(c) * nint_ + izi, iy);
    }
}

void ImexStepper::step(Field& u) {
  if (u.nc != nc_ || u.nz != zg_.n || u.ny != fft_.n_real())
    throw ConfigError("ImexStepper::step: field shape mismatch");
  reaction_half(u);
  fft_.apply_multiplier(u.a.data(), nc_ * zg_.n, ymult_);
  z_full(u);
  fft_.apply_multiplier(u.a.data(), nc_ * zg_.n, ymult_);
  reaction_half(u);
}

Field step_imex(const ReactionSystem& sys, const FrontProfile& front, const Field& u,
                double dt, const TransverseGrid& ygrid) {
  if (!all_finite(u.a)) throw ConfigError("step_imex: non-finite input state");
  ImexStepper stepper(sys, front, ygrid, dt);
  Field out = u;
  try {
    stepper.step(out);
  } catch (const Error&) {
    if (!all_finite(out.a)) throw BlowUpError("step_imex: non-finite state after one step", 0.0);
    throw;
  }
  if (!all_finite(out.a)) throw BlowUpError("step_imex: non-finite state after one step", 0.0);
  return out;
}

YField heat_propagate(const YField& q, const TransverseFft& fft, double t) {
  if (t < 0.0) throw ConfigError("heat_propagate: t must be nonnegative");
  if (q.size() != fft.n_real()) throw ConfigError("heat_propagate: field size mismatch");
  YField out = q;
  std::vector<double> mult(fft.n_modes());
  const std::vector<double>& xi2 = fft.xi_sq();
  for (int m = 0; m < fft.n_modes(); ++m) mult[m] = std::exp(-xi2[m] * t);
  fft.apply_multiplier(out.a.data(), 1, mult);
  return out;
}

YVecField heat_propagate_gradient(const YField& q, const TransverseFft& fft, double t) {
  // The multipliers commute, so the gradient of the propagated field is the
  // propagated gradient.
  return spectral_gradient(heat_propagate(q, fft, t), fft);
}

namespace {

void append_doubles(std::ofstream& os, const std::vector<double>& v) {
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_doubles(std::ifstream& is, std::vector<double>& v, size_t count) {
  v.resize(count);
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!is) throw IoError("snapshot: binary payload truncated");
}

}  // namespace

void save_snapshot(const Snapshot& s, const std::filesystem::path& prefix) {
  std::filesystem::path json_path = prefix;
  json_path += ".json";
  std::filesystem::path bin_path = prefix;
  bin_path += ".bin";

  nlohmann::json manifest;
  manifest["schema"] = "snap/1";
  manifest["t"] = s.t;
  manifest["zgrid"] = {{"L", s.zgrid.L}, {"n", s.zgrid.n}};
  manifest["ygrid"] = {{"dim", s.ygrid.dim},
                       {"n", {s.ygrid.n[0], s.ygrid.n[1]}},
                       {"box", {s.ygrid.box[0], s.ygrid.box[1]}}};
  manifest["nc"] = s.u.nc;
  manifest["decomposed"] = s.decomposed;
  manifest["norms"] = {{"v_hk", s.norms.v_hk},
                       {"v_hka", s.norms.v_hka},
                       {"v_H", s.norms.v_H},
                       {"q_hk", s.norms.q_hk},
                       {"w_hk", s.norms.w_hk}};
  manifest["data_file"] = bin_path.filename().string();

  nlohmann::json arrays = nlohmann::json::array();
  arrays.push_back({{"name", "u"}, {"count", s.u.a.size()}});
  if (s.decomposed) {
    arrays.push_back({{"name", "v"}, {"count", s.state.v.a.size()}});
    arrays.push_back({{"name", "q"}, {"count", s.state.q.a.size()}});
    for (int ax = 0; ax < s.state.w.dim; ++ax)
      arrays.push_back({{"name", "w" + std::to_string(ax)}, {"count", s.state.w.comp[ax].a.size()}});
  }
  manifest["arrays"] = arrays;

  std::ofstream jf(json_path);
  if (!jf) throw IoError("snapshot: cannot write " + json_path.string());
  jf << manifest.dump(2) << "\n";

  std::ofstream bf(bin_path, std::ios::binary);
  if (!bf) throw IoError("snapshot: cannot write " + bin_path.string());
  append_doubles(bf, s.u.a);
  if (s.decomposed) {
    append_doubles(bf, s.state.v.a);
    append_doubles(bf, s.state.q.a);
    for (int ax = 0; ax < s.state.w.dim; ++ax) append_doubles(bf, s.state.w.comp[ax].a);
  }
  if (!bf) throw IoError("snapshot: write failed for " + bin_path.string());
}

Snapshot load_snapshot(const std::filesystem::path& prefix) {
  std::filesystem::path json_path = prefix;
  json_path += ".json";
  std::filesystem::path bin_path = prefix;
  bin_path += ".bin";

  std::ifstream jf(json_path);
  if (!jf) throw IoError("snapshot: cannot open " + json_path.string());
  nlohmann::json manifest;
  try {
    jf >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("snapshot: bad manifest: " + std::string(e.what()));
  }
  if (manifest.value("schema", "") != std::string("snap/1"))
    throw IoError("snapshot: unsupported schema");

  Snapshot s;
  s.t = manifest.at("t").get<double>();
  s.zgrid.L = manifest.at("zgrid").at("L").get<double>();
  s.zgrid.n = manifest.at("zgrid").at("n").get<int>();
  s.ygrid.dim = manifest.at("ygrid").at("dim").get<int>();
  for (int ax = 0; ax < 2; ++ax) {
    s.ygrid.n[ax] = manifest.at("ygrid").at("n")[ax].get<int>();
    s.ygrid.box[ax] = manifest.at("ygrid").at("box")[ax].get<double>();
  }
  const int nc = manifest.at("nc").get<int>();
  s.decomposed = manifest.at("decomposed").get<bool>();
  if (manifest.contains("norms")) {
    const auto& nj = manifest["norms"];
    s.norms.v_hk = nj.value("v_hk", 0.0);
    s.norms.v_hka = nj.value("v_hka", 0.0);
    s.norms.v_H = nj.value("v_H", 0.0);
    s.norms.q_hk = nj.value("q_hk", 0.0);
    s.norms.w_hk = nj.value("w_hk", 0.0);
  }

  const int nz = s.zgrid.n;
  const int ny = s.ygrid.total();
  std::ifstream bf(bin_path, std::ios::binary);
  if (!bf) throw IoError("snapshot: cannot open " + bin_path.string());
  s.u = Field(nc, nz, ny);
  read_doubles(bf, s.u.a, s.u.a.size());
  if (s.decomposed) {
    s.state.v = Field(nc, nz, ny);
    read_doubles(bf, s.state.v.a, s.state.v.a.size());
    s.state.q = YField(ny);
    read_doubles(bf, s.state.q.a, static_cast<size_t>(ny));
    s.state.w = YVecField(s.ygrid.dim, ny);
    for (int ax = 0; ax < s.ygrid.dim; ++ax)
      read_doubles(bf, s.state.w.comp[ax].a, static_cast<size_t>(ny));
  }
  return s;
}

namespace {

struct RecordOutcome {
  PerturbationState state;
  bool decomposed = false;
  SnapshotNorms norms;
};

// Fraction of the localized part of q sitting within one cell of the
// periodic seam at y = 0.  The transverse mean is subtracted first: a
// constant offset is exactly periodic and cannot contaminate the wrap.
double seam_fraction(const YField& q, const TransverseGrid& g) {
  double mean = 0.0, qmax = 0.0;
  for (double x : q.a) {
    mean += x;
    qmax = std::max(qmax, std::abs(x));
  }
  mean /= q.size();
  double dev_max = 0.0;
  for (double x : q.a) dev_max = std::max(dev_max, std::abs(x - mean));
  if (dev_max <= 1e-12 * (1.0 + qmax)) return 0.0;
  double edge = 0.0;
  if (g.dim == 1) {
    for (int i : {0, 1, g.n[0] - 1}) edge = std::max(edge, std::abs(q.a[g.index(i)] - mean));
  } else {
    for (int i0 = 0; i0 < g.n[0]; ++i0)
      for (int i1 = 0; i1 < g.n[1]; ++i1) {
        const bool band = i0 <= 1 || i0 == g.n[0] - 1 || i1 <= 1 || i1 == g.n[1] - 1;
        if (band) edge = std::max(edge, std::abs(q.a[g.index(i0, i1)] - mean));
      }
  }
  return edge / dev_max;
}

}  // namespace

SimResult simulate_perturbed_front(const ReactionSystem& sys, const FrontProfile& front,
                                   const Field& u_tilde0, const SimConfig& cfg) {
  if (cfg.d != 2 && cfg.d != 3) throw ConfigError("simulate: d must be 2 or 3");
  if (cfg.ygrid.dim != cfg.d - 1) throw ConfigError("simulate: ygrid.dim must equal d - 1");
  cfg.ygrid.validate();
  front.grid.validate();
  if (sys.n != front.nc) throw ConfigError("simulate: system/front component mismatch");
  if (!(cfg.t_end > 0.0)) throw ConfigError("simulate: t_end must be positive");
  if (cfg.output_stride < 1) throw ConfigError("simulate: output_stride must be >= 1");
  if (cfg.snapshot_stride < 0) throw ConfigError("simulate: snapshot_stride must be >= 0");
  if (cfg.delta < 0.0) throw ConfigError("simulate: delta must be >= 0");
  const int ny = cfg.ygrid.total();
  if (u_tilde0.nc != front.nc || u_tilde0.nz != front.grid.n || u_tilde0.ny != ny)
    throw ConfigError("simulate: initial perturbation shape mismatch");
  if (!all_finite(u_tilde0.a)) throw ConfigError("simulate: non-finite initial data");

  const int k = cfg.k > 0 ? cfg.k : (cfg.d + 2) / 2;
  const double bound = dt_max_bound(sys, front);
  double dt = cfg.dt > 0.0 ? cfg.dt : 0.4 * bound;
  if (dt > bound * (1.0 + 1e-9))
    throw ConfigError("simulate: dt exceeds the stability bound " + std::to_string(bound));
  const int nsteps = std::max(1, static_cast<int>(std::ceil(cfg.t_end / dt - 1e-12)));
  dt = cfg.t_end / nsteps;

  ImexStepper stepper(sys, front, cfg.ygrid, dt);
  const TransverseFft& fft = stepper.fft();
  const WeightFunction weight(cfg.alpha);
  const AdjointNullvector adjoint = compute_adjoint(front, sys, cfg.alpha);
  const Grid1D& zg = front.grid;
  const int n1 = sys.n1, n2 = sys.n2;

  SimResult result;
  result.dt_used = dt;
  result.steps = nsteps;
  NormSeries& series = result.series;

  Field u = u_tilde0;
  add_profile(u, front);

  Field u_tilde(front.nc, zg.n, ny);
  auto record = [&](double t) -> RecordOutcome {
    subtract_profile(u, front, u_tilde);
    RecordOutcome out;
    try {
      out.state = decompose(u_tilde, front, adjoint, fft);
      out.decomposed = true;
    } catch (const DecompositionError&) {
      if (!series.breakdown_time) series.breakdown_time = t;
      out.state.v = u_tilde;
      out.state.q = YField(ny);
      out.state.w = YVecField(cfg.ygrid.dim, ny);
      out.decomposed = false;
    }
    const Field& v = out.state.v;
    const double v_hk = sobolev_norm(v, zg, fft, k);
    const double v_hka = sobolev_norm_weighted(v, zg, fft, k, weight);
    const double v_h = std::max(v_hk, v_hka);
    const double v1 = n1 > 0 ? sobolev_norm(slice_components(v, 0, n1), zg, fft, k) : 0.0;
    const double v2 = n2 > 0 ? sobolev_norm(slice_components(v, n1, n1 + n2), zg, fft, k) : 0.0;
    const double q_hk = sobolev_norm_y(out.state.q, fft, k + 1);
    const double q_l1 = l1_norm_y(out.state.q, cfg.ygrid);
    double w_sq = 0.0;
    for (int ax = 0; ax < out.state.w.dim; ++ax) {
      const double wn = sobolev_norm_y(out.state.w.comp[ax], fft, k);
      w_sq += wn * wn;
    }
    const double w_hk = std::sqrt(w_sq);

    series.t.push_back(t);
    series.v_hk.push_back(v_hk);
    series.v_hka.push_back(v_hka);
    series.v_H.push_back(v_h);
    series.v1_hk.push_back(v1);
    series.v2_hk.push_back(v2);
    series.q_hk.push_back(q_hk);
    series.q_l1.push_back(q_l1);
    series.w_hk.push_back(w_hk);
    YField pres = pi_alpha(v, adjoint);
    series.pi_residual.push_back(max_abs(pres.a));

    const double seam = seam_fraction(out.state.q, cfg.ygrid);
    result.seam_level = std::max(result.seam_level, seam);
    if (seam > cfg.seam_tol) result.seam_warning = true;
    if (cfg.delta > 0.0 && !series.T_exit && v_h > cfg.delta) series.T_exit = t;

    out.norms = SnapshotNorms{v_hk, v_hka, v_h, q_hk, w_hk};
    return out;
  };

  auto make_snapshot = [&](double t, const RecordOutcome& rec) {
    Snapshot s;
    s.t = t;
    s.zgrid = zg;
    s.ygrid = cfg.ygrid;
    s.u = u;
    s.state = rec.state;
    s.decomposed = rec.decomposed;
    s.norms = rec.norms;
    result.snapshots.push_back(std::move(s));
  };

  RecordOutcome rec0 = record(0.0);
  series.E_k = initial_energy(rec0.state.v, rec0.state.q, zg, fft, k, weight);
  make_snapshot(0.0, rec0);

  double t_last = 0.0;
  int output_count = 0;
  for (int step = 1; step <= nsteps; ++step) {
    try {
      stepper.step(u);
    } catch (const Error&) {
      // the reaction evaluation refuses non-finite states; translate that
      // into the blow-up report, but let genuine configuration faults pass
      if (!all_finite(u.a))
        throw BlowUpError("simulate: state became non-finite after t = " + std::to_string(t_last),
                          t_last);
      throw;
    }
    const bool at_output = step % cfg.output_stride == 0 || step == nsteps;
    if (!at_output) continue;
    const double t = step * dt;
    if (!all_finite(u.a))
      throw BlowUpError("simulate: non-finite state at t = " + std::to_string(t), t_last);
    RecordOutcome rec = record(t);
    ++output_count;
    const bool want_snapshot =
        (cfg.snapshot_stride > 0 && output_count % cfg.snapshot_stride == 0) || step == nsteps;
    if (want_snapshot) make_snapshot(t, rec);
    t_last = t;
  }
  return result;
}

SimResult simulate_perturbed_front(const ReactionSystem& sys, const FrontProfile& front,
                                   const PerturbationState& init, const SimConfig& cfg) {
  const Field u_tilde0 = recompose(init, front);
  return simulate_perturbed_front(sys, front, u_tilde0, cfg);
}

}  // namespace fsl
