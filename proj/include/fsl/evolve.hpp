#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <filesystem>
#include <vector>

#include "fsl/fft.hpp"
#include "fsl/front.hpp"
#include "fsl/grid.hpp"
#include "fsl/model.hpp"
#include "fsl/norms.hpp"
#include "fsl/projection.hpp"
#include "fsl/weight.hpp"

namespace fsl {

// Configuration for a co-moving-frame run u_t = Delta u + c u_z + f(u) on
// [-L, L] x (periodic box).  The z grid always comes from the front profile;
// only the transverse grid is chosen here.
struct SimConfig {
  int d = 2;             // spatial dimension, 2 or 3 (ygrid.dim == d - 1)
  TransverseGrid ygrid;  // periodic transverse box
  double dt = 0.0;       // time step; 0 picks 0.4 * dt_max_bound
  double t_end = 10.0;
  int output_stride = 10;   // decompose + record every this many steps
  int snapshot_stride = 0;  // keep a snapshot every this many output events
                            // (0 = initial and final state only)
  int k = 0;                // Sobolev order for the norms; 0 = ceil((d+1)/2)
  double delta = 0.0;       // exit-ball radius for the v norm (0 = no monitor)
  double seam_tol = 0.05;   // warn when |q| at the periodic seam exceeds this
                            // fraction of max |q|
  WeightSpec alpha;         // weight used for norms and the projection
};

// Largest time step the explicit pieces tolerate: min over an advective bound
// h/|c| and a reaction bound 2/L_f, with L_f the largest Jacobian row sum of
// f along the front.
double dt_max_bound(const ReactionSystem& sys, const FrontProfile& front);

// One Strang-split IMEX step: explicit midpoint half-steps for the reaction,
// exact Fourier half-steps for the transverse Laplacian, and a Crank-Nicolson
// full step for D u_zz + c u_z with Dirichlet closure at the profile's stored
// end values.  The z boundary rows are held fixed; the transverse direction
// is periodic.  Factorizations are cached for the lifetime of the stepper, so
// repeated steps at the same dt are cheap.
class ImexStepper {
 public:
  ImexStepper(const ReactionSystem& sys, const FrontProfile& front,
              const TransverseGrid& ygrid, double dt);

  void step(Field& u);  // advance u by one dt, in place
  double dt() const { return dt_; }
  const TransverseFft& fft() const { return fft_; }

 private:
  void reaction_half(Field& u) const;
  void z_full(Field& u);

  ReactionSystem sys_;
  Grid1D zg_;
  int nc_ = 0, nint_ = 0;
  double dt_ = 0.0;
  TransverseFft fft_;
  std::vector<double> ymult_;  // exp(-|xi|^2 dt/2)
  Eigen::SparseMatrix<double> a_plus_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> a_minus_lu_;
  Eigen::VectorXd b_dt_;  // dt * boundary contribution
  Eigen::MatrixXd work_;  // gathered interior unknowns, one column per y node
};

// Convenience single-step form.  Builds a stepper (including the z-direction
// factorization) on every call; loops should construct an ImexStepper once.
Field step_imex(const ReactionSystem& sys, const FrontProfile& front, const Field& u,
                double dt, const TransverseGrid& ygrid);

// Exact periodic heat semigroup on the transverse grid: Fourier multiplier
// exp(-|xi|^2 t), and its gradient.
YField heat_propagate(const YField& q, const TransverseFft& fft, double t);
YVecField heat_propagate_gradient(const YField& q, const TransverseFft& fft, double t);

// Headline norms copied out of the series row that was recorded with a
// snapshot, so a snapshot file is self-describing.
struct SnapshotNorms {
  double v_hk = 0.0, v_hka = 0.0, v_H = 0.0, q_hk = 0.0, w_hk = 0.0;
};

struct Snapshot {
  double t = 0.0;
  Grid1D zgrid;
  TransverseGrid ygrid;
  Field u;                  // full state, components of the system
  PerturbationState state;  // (v, q, w) when decomposed is true
  bool decomposed = false;
  SnapshotNorms norms;
};

// Manifest (<prefix>.json, schema "snap/1") plus a raw little-endian double
// dump (<prefix>.bin) holding u and, when present, v, q, w.
void save_snapshot(const Snapshot& s, const std::filesystem::path& prefix);
Snapshot load_snapshot(const std::filesystem::path& prefix);

struct SimResult {
  NormSeries series;
  std::vector<Snapshot> snapshots;  // at least the initial and final states
  double dt_used = 0.0;
  int steps = 0;
  bool seam_warning = false;  // q mass reached the periodic seam at some time
  double seam_level = 0.0;    // worst seam fraction observed
};

// Integrates u_t = Delta u + c u_z + f(u) from u(0) = phi + u_tilde0 and
// records the decomposed perturbation norms at every output time.  When the
// v norm leaves the delta ball the first such time is stored in
// series.T_exit; when decomposition fails the time is stored in
// series.breakdown_time and recording continues with raw (v = u - phi,
// q = 0) norms.  Non-finite state aborts with BlowUpError carrying the last
// recorded time.
SimResult simulate_perturbed_front(const ReactionSystem& sys, const FrontProfile& front,
                                   const Field& u_tilde0, const SimConfig& cfg);
// Same, with the initial perturbation given in decomposed form.
SimResult simulate_perturbed_front(const ReactionSystem& sys, const FrontProfile& front,
                                   const PerturbationState& init, const SimConfig& cfg);

}  // namespace fsl
