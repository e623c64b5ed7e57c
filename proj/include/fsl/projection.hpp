#pragma once

#include <utility>

#include "fsl/fft.hpp"
#include "fsl/front.hpp"
#include "fsl/grid.hpp"
#include "fsl/model.hpp"
#include "fsl/weight.hpp"

namespace fsl {

// Left nullvector of the linearization about the front, normalized so that
// the pairing with phi' equals one.  It is computed as gamma * psi where psi
// is the near-null eigenvector of the transposed conjugated operator: psi is
// exponentially localized, so it is the form that survives domain truncation,
// while e_tilde itself may approach a nonzero constant where a rest state is
// marginal.
struct AdjointNullvector {
  Grid1D grid;
  int nc = 0;
  WeightSpec alpha;
  ZField e_tilde;    // normalized adjoint nullvector on the full grid
  ZField conjugate;  // psi = gamma^{-1} e_tilde (localized; zero at the ends)
  double lambda = 0.0;  // eigenvalue of the discrete adjoint pair (should be ~0)
  double normalization_residual = 0.0;  // |pairing(e_tilde, phi') - 1| after rescale
};

struct AdjointOptions {
  double null_tol = 1e-4;        // |lambda| beyond this is not a nullvector
  double simplicity_gap = 1e-4;  // the next eigenvalue must stay outside this disk
};

// Solves the adjoint eigenproblem on the front's own grid.  Throws
// SpectrumError when the near-null eigenvalue is missing or fails to be
// simple (a second eigenvalue inside the simplicity gap).
AdjointNullvector compute_adjoint(const FrontProfile& front, const ReactionSystem& sys,
                                  const WeightSpec& alpha, const AdjointOptions& opts = {});

// (pi U)(y) = integral (e_tilde(z), U(z, y)) dz, trapezoid in z per y node.
YField pi_alpha(const Field& U, const AdjointNullvector& e);

// Same pairing for a z-only profile.
double pi_alpha_profile(const ZField& u, const AdjointNullvector& e);

// Pairings with shifted front derivatives, the scalar heads of the modulation
// equations:
//   pi_shifted_derivative(q)      = pi(phi'(. - q))
//   pi_shifted_second(q)          = pi(phi''(. - q))
//   pi_mean_shifted_derivative(q) = integral_0^1 pi(phi'(. - s q)) ds,
// the last evaluated through the exact identity
//   integral_0^1 phi'(z - s q) ds = (phi(z) - phi(z - q)) / q,
// which keeps decompose/recompose an exact round trip.
double pi_shifted_derivative(const AdjointNullvector& e, const FrontInterpolant& itp, double q);
double pi_shifted_second(const AdjointNullvector& e, const FrontInterpolant& itp, double q);
double pi_mean_shifted_derivative(const AdjointNullvector& e, const FrontInterpolant& itp,
                                  double q);

// Rank-one projector P U = (pi U) phi' and its complement Q U = U - P U.
// Returns {P U, Q U}; the sum reproduces U exactly.
std::pair<Field, Field> project(const Field& U, const FrontProfile& front,
                                const AdjointNullvector& e);

// A perturbed front split into a local shift and a shape correction.
struct PerturbationState {
  Field v;      // remainder with pi_alpha(v) = 0 on every y slice
  YField q;     // front shift per transverse node
  YVecField w;  // transverse gradient of q
};

struct DecomposeOptions {
  double tol = 1e-12;  // Newton residual tolerance for the scalar shift solve
  int max_iter = 40;
  double min_mass = 0.5;  // pairing denominator below this means the ansatz broke
  double max_shift_fraction = 0.25;  // |q| beyond this fraction of L is out of range
};

// Splits u_tilde = phi(. - q(y)) - phi + v with pi_alpha(v)(y) = 0, solving a
// scalar Newton problem per transverse node.  Throws DecompositionError when
// the shift leaves the trusted interpolation range or the pairing denominator
// degenerates (the perturbation left the tubular neighborhood of the front).
PerturbationState decompose(const Field& u_tilde, const FrontProfile& front,
                            const AdjointNullvector& e, const TransverseFft& fft,
                            const DecomposeOptions& opts = {});

// ansatz(z, y) = phi(z - q(y)) - phi(z) + v(z, y), with the shifted profile
// evaluated by cubic splines clamped to the rest states.  Throws
// DecompositionError when max |q| > L/4.
Field recompose(const PerturbationState& state, const FrontProfile& front);

}  // namespace fsl
