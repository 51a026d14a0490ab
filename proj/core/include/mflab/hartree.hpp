#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "mflab/potentials.hpp"
#include "mflab/spectral.hpp"

namespace mflab {

/// Grid representation of a quintic Hartree trajectory point.
struct HartreeState {
  Field field;
  double t = 0.0;
};

/// One Strang step: half kinetic phase, full nonlinear phase with the Hartree
/// potential frozen at the intermediate density, half kinetic phase.
/// Throws NumericalError on non-finite output.
Field strang_step(const Field& phi, const RegularizedKernel& kernel, double dt);

/// Reusable Strang stepper with the kinetic phase precomputed.
class StrangStepper {
 public:
  StrangStepper(RegularizedKernel kernel, double dt);
  Field step(const Field& phi) const;
  double dt() const { return dt_; }
  const RegularizedKernel& kernel() const { return kernel_; }

 private:
  RegularizedKernel kernel_;
  double dt_;
  CVector half_kinetic_;
};

/// (1/2) <phi, -Lap phi>.
double kinetic_energy(const Field& phi);
/// (1/2) <phi, -Lap phi> + (1/12) int Vbar |phi|^2 |phi|^2 |phi|^2.
double energy(const Field& phi, const RegularizedKernel& kernel);

/// Trajectory sample shared by the grid and Galerkin integrators.
struct TrajectorySample {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double h1_norm = 0.0;
  std::optional<CVector> coeffs;  // Galerkin runs only
};

/// Strang integration to time T; samples every `sample_every` (a multiple of dt).
/// T = 0 returns the initial state alone.
std::vector<HartreeState> evolve(const HartreeState& initial, const RegularizedKernel& kernel, double T,
                                 double dt, double sample_every);

TrajectorySample sample_of(const HartreeState& s, const RegularizedKernel& kernel);

/// -i (eps_p c_p + (1/2) sum T[p,q,r,s,t,u] conj(c_q c_r) c_s c_t c_u).
CVector galerkin_rhs(const CVector& c, const InteractionTensor& tensor, const RVector& eps);
CVector galerkin_rhs(const CVector& c, const InteractionTensor& tensor, const ModeBasis& basis);

/// (1/2) sum eps |c|^2 + (1/12) sum T conj(ccc) ccc.
double galerkin_energy(const CVector& c, const InteractionTensor& tensor, const RVector& eps);

/// Step size used by the Galerkin RK4 integrator: min(requested, 0.1 / max eps).
double galerkin_step_rule(const RVector& eps, double requested);

/// Classical RK4 solution of the Galerkin Hartree system on [0, T], stored at
/// every step; off-node values come from a short RK4 hop off the nearest earlier node.
class GalerkinTrajectory {
 public:
  GalerkinTrajectory(InteractionTensor tensor, RVector eps, CVector c0, double T, double dt);

  CVector at(double t) const;
  /// right-hand side evaluated along at()
  CVector derivative(double t) const;
  double horizon() const { return T_; }
  double step() const { return dt_; }
  const InteractionTensor& tensor() const { return tensor_; }
  const RVector& eps() const { return eps_; }
  std::vector<TrajectorySample> samples(double every) const;

 private:
  InteractionTensor tensor_;
  RVector eps_;
  double T_;
  double dt_;
  std::vector<CVector> c_;
  std::vector<CVector> dc_;
};

/// CSV columns: t,mass,energy,h1_norm[,re_0,im_0,...]
void write_trajectory_csv(std::ostream& os, const std::vector<TrajectorySample>& samples);

}  // namespace mflab
