#pragma once

#include <optional>
#include <string>

#include "mflab/fock.hpp"
#include "mflab/hartree.hpp"
#include "mflab/potentials.hpp"

namespace mflab {

/// dGamma(eps) + (1/(6N^2)) sum T[p,q,r,s,t,u] a*_p a*_q a*_r a_u a_t a_s on
/// any basis; N enters only through the coupling.
SparseOp fock_hamiltonian(const FockBasis& basis, const InteractionTensor& tensor, const RVector& eps, int N);

struct SectorHamiltonian {
  int N = 0;
  FockBasisPtr basis;
  SparseOp kinetic;
  SparseOp interaction;
  SparseOp matrix;

  FockVector apply(const FockVector& v) const;
  double expectation(const FockVector& v) const;
  double hermiticity_residual() const { return mflab::hermiticity_residual(matrix); }
};

/// basis defaults to the N-particle sector; a supplied basis must contain it.
SectorHamiltonian build_sector_hamiltonian(int N, const InteractionTensor& tensor, const RVector& eps,
                                           FockBasisPtr basis = nullptr);

/// exp(-iHt) psi0. Throws NumericalError when the achieved norm defect exceeds tol.
FockVector propagate(const SectorHamiltonian& H, const FockVector& psi0, double t, double tol = 1e-12);

struct DensityMatrix {
  CMatrix gamma;

  double trace() const { return gamma.trace().real(); }
  double min_eigenvalue() const;
  double hermiticity_residual() const { return mflab::hermiticity_residual(gamma); }
  /// Hermitian, eigenvalues >= -1e-12, trace 1 within 1e-10.
  bool valid() const;
};

DensityMatrix pure_state_density(const CVector& phi);

/// gamma_pq = <psi, a*_q a_p psi> / <psi, N psi>.
DensityMatrix reduced_density(const FockVector& psi);
/// Two-particle marginal <a*_r a*_s a_q a_p> / <N(N-1)>, indexed (p*K+q, r*K+s).
/// Small K only.
CMatrix reduced_density_2(const FockVector& psi);

/// Sum of absolute eigenvalues of g1 - g2.
double trace_distance(const DensityMatrix& g1, const DensityMatrix& g2);

/// One-particle space, kernel and initial profile shared by many-body and
/// mean-field runs.
struct MeanFieldSetup {
  GridSpec grid = make_grid(1, 64, 6.283185307179586);
  int K = 2;
  double lambda = 1.0;
  double alpha = 0.125;
  /// Mode coefficients of phi_0; empty means the lowest mode.
  CVector phi0;
  double hartree_dt = 1e-3;
  double tol = 1e-12;
};

struct MeanFieldModel {
  ModeBasis modes;
  RegularizedKernel kernel;
  InteractionTensor tensor;
  CVector phi0;
};

MeanFieldModel build_model(const MeanFieldSetup& setup);
MeanFieldModel build_model(const MeanFieldSetup& setup, double alpha);

/// ||psi_t - psibar_t|| for the sector evolutions under two cutoffs from the
/// same product state.
double regularization_gap(int N, double alpha1, double alpha2, double t, const MeanFieldSetup& setup);

struct MeanFieldResult {
  int N = 0;
  int K = 0;
  double alpha = 0.0;
  double t = 0.0;
  double trace_distance = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  DensityMatrix gamma;
  CVector phi_t;
  FockVector psi_t;
};

/// Tr |gamma_t - |phi_t><phi_t|| with the sector evolution and the Galerkin
/// Hartree flow sharing one tensor.
MeanFieldResult mean_field_run(int N, double t, const MeanFieldModel& model, const MeanFieldSetup& setup);
double mean_field_error(int N, double t, const MeanFieldSetup& setup);

/// {N, K, eta, alpha, t, trace_distance, mass, energy, runtime_ms}
std::string cell_record_json(const MeanFieldResult& r, double eta, double runtime_ms);

}  // namespace mflab
