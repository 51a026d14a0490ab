#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "mflab/fock.hpp"
#include "mflab/hartree.hpp"
#include "mflab/potentials.hpp"

namespace mflab {

/// Fluctuation generators at one time slice. L1 vanishes and is not stored.
/// L2 contains dGamma(eps). When M is set, chi(N <= M) sits between the
/// creators and annihilators of every word in L3, L4c, L4r and L5.
struct GeneratorSet {
  int N = 0;
  std::optional<int> M;
  /// (N/6) sum T conj(ccc) ccc
  double L0 = 0.0;
  /// scalar from the time derivative of the Weyl operators, -(N/2) sum T conj(ccc) ccc
  double phase = 0.0;
  SparseOp L2, L3, L4c, L4r, L5, L6;

  /// Generator of U (or of U^(M) when M is set), scalars included.
  SparseOp full() const;
  /// L2 + L4r + L6.
  SparseOp reduced() const;
  const SparseOp& part(int k) const;
};

/// Word matrices for one (basis, N, M), reused across time slices.
class GeneratorFactory {
 public:
  GeneratorFactory(FockBasisPtr basis, InteractionTensor tensor, RVector eps, int N, std::optional<int> M = std::nullopt);

  /// Rejects c whose norm differs from 1 by more than 1e-10.
  GeneratorSet at(const CVector& c) const;
  /// GeneratorSet::full() / reduced() assembled directly into a fixed pattern.
  SparseOp full_at(const CVector& c) const;
  SparseOp reduced_at(const CVector& c) const;

  const FockBasisPtr& basis() const { return basis_; }
  int N() const { return N_; }
  std::optional<int> M() const { return M_; }

 private:
  struct Group {
    std::vector<Word> words;
    std::vector<SparseOp> mats;
  };
  // entries of one word matrix as (position in a pattern's value array, value)
  using Scatter = std::vector<std::pair<Eigen::Index, double>>;
  struct Pattern {
    SparseOp shape;
    std::vector<std::vector<Scatter>> words;  // [group][word], empty group when excluded
    Scatter kinetic;
    Scatter diagonal;
  };
  Pattern make_pattern(const std::vector<int>& groups) const;
  std::vector<std::vector<cplx>> coefficients(const CVector& c) const;
  SparseOp assemble(const Pattern& pat, const std::vector<std::vector<cplx>>& coef, cplx scalar) const;

  FockBasisPtr basis_;
  InteractionTensor tensor_;
  RVector eps_;
  int N_;
  std::optional<int> M_;
  SparseOp kinetic_;
  // group index per (mask, entry) and word slot within the group
  std::vector<Group> groups_;
  std::vector<std::pair<int, int>> slot_;
  std::vector<std::vector<int>> adjoint_;  // [group][word] -> index of the adjoint word
  std::vector<Pattern> single_;            // one pattern per group
  Pattern full_;
  Pattern reduced_;
};

GeneratorSet build_generators(const CVector& c, const InteractionTensor& tensor, const RVector& eps, int N,
                              FockBasisPtr basis, std::optional<int> M = std::nullopt);

enum class GeneratorKind { Full, Reduced };

struct Selection {
  GeneratorKind kind = GeneratorKind::Full;
  std::optional<int> M;
};

struct StepOptions {
  double tol = 1e-8;
  double dt_init = 1e-2;
  double dt_max = 0.05;
  int max_steps = 100000;
};

struct StepStats {
  int accepted = 0;
  int rejected = 0;
};

using GeneratorFn = std::function<SparseOp(double)>;

/// Exponential integrator from t0 to t1: two-exponential commutator-free
/// Magnus steps (generator sampled at the Gauss nodes) with step-doubling
/// error control. t1 < t0 propagates backwards. Throws NumericalError when
/// the step budget runs out.
CVector propagate_magnus(const GeneratorFn& L, const CVector& v0, double t0, double t1, const StepOptions& opt = {},
                         StepStats* stats = nullptr);
/// Same steps applied to every column of V0; the error is the worst column's.
CMatrix propagate_magnus_block(const GeneratorFn& L, const CMatrix& V0, double t0, double t1,
                               const StepOptions& opt = {}, StepStats* stats = nullptr);

/// Galerkin Hartree trajectory, truncated Fock space and generator factories
/// for one particle number N.
class FluctuationModel {
 public:
  FluctuationModel(InteractionTensor tensor, RVector eps, CVector phi0, int N, int n_max, double horizon,
                   double traj_dt = 1e-3);

  int N() const { return N_; }
  const FockBasisPtr& basis() const { return basis_; }
  const GalerkinTrajectory& trajectory() const { return *traj_; }
  const InteractionTensor& tensor() const { return tensor_; }
  const RVector& eps() const { return eps_; }
  const CVector& phi0() const { return phi0_; }

  std::shared_ptr<const GeneratorFactory> factory(std::optional<int> M = std::nullopt) const;
  GeneratorFn generator(const Selection& sel) const;

  /// U(t1; t0) v for the selected generator.
  FockVector propagate(const Selection& sel, const FockVector& v, double t0, double t1,
                       const StepOptions& opt = {}) const;
  FockVector vacuum() const { return mflab::vacuum(basis_); }

 private:
  InteractionTensor tensor_;
  RVector eps_;
  CVector phi0_;
  int N_;
  FockBasisPtr basis_;
  std::shared_ptr<const GalerkinTrajectory> traj_;
  std::shared_ptr<const GeneratorFactory> plain_;
};

struct IdentityResidual {
  /// || i (X(t+h) - X(t-h)) / 2h - L(t) X(t) || / || L(t) X(t) || on sectors <= interior
  double relative = 0.0;
  double absolute = 0.0;
  int interior = 0;
};

/// X(t) = W*(sqrt(N) phi_t) exp(-iH(t - s)) W(sqrt(N) phi_s) v, differentiated by
/// central differences and compared with the full generator. v defaults to
/// the vacuum. Requires N <= n_max / 4.
IdentityResidual generator_identity_check(const InteractionTensor& tensor, const RVector& eps, const CVector& phi_s,
                                          int N, int n_max, double s, double t, double h,
                                          const std::optional<CVector>& v = std::nullopt);

/// <Omega, U~*(t) a(f) U~(t) Omega>.
cplx parity_expectation(const FluctuationModel& model, double t, const CVector& f, const StepOptions& opt = {});

struct MomentSeries {
  std::vector<double> times;
  std::vector<double> values;
  /// affine fit of log(values) against t
  double rate = 0.0;
  double intercept = 0.0;
  double fit_residual = 0.0;
  /// <N> exceeded n_max / 4 somewhere
  bool saturated = false;
};

/// <(N+1)^j> along U(t) Omega for the selected generator; j in [0, 4].
MomentSeries moment_growth(const FluctuationModel& model, const Selection& sel, int j, const std::vector<double>& t_grid,
                           const StepOptions& opt = {});

/// |<U(t)Omega, (N+1)^j (U(t) - U^(M)(t)) Omega>|.
double truncated_vs_full(const FluctuationModel& model, int M, int j, double t, const StepOptions& opt = {});

struct EtValues {
  cplx e1;
  cplx e2;
};

/// E_t^1(J) = (d_N/N) <W*(sqrt(N) phi) xi, U*(t) dGamma(J) U(t) Omega> and
/// E_t^2(J) = (d_N/sqrt(N)) <W*(sqrt(N) phi) xi, U*(t) (a*(J phi_t) + a(J phi_t)) U(t) Omega>,
/// xi = (a*(phi))^N Omega / sqrt(N!). Requires N <= n_max / 4 and Hermitian J.
EtValues evaluate_Et(const FluctuationModel& model, const CMatrix& J, double t, const StepOptions& opt = {});
/// Several observables from one propagation.
std::vector<EtValues> evaluate_Et(const FluctuationModel& model, const std::vector<CMatrix>& Js, double t,
                                  const StepOptions& opt = {});
cplx evaluate_Et(const FluctuationModel& model, const CMatrix& J, double t, int which, const StepOptions& opt = {});

/// max over v of ||(N+1)^{j/2} L v|| / ||(N+1)^{(j+p)/2} v||.
double bound_ratio(const SparseOp& L, const FockBasis& basis, const std::vector<CVector>& vs, int j, double p);

}  // namespace mflab
