#include "mflab/manybody.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "mflab/errors.hpp"

namespace mflab {

namespace {

WordSum kinetic_words(const RVector& eps) {
  WordSum s;
  for (int p = 0; p < static_cast<int>(eps.size()); ++p) s.add(Word({p}, {p}), eps[p]);
  return s;
}

WordSum interaction_words(const InteractionTensor& T, int N) {
  const int K = T.modes();
  const double c = 1.0 / (6.0 * static_cast<double>(N) * N);
  WordSum s;
  for (int p = 0; p < K; ++p)
    for (int q = 0; q < K; ++q)
      for (int r = 0; r < K; ++r)
        for (int a = 0; a < K; ++a)
          for (int b = 0; b < K; ++b)
            for (int u = 0; u < K; ++u) s.add(Word({p, q, r}, {a, b, u}), c * T(p, q, r, a, b, u));
  return s;
}

void check_dims(const FockBasis& basis, const InteractionTensor& T, const RVector& eps) {
  if (T.modes() != basis.modes() || eps.size() != basis.modes()) {
    throw InvalidArgument("hamiltonian: tensor, eps and basis disagree on K");
  }
}

SparseOp symmetrize(const SparseOp& A) { return SparseOp(0.5 * (A + SparseOp(A.adjoint()))); }

}  // namespace

SparseOp fock_hamiltonian(const FockBasis& basis, const InteractionTensor& tensor, const RVector& eps, int N) {
  if (N < 1) throw InvalidArgument("fock_hamiltonian: N must be positive");
  check_dims(basis, tensor, eps);
  WordSum s = kinetic_words(eps);
  s.add(interaction_words(tensor, N));
  return symmetrize(s.assemble(basis));
}

FockVector SectorHamiltonian::apply(const FockVector& v) const { return FockVector(v.basis, matrix * v.amp); }

double SectorHamiltonian::expectation(const FockVector& v) const {
  return v.amp.dot(matrix * v.amp).real() / v.amp.squaredNorm();
}

SectorHamiltonian build_sector_hamiltonian(int N, const InteractionTensor& tensor, const RVector& eps,
                                           FockBasisPtr basis) {
  if (N < 1) throw InvalidArgument("build_sector_hamiltonian: N must be positive");
  if (!basis) basis = std::make_shared<const FockBasis>(FockBasis::sector(tensor.modes(), N));
  if (N < basis->n_min() || N > basis->n_max()) throw InvalidArgument("build_sector_hamiltonian: N out of range");
  check_dims(*basis, tensor, eps);
  SectorHamiltonian H;
  H.N = N;
  H.basis = basis;
  H.kinetic = kinetic_words(eps).assemble(*basis);
  H.interaction = symmetrize(interaction_words(tensor, N).assemble(*basis));
  H.matrix = H.kinetic + H.interaction;
  return H;
}

FockVector propagate(const SectorHamiltonian& H, const FockVector& psi0, double t, double tol) {
  if (psi0.basis->dim() != H.basis->dim()) throw InvalidArgument("propagate: state and Hamiltonian bases differ");
  if (t == 0.0) return psi0;
  CVector out = expm_multiply(H.matrix, psi0.amp, cplx(0.0, -t), std::min(tol, 1e-15));
  double n0 = psi0.amp.norm();
  double defect = n0 > 0.0 ? std::abs(out.norm() / n0 - 1.0) : out.norm();
  if (defect > tol) {
    std::ostringstream os;
    os << "propagate: tolerance " << tol << " not reachable; achieved residual " << defect;
    throw NumericalError(os.str());
  }
  return FockVector(psi0.basis, std::move(out));
}

double DensityMatrix::min_eigenvalue() const {
  CMatrix h = 0.5 * (gamma + gamma.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool DensityMatrix::valid() const {
  return hermiticity_residual() <= 1e-12 && min_eigenvalue() >= -1e-12 && std::abs(trace() - 1.0) <= 1e-10;
}

DensityMatrix pure_state_density(const CVector& phi) {
  DensityMatrix d;
  d.gamma = phi * phi.adjoint();
  return d;
}

DensityMatrix reduced_density(const FockVector& psi) {
  const FockBasis& basis = *psi.basis;
  const int K = basis.modes();
  double nn = number_moment(psi, 1) * psi.amp.squaredNorm();
  if (!(nn > 0.0)) throw InvalidArgument("reduced_density: <psi, N psi> must be positive");
  DensityMatrix d;
  d.gamma = CMatrix::Zero(K, K);
  for (int p = 0; p < K; ++p) {
    for (int q = p; q < K; ++q) {
      cplx v = psi.amp.dot(word_matrix(basis, Word({q}, {p})) * psi.amp) / nn;
      if (p == q) {
        d.gamma(p, p) = v.real();
      } else {
        d.gamma(p, q) = v;
        d.gamma(q, p) = std::conj(v);
      }
    }
  }
  return d;
}

CMatrix reduced_density_2(const FockVector& psi) {
  const FockBasis& basis = *psi.basis;
  const int K = basis.modes();
  if (K > 6) throw InvalidArgument("reduced_density_2: K too large");
  double nn = 0.0;
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    double n = basis.total(i);
    nn += std::norm(psi.amp[static_cast<Eigen::Index>(i)]) * n * (n - 1.0);
  }
  if (!(nn > 0.0)) throw InvalidArgument("reduced_density_2: needs at least two particles");
  CMatrix g = CMatrix::Zero(K * K, K * K);
  for (int p = 0; p < K; ++p)
    for (int q = 0; q < K; ++q)
      for (int r = 0; r < K; ++r)
        for (int s = 0; s < K; ++s)
          g(p * K + q, r * K + s) = psi.amp.dot(word_matrix(basis, Word({r, s}, {p, q})) * psi.amp) / nn;
  return g;
}

double trace_distance(const DensityMatrix& g1, const DensityMatrix& g2) {
  if (g1.gamma.rows() != g2.gamma.rows() || g1.gamma.cols() != g2.gamma.cols()) {
    throw InvalidArgument("trace_distance: shape mismatch");
  }
  CMatrix d = g1.gamma - g2.gamma;
  d = 0.5 * (d + d.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(d, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

MeanFieldModel build_model(const MeanFieldSetup& setup) { return build_model(setup, setup.alpha); }

MeanFieldModel build_model(const MeanFieldSetup& setup, double alpha) {
  MeanFieldModel m;
  m.modes = lowest_modes(setup.grid, setup.K);
  m.kernel = build_kernel(setup.grid, alpha, setup.lambda);
  m.tensor = interaction_tensor(m.kernel, m.modes);
  if (setup.phi0.size() == 0) {
    m.phi0 = CVector::Zero(setup.K);
    m.phi0[0] = 1.0;
  } else {
    if (setup.phi0.size() != setup.K) throw InvalidArgument("phi0 must have K coefficients");
    double n = setup.phi0.norm();
    if (!(n > 0.0)) throw InvalidArgument("phi0 must be nonzero");
    m.phi0 = setup.phi0 / n;
  }
  return m;
}

double regularization_gap(int N, double alpha1, double alpha2, double t, const MeanFieldSetup& setup) {
  if (t == 0.0 || alpha1 == alpha2) return 0.0;
  MeanFieldModel m1 = build_model(setup, alpha1);
  MeanFieldModel m2 = build_model(setup, alpha2);
  auto basis = std::make_shared<const FockBasis>(FockBasis::sector(setup.K, N));
  FockVector psi0 = product_state(basis, m1.phi0, N);
  auto H1 = build_sector_hamiltonian(N, m1.tensor, m1.modes.eps, basis);
  auto H2 = build_sector_hamiltonian(N, m2.tensor, m2.modes.eps, basis);
  FockVector a = propagate(H1, psi0, t, setup.tol);
  FockVector b = propagate(H2, psi0, t, setup.tol);
  return (a.amp - b.amp).norm();
}

MeanFieldResult mean_field_run(int N, double t, const MeanFieldModel& model, const MeanFieldSetup& setup) {
  if (t < 0.0) throw InvalidArgument("mean_field_run: t must be nonnegative");
  auto basis = std::make_shared<const FockBasis>(FockBasis::sector(setup.K, N));
  auto H = build_sector_hamiltonian(N, model.tensor, model.modes.eps, basis);
  FockVector psi = propagate(H, product_state(basis, model.phi0, N), t, setup.tol);
  MeanFieldResult r;
  r.N = N;
  r.K = setup.K;
  r.alpha = model.kernel.alpha;
  r.t = t;
  r.gamma = reduced_density(psi);
  if (t == 0.0) {
    r.phi_t = model.phi0;
  } else {
    GalerkinTrajectory traj(model.tensor, model.modes.eps, model.phi0, t, setup.hartree_dt);
    r.phi_t = traj.at(t);
  }
  r.trace_distance = trace_distance(r.gamma, pure_state_density(r.phi_t));
  r.mass = psi.amp.squaredNorm();
  r.energy = H.expectation(psi) / N;
  r.psi_t = std::move(psi);
  return r;
}

double mean_field_error(int N, double t, const MeanFieldSetup& setup) {
  return mean_field_run(N, t, build_model(setup), setup).trace_distance;
}

std::string cell_record_json(const MeanFieldResult& r, double eta, double runtime_ms) {
  nlohmann::ordered_json j;
  j["N"] = r.N;
  j["K"] = r.K;
  j["eta"] = eta;
  j["alpha"] = r.alpha;
  j["t"] = r.t;
  j["trace_distance"] = r.trace_distance;
  j["mass"] = r.mass;
  j["energy"] = r.energy;
  j["runtime_ms"] = runtime_ms;
  return j.dump();
}

}  // namespace mflab
