#include "mflab/hartree.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace mflab {

namespace {

void require_finite(const CVector& v, const char* where) {
  if (!v.allFinite()) throw NumericalError(std::string(where) + ": non-finite values detected");
}

}  // namespace

StrangStepper::StrangStepper(RegularizedKernel kernel, double dt) : kernel_(std::move(kernel)), dt_(dt) {
  if (!(dt > 0.0)) throw InvalidArgument("strang_step: dt must be positive");
  RVector k2 = wavenumber_squared(kernel_.grid);
  half_kinetic_.resize(k2.size());
  for (Eigen::Index j = 0; j < k2.size(); ++j) half_kinetic_[j] = std::polar(1.0, -0.5 * dt_ * k2[j]);
}

Field StrangStepper::step(const Field& phi) const {
  Field psi = apply_fourier_multiplier(phi, half_kinetic_);
  RVector rho = psi.values.cwiseAbs2();
  RVector q = hartree_potential(kernel_, rho);
  for (Eigen::Index j = 0; j < q.size(); ++j) psi.values[j] *= std::polar(1.0, -dt_ * q[j]);
  psi = apply_fourier_multiplier(psi, half_kinetic_);
  require_finite(psi.values, "strang_step");
  return psi;
}

Field strang_step(const Field& phi, const RegularizedKernel& kernel, double dt) {
  return StrangStepper(kernel, dt).step(phi);
}

double kinetic_energy(const Field& phi) { return -0.5 * inner(phi, apply_laplacian(phi)).real(); }

double energy(const Field& phi, const RegularizedKernel& kernel) {
  RVector rho = phi.values.cwiseAbs2();
  return kinetic_energy(phi) + three_body_energy(kernel, rho) / 12.0;
}

std::vector<HartreeState> evolve(const HartreeState& initial, const RegularizedKernel& kernel, double T,
                                 double dt, double sample_every) {
  if (T < 0.0) throw InvalidArgument("evolve: T must be nonnegative");
  std::vector<HartreeState> out{initial};
  if (T == 0.0) return out;
  if (!(dt > 0.0)) throw InvalidArgument("evolve: dt must be positive");
  const double ratio = sample_every / dt;
  const long stride = std::lround(ratio);
  if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-9 * std::max(1.0, ratio)) {
    throw InvalidArgument("evolve: dt must divide the sample interval");
  }
  const long steps = std::max(1L, std::lround(T / dt));
  StrangStepper stepper(kernel, dt);
  Field phi = initial.field;
  for (long s = 1; s <= steps; ++s) {
    phi = stepper.step(phi);
    if (s % stride == 0 || s == steps) out.push_back({phi, initial.t + static_cast<double>(s) * dt});
  }
  return out;
}

TrajectorySample sample_of(const HartreeState& s, const RegularizedKernel& kernel) {
  TrajectorySample r;
  r.t = s.t;
  r.mass = l2_norm(s.field);
  r.energy = energy(s.field, kernel);
  r.h1_norm = sobolev_norm(s.field, 1.0);
  return r;
}

CVector galerkin_rhs(const CVector& c, const InteractionTensor& tensor, const RVector& eps) {
  if (c.size() != tensor.modes() || eps.size() != c.size()) {
    throw InvalidArgument("galerkin_rhs: coefficient vector length must equal K");
  }
  CVector g = tensor.hartree_term(c);
  return cplx(0.0, -1.0) * (eps.cast<cplx>().cwiseProduct(c) + g);
}

CVector galerkin_rhs(const CVector& c, const InteractionTensor& tensor, const ModeBasis& basis) {
  return galerkin_rhs(c, tensor, basis.eps);
}

double galerkin_energy(const CVector& c, const InteractionTensor& tensor, const RVector& eps) {
  double kin = 0.5 * (eps.array() * c.cwiseAbs2().array()).sum();
  return kin + tensor.contract_sextic(c) / 12.0;
}

double galerkin_step_rule(const RVector& eps, double requested) {
  double emax = eps.size() > 0 ? eps.maxCoeff() : 0.0;
  double rule = emax > 0.0 ? 0.1 / emax : requested;
  return std::min(requested, rule);
}

GalerkinTrajectory::GalerkinTrajectory(InteractionTensor tensor, RVector eps, CVector c0, double T, double dt)
    : tensor_(std::move(tensor)), eps_(std::move(eps)), T_(T) {
  if (T < 0.0) throw InvalidArgument("GalerkinTrajectory: T must be nonnegative");
  if (!(dt > 0.0)) throw InvalidArgument("GalerkinTrajectory: dt must be positive");
  double h = galerkin_step_rule(eps_, dt);
  long steps = std::max(1L, static_cast<long>(std::ceil(T / h - 1e-12)));
  dt_ = T > 0.0 ? T / static_cast<double>(steps) : h;
  if (T == 0.0) steps = 0;
  c_.reserve(static_cast<std::size_t>(steps) + 1);
  dc_.reserve(static_cast<std::size_t>(steps) + 1);
  CVector c = std::move(c0);
  auto f = [&](const CVector& x) { return galerkin_rhs(x, tensor_, eps_); };
  c_.push_back(c);
  dc_.push_back(f(c));
  for (long s = 0; s < steps; ++s) {
    CVector k1 = dc_.back();
    CVector k2 = f(c + 0.5 * dt_ * k1);
    CVector k3 = f(c + 0.5 * dt_ * k2);
    CVector k4 = f(c + dt_ * k3);
    c += (dt_ / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    require_finite(c, "galerkin_rk4");
    c_.push_back(c);
    dc_.push_back(f(c));
  }
}

CVector GalerkinTrajectory::at(double t) const {
  if (t < -1e-12 || t > T_ + 1e-12) throw InvalidArgument("GalerkinTrajectory: time outside [0, T]");
  if (c_.size() == 1) return c_.front();
  double x = std::clamp(t / dt_, 0.0, static_cast<double>(c_.size() - 1));
  auto i = static_cast<std::size_t>(std::min(std::floor(x), static_cast<double>(c_.size() - 2)));
  // short RK4 hop from the stored node keeps at() smooth in t, unlike a spline
  double h = 0.5 * (x - static_cast<double>(i)) * dt_;
  if (h == 0.0) return c_[i];
  auto f = [&](const CVector& y) { return galerkin_rhs(y, tensor_, eps_); };
  CVector c = c_[i];
  CVector k1 = dc_[i];
  for (int s = 0; s < 2; ++s) {
    if (s > 0) k1 = f(c);
    CVector k2 = f(c + 0.5 * h * k1);
    CVector k3 = f(c + 0.5 * h * k2);
    CVector k4 = f(c + h * k3);
    c += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return c;
}

CVector GalerkinTrajectory::derivative(double t) const {
  if (c_.size() == 1) return dc_.front();
  return galerkin_rhs(at(std::clamp(t, 0.0, T_)), tensor_, eps_);
}

std::vector<TrajectorySample> GalerkinTrajectory::samples(double every) const {
  std::vector<TrajectorySample> out;
  if (!(every > 0.0)) throw InvalidArgument("samples: interval must be positive");
  long count = static_cast<long>(std::floor(T_ / every + 1e-9));
  for (long i = 0; i <= count; ++i) {
    double t = std::min(T_, static_cast<double>(i) * every);
    CVector c = at(t);
    TrajectorySample s;
    s.t = t;
    s.mass = c.norm();
    s.energy = galerkin_energy(c, tensor_, eps_);
    s.h1_norm = std::sqrt(((1.0 + eps_.array()) * c.cwiseAbs2().array()).sum());
    s.coeffs = c;
    out.push_back(std::move(s));
  }
  return out;
}

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectorySample>& samples) {
  int K = 0;
  if (!samples.empty() && samples.front().coeffs) K = static_cast<int>(samples.front().coeffs->size());
  os << "t,mass,energy,h1_norm";
  for (int p = 0; p < K; ++p) os << ",re_" << p << ",im_" << p;
  os << '\n';
  os << std::setprecision(17);
  for (const auto& s : samples) {
    os << s.t << ',' << s.mass << ',' << s.energy << ',' << s.h1_norm;
    if (s.coeffs) {
      for (Eigen::Index p = 0; p < s.coeffs->size(); ++p) os << ',' << (*s.coeffs)[p].real() << ',' << (*s.coeffs)[p].imag();
    }
    os << '\n';
  }
}

}  // namespace mflab
