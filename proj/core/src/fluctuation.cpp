#include "mflab/fluctuation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "mflab/errors.hpp"
#include "mflab/manybody.hpp"

namespace mflab {

namespace {

// (creators, annihilators) -> generator part, -1 for the scalar and linear terms
int group_of(int nc, int na) {
  int k = nc + na;
  if (k < 2) return -1;
  if (k == 2) return 0;
  if (k == 3) return 1;
  if (k == 4) return nc == 2 ? 3 : 2;
  if (k == 5) return 4;
  return 5;
}

SparseOp identity_op(Eigen::Index d) {
  SparseOp I(d, d);
  I.setIdentity();
  return I;
}

void require_unit(const CVector& c, const char* who) {
  if (!c.allFinite() || std::abs(c.norm() - 1.0) > 1e-10) {
    throw InvalidArgument(std::string(who) + ": phi must have unit norm in mode space");
  }
}

CVector rk4_flow(CVector c, const InteractionTensor& T, const RVector& eps, double duration, double max_step) {
  if (duration == 0.0) return c;
  int n = std::max(1, static_cast<int>(std::ceil(std::abs(duration) / max_step)));
  double dt = duration / n;
  for (int i = 0; i < n; ++i) {
    CVector k1 = galerkin_rhs(c, T, eps);
    CVector k2 = galerkin_rhs(c + 0.5 * dt * k1, T, eps);
    CVector k3 = galerkin_rhs(c + 0.5 * dt * k2, T, eps);
    CVector k4 = galerkin_rhs(c + dt * k3, T, eps);
    c += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return c;
}

void require_margin(int N, int n_max, const char* who) {
  if (4 * N > n_max) {
    std::ostringstream os;
    os << who << ": truncation margin violated, need N <= n_max/4 (N=" << N << ", n_max=" << n_max << ")";
    throw InvalidArgument(os.str());
  }
}

}  // namespace

SparseOp GeneratorSet::full() const {
  SparseOp S = L2 + L3 + L4c + L4r + L5 + L6;
  return S + (L0 + phase) * identity_op(S.rows());
}

SparseOp GeneratorSet::reduced() const { return L2 + L4r + L6; }

const SparseOp& GeneratorSet::part(int k) const {
  switch (k) {
    case 2: return L2;
    case 3: return L3;
    case 5: return L5;
    case 6: return L6;
    default: throw InvalidArgument("GeneratorSet::part: k must be 2, 3, 5 or 6 (use L4c / L4r directly)");
  }
}

GeneratorFactory::GeneratorFactory(FockBasisPtr basis, InteractionTensor tensor, RVector eps, int N,
                                   std::optional<int> M)
    : basis_(std::move(basis)), tensor_(std::move(tensor)), eps_(std::move(eps)), N_(N), M_(M) {
  if (N < 1) throw InvalidArgument("GeneratorFactory: N must be positive");
  const int K = basis_->modes();
  if (tensor_.modes() != K || eps_.size() != K) throw InvalidArgument("GeneratorFactory: K mismatch");
  if (M_) {
    if (*M_ < 0) throw InvalidArgument("GeneratorFactory: M must be nonnegative");
    if (*M_ >= basis_->n_max()) M_.reset();
  }
  WordSum kin;
  for (int p = 0; p < K; ++p) kin.add(Word({p}, {p}), eps_[p]);
  kinetic_ = kin.assemble(*basis_);

  groups_.resize(6);
  std::vector<std::map<Word, int>> index(6);
  const std::size_t entries = tensor_.entries().size();
  slot_.assign(64 * entries, {-1, -1});
  std::array<int, 6> idx{};
  for (std::size_t e = 0; e < entries; ++e) {
    std::size_t rem = e;
    for (int i = 5; i >= 0; --i) {
      idx[static_cast<std::size_t>(i)] = static_cast<int>(rem % static_cast<std::size_t>(K));
      rem /= static_cast<std::size_t>(K);
    }
    for (int mask = 0; mask < 64; ++mask) {
      std::vector<int> cr, an;
      for (int i = 0; i < 3; ++i)
        if (mask & (1 << i)) cr.push_back(idx[static_cast<std::size_t>(i)]);
      for (int i = 3; i < 6; ++i)
        if (mask & (1 << i)) an.push_back(idx[static_cast<std::size_t>(i)]);
      int g = group_of(static_cast<int>(cr.size()), static_cast<int>(an.size()));
      if (g < 0) continue;
      std::optional<int> cut = (g >= 1 && g <= 4) ? M_ : std::nullopt;
      Word w(cr, an, cut);
      auto [it, fresh] = index[static_cast<std::size_t>(g)].emplace(w, 0);
      if (fresh) {
        it->second = static_cast<int>(groups_[static_cast<std::size_t>(g)].words.size());
        groups_[static_cast<std::size_t>(g)].words.push_back(w);
        groups_[static_cast<std::size_t>(g)].mats.push_back(word_matrix(*basis_, w));
      }
      slot_[static_cast<std::size_t>(mask) * entries + e] = {g, it->second};
    }
  }
  adjoint_.resize(6);
  for (std::size_t g = 0; g < 6; ++g) {
    for (const Word& w : groups_[g].words) {
      auto it = index[g].find(Word(w.annihilators, w.creators, w.cutoff));
      if (it == index[g].end()) throw NumericalError("GeneratorFactory: adjoint word missing");
      adjoint_[g].push_back(it->second);
    }
  }
  for (int g = 0; g < 6; ++g) single_.push_back(make_pattern({g}));
  full_ = make_pattern({0, 1, 2, 3, 4, 5});
  reduced_ = make_pattern({0, 3, 5});
}

GeneratorFactory::Pattern GeneratorFactory::make_pattern(const std::vector<int>& groups) const {
  const auto d = static_cast<Eigen::Index>(basis_->dim());
  std::vector<Eigen::Triplet<cplx>> trips;
  for (Eigen::Index i = 0; i < d; ++i) trips.emplace_back(i, i, 0.0);
  for (int g : groups)
    for (const SparseOp& m : groups_[static_cast<std::size_t>(g)].mats)
      for (Eigen::Index r = 0; r < m.outerSize(); ++r)
        for (SparseOp::InnerIterator it(m, r); it; ++it) trips.emplace_back(it.row(), it.col(), 0.0);
  Pattern pat;
  pat.shape = SparseOp(d, d);
  pat.shape.setFromTriplets(trips.begin(), trips.end());
  pat.shape.makeCompressed();
  const auto* outer = pat.shape.outerIndexPtr();
  const auto* inner = pat.shape.innerIndexPtr();
  auto pos = [&](Eigen::Index r, Eigen::Index c) {
    const auto* lo = inner + outer[r];
    const auto* hi = inner + outer[r + 1];
    return static_cast<Eigen::Index>(std::lower_bound(lo, hi, c) - inner);
  };
  pat.words.resize(6);
  for (int g : groups) {
    for (const SparseOp& m : groups_[static_cast<std::size_t>(g)].mats) {
      Scatter sc;
      for (Eigen::Index r = 0; r < m.outerSize(); ++r)
        for (SparseOp::InnerIterator it(m, r); it; ++it) sc.emplace_back(pos(it.row(), it.col()), it.value().real());
      pat.words[static_cast<std::size_t>(g)].push_back(std::move(sc));
    }
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    pat.diagonal.emplace_back(pos(i, i), 1.0);
    double k = 0.0;
    for (SparseOp::InnerIterator it(kinetic_, i); it; ++it) k += it.value().real();
    pat.kinetic.emplace_back(pos(i, i), k);
  }
  return pat;
}

std::vector<std::vector<cplx>> GeneratorFactory::coefficients(const CVector& c) const {
  require_unit(c, "build_generators");
  const int K = basis_->modes();
  if (c.size() != K) throw InvalidArgument("build_generators: phi has wrong length");
  const std::size_t entries = tensor_.entries().size();
  const double sqrtN = std::sqrt(static_cast<double>(N_));
  const double base = 1.0 / (6.0 * N_ * N_);
  std::array<double, 7> weight{};
  for (int k = 0; k <= 6; ++k) weight[static_cast<std::size_t>(k)] = base * std::pow(sqrtN, 6 - k);

  std::vector<std::vector<cplx>> coef(6);
  for (std::size_t g = 0; g < 6; ++g) coef[g].assign(groups_[g].words.size(), 0.0);

  std::array<int, 6> idx{};
  for (std::size_t e = 0; e < entries; ++e) {
    cplx T = tensor_.entries()[e];
    if (T == cplx(0.0)) continue;
    std::size_t rem = e;
    for (int i = 5; i >= 0; --i) {
      idx[static_cast<std::size_t>(i)] = static_cast<int>(rem % static_cast<std::size_t>(K));
      rem /= static_cast<std::size_t>(K);
    }
    std::array<cplx, 6> scal;
    for (int i = 0; i < 3; ++i) scal[static_cast<std::size_t>(i)] = std::conj(c[idx[static_cast<std::size_t>(i)]]);
    for (int i = 3; i < 6; ++i) scal[static_cast<std::size_t>(i)] = c[idx[static_cast<std::size_t>(i)]];
    for (int mask = 0; mask < 64; ++mask) {
      auto [g, w] = slot_[static_cast<std::size_t>(mask) * entries + e];
      if (g < 0) continue;
      cplx s = T;
      int k = 0;
      for (int i = 0; i < 6; ++i) {
        if (mask & (1 << i)) {
          ++k;
        } else {
          s *= scal[static_cast<std::size_t>(i)];
        }
      }
      coef[static_cast<std::size_t>(g)][static_cast<std::size_t>(w)] += weight[static_cast<std::size_t>(k)] * s;
    }
  }
  // adjoint words carry conjugate coefficients
  for (std::size_t g = 0; g < 6; ++g) {
    auto& cg = coef[g];
    for (std::size_t w = 0; w < cg.size(); ++w) {
      auto a = static_cast<std::size_t>(adjoint_[g][w]);
      if (a < w) continue;
      cplx m = 0.5 * (cg[w] + std::conj(cg[a]));
      cg[w] = m;
      cg[a] = std::conj(m);
    }
  }
  return coef;
}

SparseOp GeneratorFactory::assemble(const Pattern& pat, const std::vector<std::vector<cplx>>& coef,
                                    cplx scalar) const {
  SparseOp out = pat.shape;
  cplx* val = out.valuePtr();
  std::fill(val, val + out.nonZeros(), cplx(0.0));
  for (std::size_t g = 0; g < pat.words.size(); ++g) {
    for (std::size_t w = 0; w < pat.words[g].size(); ++w) {
      cplx a = coef[g][w];
      if (a == cplx(0.0)) continue;
      for (const auto& [p, v] : pat.words[g][w]) val[p] += a * v;
    }
  }
  if (scalar != cplx(0.0))
    for (const auto& [p, v] : pat.diagonal) val[p] += scalar * v;
  return out;
}

GeneratorSet GeneratorFactory::at(const CVector& c) const {
  auto coef = coefficients(c);
  std::vector<std::vector<cplx>> only(6);
  std::array<SparseOp, 6> parts;
  for (std::size_t g = 0; g < 6; ++g) {
    for (std::size_t h = 0; h < 6; ++h) only[h].assign(coef[h].size(), 0.0);
    only[g] = coef[g];
    parts[g] = assemble(single_[g], only, 0.0);
    parts[g].prune(cplx(0.0));
  }
  GeneratorSet set;
  set.N = N_;
  set.M = M_;
  double X = tensor_.contract_sextic(c);
  set.L0 = N_ * X / 6.0;
  set.phase = -0.5 * N_ * X;
  set.L2 = kinetic_ + parts[0];
  set.L3 = std::move(parts[1]);
  set.L4c = std::move(parts[2]);
  set.L4r = std::move(parts[3]);
  set.L5 = std::move(parts[4]);
  set.L6 = std::move(parts[5]);
  return set;
}

SparseOp GeneratorFactory::full_at(const CVector& c) const {
  auto coef = coefficients(c);
  double X = tensor_.contract_sextic(c);
  SparseOp out = assemble(full_, coef, -N_ * X / 3.0);
  for (const auto& [p, v] : full_.kinetic) out.valuePtr()[p] += v;
  return out;
}

SparseOp GeneratorFactory::reduced_at(const CVector& c) const {
  auto coef = coefficients(c);
  SparseOp out = assemble(reduced_, coef, 0.0);
  for (const auto& [p, v] : reduced_.kinetic) out.valuePtr()[p] += v;
  return out;
}

GeneratorSet build_generators(const CVector& c, const InteractionTensor& tensor, const RVector& eps, int N,
                              FockBasisPtr basis, std::optional<int> M) {
  return GeneratorFactory(std::move(basis), tensor, eps, N, M).at(c);
}

namespace {

// two-exponential commutator-free Magnus at the Gauss nodes, fourth order
CMatrix cf4_step(const GeneratorFn& L, const CMatrix& v, double t, double h) {
  const double r3 = std::sqrt(3.0);
  const double a1 = (3.0 - 2.0 * r3) / 12.0, a2 = (3.0 + 2.0 * r3) / 12.0;
  SparseOp L1 = L(t + (0.5 - r3 / 6.0) * h);
  SparseOp L2 = L(t + (0.5 + r3 / 6.0) * h);
  SparseOp A = a1 * L1 + a2 * L2;
  SparseOp B = a2 * L1 + a1 * L2;
  CMatrix w = expm_multiply_block(B, v, cplx(0.0, -h));
  return expm_multiply_block(A, w, cplx(0.0, -h));
}

}  // namespace

CMatrix propagate_magnus_block(const GeneratorFn& L, const CMatrix& V0, double t0, double t1, const StepOptions& opt,
                               StepStats* stats) {
  StepStats local;
  CMatrix v = V0;
  const double span = std::abs(t1 - t0);
  if (span == 0.0 || V0.cols() == 0) {
    if (stats) *stats = local;
    return v;
  }
  const double dir = t1 > t0 ? 1.0 : -1.0;
  double t = t0;
  double dt = std::min({opt.dt_init, opt.dt_max, span});
  RVector scale = V0.colwise().norm().transpose().cwiseMax(1e-300);
  int steps = 0;
  bool done = false;
  while (!done) {
    if (++steps > opt.max_steps) {
      std::ostringstream os;
      os << "propagate_magnus: step budget " << opt.max_steps << " exhausted at t=" << t;
      throw NumericalError(os.str());
    }
    double remaining = std::abs(t1 - t);
    bool last = dt >= remaining * (1.0 - 1e-12);
    double h = last ? remaining : dt;
    double sh = dir * h;
    CMatrix big = cf4_step(L, v, t, sh);
    CMatrix half = cf4_step(L, cf4_step(L, v, t, 0.5 * sh), t + 0.5 * sh, 0.5 * sh);
    double err = ((big - half).colwise().norm().transpose().cwiseQuotient(scale)).maxCoeff();
    if (err <= opt.tol) {
      v = half + (half - big) / 15.0;
      t = last ? t1 : t + sh;
      done = last;
      ++local.accepted;
    } else {
      ++local.rejected;
    }
    double factor = err > 0.0 ? 0.9 * std::pow(opt.tol / err, 0.2) : 2.0;
    dt = std::min(h * std::clamp(factor, 0.2, 2.0), opt.dt_max);
    if (dt < 1e-14 * std::max(1.0, span)) throw NumericalError("propagate_magnus: step size underflow");
  }
  if (stats) *stats = local;
  return v;
}

CVector propagate_magnus(const GeneratorFn& L, const CVector& v0, double t0, double t1, const StepOptions& opt,
                         StepStats* stats) {
  return propagate_magnus_block(L, CMatrix(v0), t0, t1, opt, stats).col(0);
}

FluctuationModel::FluctuationModel(InteractionTensor tensor, RVector eps, CVector phi0, int N, int n_max,
                                   double horizon, double traj_dt)
    : tensor_(std::move(tensor)), eps_(std::move(eps)), phi0_(std::move(phi0)), N_(N) {
  require_unit(phi0_, "FluctuationModel");
  if (N < 1) throw InvalidArgument("FluctuationModel: N must be positive");
  basis_ = std::make_shared<const FockBasis>(tensor_.modes(), n_max);
  traj_ = std::make_shared<const GalerkinTrajectory>(tensor_, eps_, phi0_, horizon, traj_dt);
  plain_ = std::make_shared<const GeneratorFactory>(basis_, tensor_, eps_, N_);
}

std::shared_ptr<const GeneratorFactory> FluctuationModel::factory(std::optional<int> M) const {
  if (!M || *M >= basis_->n_max()) return plain_;
  return std::make_shared<const GeneratorFactory>(basis_, tensor_, eps_, N_, M);
}

GeneratorFn FluctuationModel::generator(const Selection& sel) const {
  auto fac = factory(sel.M);
  auto traj = traj_;
  if (sel.kind == GeneratorKind::Reduced) {
    return [fac, traj](double t) { return fac->reduced_at(traj->at(t)); };
  }
  return [fac, traj](double t) { return fac->full_at(traj->at(t)); };
}

FockVector FluctuationModel::propagate(const Selection& sel, const FockVector& v, double t0, double t1,
                                       const StepOptions& opt) const {
  double T = traj_->horizon();
  if (t0 < -1e-12 || t1 < -1e-12 || t0 > T + 1e-12 || t1 > T + 1e-12) {
    throw InvalidArgument("FluctuationModel::propagate: times outside the trajectory horizon");
  }
  return FockVector(basis_, propagate_magnus(generator(sel), v.amp, t0, t1, opt));
}

IdentityResidual generator_identity_check(const InteractionTensor& tensor, const RVector& eps, const CVector& phi_s,
                                          int N, int n_max, double s, double t, double h,
                                          const std::optional<CVector>& v) {
  require_margin(N, n_max, "generator_identity_check");
  require_unit(phi_s, "generator_identity_check");
  if (!(h > 0.0)) throw InvalidArgument("generator_identity_check: h must be positive");
  auto basis = std::make_shared<const FockBasis>(tensor.modes(), n_max);
  SparseOp H = fock_hamiltonian(*basis, tensor, eps, N);
  const double sqrtN = std::sqrt(static_cast<double>(N));
  const double max_step = std::min(1e-4, h / 4.0);
  CVector c_minus = rk4_flow(phi_s, tensor, eps, t - h - s, max_step);
  CVector c_mid = rk4_flow(c_minus, tensor, eps, h, max_step);
  CVector c_plus = rk4_flow(c_mid, tensor, eps, h, max_step);

  FockVector v0 = v ? FockVector(basis, *v) : vacuum(basis);
  FockVector w = weyl_apply_compressed(sqrtN * phi_s, v0);
  auto X = [&](const CVector& c, double tau) {
    FockVector e(basis, expm_multiply(H, w.amp, cplx(0.0, -(tau - s))));
    return weyl_apply_compressed(-sqrtN * c, e).amp;
  };
  CVector xm = X(c_minus, t - h);
  CVector x0 = X(c_mid, t);
  CVector xp = X(c_plus, t + h);
  CVector fd = cplx(0.0, 1.0) * (xp - xm) / (2.0 * h);
  CVector lx = GeneratorFactory(basis, tensor, eps, N).full_at(c_mid / c_mid.norm()) * x0;

  IdentityResidual r;
  r.interior = n_max / 2;
  auto end = static_cast<Eigen::Index>(basis->sector_range(r.interior).second);
  double num = (fd - lx).head(end).norm();
  double den = lx.head(end).norm();
  r.absolute = num;
  r.relative = den > 0.0 ? num / den : num;
  return r;
}

cplx parity_expectation(const FluctuationModel& model, double t, const CVector& f, const StepOptions& opt) {
  FockVector w = model.propagate({GeneratorKind::Reduced, std::nullopt}, model.vacuum(), 0.0, t, opt);
  return w.amp.dot(annihilation_matrix(*model.basis(), f) * w.amp);
}

MomentSeries moment_growth(const FluctuationModel& model, const Selection& sel, int j, const std::vector<double>& t_grid,
                           const StepOptions& opt) {
  if (j < 0 || j > 4) throw InvalidArgument("moment_growth: j must lie in [0, 4]");
  if (!std::is_sorted(t_grid.begin(), t_grid.end()) || (!t_grid.empty() && t_grid.front() < 0.0)) {
    throw InvalidArgument("moment_growth: time grid must be nondecreasing and nonnegative");
  }
  MomentSeries out;
  FockVector v = model.vacuum();
  double t = 0.0;
  const double limit = model.basis()->n_max() / 4.0;
  for (double tk : t_grid) {
    v = model.propagate(sel, v, t, tk, opt);
    t = tk;
    out.times.push_back(tk);
    out.values.push_back(moment(v, j));
    if (number_moment(v, 1) > limit) out.saturated = true;
  }
  const std::size_t n = out.times.size();
  if (n >= 2) {
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double y = std::log(out.values[i]);
      st += out.times[i];
      sy += y;
      stt += out.times[i] * out.times[i];
      sty += out.times[i] * y;
    }
    double den = n * stt - st * st;
    out.rate = den != 0.0 ? (n * sty - st * sy) / den : 0.0;
    out.intercept = (sy - out.rate * st) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      double r = std::log(out.values[i]) - (out.intercept + out.rate * out.times[i]);
      out.fit_residual = std::max(out.fit_residual, std::abs(r));
    }
  } else if (n == 1) {
    out.intercept = std::log(out.values[0]);
  }
  return out;
}

double truncated_vs_full(const FluctuationModel& model, int M, int j, double t, const StepOptions& opt) {
  if (M < 0 || M > model.basis()->n_max()) throw InvalidArgument("truncated_vs_full: need 0 <= M <= n_max");
  if (j < 0) throw InvalidArgument("truncated_vs_full: j must be nonnegative");
  FockVector w = model.propagate({GeneratorKind::Full, std::nullopt}, model.vacuum(), 0.0, t, opt);
  FockVector wm = model.propagate({GeneratorKind::Full, M}, model.vacuum(), 0.0, t, opt);
  const FockBasis& b = *model.basis();
  cplx acc = 0.0;
  for (std::size_t i = 0; i < b.dim(); ++i) {
    auto ii = static_cast<Eigen::Index>(i);
    acc += std::conj(w.amp[ii]) * std::pow(b.total(i) + 1.0, j) * (w.amp[ii] - wm.amp[ii]);
  }
  return std::abs(acc);
}

std::vector<EtValues> evaluate_Et(const FluctuationModel& model, const std::vector<CMatrix>& Js, double t,
                                  const StepOptions& opt) {
  const int N = model.N();
  const FockBasisPtr& basis = model.basis();
  require_margin(N, basis->n_max(), "evaluate_Et");
  if (t < 0.0 || t > model.trajectory().horizon() + 1e-12) {
    throw InvalidArgument("evaluate_Et: t outside the trajectory horizon");
  }
  const double sqrtN = std::sqrt(static_cast<double>(N));
  // <x, U* A U y> = <U x, A U y>: push both vectors forward together
  CMatrix V(static_cast<Eigen::Index>(basis->dim()), 2);
  V.col(0) = model.vacuum().amp;
  V.col(1) = weyl_apply_compressed(-sqrtN * model.phi0(), product_state(basis, model.phi0(), N)).amp;
  V = propagate_magnus_block(model.generator({GeneratorKind::Full, std::nullopt}), V, 0.0, t, opt);
  CVector phi_t = model.trajectory().at(t);
  const double dn = d_N(N);
  std::vector<EtValues> out;
  for (const auto& J : Js) {
    SparseOp dG = second_quantization(*basis, J);
    CVector jphi = J * phi_t;
    SparseOp field = creation_matrix(*basis, jphi) + annihilation_matrix(*basis, jphi);
    EtValues e;
    e.e1 = dn / N * V.col(1).dot(dG * V.col(0));
    e.e2 = dn / sqrtN * V.col(1).dot(field * V.col(0));
    out.push_back(e);
  }
  return out;
}

EtValues evaluate_Et(const FluctuationModel& model, const CMatrix& J, double t, const StepOptions& opt) {
  return evaluate_Et(model, std::vector<CMatrix>{J}, t, opt).front();
}

cplx evaluate_Et(const FluctuationModel& model, const CMatrix& J, double t, int which, const StepOptions& opt) {
  if (which != 1 && which != 2) throw InvalidArgument("evaluate_Et: which must be 1 or 2");
  EtValues e = evaluate_Et(model, J, t, opt);
  return which == 1 ? e.e1 : e.e2;
}

double bound_ratio(const SparseOp& L, const FockBasis& basis, const std::vector<CVector>& vs, int j, double p) {
  RVector lw(static_cast<Eigen::Index>(basis.dim())), rw(static_cast<Eigen::Index>(basis.dim()));
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    double n1 = basis.total(i) + 1.0;
    lw[static_cast<Eigen::Index>(i)] = std::pow(n1, 0.5 * j);
    rw[static_cast<Eigen::Index>(i)] = std::pow(n1, 0.5 * (j + p));
  }
  double worst = 0.0;
  for (const auto& v : vs) {
    double den = (rw.cast<cplx>().cwiseProduct(v)).norm();
    if (den == 0.0) continue;
    CVector Lv = L * v;
    worst = std::max(worst, lw.cast<cplx>().cwiseProduct(Lv).norm() / den);
  }
  return worst;
}

}  // namespace mflab
