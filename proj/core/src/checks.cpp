#include "mflab/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "mflab/errors.hpp"
#include "mflab/fluctuation.hpp"
#include "mflab/hartree.hpp"
#include "mflab/inequalities.hpp"
#include "mflab/manybody.hpp"
#include "mflab/rates.hpp"

namespace mflab {

const double kHardyGoldenD1N64 = 2.236346393701675;

namespace {

constexpr double kTwoPi = 6.283185307179586;

CVector random_coeffs(std::mt19937_64& rng, int K) {
  std::normal_distribution<double> g(0.0, 1.0);
  CVector c(K);
  for (int p = 0; p < K; ++p) c[p] = cplx(g(rng), g(rng));
  return c;
}

FockVector random_interior(std::mt19937_64& rng, const FockBasisPtr& basis, int top) {
  std::normal_distribution<double> g(0.0, 1.0);
  FockVector v = FockVector::zeros(basis);
  auto end = basis->sector_range(top).second;
  for (std::size_t i = 0; i < end; ++i) v.amp[static_cast<Eigen::Index>(i)] = cplx(g(rng), g(rng));
  v.amp /= v.amp.norm();
  return v;
}

std::vector<HartreeState> acceptance_hartree_run() {
  GridSpec g = make_grid(1, 64, kTwoPi);
  ModeBasis mb = lowest_modes(g, 2);
  CVector c(2);
  c << 0.8, 0.6;
  HartreeState s0{mb.synthesize(c), 0.0};
  return evolve(s0, build_kernel(g, 0.125, 1.0), 1.0, 1e-3, 0.1);
}

double hartree_mass() {
  double worst = 0.0;
  for (const auto& s : acceptance_hartree_run()) worst = std::max(worst, std::abs(l2_norm(s.field) - 1.0));
  return worst;
}

double hartree_energy() {
  auto run = acceptance_hartree_run();
  RegularizedKernel k = build_kernel(run.front().field.grid, 0.125, 1.0);
  double e0 = energy(run.front().field, k);
  double worst = 0.0;
  for (const auto& s : run) worst = std::max(worst, std::abs(energy(s.field, k) - e0) / std::abs(e0));
  return worst;
}

double ccr() {
  std::mt19937_64 rng(11);
  auto basis = std::make_shared<const FockBasis>(3, 12);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    FockVector v = random_interior(rng, basis, 10);
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) {
        CVector ep = CVector::Unit(3, p), eq = CVector::Unit(3, q);
        FockVector x = apply_annihilation(ep, apply_creation(eq, v));
        FockVector y = apply_creation(eq, apply_annihilation(ep, v));
        double d = (x.amp - y.amp - (p == q ? 1.0 : 0.0) * v.amp).norm();
        worst = std::max(worst, d);
      }
  }
  return worst;
}

double weyl_unitarity() {
  std::mt19937_64 rng(12);
  auto basis = std::make_shared<const FockBasis>(2, 20);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    CVector f = random_coeffs(rng, 2);
    f /= f.norm();
    FockVector v = random_interior(rng, basis, 20);
    FockVector w = weyl_apply(f, v);
    worst = std::max(worst, std::abs(w.norm() - 1.0));
    worst = std::max(worst, (weyl_apply(-f, w).amp - v.amp).norm());
  }
  return worst;
}

double weyl_shift() {
  std::mt19937_64 rng(13);
  auto basis = std::make_shared<const FockBasis>(2, 20);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    CVector f = random_coeffs(rng, 2);
    f /= f.norm();
    CVector gv = random_coeffs(rng, 2);
    gv /= gv.norm();
    FockVector v = random_interior(rng, basis, 3);
    FockVector x = weyl_apply(-f, apply_annihilation(gv, weyl_apply(f, v)));
    cplx shift = gv.dot(f);
    CVector r = x.amp - apply_annihilation(gv, v).amp - shift * v.amp;
    worst = std::max(worst, r.norm());
  }
  return worst;
}

double coherent_mean() {
  auto basis = std::make_shared<const FockBasis>(2, 20);
  CVector f(2);
  f << 0.6, cplx(0.0, 0.8);
  FockVector psi = coherent_state(basis, f);
  return std::abs(number_moment(psi, 1) - f.squaredNorm());
}

double coherent_variance() {
  auto basis = std::make_shared<const FockBasis>(2, 20);
  CVector f(2);
  f << 0.6, cplx(0.0, 0.8);
  FockVector psi = coherent_state(basis, f);
  double m1 = number_moment(psi, 1), m2 = number_moment(psi, 2);
  return std::abs(m2 - m1 * m1 - f.squaredNorm());
}

double dn_limit() {
  const double lim = std::pow(kTwoPi, 0.25);
  double worst = 0.0;
  for (int N = 20; N <= 60; ++N) worst = std::max(worst, std::abs(d_N(N) / std::pow(N, 0.25) / lim - 1.0));
  return worst;
}

double density_product() {
  CVector phi(3);
  phi << 0.6, cplx(0.0, 0.64), 0.48;
  phi /= phi.norm();
  auto basis = std::make_shared<const FockBasis>(FockBasis::sector(3, 10));
  DensityMatrix g = reduced_density(product_state(basis, phi, 10));
  return trace_distance(g, pure_state_density(phi));
}

double parity() {
  MeanFieldSetup setup;
  setup.phi0 = CVector(2);
  setup.phi0 << 0.8, 0.6;
  MeanFieldModel m = build_model(setup);
  FluctuationModel fm(m.tensor, m.modes.eps, m.phi0, 4, 16, 0.5);
  double worst = 0.0;
  for (int p = 0; p < 2; ++p) worst = std::max(worst, std::abs(parity_expectation(fm, 0.5, CVector::Unit(2, p))));
  return worst;
}

double hls_refinement() {
  HLSCheckSpec spec;
  spec.quad.points = 128;
  return check_generalized_hls(spec, 5).refinement_change;
}

double young_refinement() {
  std::array<double, 5> p{5.0 / 3, 5.0 / 3, 5.0 / 3, 5.0 / 3, 5.0 / 3};
  Quadrature q;
  q.points = 128;
  return check_generalized_young(p, 5, {}, q).refinement_change;
}

double hardy_ratio() {
  GridSpec g = make_grid(1, 64, kTwoPi);
  RegularizedKernel k = build_kernel(g, 0.125, 1.0);
  std::mt19937_64 rng(14);
  std::normal_distribution<double> nd(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    CVector v(static_cast<Eigen::Index>(g.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cplx(nd(rng), nd(rng));
    Field f = normalized(Field(g, v));
    auto [num, den] = hardy_quadratic_check(f, k);
    worst = std::max(worst, num / den);
  }
  return worst / kHardyGoldenD1N64;
}

double rates_planted() {
  std::vector<std::pair<double, double>> pts;
  for (int N : {8, 16, 32, 64}) pts.emplace_back(N, 7.0 / N);
  return std::abs(fit_slope(pts).slope + 1.0);
}

struct Entry {
  const char* name;
  double threshold;
  std::function<double()> run;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> r{
      {"hartree_mass", 1e-10, hartree_mass},
      {"hartree_energy_drift", 1e-6, hartree_energy},
      {"ccr", 1e-12, ccr},
      {"weyl_unitarity", 1e-12, weyl_unitarity},
      {"weyl_shift", 1e-6, weyl_shift},
      {"coherent_mean", 1e-8, coherent_mean},
      {"coherent_variance", 1e-6, coherent_variance},
      {"d_N_limit", 1e-2, dn_limit},
      {"product_state_density", 1e-12, density_product},
      {"parity", 1e-10, parity},
      {"hls_refinement", 2e-2, hls_refinement},
      {"young_refinement", 2e-2, young_refinement},
      {"hardy_golden", 1.0, hardy_ratio},
      {"planted_slope", 1e-10, rates_planted},
  };
  return r;
}

}  // namespace

std::vector<std::string> check_names() {
  std::vector<std::string> out;
  for (const auto& e : registry()) out.emplace_back(e.name);
  return out;
}

double check_threshold(const std::string& name) {
  for (const auto& e : registry())
    if (name == e.name) return e.threshold;
  throw InvalidArgument("unknown check '" + name + "'");
}

std::vector<CheckRow> run_checks(const CheckOptions& opt) {
  for (const auto& [name, v] : opt.thresholds) check_threshold(name);
  std::vector<const Entry*> chosen;
  if (opt.select) {
    for (const auto& name : *opt.select) {
      auto it = std::find_if(registry().begin(), registry().end(), [&](const Entry& e) { return name == e.name; });
      if (it == registry().end()) throw InvalidArgument("unknown check '" + name + "'");
      chosen.push_back(&*it);
    }
  } else {
    for (const auto& e : registry()) chosen.push_back(&e);
  }
  std::vector<CheckRow> rows;
  for (const Entry* e : chosen) {
    CheckRow row;
    row.name = e->name;
    auto ov = opt.thresholds.find(row.name);
    row.threshold = ov != opt.thresholds.end() ? ov->second : e->threshold;
    try {
      row.value = e->run();
    } catch (const std::exception&) {
      row.value = std::numeric_limits<double>::quiet_NaN();
    }
    row.pass = row.value <= row.threshold;
    rows.push_back(row);
  }
  return rows;
}

std::string format_check_table(const std::vector<CheckRow>& rows) {
  std::ostringstream os;
  os << "check_name,max_ratio,threshold,pass\n";
  os << std::setprecision(6);
  for (const auto& r : rows) os << r.name << ',' << r.value << ',' << r.threshold << ',' << (r.pass ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace mflab
