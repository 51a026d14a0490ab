#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "mflab/hartree.hpp"

using namespace mflab;

namespace {

constexpr double kTwoPi = 6.283185307179586;

Field smooth_state(const GridSpec& g) {
  ModeBasis mb = lowest_modes(g, 5);
  CVector c(5);
  c << 0.8, 0.4, cplx(0.0, 0.3), 0.2, 0.1;
  return mb.synthesize(c / c.norm());
}

Field run(const Field& f, const RegularizedKernel& k, double T, double dt) {
  StrangStepper st(k, dt);
  Field x = f;
  int steps = static_cast<int>(std::lround(T / dt));
  for (int i = 0; i < steps; ++i) x = st.step(x);
  return x;
}

}  // namespace

TEST_CASE("interacting plane wave stays a plane wave") {
  GridSpec g = make_grid(1, 32, kTwoPi);
  RegularizedKernel k = build_kernel(g, 0.5, 1.0);
  Field pw = normalized(Field::plane_wave(g, {3, 0, 0}));
  Field x = run(pw, k, 0.37, 0.01);
  // constant density, so the nonlinearity contributes a global phase only
  cplx ratio = x.values[0] / pw.values[0];
  CHECK(std::abs(std::abs(ratio) - 1.0) <= 1e-13);
  CHECK((x.values - ratio * pw.values).norm() <= 1e-12);
}

TEST_CASE("zero coupling plane wave phase is e^{-ik^2 t}") {
  GridSpec g = make_grid(1, 32, kTwoPi);
  RegularizedKernel k = build_kernel(g, 0.5, 0.0);
  Field pw = normalized(Field::plane_wave(g, {3, 0, 0}));
  Field x = run(pw, k, 0.37, 0.01);
  CHECK((x.values - std::exp(cplx(0.0, -9.0 * 0.37)) * pw.values).norm() <= 1e-12);
}

TEST_CASE("Strang step preserves the norm") {
  GridSpec g = make_grid(2, 16, kTwoPi);
  RegularizedKernel k = build_kernel(g, 0.4, 1.0);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd(0.0, 1.0);
  CVector v(static_cast<Eigen::Index>(g.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cplx(nd(rng), nd(rng));
  Field f = normalized(Field(g, v));
  Field out = strang_step(f, k, 0.01);
  CHECK(std::abs(l2_norm(out) - 1.0) <= 1e-13);
}

TEST_CASE("Strang self-convergence ratio is about four") {
  GridSpec g = make_grid(1, 64, kTwoPi);
  RegularizedKernel k = build_kernel(g, 0.125, 1.0);
  Field f = smooth_state(g);
  double T = 0.2;
  Field a = run(f, k, T, 0.004), b = run(f, k, T, 0.002), c = run(f, k, T, 0.001);
  double ratio = (a.values - b.values).norm() / (b.values - c.values).norm();
  CHECK(ratio >= 3.6);
  CHECK(ratio <= 4.4);
}

TEST_CASE("evolve conserves mass and energy") {
  GridSpec g = make_grid(1, 64, kTwoPi);
  RegularizedKernel k = build_kernel(g, 0.125, 1.0);
  ModeBasis mb = lowest_modes(g, 2);
  CVector c(2);
  c << 0.8, 0.6;
  HartreeState s0{mb.synthesize(c), 0.0};
  auto traj = evolve(s0, k, 1.0, 1e-3, 0.1);
  REQUIRE(traj.size() == 11);
  CHECK(traj.back().t == doctest::Approx(1.0));
  double e0 = energy(s0.field, k);
  double h1 = sobolev_norm(s0.field, 1.0);
  for (const auto& s : traj) {
    CHECK(std::abs(l2_norm(s.field) - 1.0) <= 1e-10);
    CHECK(std::abs(energy(s.field, k) - e0) <= 1e-6 * std::abs(e0));
    CHECK(sobolev_norm(s.field, 1.0) <= 2.0 * h1);
  }
  auto zero = evolve(s0, k, 0.0, 1e-3, 0.1);
  REQUIRE(zero.size() == 1);
  CHECK((zero.front().field.values - s0.field.values).norm() == 0.0);
}

TEST_CASE("energy examples") {
  GridSpec g = make_grid(1, 8, kTwoPi);
  RegularizedKernel free_k = build_kernel(g, 0.8, 0.0);
  Field pw = normalized(Field::plane_wave(g, {2, 0, 0}));
  CHECK(energy(pw, free_k) == doctest::Approx(2.0).epsilon(1e-12));

  RegularizedKernel k = build_kernel(g, 0.8, 1.3);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd(0.0, 1.0);
  CVector v(8);
  for (int i = 0; i < 8; ++i) v[i] = cplx(nd(rng), nd(rng));
  Field f = normalized(Field(g, v));
  double kin = kinetic_energy(f);
  double e = energy(f, k);
  CHECK(e >= kin);
  RVector rho = f.values.cwiseAbs2();
  double h = g.cell_volume(), tri = 0.0;
  for (std::size_t x = 0; x < 8; ++x)
    for (std::size_t y = 0; y < 8; ++y)
      for (std::size_t z = 0; z < 8; ++z)
        tri += three_body_value(k, x, y, z) * rho[static_cast<Eigen::Index>(x)] * rho[static_cast<Eigen::Index>(y)] *
               rho[static_cast<Eigen::Index>(z)];
  tri *= h * h * h / 12.0;
  CHECK(std::abs((e - kin) - tri) <= 1e-10 * tri);
}

TEST_CASE("Galerkin right-hand side examples") {
  GridSpec g = make_grid(1, 16, kTwoPi);
  RegularizedKernel k = build_kernel(g, 0.3);
  ModeBasis one = lowest_modes(g, 1);
  InteractionTensor t1 = interaction_tensor(k, one);
  CVector c(1);
  c << cplx(0.6, 0.8);
  CVector r = galerkin_rhs(c, t1, one.eps);
  CHECK(std::abs(r[0] - cplx(0.0, -0.5) * t1(0, 0, 0, 0, 0, 0) * c[0]) <= 1e-13);
  CHECK(std::abs((std::conj(c[0]) * r[0]).real()) <= 1e-13);

  ModeBasis two = lowest_modes(g, 3);
  InteractionTensor zero(3, std::vector<cplx>(729, 0.0));
  CVector c3(3);
  c3 << 0.3, cplx(0.1, 0.5), -0.2;
  CVector lin = galerkin_rhs(c3, zero, two.eps);
  for (int p = 0; p < 3; ++p) CHECK(std::abs(lin[p] - cplx(0.0, -two.eps[p]) * c3[p]) <= 1e-15);

  InteractionTensor t2 = interaction_tensor(k, lowest_modes(g, 2));
  CVector c2(2);
  c2 << cplx(0.3, -0.2), cplx(0.7, 0.4);
  CVector r2 = galerkin_rhs(c2, t2, lowest_modes(g, 2).eps);
  CHECK(std::abs(c2.dot(r2).real()) <= 1e-12);
}

TEST_CASE("Galerkin trajectory agrees with the grid solver inside a closed span") {
  // n = 8 with all seven non-Nyquist modes: the Galerkin system only drops
  // the Nyquist slot, which odd-mode data never populates
  GridSpec g = make_grid(1, 8, kTwoPi);
  RegularizedKernel k = build_kernel(g, 0.4, 1.0);
  ModeBasis mb = lowest_modes(g, 7);
  InteractionTensor t = interaction_tensor(k, mb);
  CVector c = CVector::Zero(7);
  for (int p = 0; p < 7; ++p) {
    int m = mb.frequencies[static_cast<std::size_t>(p)][0];
    if (m == 1) c[p] = 0.8;
    if (m == -1) c[p] = cplx(0.0, 0.6);
  }
  GalerkinTrajectory gal(t, mb.eps, c, 0.5, 1e-3);
  HartreeState s0{mb.synthesize(c), 0.0};
  auto grid = evolve(s0, k, 0.5, 1e-4, 0.1);
  double worst = 0.0;
  for (const auto& s : grid) {
    CVector proj = mb.project(s.field);
    CHECK(std::abs(proj.squaredNorm() - 1.0) <= 1e-10);
    worst = std::max(worst, (proj - gal.at(s.t)).norm());
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("Galerkin trajectory conserves mass and energy and is smooth between nodes") {
  GridSpec g = make_grid(1, 32, kTwoPi);
  RegularizedKernel k = build_kernel(g, 0.25);
  ModeBasis mb = lowest_modes(g, 3);
  InteractionTensor t = interaction_tensor(k, mb);
  CVector c(3);
  c << 0.6, cplx(0.0, 0.64), 0.48;
  GalerkinTrajectory gal(t, mb.eps, c, 1.0, 1e-3);
  double e0 = galerkin_energy(c, t, mb.eps);
  for (double s = 0.0; s <= 1.0; s += 0.0937) {
    CVector x = gal.at(s);
    CHECK(std::abs(x.norm() - 1.0) <= 1e-10);
    CHECK(std::abs(galerkin_energy(x, t, mb.eps) - e0) <= 1e-9 * std::abs(e0));
    double h = 1e-5;
    if (s > h && s + h < 1.0) {
      CVector fd = (gal.at(s + h) - gal.at(s - h)) / (2 * h);
      CHECK((fd - gal.derivative(s)).norm() <= 1e-6);
    }
  }
  CHECK_THROWS_AS(gal.at(1.5), InvalidArgument);
  CHECK(galerkin_step_rule(mb.eps, 1.0) == doctest::Approx(0.1));

  auto samples = gal.samples(0.25);
  CHECK(samples.size() == 5);
  std::ostringstream os;
  write_trajectory_csv(os, samples);
  std::string header = os.str().substr(0, os.str().find('\n'));
  CHECK(header == "t,mass,energy,h1_norm,re_0,im_0,re_1,im_1,re_2,im_2");
}
