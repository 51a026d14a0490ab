#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "mflab/potentials.hpp"

using namespace mflab;

namespace {

constexpr double kTwoPi = 6.283185307179586;

RVector random_density(const GridSpec& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RVector r(static_cast<Eigen::Index>(g.size()));
  for (Eigen::Index i = 0; i < r.size(); ++i) r[i] = u(rng);
  return r;
}

double triple_energy_oracle(const RegularizedKernel& k, const RVector& rho) {
  const GridSpec& g = k.grid;
  double h = g.cell_volume(), acc = 0.0;
  for (std::size_t x = 0; x < g.size(); ++x)
    for (std::size_t y = 0; y < g.size(); ++y)
      for (std::size_t z = 0; z < g.size(); ++z)
        acc += three_body_value(k, x, y, z) * rho[static_cast<Eigen::Index>(x)] * rho[static_cast<Eigen::Index>(y)] *
               rho[static_cast<Eigen::Index>(z)];
  return acc * h * h * h;
}

}  // namespace

TEST_CASE("kernel values") {
  GridSpec g = make_grid(1, 64, 8.0);
  double alpha = 0.25;
  RegularizedKernel k = build_kernel(g, alpha, 1.0);
  CHECK(k.at(0) == doctest::Approx(1.0 / alpha));
  // |x| = 2 alpha = 0.5 sits at index 4
  CHECK(k.at(4) == doctest::Approx(1.0 / (2.0 * alpha)));
  CHECK(k.at(g.negate(4)) == doctest::Approx(k.at(4)));
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(k.at(i) > 0.0);
    CHECK(k.at(i) <= 1.0 / alpha + 1e-12);
    double r = g.min_image_radius(i);
    if (r >= alpha) CHECK(k.at(i) == doctest::Approx(1.0 / r));
  }
  CHECK(alpha_for(16, 1.0) == doctest::Approx(1.0 / 16.0));
}

TEST_CASE("kernel is monotone in alpha") {
  GridSpec g = make_grid(2, 16, 4.0);
  RegularizedKernel a = build_kernel(g, 0.2), b = build_kernel(g, 0.6);
  CHECK((a.values - b.values).minCoeff() >= 0.0);
}

TEST_CASE("alpha below the grid floor is rejected with the floor in the message") {
  GridSpec g = make_grid(1, 16, 1.0);
  CHECK(grid_floor_alpha(g) == doctest::Approx(1.0 / 32.0));
  try {
    build_kernel(g, 0.01);
    FAIL("expected InvalidArgument");
  } catch (const InvalidArgument& e) {
    std::string msg = e.what();
    CHECK(msg.find("0.03125") != std::string::npos);
  }
  RegularizedKernel u = unregularized_kernel(g);
  CHECK(u.alpha == doctest::Approx(grid_floor_alpha(g)));
}

TEST_CASE("three-body value examples") {
  GridSpec g = make_grid(2, 8, 2.0);
  RegularizedKernel k = build_kernel(g, 0.3, 1.7);
  CHECK(three_body_value(k, 5, 5, 5) == doctest::Approx(3.0 * 1.7 / (0.3 * 0.3)));
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t x = pick(rng), y = pick(rng), z = pick(rng);
    double v = three_body_value(k, x, y, z);
    CHECK(v == doctest::Approx(three_body_value(k, z, x, y)));
    CHECK(v == doctest::Approx(three_body_value(k, y, x, z)));
    auto vv = [&](std::size_t a, std::size_t b) { return k.at(g.difference(a, b)); };
    double direct = 1.7 * (vv(x, y) * vv(x, z) + vv(y, z) * vv(y, x) + vv(z, x) * vv(z, y));
    CHECK(v == doctest::Approx(direct).epsilon(1e-14));
  }
}

TEST_CASE("Hartree potential against the triple sum") {
  GridSpec g = make_grid(1, 8, 2.0);
  RegularizedKernel k = build_kernel(g, 0.25, 1.3);
  RVector rho = random_density(g, 4);
  RVector fast = hartree_potential(k, rho);
  double h = g.cell_volume();
  for (std::size_t x = 0; x < g.size(); ++x) {
    double acc = 0.0;
    for (std::size_t y = 0; y < g.size(); ++y)
      for (std::size_t z = 0; z < g.size(); ++z)
        acc += three_body_value(k, x, y, z) * rho[static_cast<Eigen::Index>(y)] * rho[static_cast<Eigen::Index>(z)];
    acc *= 0.5 * h * h;
    CHECK(std::abs(acc - fast[static_cast<Eigen::Index>(x)]) <= 1e-10 * acc);
    CHECK(fast[static_cast<Eigen::Index>(x)] >= 0.0);
  }
  double e = three_body_energy(k, rho);
  double oracle = triple_energy_oracle(k, rho);
  CHECK(std::abs(e - oracle) <= 1e-10 * oracle);

  CHECK(hartree_potential(k, RVector(RVector::Zero(8))).norm() == 0.0);
  RVector bad = rho;
  bad[3] = -1e-6;
  CHECK_THROWS_AS(hartree_potential(k, bad), InvalidArgument);
}

TEST_CASE("even density gives even potential") {
  GridSpec g = make_grid(1, 16, kTwoPi);
  RegularizedKernel k = build_kernel(g, 0.5);
  RVector rho(16);
  for (int i = 0; i < 16; ++i) rho[i] = 1.0 + std::cos(g.spacing() * i);
  RVector v = hartree_potential(k, rho);
  for (std::size_t i = 0; i < 16; ++i)
    CHECK(v[static_cast<Eigen::Index>(i)] == doctest::Approx(v[static_cast<Eigen::Index>(g.negate(i))]));
}

TEST_CASE("constant-mode tensor entry matches triple quadrature") {
  GridSpec g = make_grid(1, 16, 3.0);
  RegularizedKernel k = build_kernel(g, 0.25);
  ModeBasis mb = lowest_modes(g, 1);
  InteractionTensor t = interaction_tensor(k, mb);
  RVector one = RVector::Ones(16);
  double oracle = triple_energy_oracle(k, one) / std::pow(3.0, 3);
  CHECK(std::abs(t(0, 0, 0, 0, 0, 0) - oracle) <= 1e-10 * oracle);
}

TEST_CASE("tensor matches brute force and is symmetric") {
  GridSpec g = make_grid(1, 16, kTwoPi);
  RegularizedKernel k = build_kernel(g, 0.4, 0.9);
  ModeBasis mb = lowest_modes(g, 2);
  InteractionTensor fast = interaction_tensor(k, mb);
  InteractionTensor slow = interaction_tensor_bruteforce(k, mb);
  double worst = 0.0;
  for (std::size_t i = 0; i < fast.entries().size(); ++i)
    worst = std::max(worst, std::abs(fast.entries()[i] - slow.entries()[i]));
  CHECK(fast.entries().size() == 64);
  CHECK(worst <= 1e-9);
  CHECK(fast.hermiticity_residual() <= 1e-12);
  CHECK(fast.permutation_residual() <= 1e-12);
  CHECK(slow.permutation_residual() <= 1e-12);
}

TEST_CASE("sextic contraction equals the three-body energy") {
  GridSpec g = make_grid(1, 32, kTwoPi);
  RegularizedKernel k = build_kernel(g, 0.3);
  ModeBasis mb = lowest_modes(g, 4);
  InteractionTensor t = interaction_tensor(k, mb);
  CVector c(4);
  c << cplx(0.5, 0.1), cplx(-0.3, 0.4), 0.2, cplx(0.0, -0.6);
  Field phi = mb.synthesize(c);
  RVector rho = phi.values.cwiseAbs2();
  CHECK(t.contract_sextic(c) == doctest::Approx(three_body_energy(k, rho)).epsilon(1e-10));

  // g_p is the Wirtinger derivative of contract_sextic / 6
  CVector gp = t.hartree_term(c);
  const double h = 1e-6;
  for (int p = 0; p < 4; ++p) {
    CVector e = CVector::Zero(4);
    e[p] = h;
    double dre = (t.contract_sextic(c + e) - t.contract_sextic(c - e)) / (2 * h);
    double dim = (t.contract_sextic(c + cplx(0, 1) * e) - t.contract_sextic(c - cplx(0, 1) * e)) / (2 * h);
    cplx wirtinger = 0.5 * cplx(dre, dim);
    CHECK(std::abs(wirtinger / 6.0 - gp[p]) <= 1e-6 * (1.0 + std::abs(gp[p])));
  }
}

TEST_CASE("JSON dumps are self-describing") {
  GridSpec g = make_grid(1, 8, 1.0);
  RegularizedKernel k = build_kernel(g, 0.125);
  std::string kj = kernel_to_json(k);
  CHECK(kj.find("alpha") != std::string::npos);
  InteractionTensor t = interaction_tensor(k, lowest_modes(g, 1));
  std::string tj = tensor_to_json(t);
  CHECK(tj.find("entries") != std::string::npos);
}
