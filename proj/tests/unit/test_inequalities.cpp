#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "mflab/checks.hpp"
#include "mflab/inequalities.hpp"

using namespace mflab;

namespace {

constexpr double kTwoPi = 6.283185307179586;

std::string message(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("HLS exponent tuples") {
  HLSCheckSpec s;
  s.n = 3;
  s.p = {2.0, 2.0, 2.0};
  s.lambda1 = s.lambda2 = 2.25;
  CHECK(s.valid());

  HLSCheckSpec d;
  CHECK(d.valid());
  d.lambda2 = 0.7;
  CHECK(d.violation().find("must equal 3") != std::string::npos);
  d.lambda2 = 0.75;
  d.p[1] = 1.0;
  CHECK_FALSE(d.valid());
  HLSCheckSpec big;
  big.lambda1 = 1.2;
  big.lambda2 = 0.3;
  CHECK(big.violation().find("lambda1") != std::string::npos);

  CHECK(message([&] { check_generalized_hls(d, 1); }).find("generalized HLS") != std::string::npos);
  CHECK_THROWS_AS(check_generalized_hls(HLSCheckSpec{}, 0), InvalidArgument);
}

TEST_CASE("HLS pair integral against a direct double sum") {
  Quadrature q;
  q.points = 16;
  q.box = 3.0;
  GridSpec g = quadrature_grid(1, q);
  TrialFamily fam;
  RVector f1 = gaussian_mixture(g, 5, 0, fam), f2 = gaussian_mixture(g, 5, 1, fam);
  RVector k = singular_kernel(g, 0.5);
  double direct = 0.0;
  for (std::size_t x = 0; x < g.size(); ++x)
    for (std::size_t y = 0; y < g.size(); ++y)
      direct += f1[static_cast<Eigen::Index>(x)] * f2[static_cast<Eigen::Index>(y)] *
                k[static_cast<Eigen::Index>(g.difference(x, y))];
  direct *= g.cell_volume() * g.cell_volume();
  CHECK(hls_pair_integral(g, f1, f2, 0.5) == doctest::Approx(direct).epsilon(1e-12));

  // away from the origin the cell average is close to the point value
  CHECK(k[4] == doctest::Approx(std::pow(4 * g.spacing(), -0.5)).epsilon(1e-2));
  CHECK(k[0] > k[1]);
  CHECK_THROWS_AS(singular_kernel(g, 1.0), InvalidArgument);
}

TEST_CASE("lambda2 = 0 factorizes the triple integral") {
  Quadrature q;
  q.points = 64;
  GridSpec g = quadrature_grid(1, q);
  TrialFamily fam;
  RVector f1 = gaussian_mixture(g, 7, 0, fam), f2 = gaussian_mixture(g, 7, 1, fam), f3 = gaussian_mixture(g, 7, 2, fam);
  double tri = hls_triple_integral(g, f1, f2, f3, 0.6, 0.0);
  double pair = hls_pair_integral(g, f1, f2, 0.6) * g.cell_volume() * f3.sum();
  CHECK(tri == doctest::Approx(pair).epsilon(1e-12));
}

TEST_CASE("HLS ratios are bounded and refinement stable") {
  HLSCheckSpec s;
  s.quad.points = 128;
  RatioReport r = check_generalized_hls(s, 100);
  REQUIRE(r.ratios.size() == 100);
  double first10 = *std::max_element(r.ratios.begin(), r.ratios.begin() + 10);
  for (double x : r.ratios) {
    CHECK(std::isfinite(x));
    CHECK(x > 0.0);
    CHECK(x <= 10.0 * first10);
  }
  CHECK(r.max_ratio == doctest::Approx(*std::max_element(r.ratios.begin(), r.ratios.end())));
  CHECK(r.refinement_change < 0.02);
}

TEST_CASE("generalized Young") {
  std::array<double, 5> p{5.0 / 3, 5.0 / 3, 5.0 / 3, 5.0 / 3, 5.0 / 3};
  CHECK(young_violation(p).empty());
  RatioReport r = check_generalized_young(p, 5);
  CHECK(std::isfinite(r.max_ratio));
  CHECK(r.max_ratio > 0.0);
  CHECK(r.refinement_change < 0.01);

  std::array<double, 5> bad{2.0, 2.0, 2.0, 1.0, 1.0 / 0.4};
  // 0.5 * 3 + 1 + 0.4 = 2.9
  CHECK(message([&] { check_generalized_young(bad, 1); }).find("2.9") != std::string::npos);
  std::array<double, 5> low{0.5, 2.0, 2.0, 2.0, 2.0};
  CHECK(young_violation(low).find("p1") != std::string::npos);

  Quadrature q;
  q.points = 32;
  GridSpec g = quadrature_grid(1, q);
  TrialFamily fam;
  std::array<RVector, 5> f;
  for (int j = 0; j < 5; ++j) f[static_cast<std::size_t>(j)] = gaussian_mixture(g, 3, j, fam);
  double full = young_integral(g, f);
  CHECK(full > 0.0);
  // direct sum over x, y, z
  double direct = 0.0;
  for (std::size_t x = 0; x < g.size(); ++x)
    for (std::size_t y = 0; y < g.size(); ++y)
      for (std::size_t z = 0; z < g.size(); ++z)
        direct += f[0][static_cast<Eigen::Index>(x)] * f[1][static_cast<Eigen::Index>(y)] *
                  f[2][static_cast<Eigen::Index>(z)] * f[3][static_cast<Eigen::Index>(g.difference(x, y))] *
                  f[4][static_cast<Eigen::Index>(g.difference(x, z))];
  direct *= std::pow(g.cell_volume(), 3);
  CHECK(full == doctest::Approx(direct).epsilon(1e-12));
  f[2].setZero();
  CHECK(young_integral(g, f) == 0.0);
}

TEST_CASE("Hardy quadratic forms") {
  GridSpec g = make_grid(1, 64, kTwoPi);
  RegularizedKernel k = build_kernel(g, 0.125);
  Field c = normalized(Field::constant(g, 1.0));
  auto [num, den] = hardy_quadratic_check(c, k);
  CHECK(den == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(num > 0.0);

  double prev = 1e9;
  for (int m : {1, 4, 16, 30}) {
    auto [n2, d2] = hardy_quadratic_check(normalized(Field::plane_wave(g, {m, 0, 0})), k);
    CHECK(d2 == doctest::Approx(1.0 + m * m).epsilon(1e-10));
    CHECK(n2 / d2 < prev);
    prev = n2 / d2;
  }

  double C = hardy_constant(k);
  CHECK(std::abs(C - kHardyGoldenD1N64) <= 1e-9 * kHardyGoldenD1N64);
  std::mt19937_64 rng(21);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    CVector v(64);
    for (Eigen::Index i = 0; i < 64; ++i) v[i] = cplx(nd(rng), nd(rng));
    auto [a, b] = hardy_quadratic_check(normalized(Field(g, v)), k);
    CHECK(a / b <= C * (1.0 + 1e-12));
  }
  CHECK_THROWS_AS(hardy_quadratic_check(Field::constant(make_grid(1, 32, kTwoPi), 1.0), k), InvalidArgument);
}

TEST_CASE("sextic kernel integral") {
  GridSpec g = make_grid(1, 16, kTwoPi);
  std::mt19937_64 rng(22);
  std::normal_distribution<double> nd(0.0, 1.0);
  CVector v(16);
  for (Eigen::Index i = 0; i < 16; ++i) v[i] = cplx(nd(rng), nd(rng));
  Field phi = normalized(Field(g, v));
  for (double alpha : {0.5, 1.0}) {
    RegularizedKernel k = build_kernel(g, alpha, 0.7);
    CHECK(check_V2phi6(k, phi) == doctest::Approx(V2phi6_direct(k, phi)).epsilon(1e-11));
  }

  // constant phi under a fully capped kernel: |Vbar|^2 = 9 lambda^2 / alpha^4 everywhere
  RegularizedKernel capped = build_kernel(g, 10.0, 1.0);
  Field c = normalized(Field::constant(g, 1.0));
  CHECK(check_V2phi6(capped, c) == doctest::Approx(9.0 / 1e4).epsilon(1e-12));

  GridSpec g64 = make_grid(1, 64, kTwoPi);
  Field p64 = normalized(Field::plane_wave(g64, {1, 0, 0}));
  double prev = 0.0;
  for (double alpha : {1.0, 0.5, 0.25, 0.125}) {
    double val = check_V2phi6(build_kernel(g64, alpha), p64);
    CHECK(val >= prev);
    prev = val;
  }
}
