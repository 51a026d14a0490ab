#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "mflab/fock.hpp"

using namespace mflab;

namespace {

std::size_t binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<std::size_t>(std::llround(r));
}

CVector random_coeffs(std::mt19937_64& rng, int K) {
  std::normal_distribution<double> g(0.0, 1.0);
  CVector c(K);
  for (int p = 0; p < K; ++p) c[p] = cplx(g(rng), g(rng));
  return c;
}

FockVector random_vector(std::mt19937_64& rng, const FockBasisPtr& b, int top) {
  std::normal_distribution<double> g(0.0, 1.0);
  FockVector v = FockVector::zeros(b);
  auto end = b->sector_range(top).second;
  for (std::size_t i = 0; i < end; ++i) v.amp[static_cast<Eigen::Index>(i)] = cplx(g(rng), g(rng));
  v.amp /= v.amp.norm();
  return v;
}

CVector unit(int K, int p) {
  CVector e = CVector::Zero(K);
  e[p] = 1.0;
  return e;
}

}  // namespace

TEST_CASE("basis dimension, ordering and ranks") {
  for (int K : {1, 2, 3, 4})
    for (int n : {0, 1, 5, 9}) {
      FockBasis b(K, n);
      CHECK(b.dim() == binom(n + K, K));
      for (std::size_t r = 0; r < b.dim(); ++r) {
        auto back = b.rank(b.occupation(r));
        REQUIRE(back.has_value());
        CHECK(*back == r);
      }
    }
  FockBasis b(3, 4);
  CHECK(b.occupation(0) == Occupation{0, 0, 0});
  auto [s, e] = b.sector_range(2);
  CHECK(e - s == FockBasis::count(3, 2));
  CHECK(b.occupation(s) == Occupation{2, 0, 0});
  CHECK(b.occupation(e - 1) == Occupation{0, 0, 2});
  CHECK_FALSE(b.rank({3, 2, 0}).has_value());

  FockBasis sec = FockBasis::sector(3, 4);
  CHECK(sec.dim() == FockBasis::count(3, 4));
  CHECK(sec.dim() == 15);
  CHECK_FALSE(sec.rank({1, 0, 0}).has_value());

  std::ostringstream os;
  FockBasis(2, 1).write_csv(os);
  CHECK(os.str().find("0,0,0") != std::string::npos);
}

TEST_CASE("creation and annihilation examples") {
  auto b = std::make_shared<const FockBasis>(3, 6);
  FockVector om = vacuum(b);
  FockVector one = apply_creation(unit(3, 0), om);
  CHECK((one.amp - basis_vector(b, {1, 0, 0}).amp).norm() <= 1e-15);

  FockVector x = om;
  for (int i = 0; i < 5; ++i) x = apply_creation(unit(3, 0), x);
  CHECK((x.amp / std::sqrt(120.0) - basis_vector(b, {5, 0, 0}).amp).norm() <= 1e-13);

  CHECK(apply_annihilation(CVector::Ones(3), om).amp.norm() == 0.0);

  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    CVector f = random_coeffs(rng, 3);
    FockVector v = random_vector(rng, b, 6), w = random_vector(rng, b, 6);
    cplx lhs = inner(w, apply_creation(f, v));
    cplx rhs = inner(apply_annihilation(f, w), v);
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
  // clipping past the cutoff
  FockVector top = basis_vector(b, {6, 0, 0});
  CHECK(apply_creation(unit(3, 1), top).amp.norm() == 0.0);
}

TEST_CASE("CCR on interior vectors") {
  auto b = std::make_shared<const FockBasis>(3, 8);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    CVector f = random_coeffs(rng, 3), g = random_coeffs(rng, 3);
    FockVector v = random_vector(rng, b, 6);
    CVector comm = apply_annihilation(f, apply_creation(g, v)).amp - apply_creation(g, apply_annihilation(f, v)).amp;
    CHECK((comm - f.dot(g) * v.amp).norm() <= 1e-12 * (1.0 + f.norm() * g.norm()));
    CVector aa = apply_annihilation(f, apply_annihilation(g, v)).amp - apply_annihilation(g, apply_annihilation(f, v)).amp;
    CHECK(aa.norm() <= 1e-12 * (1.0 + f.norm() * g.norm()));
  }
}

TEST_CASE("number operator and moments") {
  auto b = std::make_shared<const FockBasis>(2, 6);
  FockVector om = vacuum(b);
  for (int j : {0, 1, 2, 5}) CHECK(moment(om, j) == doctest::Approx(1.0));
  CHECK(moment(basis_vector(b, {2, 1}), 1) == doctest::Approx(4.0));
  CHECK(number_moment(basis_vector(b, {2, 1}), 2) == doctest::Approx(9.0));
  FockVector nv = number_operator(basis_vector(b, {1, 3}));
  CHECK((nv.amp - 4.0 * basis_vector(b, {1, 3}).amp).norm() <= 1e-15);
  CHECK_THROWS_AS(moment(FockVector::zeros(b), 1), InvalidArgument);
}

TEST_CASE("operator norm bounds on random vectors") {
  auto b = std::make_shared<const FockBasis>(3, 7);
  SparseOp N = number_matrix(*b);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    CVector f = random_coeffs(rng, 3);
    FockVector v = random_vector(rng, b, 6);
    double nhalf = std::sqrt(std::max(0.0, v.amp.dot(N * v.amp).real()));
    double n1half = std::sqrt(v.amp.dot(N * v.amp).real() + v.amp.squaredNorm());
    CHECK(apply_annihilation(f, v).norm() <= f.norm() * nhalf * (1.0 + 1e-12));
    CHECK(apply_creation(f, v).norm() <= f.norm() * n1half * (1.0 + 1e-12));
  }
}

TEST_CASE("second quantization") {
  auto b = std::make_shared<const FockBasis>(3, 5);
  SparseOp id = second_quantization(*b, CMatrix::Identity(3, 3));
  CHECK(SparseOp(id - number_matrix(*b)).norm() <= 1e-14);

  CMatrix d = CMatrix::Zero(3, 3);
  d(0, 0) = 1.0;
  SparseOp n1 = second_quantization(*b, d);
  for (std::size_t r = 0; r < b->dim(); ++r) {
    FockVector e = FockVector::zeros(b);
    e.amp[static_cast<Eigen::Index>(r)] = 1.0;
    CHECK(((n1 * e.amp) - b->occupation(r)[0] * e.amp).norm() <= 1e-15);
  }

  std::mt19937_64 rng(4);
  CMatrix J(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) J(i, j) = cplx(std::normal_distribution<double>()(rng), std::normal_distribution<double>()(rng));
  J = (J + J.adjoint()).eval();
  SparseOp dg = second_quantization(*b, J);
  SparseOp N = number_matrix(*b);
  double jn = operator_norm(J);
  for (int trial = 0; trial < 20; ++trial) {
    FockVector v = random_vector(rng, b, 5);
    CHECK((dg * v.amp).norm() <= jn * (N * v.amp).norm() * (1.0 + 1e-12));
  }
  CMatrix bad = J;
  bad(0, 1) += 1.0;
  CHECK_THROWS_AS(second_quantization(*b, bad), InvalidArgument);
}

TEST_CASE("Weyl operator examples") {
  auto b = std::make_shared<const FockBasis>(2, 20);
  std::mt19937_64 rng(5);
  // interior: sectors at most 3, far enough below the cutoff for the shift identity
  FockVector v = random_vector(rng, b, 3);
  CHECK((weyl_apply(CVector::Zero(2), v).amp - v.amp).norm() <= 1e-15);
  for (int trial = 0; trial < 5; ++trial) {
    CVector f = random_coeffs(rng, 2);
    f /= f.norm();
    FockVector w = weyl_apply(f, v);
    CHECK(std::abs(w.norm() - 1.0) <= 1e-12);
    CHECK((weyl_apply(-f, w).amp - v.amp).norm() <= 1e-12);

    CVector g = random_coeffs(rng, 2);
    g /= g.norm();
    FockVector x = weyl_apply(-f, apply_annihilation(g, weyl_apply(f, v)));
    CVector r = x.amp - apply_annihilation(g, v).amp - g.dot(f) * v.amp;
    CHECK(r.norm() <= 1e-6);
  }
}

TEST_CASE("compressed Weyl agrees with the exponential and the coherent formula") {
  auto b = std::make_shared<const FockBasis>(2, 24);
  CVector f(2);
  f << 0.9, cplx(0.0, -0.7);
  FockVector c = coherent_state(b, f);
  FockVector cc = weyl_apply_compressed(f, vacuum(b));
  // W(f) Omega = exp(-|f|^2/2) sum_n (a*(f))^n Omega / n!
  FockVector series = FockVector::zeros(b);
  FockVector term = vacuum(b);
  for (int n = 0; n <= 24; ++n) {
    series.amp += term.amp;
    term = apply_creation(f, term);
    term.amp /= static_cast<double>(n + 1);
  }
  series.amp *= std::exp(-0.5 * f.squaredNorm());
  CHECK((cc.amp - series.amp).norm() <= 1e-13);
  CHECK((c.amp - series.amp).norm() <= 1e-13);
  CHECK((weyl_apply(f, vacuum(b)).amp - series.amp).norm() <= 1e-8);
  FockVector p0 = project_sector(c, 0);
  CHECK(std::abs(p0.amp[0] - std::exp(-0.5 * f.squaredNorm())) <= 1e-10);
}

TEST_CASE("coherent states: eigenvector, Poisson mean and variance") {
  auto b = std::make_shared<const FockBasis>(2, 24);
  CVector f(2);
  f << 1.2, cplx(0.3, 1.0);
  REQUIRE(f.squaredNorm() <= 24.0 / 8.0);
  FockVector psi = coherent_state(b, f);
  CVector g(2);
  g << cplx(0.5, -0.2), 0.8;
  CVector ag = apply_annihilation(g, psi).amp - g.dot(f) * psi.amp;
  // a(g) cannot see the clipped tail, so compare below the last sector
  auto end = static_cast<Eigen::Index>(b->sector_range(23).second);
  CHECK(ag.head(end).norm() <= 1e-8);
  double mean = number_moment(psi, 1);
  double var = number_moment(psi, 2) - mean * mean;
  CHECK(std::abs(mean - f.squaredNorm()) <= 1e-8);
  CHECK(std::abs(var - f.squaredNorm()) <= 1e-6);
}

TEST_CASE("product state and sector projections") {
  auto b = std::make_shared<const FockBasis>(2, 8);
  CVector f(2);
  f << 0.6, cplx(0.0, 0.8);
  FockVector p = product_state(b, f, 5);
  CHECK(p.norm() == doctest::Approx(1.0).epsilon(1e-13));
  FockVector oracle = vacuum(b);
  for (int i = 0; i < 5; ++i) oracle = apply_creation(f, oracle);
  oracle.amp /= std::sqrt(120.0);
  CHECK((p.amp - oracle.amp).norm() <= 1e-13);
  CHECK_THROWS_AS(product_state(b, 2.0 * f, 3), InvalidArgument);

  std::mt19937_64 rng(6);
  FockVector v = random_vector(rng, b, 8);
  CVector sum = CVector::Zero(v.amp.size());
  double pops = 0.0;
  for (int n = 0; n <= 8; ++n) sum += project_sector(v, n).amp;
  for (double x : sector_populations(v)) pops += x;
  CHECK((sum - v.amp).norm() <= 1e-15);
  CHECK(pops == doctest::Approx(1.0));
  CHECK_THROWS_AS(project_sector(v, 9), InvalidArgument);
  CHECK_THROWS_AS(project_sector(v, -1), InvalidArgument);
  CHECK(to_json(vacuum(std::make_shared<const FockBasis>(1, 1))).find('[') != std::string::npos);
}

TEST_CASE("d_N values") {
  CHECK(d_N(1) == doctest::Approx(std::exp(0.5)).epsilon(1e-12));
  const double limit = std::pow(2.0 * M_PI, 0.25);
  double lo = 1e9, hi = 0.0;
  for (int N = 1; N <= 60; ++N) {
    double r = d_N(N) / std::pow(N, 0.25);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    if (N >= 20) CHECK(std::abs(r / limit - 1.0) <= 1e-2);
  }
  CHECK(lo > 1.0);
  CHECK(hi < 2.0);
  CHECK(std::isfinite(d_N(5000)));
}

TEST_CASE("coherent even-odd sector bound at q = 8") {
  const int q = 8;
  auto b = std::make_shared<const FockBasis>(1, 32);
  CVector f = CVector::Ones(1);
  FockVector prod = product_state(b, f, q);
  FockVector w = weyl_apply(-std::sqrt(static_cast<double>(q)) * f, prod);
  for (int k = 0; 2 * k + 1 <= 16; ++k) {
    double lhs = project_sector(w, 2 * k + 1).norm();
    double rhs = 2.0 * std::pow(k + 1.0, 1.5) / (d_N(q) * std::sqrt(static_cast<double>(q)));
    CHECK(lhs <= rhs);
  }
}

TEST_CASE("coherent overlap bound stays below 10") {
  for (int q = 4; q <= 12; ++q) {
    auto b = std::make_shared<const FockBasis>(1, 4 * q);
    CVector f = CVector::Ones(1);
    FockVector w = weyl_apply(-std::sqrt(static_cast<double>(q)) * f, product_state(b, f, q));
    double acc = 0.0;
    for (std::size_t r = 0; r < b->dim(); ++r)
      acc += std::norm(w.amp[static_cast<Eigen::Index>(r)]) / (b->total(r) + 1.0);
    CHECK(d_N(q) * std::sqrt(acc) <= 10.0);
  }
}
