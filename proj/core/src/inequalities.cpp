#include "mflab/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mflab/errors.hpp"

namespace mflab {

namespace {

constexpr std::array<double, 8> kGL8x{-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                      -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                      0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGL8w{0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                      0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                      0.2223810344533745, 0.1012285362903763};
constexpr std::array<double, 3> kGL3x{-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr std::array<double, 3> kGL3w{0.5555555555555556, 0.8888888888888888, 0.5555555555555556};

// integral of |y|^{-lambda} over the cube lo + [0, side]^n by a product rule
template <std::size_t M>
double cube_integral(const std::array<double, 3>& lo, double side, int n, double lambda,
                     const std::array<double, M>& x, const std::array<double, M>& w) {
  double total = 0.0;
  std::size_t count = 1;
  for (int a = 0; a < n; ++a) count *= M;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t rem = i;
    double r2 = 0.0, wt = 1.0;
    for (int a = 0; a < n; ++a) {
      std::size_t k = rem % M;
      rem /= M;
      double y = lo[static_cast<std::size_t>(a)] + 0.5 * side * (x[k] + 1.0);
      r2 += y * y;
      wt *= 0.5 * side * w[k];
    }
    total += wt * std::pow(r2, -0.5 * lambda);
  }
  return total;
}

// average of |y|^{-lambda} over the unit cube centred at the origin:
// S = S_shell + 2^{lambda - n} S
double origin_cell(int n, double lambda) {
  double shell = 0.0;
  std::size_t count = 1;
  for (int a = 0; a < n; ++a) count *= 4;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t rem = i;
    std::array<double, 3> lo{};
    bool inner = true;
    for (int a = 0; a < n; ++a) {
      int k = static_cast<int>(rem % 4);
      rem /= 4;
      lo[static_cast<std::size_t>(a)] = -0.5 + 0.25 * k;
      if (k == 0 || k == 3) inner = false;
    }
    if (inner) continue;
    // split each sub-cube once more for accuracy near the inner boundary
    std::size_t sub = 1;
    for (int a = 0; a < n; ++a) sub *= 2;
    for (std::size_t j = 0; j < sub; ++j) {
      std::array<double, 3> l2 = lo;
      for (int a = 0; a < n; ++a)
        if (j & (std::size_t{1} << a)) l2[static_cast<std::size_t>(a)] += 0.125;
      shell += cube_integral(l2, 0.125, n, lambda, kGL8x, kGL8w);
    }
  }
  return shell / (1.0 - std::pow(2.0, lambda - n));
}

std::array<double, 3> signed_coords(const GridSpec& g, std::size_t flat) {
  auto idx = g.unflatten(flat);
  std::array<double, 3> c{};
  for (int a = 0; a < g.dim(); ++a) c[static_cast<std::size_t>(a)] = g.frequency_index(idx[static_cast<std::size_t>(a)]);
  return c;
}

}  // namespace

GridSpec quadrature_grid(int n, const Quadrature& q, int refine) {
  if (q.points < 8 || q.points % 2 != 0) throw InvalidArgument("quadrature.points must be even and >= 8");
  if (!(q.box > 0.0)) throw InvalidArgument("quadrature.box must be positive");
  return make_grid(n, 2 * q.points * (1 << refine), 4.0 * q.box);
}

RVector gaussian_mixture(const GridSpec& grid, std::uint64_t seed, int index, const TrialFamily& fam) {
  std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(index));
  std::uniform_int_distribution<int> ncomp(fam.min_components, fam.max_components);
  std::uniform_real_distribution<double> center(-fam.spread, fam.spread);
  std::uniform_real_distribution<double> width(fam.min_width, fam.max_width);
  std::uniform_real_distribution<double> amp(0.5, 1.5);
  const int d = grid.dim();
  const int m = ncomp(rng);
  std::vector<std::array<double, 3>> cs;
  std::vector<double> ws, as;
  for (int i = 0; i < m; ++i) {
    std::array<double, 3> c{};
    for (int a = 0; a < d; ++a) c[static_cast<std::size_t>(a)] = center(rng);
    cs.push_back(c);
    ws.push_back(width(rng));
    as.push_back(amp(rng));
  }
  const double h = grid.spacing();
  const double box = grid.length() / 4.0;
  RVector f = RVector::Zero(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    auto x = signed_coords(grid, j);
    bool inside = true;
    for (int a = 0; a < d; ++a) {
      x[static_cast<std::size_t>(a)] *= h;
      if (std::abs(x[static_cast<std::size_t>(a)]) > box) inside = false;
    }
    if (!inside) continue;
    double v = 0.0;
    for (int i = 0; i < m; ++i) {
      double r2 = 0.0;
      for (int a = 0; a < d; ++a) {
        double dx = x[static_cast<std::size_t>(a)] - cs[static_cast<std::size_t>(i)][static_cast<std::size_t>(a)];
        r2 += dx * dx;
      }
      v += as[static_cast<std::size_t>(i)] * std::exp(-0.5 * r2 / (ws[static_cast<std::size_t>(i)] * ws[static_cast<std::size_t>(i)]));
    }
    f[static_cast<Eigen::Index>(j)] = v;
  }
  return f;
}

double lp_norm(const GridSpec& grid, const RVector& f, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("lp_norm: p must be >= 1");
  return std::pow(grid.cell_volume() * f.cwiseAbs().array().pow(p).sum(), 1.0 / p);
}

RVector singular_kernel(const GridSpec& grid, double lambda) {
  const int n = grid.dim();
  if (!(lambda >= 0.0 && lambda < n)) throw InvalidArgument("singular_kernel: lambda must lie in [0, n)");
  RVector k(static_cast<Eigen::Index>(grid.size()));
  if (lambda == 0.0) {
    k.setOnes();
    return k;
  }
  const double scale = std::pow(grid.spacing(), -lambda);
  const double c0 = origin_cell(n, lambda);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    auto c = signed_coords(grid, j);
    double linf = 0.0;
    for (int a = 0; a < n; ++a) linf = std::max(linf, std::abs(c[static_cast<std::size_t>(a)]));
    double avg;
    if (linf == 0.0) {
      avg = c0;
    } else {
      std::array<double, 3> lo{};
      for (int a = 0; a < n; ++a) lo[static_cast<std::size_t>(a)] = c[static_cast<std::size_t>(a)] - 0.5;
      avg = linf <= 2.0 ? cube_integral(lo, 1.0, n, lambda, kGL8x, kGL8w)
                        : cube_integral(lo, 1.0, n, lambda, kGL3x, kGL3w);
    }
    k[static_cast<Eigen::Index>(j)] = scale * avg;
  }
  return k;
}

double hls_triple_integral(const GridSpec& grid, const RVector& f1, const RVector& f2, const RVector& f3, double l1,
                           double l2) {
  RVector a = periodic_convolution(grid, singular_kernel(grid, l1), f2);
  RVector b = l2 == 0.0 ? RVector::Constant(f3.size(), grid.cell_volume() * f3.sum())
                        : periodic_convolution(grid, singular_kernel(grid, l2), f3);
  return grid.cell_volume() * (f1.array() * a.array() * b.array()).sum();
}

double hls_pair_integral(const GridSpec& grid, const RVector& f1, const RVector& f2, double l) {
  RVector a = periodic_convolution(grid, singular_kernel(grid, l), f2);
  return grid.cell_volume() * f1.dot(a);
}

std::string HLSCheckSpec::violation() const {
  std::ostringstream os;
  if (n < 1 || n > 3) {
    os << "n=" << n << " must lie in {1,2,3}";
    return os.str();
  }
  for (int i = 0; i < 3; ++i) {
    if (!(p[static_cast<std::size_t>(i)] > 1.0)) {
      os << "p" << i + 1 << "=" << p[static_cast<std::size_t>(i)] << " must exceed 1";
      return os.str();
    }
  }
  if (!(lambda1 > 0.0 && lambda1 < n)) {
    os << "lambda1=" << lambda1 << " must lie in (0, n)";
    return os.str();
  }
  if (!(lambda2 > 0.0 && lambda2 < n)) {
    os << "lambda2=" << lambda2 << " must lie in (0, n)";
    return os.str();
  }
  double s = 1.0 / p[0] + 1.0 / p[1] + 1.0 / p[2] + (lambda1 + lambda2) / n;
  if (std::abs(s - 3.0) > 1e-12) {
    os << "1/p1+1/p2+1/p3+(lambda1+lambda2)/n = " << s << " must equal 3";
    return os.str();
  }
  return {};
}

namespace {

template <class Ratio>
RatioReport ratio_sweep(int trials, Ratio&& ratio) {
  if (trials < 1) throw InvalidArgument("trials must be positive");
  RatioReport rep;
  for (int i = 0; i < trials; ++i) {
    double coarse = ratio(i, 0);
    double fine = ratio(i, 1);
    if (!std::isfinite(coarse) || !std::isfinite(fine)) throw NumericalError("non-finite quadrature ratio");
    rep.ratios.push_back(fine);
    rep.max_ratio = std::max(rep.max_ratio, fine);
    if (fine > 0.0) rep.refinement_change = std::max(rep.refinement_change, std::abs(fine - coarse) / fine);
  }
  return rep;
}

}  // namespace

RatioReport check_generalized_hls(const HLSCheckSpec& spec, int trials) {
  std::string why = spec.violation();
  if (!why.empty()) throw InvalidArgument("generalized HLS: " + why);
  std::array<GridSpec, 2> grids{quadrature_grid(spec.n, spec.quad, 0), quadrature_grid(spec.n, spec.quad, 1)};
  return ratio_sweep(trials, [&](int i, int level) {
    const GridSpec& g = grids[static_cast<std::size_t>(level)];
    RVector f1 = gaussian_mixture(g, spec.family.seed, 3 * i, spec.family);
    RVector f2 = gaussian_mixture(g, spec.family.seed, 3 * i + 1, spec.family);
    RVector f3 = gaussian_mixture(g, spec.family.seed, 3 * i + 2, spec.family);
    double I = hls_triple_integral(g, f1, f2, f3, spec.lambda1, spec.lambda2);
    double den = lp_norm(g, f1, spec.p[0]) * lp_norm(g, f2, spec.p[1]) * lp_norm(g, f3, spec.p[2]);
    return std::abs(I) / den;
  });
}

std::string young_violation(const std::array<double, 5>& p) {
  std::ostringstream os;
  double s = 0.0;
  for (int i = 0; i < 5; ++i) {
    if (!(p[static_cast<std::size_t>(i)] >= 1.0)) {
      os << "p" << i + 1 << "=" << p[static_cast<std::size_t>(i)] << " must be >= 1";
      return os.str();
    }
    s += 1.0 / p[static_cast<std::size_t>(i)];
  }
  if (std::abs(s - 3.0) > 1e-12) {
    os << "sum 1/p_j = " << s << " must equal 3";
    return os.str();
  }
  return {};
}

double young_integral(const GridSpec& grid, const std::array<RVector, 5>& f) {
  RVector a = periodic_convolution(grid, f[3], f[1]);
  RVector b = periodic_convolution(grid, f[4], f[2]);
  return grid.cell_volume() * (f[0].array() * a.array() * b.array()).sum();
}

RatioReport check_generalized_young(const std::array<double, 5>& p, int trials, const TrialFamily& family,
                                    const Quadrature& quad, int n) {
  std::string why = young_violation(p);
  if (!why.empty()) throw InvalidArgument("generalized Young: " + why);
  std::array<GridSpec, 2> grids{quadrature_grid(n, quad, 0), quadrature_grid(n, quad, 1)};
  return ratio_sweep(trials, [&](int i, int level) {
    const GridSpec& g = grids[static_cast<std::size_t>(level)];
    std::array<RVector, 5> f;
    double den = 1.0;
    for (int j = 0; j < 5; ++j) {
      f[static_cast<std::size_t>(j)] = gaussian_mixture(g, family.seed, 5 * i + j, family);
      den *= lp_norm(g, f[static_cast<std::size_t>(j)], p[static_cast<std::size_t>(j)]);
    }
    return std::abs(young_integral(g, f)) / den;
  });
}

std::pair<double, double> hardy_quadratic_check(const Field& f, const RegularizedKernel& k) {
  if (!(f.grid == k.grid)) throw InvalidArgument("hardy_quadratic_check: grid mismatch");
  double num = f.grid.cell_volume() * (k.values.array() * f.values.cwiseAbs2().array()).sum();
  double den = std::pow(sobolev_norm(f, 1.0), 2);
  return {num, den};
}

double hardy_constant(const RegularizedKernel& k) {
  const GridSpec& g = k.grid;
  const auto n = static_cast<Eigen::Index>(g.size());
  if (n > 2048) throw InvalidArgument("hardy_constant: grid too large for a dense eigenproblem");
  CVector vh = fourier_coefficients(Field(g, k.values.cast<cplx>())) / std::sqrt(g.volume());
  RVector k2 = wavenumber_squared(g);
  CMatrix M(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) {
      auto diff = static_cast<Eigen::Index>(g.difference(static_cast<std::size_t>(a), static_cast<std::size_t>(b)));
      M(a, b) = vh[diff] / std::sqrt((1.0 + k2[a]) * (1.0 + k2[b]));
    }
  M = 0.5 * (M + M.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double check_V2phi6(const RegularizedKernel& k, const Field& phi) {
  const GridSpec& g = k.grid;
  if (!(phi.grid == g)) throw InvalidArgument("check_V2phi6: grid mismatch");
  const auto n = static_cast<Eigen::Index>(g.size());
  if (n > 4096) throw InvalidArgument("check_V2phi6: grid too large");
  const double hd = g.cell_volume();
  RVector rho = phi.values.cwiseAbs2();
  RVector v2 = k.values.cwiseAbs2();
  RVector w2 = periodic_convolution(g, v2, rho);
  double squares = 3.0 * hd * (rho.array() * w2.array() * w2.array()).sum();
  Eigen::MatrixXd V(n, n);
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index y = 0; y < n; ++y) V(x, y) = k.values[static_cast<Eigen::Index>(g.difference(static_cast<std::size_t>(x), static_cast<std::size_t>(y)))];
  Eigen::MatrixXd Phi = hd * V * rho.asDiagonal() * V.transpose();
  double tri = 0.0;
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index y = 0; y < n; ++y)
      tri += rho[x] * rho[y] * V(x, y) * V(x, y) * Phi(x, y);
  tri *= hd * hd;
  return k.lambda * k.lambda * (squares + 6.0 * tri);
}

double V2phi6_direct(const RegularizedKernel& k, const Field& phi) {
  const GridSpec& g = k.grid;
  if (g.size() > 128) throw InvalidArgument("V2phi6_direct: grid too large for the triple sum");
  RVector rho = phi.values.cwiseAbs2();
  double acc = 0.0;
  for (std::size_t x = 0; x < g.size(); ++x)
    for (std::size_t y = 0; y < g.size(); ++y)
      for (std::size_t z = 0; z < g.size(); ++z) {
        double v = three_body_value(k, x, y, z);
        acc += v * v * rho[static_cast<Eigen::Index>(x)] * rho[static_cast<Eigen::Index>(y)] * rho[static_cast<Eigen::Index>(z)];
      }
  double hd = g.cell_volume();
  return acc * hd * hd * hd;
}

}  // namespace mflab
