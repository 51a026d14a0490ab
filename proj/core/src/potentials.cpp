#include "mflab/potentials.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace mflab {

double grid_floor_alpha(const GridSpec& grid) { return grid.spacing() / 2.0; }

double alpha_for(int N, double eta) {
  if (N < 1) throw InvalidArgument("alpha_for: N must be positive");
  return std::pow(static_cast<double>(N), -eta);
}

RegularizedKernel build_kernel(const GridSpec& grid, double alpha, double lambda) {
  const double floor = grid_floor_alpha(grid);
  // relative slack so that alpha = h/2 computed elsewhere is accepted
  if (!(alpha >= floor * (1.0 - 1e-12))) {
    std::ostringstream os;
    os << "potential.alpha=" << alpha << " is below the grid floor h/2=" << floor;
    throw InvalidArgument(os.str());
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InvalidArgument("potential.lambda must be nonnegative");
  RegularizedKernel k;
  k.grid = grid;
  k.alpha = alpha;
  k.lambda = lambda;
  k.values.resize(static_cast<Eigen::Index>(grid.size()));
  const double cap = 1.0 / alpha;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double r = grid.min_image_radius(j);
    k.values[static_cast<Eigen::Index>(j)] = r > 0.0 ? std::min(1.0 / r, cap) : cap;
  }
  return k;
}

RegularizedKernel unregularized_kernel(const GridSpec& grid, double lambda) {
  return build_kernel(grid, grid_floor_alpha(grid), lambda);
}

double three_body_value(const RegularizedKernel& k, std::size_t x, std::size_t y, std::size_t z) {
  const auto& g = k.grid;
  double vxy = k.at(g.difference(x, y));
  double vxz = k.at(g.difference(x, z));
  double vyz = k.at(g.difference(y, z));
  return k.lambda * (vxy * vxz + vyz * vxy + vxz * vyz);
}

RVector hartree_potential(const RegularizedKernel& k, const RVector& rho) {
  if (static_cast<std::size_t>(rho.size()) != k.grid.size()) {
    throw InvalidArgument("hartree_potential: density length does not match grid");
  }
  if (rho.size() > 0 && rho.minCoeff() < -1e-12) {
    throw InvalidArgument("hartree_potential: density has negative entries");
  }
  RVector w = periodic_convolution(k.grid, k.values, rho);
  RVector inner_term = periodic_convolution(k.grid, k.values, RVector(rho.cwiseProduct(w)));
  return 0.5 * k.lambda * (w.cwiseProduct(w) + 2.0 * inner_term);
}

Field hartree_potential(const RegularizedKernel& k, const Field& rho) {
  RVector q = hartree_potential(k, RVector(rho.values.real()));
  return Field(rho.grid, q.cast<cplx>());
}

double three_body_energy(const RegularizedKernel& k, const RVector& rho) {
  RVector w = periodic_convolution(k.grid, k.values, rho);
  return 3.0 * k.lambda * k.grid.cell_volume() * (rho.array() * w.array() * w.array()).sum();
}

InteractionTensor::InteractionTensor(int K, std::vector<cplx> entries) : K_(K), data_(std::move(entries)) {
  std::size_t expect = 1;
  for (int i = 0; i < 6; ++i) expect *= static_cast<std::size_t>(K);
  if (K < 1 || data_.size() != expect) throw InvalidArgument("InteractionTensor: entry count must be K^6");
}

double InteractionTensor::hermiticity_residual() const {
  double worst = 0.0;
  const int K = K_;
  for (int p = 0; p < K; ++p)
    for (int q = 0; q < K; ++q)
      for (int r = 0; r < K; ++r)
        for (int s = 0; s < K; ++s)
          for (int t = 0; t < K; ++t)
            for (int u = 0; u < K; ++u)
              worst = std::max(worst, std::abs((*this)(p, q, r, s, t, u) - std::conj((*this)(s, t, u, p, q, r))));
  return worst;
}

double InteractionTensor::permutation_residual() const {
  static constexpr std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  double worst = 0.0;
  const int K = K_;
  for (int p = 0; p < K; ++p)
    for (int q = 0; q < K; ++q)
      for (int r = 0; r < K; ++r)
        for (int s = 0; s < K; ++s)
          for (int t = 0; t < K; ++t)
            for (int u = 0; u < K; ++u) {
              std::array<int, 3> a{p, q, r};
              std::array<int, 3> b{s, t, u};
              cplx ref = (*this)(p, q, r, s, t, u);
              for (const auto& sg : perms) {
                cplx v = (*this)(a[sg[0]], a[sg[1]], a[sg[2]], b[sg[0]], b[sg[1]], b[sg[2]]);
                worst = std::max(worst, std::abs(v - ref));
              }
            }
  return worst;
}

double InteractionTensor::contract_sextic(const CVector& c) const {
  const int K = K_;
  cplx acc = 0.0;
  for (int p = 0; p < K; ++p)
    for (int q = 0; q < K; ++q)
      for (int r = 0; r < K; ++r) {
        cplx left = std::conj(c[p] * c[q] * c[r]);
        for (int s = 0; s < K; ++s)
          for (int t = 0; t < K; ++t)
            for (int u = 0; u < K; ++u) acc += (*this)(p, q, r, s, t, u) * left * c[s] * c[t] * c[u];
      }
  return acc.real();
}

CVector InteractionTensor::hartree_term(const CVector& c) const {
  const int K = K_;
  CVector g = CVector::Zero(K);
  for (int p = 0; p < K; ++p) {
    cplx acc = 0.0;
    for (int q = 0; q < K; ++q)
      for (int r = 0; r < K; ++r) {
        cplx left = std::conj(c[q] * c[r]);
        for (int s = 0; s < K; ++s)
          for (int t = 0; t < K; ++t)
            for (int u = 0; u < K; ++u) acc += (*this)(p, q, r, s, t, u) * left * c[s] * c[t] * c[u];
      }
    g[p] = 0.5 * acc;
  }
  return g;
}

namespace {

bool complex_less(const cplx& a, const cplx& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

// Sum of three values in a canonical order, so that every permutation of the
// same three inputs yields a bit-identical result.
cplx canonical_sum(cplx a, cplx b, cplx c) {
  std::array<cplx, 3> v{a, b, c};
  std::sort(v.begin(), v.end(), complex_less);
  return (v[0] + v[1]) + v[2];
}

}  // namespace

InteractionTensor interaction_tensor(const RegularizedKernel& k, const ModeBasis& basis) {
  if (!(k.grid == basis.grid)) throw InvalidArgument("interaction_tensor: kernel and basis grids differ");
  const int K = basis.size();
  const auto npts = static_cast<Eigen::Index>(k.grid.size());
  const double w = k.grid.cell_volume();

  std::vector<Field> modes;
  for (int p = 0; p < K; ++p) modes.push_back(basis.mode(p));

  // pair densities conj(u_p) u_s and their kernel convolutions
  const std::size_t KK = static_cast<std::size_t>(K) * K;
  std::vector<CVector> P(KK), W(KK);
  for (int p = 0; p < K; ++p)
    for (int s = 0; s < K; ++s) {
      std::size_t a = static_cast<std::size_t>(p) * K + s;
      P[a] = modes[p].values.conjugate().cwiseProduct(modes[s].values);
      W[a] = periodic_convolution(k.grid, k.values, P[a]);
    }

  // A[a][b][c] = h^d sum_x P_a (W_b W_c); symmetric in (b, c) bit for bit.
  auto A = [&](std::size_t a, std::size_t b, std::size_t c) {
    cplx acc = 0.0;
    for (Eigen::Index x = 0; x < npts; ++x) acc += P[a][x] * (W[b][x] * W[c][x]);
    return w * acc;
  };

  std::size_t total = KK * KK * KK;
  std::vector<cplx> data(total);
  std::vector<char> done(total, 0);
  InteractionTensor shape(K, std::vector<cplx>(total));
  for (int p = 0; p < K; ++p)
    for (int q = 0; q < K; ++q)
      for (int r = 0; r < K; ++r)
        for (int s = 0; s < K; ++s)
          for (int t = 0; t < K; ++t)
            for (int u = 0; u < K; ++u) {
              std::size_t idx = shape.index(p, q, r, s, t, u);
              if (done[idx]) continue;
              std::size_t ps = static_cast<std::size_t>(p) * K + s;
              std::size_t qt = static_cast<std::size_t>(q) * K + t;
              std::size_t ru = static_cast<std::size_t>(r) * K + u;
              cplx val = k.lambda * canonical_sum(A(ps, qt, ru), A(qt, ps, ru), A(ru, ps, qt));
              data[idx] = val;
              done[idx] = 1;
              std::size_t adj = shape.index(s, t, u, p, q, r);
              if (!done[adj]) {
                data[adj] = std::conj(val);
                done[adj] = 1;
              }
            }
  return InteractionTensor(K, std::move(data));
}

InteractionTensor interaction_tensor_bruteforce(const RegularizedKernel& k, const ModeBasis& basis) {
  if (!(k.grid == basis.grid)) throw InvalidArgument("interaction_tensor: kernel and basis grids differ");
  const int K = basis.size();
  const std::size_t n = k.grid.size();
  const double w = k.grid.cell_volume();
  std::vector<Field> modes;
  for (int p = 0; p < K; ++p) modes.push_back(basis.mode(p));

  std::size_t total = 1;
  for (int i = 0; i < 6; ++i) total *= static_cast<std::size_t>(K);
  InteractionTensor shape(K, std::vector<cplx>(total));
  std::vector<cplx> data(total, cplx(0.0));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t z = 0; z < n; ++z) {
        double V = three_body_value(k, x, y, z);
        auto xi = static_cast<Eigen::Index>(x);
        auto yi = static_cast<Eigen::Index>(y);
        auto zi = static_cast<Eigen::Index>(z);
        for (int p = 0; p < K; ++p)
          for (int q = 0; q < K; ++q)
            for (int r = 0; r < K; ++r) {
              cplx left = V * std::conj(modes[p].values[xi] * modes[q].values[yi] * modes[r].values[zi]);
              for (int s = 0; s < K; ++s)
                for (int t = 0; t < K; ++t)
                  for (int u = 0; u < K; ++u)
                    data[shape.index(p, q, r, s, t, u)] +=
                        left * modes[s].values[xi] * modes[t].values[yi] * modes[u].values[zi];
            }
      }
  for (auto& v : data) v *= w * w * w;
  return InteractionTensor(K, std::move(data));
}

std::string kernel_to_json(const RegularizedKernel& k) {
  nlohmann::json j;
  j["kind"] = "regularized_kernel";
  j["grid"] = {{"d", k.grid.dim()}, {"n", k.grid.points_per_axis()}, {"L", k.grid.length()}};
  j["alpha"] = k.alpha;
  j["lambda"] = k.lambda;
  std::vector<double> vals(k.values.data(), k.values.data() + k.values.size());
  j["values"] = vals;
  return j.dump();
}

std::string tensor_to_json(const InteractionTensor& t) {
  nlohmann::json j;
  j["kind"] = "interaction_tensor";
  j["K"] = t.modes();
  j["layout"] = "row-major p,q,r,s,t,u";
  auto arr = nlohmann::json::array();
  for (const auto& v : t.entries()) arr.push_back({v.real(), v.imag()});
  j["entries"] = std::move(arr);
  return j.dump();
}

}  // namespace mflab
