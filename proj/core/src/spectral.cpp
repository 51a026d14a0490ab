#include "mflab/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <utility>

namespace mflab {

namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per (d, n) under a lock and live for the
// lifetime of the process.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

PlanPair plans_for(int d, int n) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, PlanPair> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find({d, n});
  if (it != cache.end()) return it->second;

  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(n);
  std::vector<int> dims(static_cast<std::size_t>(d), n);
  auto* buf = fftw_alloc_complex(total);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  p.forward = fftw_plan_dft(d, dims.data(), buf, buf, FFTW_FORWARD, flags);
  p.backward = fftw_plan_dft(d, dims.data(), buf, buf, FFTW_BACKWARD, flags);
  fftw_free(buf);
  cache.emplace(std::make_pair(d, n), p);
  return p;
}

fftw_complex* as_fftw(CVector& v) { return reinterpret_cast<fftw_complex*>(v.data()); }

// Unnormalized transforms, in place.
void fft_forward(const GridSpec& g, CVector& v) {
  auto p = plans_for(g.dim(), g.points_per_axis());
  fftw_execute_dft(p.forward, as_fftw(v), as_fftw(v));
}

void fft_backward(const GridSpec& g, CVector& v) {
  auto p = plans_for(g.dim(), g.points_per_axis());
  fftw_execute_dft(p.backward, as_fftw(v), as_fftw(v));
}

void check_same_grid(const Field& f, const Field& g) {
  if (!(f.grid == g.grid)) throw InvalidArgument("fields live on different grids");
}

}  // namespace

GridSpec make_grid(int d, int n, double L) {
  if (d < 1 || d > 3) throw InvalidArgument("grid.d must be 1, 2 or 3");
  if (n % 2 != 0) throw InvalidArgument("grid.n must be even (got " + std::to_string(n) + ")");
  if (n < 4) throw InvalidArgument("grid.n must be at least 4");
  if (!(L > 0.0) || !std::isfinite(L)) throw InvalidArgument("grid.L must be positive");
  GridSpec g;
  g.d_ = d;
  g.n_ = n;
  g.L_ = L;
  return g;
}

std::size_t GridSpec::size() const {
  std::size_t total = 1;
  for (int a = 0; a < d_; ++a) total *= static_cast<std::size_t>(n_);
  return total;
}

double GridSpec::cell_volume() const { return std::pow(spacing(), d_); }
double GridSpec::volume() const { return std::pow(L_, d_); }

double GridSpec::wavenumber(int m) const { return 2.0 * std::numbers::pi * m / L_; }

std::array<int, 3> GridSpec::unflatten(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = d_ - 1; a >= 0; --a) {
    idx[static_cast<std::size_t>(a)] = static_cast<int>(flat % static_cast<std::size_t>(n_));
    flat /= static_cast<std::size_t>(n_);
  }
  return idx;
}

std::size_t GridSpec::flatten(const std::array<int, 3>& idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < d_; ++a) {
    int i = ((idx[static_cast<std::size_t>(a)] % n_) + n_) % n_;
    flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
  }
  return flat;
}

double GridSpec::min_image_radius(std::size_t flat) const {
  auto idx = unflatten(flat);
  double r2 = 0.0;
  for (int a = 0; a < d_; ++a) {
    int i = idx[static_cast<std::size_t>(a)];
    int m = std::min(i, n_ - i);
    double x = m * spacing();
    r2 += x * x;
  }
  return std::sqrt(r2);
}

std::size_t GridSpec::difference(std::size_t a, std::size_t b) const {
  auto ia = unflatten(a);
  auto ib = unflatten(b);
  return flatten({ia[0] - ib[0], ia[1] - ib[1], ia[2] - ib[2]});
}

std::size_t GridSpec::negate(std::size_t a) const {
  auto ia = unflatten(a);
  return flatten({-ia[0], -ia[1], -ia[2]});
}

Field::Field(GridSpec g, CVector v) : grid(std::move(g)), values(std::move(v)) {
  if (static_cast<std::size_t>(values.size()) != grid.size()) {
    throw InvalidArgument("field length does not match grid size");
  }
}

Field Field::zeros(const GridSpec& g) { return Field(g, CVector::Zero(static_cast<Eigen::Index>(g.size()))); }

Field Field::constant(const GridSpec& g, cplx value) {
  return Field(g, CVector::Constant(static_cast<Eigen::Index>(g.size()), value));
}

Field Field::plane_wave(const GridSpec& g, const std::array<int, 3>& m) {
  CVector v(static_cast<Eigen::Index>(g.size()));
  const double h = g.spacing();
  for (std::size_t j = 0; j < g.size(); ++j) {
    auto idx = g.unflatten(j);
    double phase = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      auto ua = static_cast<std::size_t>(a);
      phase += g.wavenumber(m[ua]) * idx[ua] * h;
    }
    v[static_cast<Eigen::Index>(j)] = std::polar(1.0, phase);
  }
  return Field(g, std::move(v));
}

cplx inner(const Field& f, const Field& g) {
  check_same_grid(f, g);
  return f.grid.cell_volume() * f.values.dot(g.values);
}

double l2_norm(const Field& f) { return std::sqrt(f.grid.cell_volume() * f.values.squaredNorm()); }

Field normalized(Field f) {
  double nrm = l2_norm(f);
  if (!(nrm > 0.0)) throw InvalidArgument("cannot normalize a zero field");
  f.values /= nrm;
  return f;
}

RVector wavenumber_squared(const GridSpec& grid) {
  RVector k2(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    auto idx = grid.unflatten(j);
    double s = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      double k = grid.wavenumber(grid.frequency_index(idx[static_cast<std::size_t>(a)]));
      s += k * k;
    }
    k2[static_cast<Eigen::Index>(j)] = s;
  }
  return k2;
}

CVector fourier_coefficients(const Field& f) {
  CVector v = f.values;
  fft_forward(f.grid, v);
  v *= f.grid.cell_volume() / std::sqrt(f.grid.volume());
  return v;
}

Field from_fourier(const GridSpec& grid, const CVector& coeffs) {
  if (static_cast<std::size_t>(coeffs.size()) != grid.size()) {
    throw InvalidArgument("coefficient vector length does not match grid");
  }
  CVector v = coeffs;
  fft_backward(grid, v);
  // inverse of fhat = (h^d / sqrt(L^d)) F f with F^{-1} = F^* / n^d
  v *= std::sqrt(grid.volume()) / (grid.cell_volume() * static_cast<double>(grid.size()));
  return Field(grid, std::move(v));
}

double sobolev_norm(const Field& f, double s) {
  if (s < 0.0) throw InvalidArgument("sobolev_norm: s must be nonnegative");
  CVector fh = fourier_coefficients(f);
  RVector k2 = wavenumber_squared(f.grid);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < fh.size(); ++j) {
    acc += std::pow(1.0 + k2[j], s) * std::norm(fh[j]);
  }
  return std::sqrt(acc);
}

Field apply_fourier_multiplier(const Field& f, const CVector& multiplier) {
  CVector v = f.values;
  fft_forward(f.grid, v);
  v.array() *= multiplier.array();
  fft_backward(f.grid, v);
  v /= static_cast<double>(f.grid.size());
  return Field(f.grid, std::move(v));
}

Field apply_laplacian(const Field& f) {
  CVector mult = (-wavenumber_squared(f.grid)).cast<cplx>();
  return apply_fourier_multiplier(f, mult);
}

CVector periodic_convolution(const GridSpec& grid, const RVector& kernel, const CVector& g) {
  if (static_cast<std::size_t>(kernel.size()) != grid.size() ||
      static_cast<std::size_t>(g.size()) != grid.size()) {
    throw InvalidArgument("periodic_convolution: length mismatch");
  }
  CVector kh = kernel.cast<cplx>();
  CVector gh = g;
  fft_forward(grid, kh);
  fft_forward(grid, gh);
  gh.array() *= kh.array();
  fft_backward(grid, gh);
  gh *= grid.cell_volume() / static_cast<double>(grid.size());
  return gh;
}

RVector periodic_convolution(const GridSpec& grid, const RVector& kernel, const RVector& g) {
  return periodic_convolution(grid, kernel, CVector(g.cast<cplx>())).real();
}

Field ModeBasis::mode(int p) const {
  Field f = Field::plane_wave(grid, frequencies.at(static_cast<std::size_t>(p)));
  f.values /= std::sqrt(grid.volume());
  return f;
}

Field ModeBasis::synthesize(const CVector& coeffs) const {
  if (coeffs.size() != size()) throw InvalidArgument("coefficient count does not match mode count");
  Field out = Field::zeros(grid);
  for (int p = 0; p < size(); ++p) out.values += coeffs[p] * mode(p).values;
  return out;
}

CVector ModeBasis::project(const Field& f) const {
  CVector c(size());
  for (int p = 0; p < size(); ++p) c[p] = inner(mode(p), f);
  return c;
}

ModeBasis lowest_modes(const GridSpec& grid, int K) {
  const int n = grid.points_per_axis();
  const int d = grid.dim();
  std::size_t available = 1;
  for (int a = 0; a < d; ++a) available *= static_cast<std::size_t>(n - 1);
  if (K < 1 || static_cast<std::size_t>(K) > available) {
    std::ostringstream os;
    os << "lowest_modes: K=" << K << " outside [1, " << available << "] (Nyquist modes excluded)";
    throw InvalidArgument(os.str());
  }
  std::vector<std::array<int, 3>> all;
  const int lo = -n / 2 + 1;
  const int hi = n / 2 - 1;
  for (int m0 = lo; m0 <= hi; ++m0) {
    for (int m1 = (d > 1 ? lo : 0); m1 <= (d > 1 ? hi : 0); ++m1) {
      for (int m2 = (d > 2 ? lo : 0); m2 <= (d > 2 ? hi : 0); ++m2) {
        all.push_back({m0, m1, m2});
      }
    }
  }
  auto norm2 = [](const std::array<int, 3>& m) { return m[0] * m[0] + m[1] * m[1] + m[2] * m[2]; };
  std::stable_sort(all.begin(), all.end(), [&](const auto& a, const auto& b) {
    int na = norm2(a);
    int nb = norm2(b);
    if (na != nb) return na < nb;
    return a < b;
  });
  ModeBasis basis;
  basis.grid = grid;
  basis.frequencies.assign(all.begin(), all.begin() + K);
  basis.eps.resize(K);
  const double unit = grid.wavenumber(1);
  for (int p = 0; p < K; ++p) basis.eps[p] = unit * unit * norm2(basis.frequencies[static_cast<std::size_t>(p)]);
  return basis;
}

}  // namespace mflab
