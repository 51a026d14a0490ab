#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "mflab/errors.hpp"

namespace mflab {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;

/// Uniform periodic grid on [0, L)^d with n points per axis.
///
/// Flat indices are row-major with axis 0 slowest. Frequencies along an axis
/// are (2 pi / L) m with m in {-n/2, ..., n/2 - 1}; m = -n/2 is the Nyquist
/// mode.
class GridSpec {
 public:
  GridSpec() = default;

  int dim() const { return d_; }
  int points_per_axis() const { return n_; }
  double length() const { return L_; }
  double spacing() const { return L_ / n_; }
  std::size_t size() const;
  /// Quadrature weight h^d.
  double cell_volume() const;
  /// L^d.
  double volume() const;

  /// Integer frequency of FFT slot i along one axis.
  int frequency_index(int i) const { return i < n_ / 2 ? i : i - n_; }
  double wavenumber(int m) const;

  /// Per-axis slot indices of a flat index (unused axes are 0).
  std::array<int, 3> unflatten(std::size_t flat) const;
  std::size_t flatten(const std::array<int, 3>& idx) const;

  /// Minimal-image Euclidean distance from the origin to grid point `flat`.
  double min_image_radius(std::size_t flat) const;
  /// Flat index of (a - b) mod n per axis.
  std::size_t difference(std::size_t a, std::size_t b) const;
  /// Flat index of -a mod n per axis.
  std::size_t negate(std::size_t a) const;

  bool operator==(const GridSpec& other) const {
    return d_ == other.d_ && n_ == other.n_ && L_ == other.L_;
  }

 private:
  friend GridSpec make_grid(int d, int n, double L);
  int d_ = 1;
  int n_ = 4;
  double L_ = 1.0;
};

/// Validated grid constructor. Rejects d outside {1,2,3}, odd or small n,
/// and non-positive L.
GridSpec make_grid(int d, int n, double L);

/// Complex samples on a grid.
struct Field {
  GridSpec grid;
  CVector values;

  Field() = default;
  Field(GridSpec g, CVector v);
  static Field zeros(const GridSpec& g);
  static Field constant(const GridSpec& g, cplx value);
  /// exp(i k.x) for integer frequency vector m.
  static Field plane_wave(const GridSpec& g, const std::array<int, 3>& m);
};

/// Grid inner product h^d sum conj(f) g.
cplx inner(const Field& f, const Field& g);
double l2_norm(const Field& f);
Field normalized(Field f);

/// |k|^2 for every flat Fourier slot.
RVector wavenumber_squared(const GridSpec& grid);

/// Unitary Fourier coefficients: fhat(k) = <e_k, f> with e_k = exp(ikx)/sqrt(L^d),
/// so that sum |fhat|^2 equals the grid L2 norm squared.
CVector fourier_coefficients(const Field& f);
Field from_fourier(const GridSpec& grid, const CVector& coeffs);

/// (sum_k (1 + |k|^2)^s |fhat(k)|^2)^{1/2}.
double sobolev_norm(const Field& f, double s);

/// Spectral Laplacian (multiplier -|k|^2).
Field apply_laplacian(const Field& f);

/// Multiply Fourier coefficients by an arbitrary per-slot multiplier.
Field apply_fourier_multiplier(const Field& f, const CVector& multiplier);

/// Periodic convolution (k * g)(x) = h^d sum_y k(x - y) g(y) for a real kernel
/// sampled on the same grid (k indexed by the displacement's flat index).
CVector periodic_convolution(const GridSpec& grid, const RVector& kernel,
                             const CVector& g);
RVector periodic_convolution(const GridSpec& grid, const RVector& kernel,
                             const RVector& g);

/// Lowest-|k| plane waves e^{ikx}/sqrt(L^d), Nyquist excluded, ties broken by
/// lexicographic integer frequency.
struct ModeBasis {
  GridSpec grid;
  std::vector<std::array<int, 3>> frequencies;
  /// Kinetic eigenvalues |k_p|^2, nondecreasing.
  RVector eps;

  int size() const { return static_cast<int>(frequencies.size()); }
  Field mode(int p) const;
  /// Grid samples sum_p c_p u_p.
  Field synthesize(const CVector& coeffs) const;
  /// Coefficients <u_p, f>.
  CVector project(const Field& f) const;
};

ModeBasis lowest_modes(const GridSpec& grid, int K);

}  // namespace mflab
