#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mflab/spectral.hpp"

namespace mflab {

/// Capped Coulomb pair kernel vbar(x) = min(1/|x|, 1/alpha) under minimal-image
/// distance, with the three-body coupling lambda carried alongside.
struct RegularizedKernel {
  GridSpec grid;
  double alpha = 0.0;
  double lambda = 1.0;
  RVector values;  // indexed by flat displacement

  double at(std::size_t flat) const { return values[static_cast<Eigen::Index>(flat)]; }
};

/// Smallest admissible cutoff h/2. The kernel at this cutoff is the discrete
/// stand-in for the unregularized Coulomb kernel.
double grid_floor_alpha(const GridSpec& grid);

/// alpha_N = N^{-eta}.
double alpha_for(int N, double eta);

RegularizedKernel build_kernel(const GridSpec& grid, double alpha, double lambda = 1.0);
RegularizedKernel unregularized_kernel(const GridSpec& grid, double lambda = 1.0);

/// lambda (v(x-y)v(x-z) + v(y-z)v(y-x) + v(z-x)v(z-y)) at grid points x, y, z.
double three_body_value(const RegularizedKernel& k, std::size_t x, std::size_t y, std::size_t z);

/// (1/2) int int Vbar(x-y, x-z) rho(y) rho(z) dy dz, evaluated through
/// (lambda/2) [(v*rho)^2 + 2 v*(rho (v*rho))].
RVector hartree_potential(const RegularizedKernel& k, const RVector& rho);
Field hartree_potential(const RegularizedKernel& k, const Field& rho);

/// int int int Vbar rho rho rho = 3 lambda int rho (v*rho)^2.
double three_body_energy(const RegularizedKernel& k, const RVector& rho);

/// Matrix elements T[p,q,r,s,t,u] = int Vbar conj(u_p(x) u_q(y) u_r(z)) u_s(x) u_t(y) u_u(z)
/// in a mode basis. Storage is dense K^6, row-major in (p,q,r,s,t,u).
class InteractionTensor {
 public:
  InteractionTensor() = default;
  InteractionTensor(int K, std::vector<cplx> entries);

  int modes() const { return K_; }
  std::size_t index(int p, int q, int r, int s, int t, int u) const {
    std::size_t k = static_cast<std::size_t>(K_);
    return ((((static_cast<std::size_t>(p) * k + q) * k + r) * k + s) * k + t) * k + u;
  }
  cplx operator()(int p, int q, int r, int s, int t, int u) const { return data_[index(p, q, r, s, t, u)]; }
  const std::vector<cplx>& entries() const { return data_; }

  /// max |T[pqr,stu] - conj(T[stu,pqr])|.
  double hermiticity_residual() const;
  /// max over the 6 simultaneous permutations of |T o sigma - T|.
  double permutation_residual() const;
  /// sum T c^*c^*c^* c c c; equals int Vbar |phi|^6 for phi = sum c_p u_p.
  double contract_sextic(const CVector& c) const;
  /// g_p = (1/2) sum T[p,q,r,s,t,u] conj(c_q c_r) c_s c_t c_u.
  CVector hartree_term(const CVector& c) const;

 private:
  int K_ = 0;
  std::vector<cplx> data_;
};

InteractionTensor interaction_tensor(const RegularizedKernel& k, const ModeBasis& basis);
/// Direct O(n^{3d} K^6) triple-sum assembly, used for cross-validation.
InteractionTensor interaction_tensor_bruteforce(const RegularizedKernel& k, const ModeBasis& basis);

/// Self-describing JSON dumps (complex entries as [re, im]).
std::string kernel_to_json(const RegularizedKernel& k);
std::string tensor_to_json(const InteractionTensor& t);

}  // namespace mflab
