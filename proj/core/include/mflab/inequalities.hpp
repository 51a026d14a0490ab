#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mflab/potentials.hpp"
#include "mflab/spectral.hpp"

namespace mflab {

/// Seeded mixtures of Gaussians with centers in [-spread, spread]^n.
struct TrialFamily {
  std::uint64_t seed = 1;
  int min_components = 1;
  int max_components = 3;
  double spread = 1.5;
  double min_width = 0.4;
  double max_width = 1.0;
};

/// Box [-box, box]^n sampled with `points` per axis; refinement doubles it.
struct Quadrature {
  int points = 256;
  double box = 6.0;
};

struct HLSCheckSpec {
  int n = 1;
  std::array<double, 3> p{2.0, 2.0, 2.0};
  double lambda1 = 0.75;
  double lambda2 = 0.75;
  TrialFamily family;
  Quadrature quad;

  /// Empty when valid, otherwise the violated constraint.
  std::string violation() const;
  bool valid() const { return violation().empty(); }
};

struct RatioReport {
  std::vector<double> ratios;
  double max_ratio = 0.0;
  /// max relative change of a trial's ratio when the resolution is doubled
  double refinement_change = 0.0;
};

/// Sampled trial function on a quadrature grid.
RVector gaussian_mixture(const GridSpec& grid, std::uint64_t seed, int index, const TrialFamily& family);
double lp_norm(const GridSpec& grid, const RVector& f, double p);

/// Cell averages of |x|^{-lambda}; the origin cell uses the exact self-similar value.
RVector singular_kernel(const GridSpec& grid, double lambda);

/// int int int f1(x) f2(y) f3(z) |x-y|^{-l1} |x-z|^{-l2}; l2 = 0 allowed.
double hls_triple_integral(const GridSpec& grid, const RVector& f1, const RVector& f2, const RVector& f3, double l1,
                           double l2);
/// int int f1(x) f2(y) |x-y|^{-l}.
double hls_pair_integral(const GridSpec& grid, const RVector& f1, const RVector& f2, double l);

/// Grid of side 4*box so that min-image distances equal true distances on the support.
GridSpec quadrature_grid(int n, const Quadrature& q, int refine = 0);

/// Throws InvalidArgument naming the violated constraint.
RatioReport check_generalized_hls(const HLSCheckSpec& spec, int trials);

/// sum 1/p_j = 3, every p_j >= 1. Empty when valid.
std::string young_violation(const std::array<double, 5>& p);
/// int f1(x) f2(y) f3(z) f4(x-y) f5(x-z).
double young_integral(const GridSpec& grid, const std::array<RVector, 5>& f);
RatioReport check_generalized_young(const std::array<double, 5>& p, int trials, const TrialFamily& family = {},
                                    const Quadrature& quad = {}, int n = 1);

/// (<f, vbar f>, <f, (1 - Lap) f>), vbar the capped Coulomb kernel centred at the origin.
std::pair<double, double> hardy_quadratic_check(const Field& f, const RegularizedKernel& k);
/// sup_f <f, vbar f> / <f, (1 - Lap) f> over grid functions (generalized eigenvalue).
double hardy_constant(const RegularizedKernel& k);

/// int int int |Vbar(x-y, x-z)|^2 rho(x) rho(y) rho(z) through convolution factorization.
double check_V2phi6(const RegularizedKernel& k, const Field& phi);
/// Direct triple sum, small grids only.
double V2phi6_direct(const RegularizedKernel& k, const Field& phi);

}  // namespace mflab
