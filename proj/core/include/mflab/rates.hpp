#pragma once

#include <utility>
#include <vector>

namespace mflab {

/// Predicted exponents for Sobolev surplus a and regularization exponent eta.
struct RateModel {
  double a = 0.0;
  double eta = 1.25;

  /// (1+4a)/(3+2a) for a < 1/2, 1 for a > 1.
  double theorem_rate() const;
  /// 2 - eta
  double proposition_rate() const { return 2.0 - eta; }
  /// 1 - eta(1+2a)
  double corollary_rate() const { return 1.0 - eta * (1.0 + 2.0 * a); }
  /// (1 - eta(1+2a)) / 2
  double hartree_gap_rate() const { return 0.5 * corollary_rate(); }
};

/// Throws InvalidArgument for a < 0 and for a in [1/2, 1], where no rate is given.
double theoretical_rate(double a);
/// 5/4 for 0 <= a < 1/2, 1 for a > 1.
double recommended_eta(double a);

struct RateFit {
  std::vector<std::pair<double, double>> points;
  double slope = 0.0;
  double intercept = 0.0;
  /// root-mean-square residual in log coordinates
  double residual = 0.0;
};

/// Least squares of log(value) against log(N). Needs >= 3 points with distinct
/// N and positive values.
RateFit fit_slope(const std::vector<std::pair<double, double>>& points);

}  // namespace mflab
