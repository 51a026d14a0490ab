#include "mflab/rates.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mflab/errors.hpp"

namespace mflab {

namespace {

void check_domain(double a) {
  if (!(a >= 0.0)) throw InvalidArgument("a must be nonnegative");
  if (a >= 0.5 && a <= 1.0) {
    std::ostringstream os;
    os << "a=" << a << " lies in [1/2, 1]: paper gives no rate";
    throw InvalidArgument(os.str());
  }
}

}  // namespace

double theoretical_rate(double a) {
  check_domain(a);
  if (a > 1.0) return 1.0;
  return (1.0 + 4.0 * a) / (3.0 + 2.0 * a);
}

double recommended_eta(double a) {
  check_domain(a);
  return a > 1.0 ? 1.0 : 1.25;
}

double RateModel::theorem_rate() const { return theoretical_rate(a); }

RateFit fit_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw InvalidArgument("fit_slope: need at least 3 points");
  std::set<double> ns;
  for (const auto& [n, v] : points) {
    if (!(n > 0.0)) throw InvalidArgument("fit_slope: N must be positive");
    if (!(v > 0.0)) throw InvalidArgument("fit_slope: values must be positive");
    if (!ns.insert(n).second) throw InvalidArgument("fit_slope: N values must be distinct");
  }
  const double m = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (const auto& [n, v] : points) {
    sx += std::log(n);
    sy += std::log(v);
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (const auto& [n, v] : points) {
    double dx = std::log(n) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(v) - my);
  }
  RateFit fit;
  fit.points = points;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (const auto& [n, v] : points) {
    double r = std::log(v) - (fit.intercept + fit.slope * std::log(n));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / m);
  return fit;
}

}  // namespace mflab
